#include "kacsim/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "kacsim/geometry.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace kacsim {

namespace {

ExperimentKind parse_kind(const std::string& s) {
    if (s == "simulate") return ExperimentKind::Simulate;
    if (s == "lln") return ExperimentKind::Lln;
    if (s == "chaos") return ExperimentKind::Chaos;
    if (s == "contraction") return ExperimentKind::Contraction;
    if (s == "mehler") return ExperimentKind::Mehler;
    if (s == "battery") return ExperimentKind::Battery;
    throw ConfigError("experiment.kind: unknown kind '" + s + "'");
}

const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::Lln: return "lln";
        case ExperimentKind::Chaos: return "chaos";
        case ExperimentKind::Contraction: return "contraction";
        case ExperimentKind::Mehler: return "mehler";
        case ExperimentKind::Battery: return "battery";
    }
    return "?";
}

KernelSpec parse_kernel(const Config& cfg) {
    const std::string fam = cfg.get_string("kernel", "family");
    const int d = static_cast<int>(cfg.get_int("kernel", "d", 3));
    if (d < 2) throw ConfigError("kernel.d: must be >= 2");
    const double b_def = 1.0 / sphere_area(d);
    if (fam == "maxwell")
        return KernelSpec::maxwell_grad_cutoff(d, cfg.get_double("kernel", "b_const", b_def));
    if (fam == "hard_sphere")
        return KernelSpec::hard_sphere(d, cfg.get_double("kernel", "b_const", b_def));
    if (fam == "power_law")
        return KernelSpec::power_law(d, static_cast<int>(cfg.get_int("kernel", "gamma", 0)),
                                     cfg.get_double("kernel", "nu"),
                                     cfg.get_double("kernel", "eps_cut"),
                                     cfg.get_double("kernel", "c_b", 1.0));
    throw ConfigError("kernel.family: unknown family '" + fam + "'");
}

InitialDataSpec parse_initial(const Config& cfg, const std::string& section) {
    InitialDataSpec init;
    init.d = static_cast<int>(cfg.get_int(section, "d", 3));
    if (init.d < 1) throw ConfigError(section + ".d: must be >= 1");
    const std::string law = cfg.get_string(section, "law", "gaussian");
    if (law == "gaussian") {
        init.base.law = BaseLaw::Gaussian;
        init.base.temperature = cfg.get_double(section, "temperature", 1.0);
        if (cfg.has(section, "mean")) init.base.mean = cfg.get_list(section, "mean");
        if (!init.base.mean.empty() && static_cast<int>(init.base.mean.size()) != init.d)
            throw ConfigError(section + ".mean: length must equal d");
        if (!(init.base.temperature > 0.0))
            throw ConfigError(section + ".temperature: must be positive");
    } else if (law == "uniform_ball") {
        init.base.law = BaseLaw::UniformBall;
        init.base.radius = cfg.get_double(section, "radius", 1.0);
        if (!(init.base.radius > 0.0))
            throw ConfigError(section + ".radius: must be positive");
    } else if (law == "two_point") {
        init.base.law = BaseLaw::TwoPoint;
        init.base.point_a = cfg.get_list(section, "point_a");
        init.base.point_b = cfg.get_list(section, "point_b");
        if (static_cast<int>(init.base.point_a.size()) != init.d ||
            static_cast<int>(init.base.point_b.size()) != init.d)
            throw ConfigError(section + ".point_a/point_b: length must equal d");
    } else if (law == "samples") {
        init.base.law = BaseLaw::Samples;
        const std::string path = cfg.get_string(section, "sample_file");
        std::ifstream in(path);
        if (!in) throw ConfigError(section + ".sample_file: cannot open '" + path + "'");
        double x;
        while (in >> x) init.base.samples.push_back(x);
        if (init.base.samples.empty() || init.base.samples.size() % init.d != 0)
            throw ConfigError(section + ".sample_file: size not a multiple of d");
    } else {
        throw ConfigError(section + ".law: unknown law '" + law + "'");
    }
    const std::string mode = cfg.get_string(section, "mode", "tensor");
    if (mode == "tensor") init.mode = InitMode::Tensor;
    else if (mode == "kac_sphere") init.mode = InitMode::KacSphere;
    else if (mode == "conditioned") init.mode = InitMode::ConditionedTensor;
    else throw ConfigError(section + ".mode: unknown mode '" + mode + "'");
    init.energy = cfg.get_double(section, "energy", 1.0);
    init.base.sub_gaussian = cfg.get_bool(section, "sub_gaussian", true);
    init.mcmc.burn_in = static_cast<int>(cfg.get_int(section, "mcmc_burn_in", 80));
    init.mcmc.steps_per_particle =
        static_cast<int>(cfg.get_int(section, "mcmc_steps_per_particle", 120));
    init.mcmc.step_angle = cfg.get_double(section, "mcmc_step_angle", 0.9);
    return init;
}

std::vector<std::size_t> parse_n_grid(const Config& cfg) {
    auto raw = cfg.get_list("grid", "n");
    std::vector<std::size_t> out;
    for (double x : raw) {
        if (x < 1.0 || x != std::floor(x)) throw ConfigError("grid.n: entries must be positive integers");
        out.push_back(static_cast<std::size_t>(x));
    }
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from(const Config& cfg) {
    ExperimentConfig ec;
    ec.kind = parse_kind(cfg.get_string("experiment", "kind"));
    if (!cfg.has("experiment", "seed"))
        throw ConfigError("experiment.seed: missing (wall-clock seeding is not supported)");
    ec.seed = static_cast<std::uint64_t>(cfg.get_int("experiment", "seed"));
    ec.output_dir = cfg.get_string("experiment", "output_dir", "");

    const bool needs_kernel = ec.kind == ExperimentKind::Simulate ||
                              ec.kind == ExperimentKind::Chaos ||
                              ec.kind == ExperimentKind::Contraction;
    if (needs_kernel) ec.kernel = parse_kernel(cfg);
    if (ec.kind != ExperimentKind::Battery && ec.kind != ExperimentKind::Mehler) {
        ec.initial = parse_initial(cfg, "initial");
        if (needs_kernel && ec.initial.d != ec.kernel.d)
            throw ConfigError("initial.d: must match kernel.d");
    }
    if (ec.kind == ExperimentKind::Contraction) {
        ec.initial_g = parse_initial(cfg, "initial_g");
        if (ec.initial_g.d != ec.kernel.d)
            throw ConfigError("initial_g.d: must match kernel.d");
    }

    if (cfg.has("grid", "n")) ec.n_grid = parse_n_grid(cfg);
    if (cfg.has("grid", "times")) {
        ec.times = cfg.get_list("grid", "times");
        if (!std::is_sorted(ec.times.begin(), ec.times.end()) || ec.times.front() < 0.0)
            throw ConfigError("grid.times: must be nonnegative and increasing");
    }
    ec.replicas = static_cast<int>(cfg.get_int("grid", "replicas", 2));
    if (ec.replicas < 1) throw ConfigError("grid.replicas: must be >= 1");

    switch (ec.kind) {
        case ExperimentKind::Simulate:
        case ExperimentKind::Chaos:
            if (ec.n_grid.empty()) throw ConfigError("grid.n: missing");
            if (ec.times.empty()) throw ConfigError("grid.times: missing");
            break;
        case ExperimentKind::Lln:
        case ExperimentKind::Mehler:
            if (ec.kind == ExperimentKind::Lln && ec.n_grid.empty())
                throw ConfigError("grid.n: missing");
            break;
        case ExperimentKind::Contraction:
            if (ec.times.empty()) throw ConfigError("grid.times: missing");
            break;
        case ExperimentKind::Battery:
            break;
    }

    const std::string dist = cfg.get_string("metric", "distance", "w1");
    if (dist == "w1") ec.distance = DistanceKind::W1;
    else if (dist == "w2sq") ec.distance = DistanceKind::W2Squared;
    else if (dist == "sobolev") ec.distance = DistanceKind::SobolevNegSquared;
    else throw ConfigError("metric.distance: unknown distance '" + dist + "'");
    ec.wn.s = cfg.get_double("metric", "s", 0.75);
    ec.wn.ref_multiple = static_cast<std::size_t>(cfg.get_int("metric", "ref_multiple", 50));
    ec.wn.quad.radial_panels =
        static_cast<int>(cfg.get_int("metric", "radial_panels", ec.wn.quad.radial_panels));
    ec.wn.quad.gl_order = static_cast<int>(cfg.get_int("metric", "gl_order", ec.wn.quad.gl_order));
    ec.wn.quad.n_directions =
        static_cast<int>(cfg.get_int("metric", "directions", ec.wn.quad.n_directions));
    ec.wn.quad.r_max = cfg.get_double("metric", "r_max", ec.wn.quad.r_max);

    if (cfg.has("chaos", "ell")) {
        ec.ells.clear();
        for (double x : cfg.get_list("chaos", "ell"))
            ec.ells.push_back(static_cast<int>(x));
    }
    ec.n_ref = static_cast<std::size_t>(cfg.get_int("chaos", "n_ref", 10000));
    ec.ref_replicas = static_cast<int>(cfg.get_int("chaos", "ref_replicas", 2));
    ec.bootstrap = static_cast<int>(cfg.get_int("chaos", "bootstrap", 200));
    const std::string dn = cfg.get_string("chaos", "dictionary_norm", "lipschitz");
    if (dn == "lipschitz") ec.dictionary_norm = NormKind::Lipschitz;
    else if (dn == "fourier") ec.dictionary_norm = NormKind::FourierF;
    else if (dn == "sup") ec.dictionary_norm = NormKind::Sup;
    else throw ConfigError("chaos.dictionary_norm: unknown norm '" + dn + "'");

    if (ec.kind == ExperimentKind::Contraction) {
        ec.n_ref = static_cast<std::size_t>(cfg.get_int("contraction", "n_ref", 10000));
        ec.ref_replicas = static_cast<int>(cfg.get_int("contraction", "replicas", 4));
        ec.subsample_points =
            static_cast<std::size_t>(cfg.get_int("contraction", "subsample", 512));
    }

    ec.mehler_ell = static_cast<int>(cfg.get_int("mehler", "ell", 1));
    ec.mehler_points = static_cast<std::size_t>(cfg.get_int("mehler", "points", 1024));
    ec.mehler_reps = static_cast<int>(cfg.get_int("mehler", "reps", 8));
    if (ec.kind == ExperimentKind::Mehler) {
        if (ec.n_grid.empty()) throw ConfigError("grid.n: missing");
        ec.initial.d = static_cast<int>(cfg.get_int("mehler", "d", 1));
    }

    ec.battery_trials = static_cast<int>(cfg.get_int("battery", "trials", 1000));
    ec.battery.d = static_cast<int>(cfg.get_int("battery", "d", 1));
    ec.battery.q = cfg.get_double("battery", "q", 2.0);
    ec.battery.k = cfg.get_double("battery", "k", 4.0);
    ec.battery.s_fourier = cfg.get_double("battery", "s_fourier", 0.5);
    ec.battery.s_sobolev = cfg.get_double("battery", "s_sobolev", 0.5 * ec.battery.d + 0.25);
    ec.battery.s_sobolev_w1 =
        cfg.get_double("battery", "s_sobolev_w1", 0.5 * ec.battery.d + 0.7);
    ec.battery.calibration_trials =
        static_cast<int>(cfg.get_int("battery", "calibration_trials", 100));
    return ec;
}

// ---- run -------------------------------------------------------------------

namespace {

class OutputSet {
  public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    std::ofstream open(const std::string& name) {
        fs::path p = dir_ / name;
        names_.push_back(name);
        paths_.push_back(p);
        std::ofstream out(p);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        out << std::setprecision(17);
        return out;
    }

    void remove_all() {
        std::error_code ec;
        for (const auto& p : paths_) fs::remove(p, ec);
    }

    const std::vector<std::string>& names() const { return names_; }

  private:
    fs::path dir_;
    std::vector<std::string> names_;
    std::vector<fs::path> paths_;
};

constexpr std::uint64_t kStageRunRef = 101;
constexpr std::uint64_t kStageRunSys = 102;
constexpr std::uint64_t kStageRunGap = 103;

void run_simulate(const ExperimentConfig& ec, OutputSet& out, RunRecord& rec) {
    const std::size_t n = ec.n_grid.front();
    auto trajs = simulate(make_sampler(ec.initial, n), ec.kernel, ec.times,
                          static_cast<std::size_t>(ec.replicas), ec.seed);
    for (const auto& tr : trajs) {
        std::ostringstream name;
        name << "trajectory_" << std::setw(3) << std::setfill('0') << tr.replica << ".csv";
        auto f = out.open(name.str());
        f << "replica,t,particle_index";
        for (int k = 1; k <= ec.kernel.d; ++k) f << ",v_" << k;
        f << "\n";
        for (std::size_t s = 0; s < tr.times.size(); ++s)
            for (std::size_t i = 0; i < n; ++i) {
                f << tr.replica << ',' << tr.times[s] << ',' << i;
                for (int k = 0; k < ec.kernel.d; ++k)
                    f << ',' << tr.snapshots[s][i * ec.kernel.d + k];
                f << "\n";
            }
    }
    rec.warnings.clear();
}

const char* distance_name(DistanceKind k) {
    switch (k) {
        case DistanceKind::W1: return "w1";
        case DistanceKind::W2Squared: return "w2sq";
        case DistanceKind::SobolevNegSquared: return "hneg_sq";
    }
    return "?";
}

void run_lln(const ExperimentConfig& ec, OutputSet& out, RunRecord&) {
    auto f = out.open("lln.csv");
    f << "N,t,ell,estimator,value,stderr,exact,dictionary_id\n";
    for (std::size_t i = 0; i < ec.n_grid.size(); ++i) {
        LLNEntry e = wn_functional(ec.initial, ec.distance, ec.n_grid[i], ec.replicas,
                                   mix_seed(ec.seed, i), ec.wn);
        f << e.n << ",0,0," << distance_name(ec.distance) << ',' << e.mean << ','
          << e.stderr_ << ',';
        if (std::isnan(e.exact)) f << "";
        else f << e.exact;
        f << ",\n";
    }
}

void run_chaos(const ExperimentConfig& ec, OutputSet& out, RunRecord& rec) {
    auto ref = mean_field_reference(make_sampler(ec.initial, ec.n_ref), ec.kernel, ec.times,
                                    ec.n_ref, static_cast<std::size_t>(ec.ref_replicas),
                                    mix_seed(ec.seed, kStageRunRef));
    std::vector<Dictionary> dicts;
    for (int ell : ec.ells)
        dicts.push_back(build_dictionary(ec.kernel.d, ell, ec.dictionary_norm));
    auto f = out.open("chaos.csv");
    f << "N,t,ell,estimator,value,stderr,dictionary_id\n";
    for (std::size_t gi = 0; gi < ec.n_grid.size(); ++gi) {
        const std::size_t n = ec.n_grid[gi];
        auto trajs = simulate(make_sampler(ec.initial, n), ec.kernel, ec.times,
                              static_cast<std::size_t>(ec.replicas),
                              mix_seed(mix_seed(ec.seed, kStageRunSys), gi));
        for (std::size_t k = 0; k < ec.times.size(); ++k) {
            std::vector<std::vector<double>> reps;
            reps.reserve(trajs.size());
            for (const auto& tr : trajs) reps.push_back(tr.snapshots[k]);
            for (std::size_t di = 0; di < dicts.size(); ++di) {
                auto g = chaos_gap(reps, ec.kernel.d, ref.snapshots[k], dicts[di],
                                   ec.bootstrap,
                                   mix_seed(mix_seed(ec.seed, kStageRunGap), gi * 64 + k * 8 + di));
                f << n << ',' << ec.times[k] << ',' << ec.ells[di] << ",chaos_gap,"
                  << g.gap << ',' << g.stderr_ << ',' << g.argmax_id << "\n";
            }
        }
    }
    rec.warnings.clear();
}

void run_contraction(const ExperimentConfig& ec, OutputSet& out, RunRecord& rec) {
    auto rep = contraction_check(make_sampler(ec.initial, ec.n_ref),
                                 make_sampler(ec.initial_g, ec.n_ref), ec.kernel, ec.times,
                                 ec.n_ref, static_cast<std::size_t>(ec.ref_replicas),
                                 ec.seed, ec.subsample_points);
    auto f = out.open("contraction.csv");
    f << "t,estimator,value,noise,violated\n";
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
        f << rep.times[k] << ",toscani2," << rep.toscani2[k] << ','
          << rep.noise_toscani2[k] << ',' << (rep.toscani2_violation[k] ? 1 : 0) << "\n";
        f << rep.times[k] << ",w2," << rep.w2[k] << ',' << rep.noise_w2[k] << ','
          << (rep.w2_violation[k] ? 1 : 0) << "\n";
    }
    if (rep.any_violation) rec.warnings.push_back("contraction: monotonicity violation");
}

void run_mehler(const ExperimentConfig& ec, OutputSet& out, RunRecord&) {
    auto rows = mehler_marginal_check(ec.n_grid, ec.initial.d, ec.mehler_ell,
                                      ec.mehler_reps, ec.mehler_points, ec.seed);
    auto f = out.open("mehler.csv");
    f << "N,t,ell,estimator,value,stderr,dictionary_id\n";
    for (const auto& r : rows)
        f << r.n << ",0," << ec.mehler_ell << ",mehler_w1," << r.w1 << ',' << r.stderr_
          << ",\n";
}

void run_battery(const ExperimentConfig& ec, OutputSet& out, RunRecord& rec) {
    auto rep = inequality_battery(default_pair_generator(ec.battery.d), ec.battery_trials,
                                  ec.battery, ec.seed);
    auto f = out.open("battery.csv");
    f << "trial,inequality_id,lhs,rhs,margin,violated\n";
    for (const auto& r : rep.rows)
        f << r.trial << ',' << r.inequality_id << ',' << r.lhs << ',' << r.rhs << ','
          << r.margin << ',' << (r.violated ? 1 : 0) << "\n";
    auto g = out.open("battery_constants.csv");
    g << "inequality_id,fitted_constant\n";
    for (const auto& [id, c] : rep.fitted_constants) g << id << ',' << c << "\n";
    for (const auto& [id, c] : rep.fitted_constants)
        if (rep.violations(id) > 0)
            rec.warnings.push_back("battery: violations for " + id);
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& ec, const Config& raw) {
    if (ec.output_dir.empty())
        throw ConfigError("experiment.output_dir: missing");
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(ec.output_dir);
    RunRecord rec;
    rec.config_hash = raw.hash();
    rec.version = kVersion;
    OutputSet out{fs::path(ec.output_dir)};
    try {
        switch (ec.kind) {
            case ExperimentKind::Simulate: run_simulate(ec, out, rec); break;
            case ExperimentKind::Lln: run_lln(ec, out, rec); break;
            case ExperimentKind::Chaos: run_chaos(ec, out, rec); break;
            case ExperimentKind::Contraction: run_contraction(ec, out, rec); break;
            case ExperimentKind::Mehler: run_mehler(ec, out, rec); break;
            case ExperimentKind::Battery: run_battery(ec, out, rec); break;
        }
    } catch (...) {
        out.remove_all();
        throw;
    }
    rec.outputs = out.names();
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json manifest;
    {
        std::ostringstream hex;
        hex << std::hex << std::setw(16) << std::setfill('0') << rec.config_hash;
        manifest["config_hash"] = hex.str();
    }
    manifest["version"] = rec.version;
    manifest["kind"] = kind_name(ec.kind);
    manifest["outputs"] = rec.outputs;
    manifest["wall_seconds"] = rec.wall_seconds;
    manifest["warnings"] = rec.warnings;
    manifest["canonical_config"] = raw.canonical();
    std::ofstream mf(fs::path(ec.output_dir) / "manifest.json");
    mf << manifest.dump(2) << "\n";
    return rec;
}

// ---- report ----------------------------------------------------------------

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

CsvTable read_csv(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("missing output: " + p.string());
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (line.size() && line.back() == ',') cells.push_back("");
        if (first) {
            t.header = cells;
            first = false;
        } else if (!cells.empty()) {
            t.rows.push_back(cells);
        }
    }
    return t;
}

void write_xy(const fs::path& p, const std::vector<std::pair<double, double>>& pts) {
    std::ofstream out(p);
    out << std::setprecision(17);
    for (auto [x, y] : pts) out << x << ' ' << y << "\n";
}

}  // namespace

std::string report(const std::string& run_dir) {
    const fs::path dir(run_dir);
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw std::runtime_error("no manifest.json in " + run_dir);
    json manifest = json::parse(mf);
    std::ostringstream sum;
    sum << "run " << manifest.value("kind", "?") << " (config "
        << manifest.value("config_hash", "?") << ", version "
        << manifest.value("version", "?") << ")\n";
    for (const auto& w : manifest.value("warnings", std::vector<std::string>{}))
        sum << "warning: " << w << "\n";

    std::vector<std::string> outputs = manifest.value("outputs", std::vector<std::string>{});
    std::vector<std::string> missing;
    for (const auto& name : outputs)
        if (!fs::exists(dir / name)) missing.push_back(name);
    for (const auto& name : missing) sum << "missing output: " << name << "\n";

    const std::string kind = manifest.value("kind", "");
    try {
        if (kind == "lln") {
            CsvTable t = read_csv(dir / "lln.csv");
            int cn = t.col("N"), cv = t.col("value"), cs = t.col("stderr"),
                ce = t.col("estimator");
            std::map<std::string, std::vector<std::pair<double, double>>> series;
            for (const auto& r : t.rows)
                series[r[ce]].push_back({std::stod(r[cn]), std::stod(r[cv])});
            (void)cs;
            for (auto& [est, pts] : series) {
                std::vector<double> lx, ly;
                for (auto [x, y] : pts) {
                    lx.push_back(std::log(x));
                    ly.push_back(std::log(y));
                }
                if (lx.size() >= 2) {
                    auto fit = stats::fit_line(lx, ly);
                    sum << "lln " << est << ": slope " << fit.slope << " +- "
                        << 1.96 * fit.slope_stderr << " (r2 " << fit.r2 << ")\n";
                }
                write_xy(dir / ("lln_" + est + ".xy"), pts);
            }
        } else if (kind == "chaos") {
            CsvTable t = read_csv(dir / "chaos.csv");
            int cn = t.col("N"), ct = t.col("t"), cl = t.col("ell"), cv = t.col("value");
            std::map<std::pair<std::string, std::string>,
                     std::vector<std::pair<double, double>>> by_t;  // (t, ell) -> (N, gap)
            for (const auto& r : t.rows)
                by_t[{r[ct], r[cl]}].push_back({std::stod(r[cn]), std::stod(r[cv])});
            for (auto& [key, pts] : by_t) {
                std::sort(pts.begin(), pts.end());
                bool mono = true;
                for (std::size_t i = 1; i < pts.size(); ++i)
                    if (pts[i].second > pts[i - 1].second) mono = false;
                sum << "chaos gap t=" << key.first << " ell=" << key.second << ": "
                    << (mono ? "decreasing in N" : "NOT monotone in N") << "\n";
                write_xy(dir / ("chaos_gap_t" + key.first + "_l" + key.second + ".xy"), pts);
            }
        } else if (kind == "battery") {
            CsvTable t = read_csv(dir / "battery.csv");
            int ci = t.col("inequality_id"), cv = t.col("violated");
            std::map<std::string, int> counts;
            for (const auto& r : t.rows) counts[r[ci]] += r[cv] == "1" ? 1 : 0;
            for (const auto& [id, c] : counts)
                sum << "battery " << id << ": " << c << " violations\n";
        } else if (kind == "contraction") {
            CsvTable t = read_csv(dir / "contraction.csv");
            int ce = t.col("estimator"), cv = t.col("violated");
            std::map<std::string, int> viol;
            for (const auto& r : t.rows) viol[r[ce]] += r[cv] == "1" ? 1 : 0;
            for (const auto& [est, c] : viol)
                sum << "contraction " << est << ": " << c << " violations\n";
        } else if (kind == "mehler") {
            CsvTable t = read_csv(dir / "mehler.csv");
            int cn = t.col("N"), cv = t.col("value");
            std::vector<std::pair<double, double>> pts;
            for (const auto& r : t.rows) pts.push_back({std::stod(r[cn]), std::stod(r[cv])});
            std::sort(pts.begin(), pts.end());
            bool mono = true;
            for (std::size_t i = 1; i < pts.size(); ++i)
                if (pts[i].second >= pts[i - 1].second) mono = false;
            sum << "mehler marginal W1: " << (mono ? "strictly decreasing" : "NOT decreasing")
                << " in N\n";
            write_xy(dir / "mehler.xy", pts);
        } else if (kind == "simulate") {
            sum << "trajectories: " << outputs.size() << "\n";
        }
    } catch (const std::exception& e) {
        sum << "partial report: " << e.what() << "\n";
    }
    return sum.str();
}

}  // namespace kacsim
