// Experiment harness: builds typed experiment descriptions from a Config,
// runs them, and persists CSV outputs plus a JSON run manifest.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kacsim/chaos.hpp"
#include "kacsim/config.hpp"
#include "kacsim/kernels.hpp"
#include "kacsim/limit.hpp"
#include "kacsim/metrics.hpp"

namespace kacsim {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { Simulate, Lln, Chaos, Contraction, Mehler, Battery };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Simulate;
    std::uint64_t seed = 0;
    std::string output_dir;

    KernelSpec kernel;
    InitialDataSpec initial;
    InitialDataSpec initial_g;  // contraction only
    std::vector<std::size_t> n_grid;
    std::vector<double> times;
    int replicas = 2;

    // metric parameters
    DistanceKind distance = DistanceKind::W1;
    WnOptions wn;

    // chaos
    std::vector<int> ells{1};
    std::size_t n_ref = 10000;
    int ref_replicas = 2;
    NormKind dictionary_norm = NormKind::Lipschitz;
    int bootstrap = 200;

    // contraction
    std::size_t subsample_points = 512;

    // mehler
    int mehler_ell = 1;
    std::size_t mehler_points = 1024;
    int mehler_reps = 8;

    // battery
    BatteryParams battery;
    int battery_trials = 1000;

    // Throws ConfigError naming the offending section.key.
    static ExperimentConfig from(const Config& cfg);
};

struct RunRecord {
    std::uint64_t config_hash = 0;
    std::string version;
    std::vector<std::string> outputs;  // file names relative to the run dir
    double wall_seconds = 0.0;
    std::vector<std::string> warnings;
};

// Executes the experiment, writes its outputs and "manifest.json" into
// cfg.output_dir.  Identical config + seed gives byte-identical CSVs.  On
// failure all files created by this run are removed before rethrowing.
RunRecord run_experiment(const ExperimentConfig& cfg, const Config& raw);

// Reads a finished run directory and produces a plain-text summary (slope
// fits, violation counts) while writing x/y plot-data files next to the
// outputs.  Missing outputs are listed, a partial summary is still returned.
std::string report(const std::string& run_dir);

}  // namespace kacsim
