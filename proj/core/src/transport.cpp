#include "solvers.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace kacsim::detail {

namespace {

constexpr double kMassEps = 1e-14;

}  // namespace

// Successive shortest paths with Johnson potentials on the bipartite
// residual graph.  Real-valued supplies/demands; each augmentation saturates
// a source or a sink, so at most n + m - 1 augmentations occur.
double transportation_cost(const std::vector<double>& supply,
                           const std::vector<double>& demand,
                           const std::vector<double>& cost) {
    const std::size_t n = supply.size(), m = demand.size();
    if (cost.size() != n * m) throw std::invalid_argument("transportation_cost: bad matrix");
    double sa = 0.0, sb = 0.0;
    for (double x : supply) sa += x;
    for (double x : demand) sb += x;
    if (std::fabs(sa - sb) > 1e-9)
        throw std::invalid_argument("transportation_cost: unbalanced problem");

    std::vector<double> rs = supply, rd = demand;   // residual masses
    // flow[i*m+j] kept sparse via per-sink back-lists.
    std::vector<std::vector<std::pair<std::size_t, double>>> flow_into(m);
    std::vector<double> pot_src(n, 0.0), pot_snk(m, 0.0);

    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t V = n + m;
    std::vector<double> dist_(V);
    std::vector<int> prev(V);
    std::vector<char> done(V);
    using QE = std::pair<double, std::size_t>;

    double total = 0.0;
    for (;;) {
        // any remaining supply?
        bool open = false;
        for (std::size_t i = 0; i < n; ++i)
            if (rs[i] > kMassEps) { open = true; break; }
        if (!open) break;

        // Dijkstra from all unsaturated sources to the nearest unsaturated
        // sink, with reduced costs.
        std::fill(dist_.begin(), dist_.end(), inf);
        std::fill(prev.begin(), prev.end(), -1);
        std::fill(done.begin(), done.end(), 0);
        std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
        for (std::size_t i = 0; i < n; ++i) {
            if (rs[i] > kMassEps) {
                dist_[i] = 0.0;
                pq.push({0.0, i});
            }
        }
        std::size_t best_sink = m;  // sentinel
        while (!pq.empty()) {
            auto [du, u] = pq.top();
            pq.pop();
            if (done[u] || du > dist_[u]) continue;
            done[u] = 1;
            if (u >= n) {
                std::size_t j = u - n;
                if (rd[j] > kMassEps) { best_sink = j; break; }
                // residual back edges sink j -> source i where flow > 0
                for (const auto& [i, f] : flow_into[j]) {
                    if (f <= kMassEps) continue;
                    double w = -(cost[i * m + j]) + pot_snk[j] - pot_src[i];
                    if (dist_[u] + w < dist_[i] - 1e-15) {
                        dist_[i] = dist_[u] + w;
                        prev[i] = static_cast<int>(u);
                        pq.push({dist_[i], i});
                    }
                }
            } else {
                std::size_t i = u;
                for (std::size_t j = 0; j < m; ++j) {
                    double w = cost[i * m + j] + pot_src[i] - pot_snk[j];
                    if (w < 0.0) w = 0.0;  // guard tiny negatives from rounding
                    std::size_t vtx = n + j;
                    if (dist_[u] + w < dist_[vtx] - 1e-15) {
                        dist_[vtx] = dist_[u] + w;
                        prev[vtx] = static_cast<int>(u);
                        pq.push({dist_[vtx], vtx});
                    }
                }
            }
        }
        if (best_sink == m)
            throw std::runtime_error("transportation_cost: no augmenting path (degenerate input)");

        // Update potentials (cap at the target distance so reduced costs of
        // unreached nodes stay nonnegative after early termination).
        const double dcap = dist_[n + best_sink];
        for (std::size_t i = 0; i < n; ++i) pot_src[i] += std::min(dist_[i], dcap);
        for (std::size_t j = 0; j < m; ++j) pot_snk[j] += std::min(dist_[n + j], dcap);

        // Bottleneck along the path (forward edges are uncapacitated;
        // backward edges are capped by the flow they undo; the head source
        // caps by its residual supply).
        double push = rd[best_sink];
        std::size_t head = n + best_sink;
        for (std::size_t u = n + best_sink; prev[u] != -1;) {
            std::size_t pu = static_cast<std::size_t>(prev[u]);
            if (u < n) {
                std::size_t j = pu - n;
                for (const auto& [i, f] : flow_into[j])
                    if (i == u) { push = std::min(push, f); break; }
            }
            u = pu;
            head = pu;
        }
        push = std::min(push, rs[head]);

        // Apply augmentation.
        for (std::size_t u = n + best_sink; prev[u] != -1;) {
            std::size_t pu = static_cast<std::size_t>(prev[u]);
            if (u >= n) {
                std::size_t j = u - n, i = pu;
                bool found = false;
                for (auto& [fi, f] : flow_into[j])
                    if (fi == i) { f += push; found = true; break; }
                if (!found) flow_into[j].push_back({i, push});
                total += push * cost[i * m + j];
            } else {
                std::size_t i = u, j = pu - n;
                for (auto& [fi, f] : flow_into[j])
                    if (fi == i) { f -= push; break; }
                total -= push * cost[i * m + j];
            }
            u = pu;
        }
        rs[head] -= push;
        rd[best_sink] -= push;
    }
    return total;
}

}  // namespace kacsim::detail
