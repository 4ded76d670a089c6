#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "vinecg/scheduler.hpp"
#include "vinecg/vcg.hpp"

namespace vinecg {

/// n rows of d uniform columns, column-major; column j belongs to variable j.
struct SampleBatch {
    std::size_t n = 0;
    int d = 0;
    std::vector<double> values;

    SampleBatch() = default;
    SampleBatch(std::size_t rows, int cols) : n(rows), d(cols), values(rows * static_cast<std::size_t>(cols)) {}

    [[nodiscard]] double at(std::size_t i, int j) const { return values[static_cast<std::size_t>(j) * n + i]; }
    double& at(std::size_t i, int j) { return values[static_cast<std::size_t>(j) * n + i]; }
    [[nodiscard]] std::span<const double> col(int j) const {
        return {values.data() + static_cast<std::size_t>(j) * n, n};
    }
};

/// Instrumentation collected while executing a traversal.
struct SampleStats {
    long hfunc_calls = 0;            // downward kernel applications (per column visit)
    long hinv_calls = 0;             // upward kernel applications
    std::size_t peak_memo_entries = 0;  // max simultaneously live columns
};

/// Deterministic counter-based uniform in (0,1), keyed by seed, source
/// vertex and row; independent of traversal scheduling.
double uniform_at(std::uint64_t seed, const VariableVertex& source, std::uint64_t row);

/// Inverse-Rosenblatt sampling: seed each source vertex with i.i.d.
/// uniforms and ascend the graph, memoizing intermediates with
/// reference-counted reclamation.
SampleBatch sample(const VineModel& m, std::size_t n, const SamplingOrder& order,
                   std::uint64_t seed, SampleStats* stats = nullptr);

/// Conditional sampling: top-level vertices in cond_values are pinned to
/// the given constants, the rest are sampled; conditioned output columns
/// equal cond_values exactly.
SampleBatch sample_conditional(const VineModel& m, std::size_t n,
                               const std::map<int, double>& cond_values,
                               const SamplingOrder& order, std::uint64_t seed,
                               SampleStats* stats = nullptr);

/// Deterministic conditional quantiles of the single free variable: the
/// conditional-sampling traversal with the seed uniform replaced by alpha.
std::vector<double> conditional_quantile(const VineModel& m,
                                         const std::map<int, double>& cond_values,
                                         const std::vector<double>& alphas,
                                         const SamplingOrder& order);

/// Forward Rosenblatt transform along the same paths: recovers the seed
/// uniforms of sample() for the same order.
SampleBatch rosenblatt(const VineModel& m, const SampleBatch& data, const SamplingOrder& order,
                       SampleStats* stats = nullptr);

/// Per-row log density: sum of log pair-copula densities at the
/// recursively computed pseudo-observations.
std::vector<double> log_density(const VineModel& m, const SampleBatch& data);

}  // namespace vinecg
