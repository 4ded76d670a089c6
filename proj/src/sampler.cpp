#include "vinecg/sampler.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <unordered_map>

#include "vinecg/errors.hpp"
#include "vinecg/traversal.hpp"

namespace vinecg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

const BivariateCopula& copula_at(const VineModel& m, const TraversalStep& step) {
    const CopulaVertex* cv = m.find_by_total(step.level, step.vertex_total);
    if (cv == nullptr || !cv->copula.has_value())
        throw StructureError("sampler: copula vertex at level " + std::to_string(step.level) +
                             " is missing a fitted pair copula");
    return *cv->copula;
}

// Executes a traversal plan over n-row columns with reference-counted
// memo reclamation.  `seeder` fills the column of a seed vertex.
class PlanRunner {
  public:
    PlanRunner(const VineModel& m, const TraversalPlan& plan, std::size_t n,
               std::function<void(const VariableVertex&, std::vector<double>&)> seeder,
               SampleStats* stats)
        : m_(m), plan_(plan), n_(n), seeder_(std::move(seeder)), stats_(stats) {
        // consumer counts per vertex, known up front from the plan
        for (const TraversalStep& s : plan_.steps) {
            if (s.kind == TraversalStep::Kind::seed) continue;
            ++refcount_[s.input];
            ++refcount_[s.opposite];
        }
        for (const VariableVertex& out : plan_.outputs) ++refcount_[out];
    }

    std::vector<std::vector<double>> run() {
        for (const TraversalStep& s : plan_.steps) execute(s);
        std::vector<std::vector<double>> out;
        out.reserve(plan_.outputs.size());
        for (const VariableVertex& v : plan_.outputs) {
            auto it = memo_.find(v);
            if (it == memo_.end())
                throw StructureError("sampler: output column {" + v.key() + "} was never computed");
            out.push_back(std::move(it->second));
        }
        return out;
    }

  private:
    void note_peak() {
        if (stats_ != nullptr) stats_->peak_memo_entries = std::max(stats_->peak_memo_entries, memo_.size());
    }

    std::vector<double>& column(const VariableVertex& v) {
        auto it = memo_.find(v);
        if (it == memo_.end())
            throw StructureError("sampler: column {" + v.key() + "} read before being computed");
        return it->second;
    }

    void release(const VariableVertex& v) {
        auto it = refcount_.find(v);
        if (it == refcount_.end()) return;
        if (--it->second == 0) memo_.erase(v);
    }

    void execute(const TraversalStep& s) {
        switch (s.kind) {
            case TraversalStep::Kind::seed: {
                std::vector<double> col(n_);
                seeder_(s.out, col);
                memo_.emplace(s.out, std::move(col));
                note_peak();
                return;
            }
            case TraversalStep::Kind::down: {
                const BivariateCopula& c = copula_at(m_, s);
                const std::vector<double>& same = column(s.input);
                const std::vector<double>& opp = column(s.opposite);
                std::vector<double> out(n_);
                if (s.out_is_left) {
                    for (std::size_t i = 0; i < n_; ++i) out[i] = hfunc1(c, same[i], opp[i]);
                } else {
                    for (std::size_t i = 0; i < n_; ++i) out[i] = hfunc2(c, opp[i], same[i]);
                }
                if (stats_ != nullptr) ++stats_->hfunc_calls;
                memo_.emplace(s.out, std::move(out));
                note_peak();
                release(s.input);
                release(s.opposite);
                return;
            }
            case TraversalStep::Kind::up: {
                const BivariateCopula& c = copula_at(m_, s);
                const std::vector<double>& child = column(s.input);
                const std::vector<double>& opp = column(s.opposite);
                std::vector<double> out(n_);
                if (s.out_is_left) {
                    for (std::size_t i = 0; i < n_; ++i) out[i] = hinv1(c, child[i], opp[i]);
                } else {
                    for (std::size_t i = 0; i < n_; ++i) out[i] = hinv2(c, child[i], opp[i]);
                }
                if (stats_ != nullptr) ++stats_->hinv_calls;
                memo_.emplace(s.out, std::move(out));
                note_peak();
                release(s.input);
                release(s.opposite);
                return;
            }
        }
    }

    const VineModel& m_;
    const TraversalPlan& plan_;
    std::size_t n_;
    std::function<void(const VariableVertex&, std::vector<double>&)> seeder_;
    SampleStats* stats_;
    std::unordered_map<VariableVertex, std::vector<double>> memo_;
    std::unordered_map<VariableVertex, long> refcount_;
};

SampleBatch columns_to_batch(std::vector<std::vector<double>> cols, std::size_t n) {
    SampleBatch out(n, static_cast<int>(cols.size()));
    for (int j = 0; j < out.d; ++j)
        std::copy(cols[static_cast<std::size_t>(j)].begin(), cols[static_cast<std::size_t>(j)].end(),
                  out.values.begin() + static_cast<std::size_t>(j) * n);
    return out;
}

void check_cond_values(const std::map<int, double>& cond_values, const SamplingOrder& order) {
    VarSet keys;
    for (const auto& [var, value] : cond_values) {
        if (var < 0 || var >= order.d)
            throw std::invalid_argument("conditioning variable " + std::to_string(var) + " out of range");
        if (!(value > 0.0 && value < 1.0))
            throw DataError("conditioning value for variable " + std::to_string(var) +
                            " must lie in (0,1), got " + std::to_string(value));
        keys.insert(var);
    }
    if (keys != order.cond_set)
        throw std::invalid_argument("conditioning values {" + keys.to_string() +
                                    "} do not match the order's cond_set {" +
                                    order.cond_set.to_string() + "}");
}

}  // namespace

double uniform_at(std::uint64_t seed, const VariableVertex& source, std::uint64_t row) {
    const std::uint64_t k = splitmix64(seed ^ splitmix64(fnv1a(source.key())) ^ (row * 0xd1342543de82ef95ull));
    return (static_cast<double>(k >> 11) + 0.5) * 0x1.0p-53;
}

SampleBatch sample(const VineModel& m, std::size_t n, const SamplingOrder& order,
                   std::uint64_t seed, SampleStats* stats) {
    if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
    const SourceSet sources = get_source(order, m);
    const TraversalPlan plan = plan_sampling(m, sources.sources);
    auto seeder = [&](const VariableVertex& v, std::vector<double>& col) {
        for (std::size_t i = 0; i < n; ++i) col[i] = uniform_at(seed, v, i);
    };
    PlanRunner runner(m, plan, n, seeder, stats);
    return columns_to_batch(runner.run(), n);
}

SampleBatch sample_conditional(const VineModel& m, std::size_t n,
                               const std::map<int, double>& cond_values,
                               const SamplingOrder& order, std::uint64_t seed,
                               SampleStats* stats) {
    if (n == 0) throw std::invalid_argument("sample_conditional: n must be >= 1");
    check_cond_values(cond_values, order);
    if (static_cast<int>(order.order.size()) + order.cond_set.size() != order.d)
        throw std::invalid_argument("sample_conditional: order must cover every free variable");

    const SourceSet sources = get_source(order, m);
    const TraversalPlan plan = plan_sampling(m, sources.sources);
    auto seeder = [&](const VariableVertex& v, std::vector<double>& col) {
        if (v.depth() == 0 && order.cond_set.contains(v.conditioned)) {
            std::fill(col.begin(), col.end(), cond_values.at(v.conditioned));
        } else {
            for (std::size_t i = 0; i < n; ++i) col[i] = uniform_at(seed, v, i);
        }
    };
    PlanRunner runner(m, plan, n, seeder, stats);
    return columns_to_batch(runner.run(), n);
}

std::vector<double> conditional_quantile(const VineModel& m,
                                         const std::map<int, double>& cond_values,
                                         const std::vector<double>& alphas,
                                         const SamplingOrder& order) {
    check_cond_values(cond_values, order);
    if (order.order.size() != 1 || order.cond_set.size() != order.d - 1)
        throw std::invalid_argument("conditional_quantile: exactly one free variable required, order has " +
                                    std::to_string(order.order.size()));
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0))
            throw std::invalid_argument("conditional_quantile: alpha must lie in (0,1)");
    if (alphas.empty()) return {};

    const int free_var = order.order.front();
    const std::size_t n = alphas.size();
    const SourceSet sources = get_source(order, m);
    const TraversalPlan plan = plan_sampling(m, sources.sources);
    auto seeder = [&](const VariableVertex& v, std::vector<double>& col) {
        if (v.depth() == 0 && order.cond_set.contains(v.conditioned)) {
            std::fill(col.begin(), col.end(), cond_values.at(v.conditioned));
        } else {
            std::copy(alphas.begin(), alphas.end(), col.begin());  // the free source
        }
    };
    PlanRunner runner(m, plan, n, seeder, nullptr);
    auto cols = runner.run();
    return cols[static_cast<std::size_t>(free_var)];
}

SampleBatch rosenblatt(const VineModel& m, const SampleBatch& data, const SamplingOrder& order,
                       SampleStats* stats) {
    if (data.d != m.dim())
        throw std::invalid_argument("rosenblatt: data has " + std::to_string(data.d) +
                                    " columns, model needs " + std::to_string(m.dim()));
    const SourceSet sources = get_source(order, m);
    const TraversalPlan plan = plan_rosenblatt(m, sources.sources);
    auto seeder = [&](const VariableVertex& v, std::vector<double>& col) {
        const auto src = data.col(v.conditioned);
        std::copy(src.begin(), src.end(), col.begin());
    };
    PlanRunner runner(m, plan, data.n, seeder, stats);
    return columns_to_batch(runner.run(), data.n);
}

std::vector<double> log_density(const VineModel& m, const SampleBatch& data) {
    if (data.d != m.dim())
        throw std::invalid_argument("log_density: data has " + std::to_string(data.d) +
                                    " columns, model needs " + std::to_string(m.dim()));
    const std::size_t n = data.n;
    std::vector<double> ll(n, 0.0);

    // pseudo-observations per variable vertex, one level at a time
    std::unordered_map<VariableVertex, std::vector<double>> cur;
    for (int j = 0; j < data.d; ++j) {
        std::vector<double> col(data.col(j).begin(), data.col(j).end());
        cur.emplace(VariableVertex{j, {}}, std::move(col));
    }
    for (int k = 0; k < m.num_levels(); ++k) {
        std::unordered_map<VariableVertex, std::vector<double>> next;
        for (const CopulaVertex& v : m.level(k)) {
            if (!v.copula.has_value())
                throw StructureError("log_density: vertex {" + v.key() + "} has no fitted copula");
            const auto lit = cur.find(v.parent_left());
            const auto rit = cur.find(v.parent_right());
            if (lit == cur.end() || rit == cur.end())
                throw StructureError("log_density: parents of {" + v.key() + "} unavailable");
            const std::vector<double>& ul = lit->second;
            const std::vector<double>& ur = rit->second;
            const BivariateCopula& c = *v.copula;
            std::vector<double> cl(n), cr(n);
            for (std::size_t i = 0; i < n; ++i) {
                ll[i] += log_pdf(c, ul[i], ur[i]);
                cl[i] = hfunc1(c, ul[i], ur[i]);
                cr[i] = hfunc2(c, ul[i], ur[i]);
            }
            next.emplace(v.child_left(), std::move(cl));
            next.emplace(v.child_right(), std::move(cr));
        }
        cur = std::move(next);
    }
    return ll;
}

}  // namespace vinecg
