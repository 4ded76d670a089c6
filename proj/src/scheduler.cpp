#include "vinecg/scheduler.hpp"

#include <algorithm>
#include <stdexcept>

#include "vinecg/errors.hpp"
#include "vinecg/traversal.hpp"

namespace vinecg {

std::string SamplingOrder::to_string() const {
    std::string out = "(";
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0) out += ",";
        out += std::to_string(order[i]);
    }
    out += ")";
    return out;
}

namespace {

void check_order(const SamplingOrder& o, const VineModel& m) {
    if (o.d != m.dim())
        throw std::invalid_argument("sampling order: dimension " + std::to_string(o.d) +
                                    " does not match the model's " + std::to_string(m.dim()));
    VarSet seen;
    for (int v : o.order) {
        if (v < 0 || v >= o.d)
            throw std::invalid_argument("sampling order: variable " + std::to_string(v) + " out of range");
        if (seen.contains(v))
            throw std::invalid_argument("sampling order: variable " + std::to_string(v) + " repeated");
        seen.insert(v);
    }
    if (!(o.cond_set & seen).empty())
        throw std::invalid_argument("sampling order: cond_set overlaps the ordered variables");
    if (!o.cond_set.is_subset_of(VarSet::full(o.d)))
        throw std::invalid_argument("sampling order: cond_set out of range");
}

}  // namespace

SourceSet get_source(const SamplingOrder& order, const VineModel& m) {
    check_order(order, m);
    const int d = m.dim();
    const VarSet ordered = VarSet::from(order.order);
    const VarSet outside = VarSet::full(d) - ordered;  // cond_set plus any unordered variables

    SourceSet out;
    VarSet trailing = outside;
    for (std::size_t i = order.order.size(); i-- > 0;) {
        // conditioning of source i = order[i+1:] plus everything outside the order
        out.sources.push_back({order.order[i], trailing});
        trailing.insert(order.order[i]);
    }
    std::reverse(out.sources.begin(), out.sources.end());
    for (int j : outside.to_vector()) out.sources.push_back({j, {}});

    for (const VariableVertex& s : out.sources) {
        if (s.depth() == 0) continue;
        if (m.producer_of(s) == nullptr)
            throw StructureError("sampling order " + order.to_string() + " infeasible: vertex {" +
                                 s.key() + "} is not in the graph");
    }
    return out;
}

long query(const SamplingOrder& order, const VineModel& m) {
    return plan_sampling(m, get_source(order, m).sources).hfunc_count;
}

SamplingOrder schedule(const VineModel& m, VarSet cond_set, bool worst) {
    const int d = m.dim();
    if (!cond_set.is_subset_of(VarSet::full(d)))
        throw std::invalid_argument("schedule: cond_set out of range");
    if (cond_set.size() >= d)
        throw std::invalid_argument("schedule: cond_set must leave at least one free variable");
    const int free_count = d - cond_set.size();

    std::vector<int> order;
    VarSet used;
    auto q = [&](int candidate) {
        SamplingOrder probe{order, cond_set, d};
        probe.order.push_back(candidate);
        return query(probe, m);
    };

    while (static_cast<int>(order.size()) < free_count && static_cast<int>(order.size()) <= d - 2) {
        const int k = d - 2 - static_cast<int>(order.size());
        const CopulaVertex* unvisited = nullptr;
        for (const auto& v : m.level(k)) {
            if (!used.contains(v.left) && !used.contains(v.right)) {
                unvisited = &v;
                break;
            }
        }
        if (unvisited == nullptr)
            throw StructureError("schedule: no unvisited copula vertex at level " + std::to_string(k));

        const int l = unvisited->left, r = unvisited->right;
        const bool l_free = !cond_set.contains(l);
        const bool r_free = !cond_set.contains(r);
        int pick;
        if (l_free != r_free) {
            pick = l_free ? l : r;  // prioritized, no query needed
        } else if (!l_free) {
            throw StructureError("schedule: no feasible conditional order, copula vertex {" +
                                 unvisited->key() + "} has both conditioned variables in cond_set");
        } else {
            const long ql = q(l), qr = q(r);
            const bool take_l = worst ? (ql >= qr) : (ql <= qr);
            pick = take_l ? l : r;
        }
        order.push_back(pick);
        used.insert(pick);
    }

    // remaining free variables ride at the top (exactly one for full sampling)
    for (int v = 0; v < d && static_cast<int>(order.size()) < free_count; ++v) {
        if (!cond_set.contains(v) && !used.contains(v)) {
            order.push_back(v);
            used.insert(v);
        }
    }

    SamplingOrder result{std::move(order), cond_set, d};
    get_source(result, m);  // feasibility check; throws if the structure cannot honor it
    return result;
}

}  // namespace vinecg
