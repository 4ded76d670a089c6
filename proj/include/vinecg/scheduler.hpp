#pragma once

#include <vector>

#include "vinecg/vcg.hpp"

namespace vinecg {

/// An ordered tuple of variable indices, deepest first.  order[0] is
/// sampled conditioned on everything else; variables outside the order
/// (including cond_set) are seeded at the top level.
struct SamplingOrder {
    std::vector<int> order;
    VarSet cond_set;  // disjoint from order
    int d = 0;

    [[nodiscard]] std::string to_string() const;
};

struct SourceSet {
    std::vector<VariableVertex> sources;  // size d
};

/// Derive the source vertices encoded by a sampling order: position i gets
/// conditioning order[i+1:] plus every variable outside the order; the
/// rest contribute top-level vertices.  Throws StructureError naming the
/// first implied vertex absent from the graph (infeasible order).
SourceSet get_source(const SamplingOrder& order, const VineModel& m);

/// Number of downward (h-function) visits the sampling traversal performs
/// for this order: a structure-only dry run, no copula evaluation.
long query(const SamplingOrder& order, const VineModel& m);

/// Greedy bottom-up scheduling of the order minimizing query(), per level
/// choosing the conditioned element of the unvisited copula vertex whose
/// extension needs fewer h-calls; an element outside cond_set is taken
/// without querying when exactly one is outside; ties go to the smaller
/// index.  With worst=true the comparison is flipped to maximize instead.
SamplingOrder schedule(const VineModel& m, VarSet cond_set = {}, bool worst = false);

}  // namespace vinecg
