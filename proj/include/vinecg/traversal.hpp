#pragma once

#include <vector>

#include "vinecg/vcg.hpp"

namespace vinecg {

/// One structural step of a graph traversal.  Plans are built without
/// touching data; both the h-call counter and the sampler execute the same
/// plan, so counted and executed visits agree by construction.
struct TraversalStep {
    enum class Kind { seed, up, down };
    Kind kind = Kind::seed;
    VariableVertex out;       // vertex whose column this step produces
    VariableVertex input;     // up: the child being inverted; down: the same-side parent
    VariableVertex opposite;  // the opposite parent feeding the kernel
    int level = -1;           // copula vertex location (up/down only)
    VarSet vertex_total;      // identifies the copula vertex
    bool out_is_left = false; // whether the transformed variable is the vertex's left margin
};

struct TraversalPlan {
    int d = 0;
    std::vector<TraversalStep> steps;
    std::vector<VariableVertex> outputs;  // one per variable, index = variable
    long hfunc_count = 0;                 // downward visits
    long hinv_count = 0;                  // upward visits
};

/// Plan the inverse-Rosenblatt ascent: seed every source, then walk each
/// source path to the top, triggering downward visits lazily when an
/// opposite parent is not yet available.  Sources are processed shallowest
/// first (ties by ascending variable index).  Outputs are the d top-level
/// vertices.
TraversalPlan plan_sampling(const VineModel& m, const std::vector<VariableVertex>& sources);

/// Plan the forward Rosenblatt transform for the same source set: seed all
/// top-level vertices with data, then walk each source path downward.
/// Outputs are the source vertices, indexed by their conditioned variable.
TraversalPlan plan_rosenblatt(const VineModel& m, const std::vector<VariableVertex>& sources);

}  // namespace vinecg
