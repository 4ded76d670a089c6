#include "vinecg/traversal.hpp"

#include <algorithm>
#include <unordered_set>

#include "vinecg/errors.hpp"

namespace vinecg {

namespace {

struct Planner {
    const VineModel& m;
    TraversalPlan plan;
    std::unordered_set<VariableVertex> visited;

    explicit Planner(const VineModel& model) : m(model) { plan.d = model.dim(); }

    const CopulaVertex& locate(const VariableVertex& v) {
        const CopulaVertex* cv = m.producer_of(v);
        if (cv == nullptr)
            throw StructureError("traversal: vertex {" + v.key() + "} is not in the graph");
        return *cv;
    }

    void seed(const VariableVertex& v) {
        plan.steps.push_back({TraversalStep::Kind::seed, v, {}, {}, -1, {}, false});
        visited.insert(v);
    }

    // Compute {x|S} downward from its producer's parents, recursing on any
    // parent that is itself unvisited.
    void visit_down(const VariableVertex& v) {
        const CopulaVertex& cv = locate(v);
        for (const VariableVertex p : {cv.parent_left(), cv.parent_right()}) {
            if (visited.contains(p)) continue;
            if (p.depth() == 0)
                throw StructureError("traversal: top-level vertex {" + p.key() +
                                     "} required but never seeded");
            visit_down(p);
        }
        const bool is_left = (v.conditioned == cv.left);
        const VariableVertex same = is_left ? cv.parent_left() : cv.parent_right();
        const VariableVertex opp = is_left ? cv.parent_right() : cv.parent_left();
        plan.steps.push_back({TraversalStep::Kind::down, v, same, opp, cv.level(), cv.total(), is_left});
        ++plan.hfunc_count;
        visited.insert(v);
    }

    // One upward step from `cur`, returning the parent with the same
    // conditioned variable.
    VariableVertex visit_up(const VariableVertex& cur) {
        const CopulaVertex& cv = locate(cur);
        const bool is_left = (cur.conditioned == cv.left);
        const VariableVertex parent = is_left ? cv.parent_left() : cv.parent_right();
        const VariableVertex opp = is_left ? cv.parent_right() : cv.parent_left();
        if (!visited.contains(opp)) visit_down(opp);
        plan.steps.push_back({TraversalStep::Kind::up, parent, cur, opp, cv.level(), cv.total(), is_left});
        ++plan.hinv_count;
        visited.insert(parent);
        return parent;
    }
};

std::vector<VariableVertex> sorted_sources(std::vector<VariableVertex> sources) {
    std::sort(sources.begin(), sources.end(), [](const VariableVertex& a, const VariableVertex& b) {
        if (a.depth() != b.depth()) return a.depth() < b.depth();
        return a.conditioned < b.conditioned;
    });
    return sources;
}

}  // namespace

TraversalPlan plan_sampling(const VineModel& m, const std::vector<VariableVertex>& sources) {
    Planner pl(m);
    for (const VariableVertex& src : sorted_sources(sources)) {
        pl.seed(src);
        VariableVertex cur = src;
        while (cur.depth() > 0) cur = pl.visit_up(cur);
    }
    pl.plan.outputs.resize(static_cast<std::size_t>(m.dim()));
    for (int j = 0; j < m.dim(); ++j) {
        const VariableVertex top{j, {}};
        if (!pl.visited.contains(top))
            throw StructureError("traversal: variable " + std::to_string(j) +
                                 " unreachable from the given sources");
        pl.plan.outputs[static_cast<std::size_t>(j)] = top;
    }
    return pl.plan;
}

TraversalPlan plan_rosenblatt(const VineModel& m, const std::vector<VariableVertex>& sources) {
    Planner pl(m);
    for (int j = 0; j < m.dim(); ++j) pl.seed({j, {}});
    pl.plan.outputs.resize(static_cast<std::size_t>(m.dim()));
    for (const VariableVertex& src : sorted_sources(sources)) {
        // the unique chain src -> ... -> {var | {}} along same-conditioned parents
        std::vector<VariableVertex> path{src};
        while (path.back().depth() > 0) {
            const CopulaVertex& cv = pl.locate(path.back());
            path.push_back({path.back().conditioned, cv.conditioning});
        }
        // walk it downward, computing each vertex from its parents
        for (auto it = path.rbegin() + 1; it != path.rend(); ++it) {
            if (pl.visited.contains(*it)) continue;
            pl.visit_down(*it);
        }
        pl.plan.outputs[static_cast<std::size_t>(src.conditioned)] = src;
    }
    return pl.plan;
}

}  // namespace vinecg
