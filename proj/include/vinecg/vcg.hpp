#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "vinecg/bicop.hpp"
#include "vinecg/varset.hpp"

namespace vinecg {

/// A conditional pseudo-variable {l | S}: the circles of the graph.
struct VariableVertex {
    int conditioned = -1;
    VarSet conditioning;

    [[nodiscard]] int depth() const { return conditioning.size(); }
    [[nodiscard]] VarSet total() const { return conditioning.with(conditioned); }
    /// Canonical key "l|s1,s2,..." with the conditioning set ascending.
    [[nodiscard]] std::string key() const {
        return std::to_string(conditioned) + "|" + conditioning.to_string();
    }
    friend bool operator==(const VariableVertex& a, const VariableVertex& b) {
        return a.conditioned == b.conditioned && a.conditioning == b.conditioning;
    }
    friend auto operator<=>(const VariableVertex& a, const VariableVertex& b) = default;
};

/// An ordered conditioned pair with a conditioning set {l,r ; S}, owning
/// one pair copula: the boxes of the graph.  Always left < right.
struct CopulaVertex {
    int left = -1;
    int right = -1;
    VarSet conditioning;
    std::optional<BivariateCopula> copula;

    CopulaVertex() = default;
    CopulaVertex(int a, int b, VarSet cond, std::optional<BivariateCopula> cop = std::nullopt);

    [[nodiscard]] int level() const { return conditioning.size(); }
    [[nodiscard]] VarSet conditioned() const { return VarSet::of({left, right}); }
    [[nodiscard]] VarSet total() const { return conditioning.with(left).with(right); }
    /// Canonical key "l,r;s1,s2,...".
    [[nodiscard]] std::string key() const {
        return std::to_string(left) + "," + std::to_string(right) + ";" + conditioning.to_string();
    }
    [[nodiscard]] VariableVertex parent_left() const { return {left, conditioning}; }
    [[nodiscard]] VariableVertex parent_right() const { return {right, conditioning}; }
    [[nodiscard]] VariableVertex child_left() const { return {left, conditioning.with(right)}; }
    [[nodiscard]] VariableVertex child_right() const { return {right, conditioning.with(left)}; }
};

/// The vine computational graph: d-1 levels of copula vertices, with
/// variable vertices implied as their parents/children.  Immutable in
/// structure after construction; copulas may be attached level by level
/// during fitting.
class VineModel {
  public:
    VineModel(int d, std::vector<std::vector<CopulaVertex>> levels);

    [[nodiscard]] int dim() const { return d_; }
    [[nodiscard]] int num_levels() const { return d_ - 1; }
    [[nodiscard]] const std::vector<CopulaVertex>& level(int k) const { return levels_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] std::vector<CopulaVertex>& level_mutable(int k) { return levels_[static_cast<std::size_t>(k)]; }

    /// The unique copula vertex at `level` whose conditioned-plus-conditioning
    /// set equals `total`, or nullptr.
    [[nodiscard]] const CopulaVertex* find_by_total(int level, VarSet total) const;

    /// Locate the copula vertex that produced {l|S} as a child (level |S|-1,
    /// total {l} u S, with l in the conditioned pair), or nullptr.
    [[nodiscard]] const CopulaVertex* producer_of(const VariableVertex& v) const;

    // metadata carried through serialization
    std::vector<int> default_order;
    VarSet cond_set;
    std::string provenance;

  private:
    int d_;
    std::vector<std::vector<CopulaVertex>> levels_;
    std::vector<std::unordered_map<VarSet, int>> by_total_;
};

/// Check a model against the graph contract.  Returns the full list of
/// violations (cardinalities, well-formedness, proximity, acyclicity,
/// spanning); empty iff the model is a valid vine computational graph.
std::vector<std::string> validate(const VineModel& m);

/// The canonical d=5 test structure used throughout the test suite:
/// level 0 {0,2},{1,2},{2,4},{3,4}; level 1 {0,4;2},{1,4;2},{2,3;4};
/// level 2 {0,3;2,4},{1,3;2,4}; level 3 {0,1;2,3,4}.  Structure only,
/// no copulas attached.
VineModel fig1a_fixture();

/// D-vine structure whose level-0 edges follow the given path.
VineModel path_vine_structure(const std::vector<int>& path);

/// C-vine structure with the given center order (d-1 centers for dimension
/// centers.size()+1; the last remaining variable is the leaf).
VineModel star_vine_structure(const std::vector<int>& centers);

/// Graphviz DOT rendering of the full DAG: every variable vertex (parents
/// and children) as an ellipse labeled "l|S", copula vertices as boxes
/// labeled "l,r;S", directed edges variable -> copula -> child variable.
std::string export_dot(const VineModel& m);

}  // namespace vinecg

template <>
struct std::hash<vinecg::VariableVertex> {
    std::size_t operator()(const vinecg::VariableVertex& v) const noexcept {
        const std::uint64_t h = v.conditioning.bits() * 0x9e3779b97f4a7c15ull +
                                static_cast<std::uint64_t>(v.conditioned);
        return std::hash<std::uint64_t>{}(h);
    }
};
