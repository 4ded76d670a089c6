#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "vinecg/bicop.hpp"
#include "vinecg/deptools.hpp"
#include "vinecg/vcg.hpp"

namespace vinecg {

enum class StructureKind { rvine, cvine, dvine };

struct BuildConfig {
    VarSet cond_set;
    StructureKind structure_kind = StructureKind::rvine;
    std::vector<CopulaFamily> family_set = {CopulaFamily::independence, CopulaFamily::gaussian,
                                            CopulaFamily::clayton, CopulaFamily::gumbel,
                                            CopulaFamily::frank};
    FitMethod fit_method = FitMethod::itau;
    double independence_threshold = 0.01;
    double tsp_epsilon = 1e-6;
};

/// Disjoint-set forest over string keys with path compression and union by
/// rank.  Vertex keys may be aliased onto a shared root so that vertices
/// covering the same variable subset start out connected.
class DisjointSet {
  public:
    /// Ensure `key` exists as its own root.
    void make_set(const std::string& key);
    /// Insert `key` with parent `root` (which is created if absent).
    void alias(const std::string& key, const std::string& root);
    [[nodiscard]] bool contains(const std::string& key) const { return parent_.contains(key); }

    std::string find(const std::string& key);
    /// Join the two components; returns false when already connected.
    bool unite(const std::string& a, const std::string& b);
    bool connected(const std::string& a, const std::string& b);

  private:
    std::unordered_map<std::string, std::string> parent_;
    std::unordered_map<std::string, int> rank_;
};

/// A variable vertex together with its pseudo-observation column.
struct LevelVertex {
    VariableVertex vertex;
    std::vector<double> column;
};

struct CandidateEdge {
    CopulaVertex vertex;  // no copula attached yet
    double weight = 0.0;  // |Kendall's tau| of the two parent columns
};

/// All pairs of level vertices sharing the same conditioning set, one
/// candidate copula vertex per pair, weighted by |tau|.
std::vector<CandidateEdge> candidate_edges(const std::vector<LevelVertex>& verts);

/// Two-stage Kruskal over candidates sorted by weight descending (ties by
/// key ascending): stage one scans only candidates inside cond_set until
/// the level quota |cond_set|-k-1 is met, stage two scans everything left
/// until the level holds d-k-1 acyclic edges.
std::vector<CopulaVertex> kruskal_two_stage(const std::vector<CandidateEdge>& sorted_candidates,
                                            VarSet cond_set, int level, int d);

/// Structure selection plus level-by-level fitting.  Dispatches on
/// cfg.structure_kind.
VineModel build(const PseudoObsMatrix& obs, const BuildConfig& cfg = {});

VineModel build_rvine(const PseudoObsMatrix& obs, const BuildConfig& cfg);
VineModel build_cvine(const PseudoObsMatrix& obs, const BuildConfig& cfg);
VineModel build_dvine(const PseudoObsMatrix& obs, const BuildConfig& cfg);

/// Refit pair copulas on a fixed structure.
VineModel fit_with_structure(const PseudoObsMatrix& obs, const VineModel& structure,
                             const BuildConfig& cfg = {});

}  // namespace vinecg
