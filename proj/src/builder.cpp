#include "vinecg/builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "vinecg/errors.hpp"

namespace vinecg {

// ---------------------------------------------------------------------------
// DisjointSet

void DisjointSet::make_set(const std::string& key) {
    if (parent_.contains(key)) return;
    parent_.emplace(key, key);
    rank_.emplace(key, 0);
}

void DisjointSet::alias(const std::string& key, const std::string& root) {
    make_set(root);
    if (parent_.contains(key)) return;
    parent_.emplace(key, root);
    rank_.emplace(key, 0);
}

std::string DisjointSet::find(const std::string& key) {
    auto it = parent_.find(key);
    if (it == parent_.end()) throw std::invalid_argument("disjoint set: unknown key \"" + key + "\"");
    if (it->second != key) it->second = find(it->second);  // path compression
    return it->second;
}

bool DisjointSet::unite(const std::string& a, const std::string& b) {
    std::string ra = find(a), rb = find(b);
    if (ra == rb) return false;
    if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    if (rank_[ra] == rank_[rb]) ++rank_[ra];
    return true;
}

bool DisjointSet::connected(const std::string& a, const std::string& b) { return find(a) == find(b); }

// ---------------------------------------------------------------------------
// Candidate enumeration and selection

std::vector<CandidateEdge> candidate_edges(const std::vector<LevelVertex>& verts) {
    std::vector<CandidateEdge> out;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        for (std::size_t j = i + 1; j < verts.size(); ++j) {
            const auto& a = verts[i];
            const auto& b = verts[j];
            if (a.vertex.conditioning != b.vertex.conditioning) continue;  // proximity
            const double w = std::abs(kendall_tau(a.column, b.column));
            out.push_back({CopulaVertex(a.vertex.conditioned, b.vertex.conditioned,
                                        a.vertex.conditioning),
                           w});
        }
    }
    return out;
}

namespace {

void sort_candidates(std::vector<CandidateEdge>& cands) {
    std::sort(cands.begin(), cands.end(), [](const CandidateEdge& a, const CandidateEdge& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.vertex.key() < b.vertex.key();
    });
}

}  // namespace

std::vector<CopulaVertex> kruskal_two_stage(const std::vector<CandidateEdge>& cands, VarSet cond_set,
                                            int level, int d) {
    DisjointSet ds;
    auto node_key = [](VarSet total) { return total.to_string(); };
    for (const CandidateEdge& c : cands) {
        ds.make_set(node_key(c.vertex.conditioning.with(c.vertex.left)));
        ds.make_set(node_key(c.vertex.conditioning.with(c.vertex.right)));
    }

    std::vector<CopulaVertex> selected;
    std::vector<bool> taken(cands.size(), false);
    const int want = d - level - 1;
    auto try_add = [&](std::size_t i) {
        const CopulaVertex& v = cands[i].vertex;
        const std::string a = node_key(v.conditioning.with(v.left));
        const std::string b = node_key(v.conditioning.with(v.right));
        if (!ds.unite(a, b)) return false;
        selected.push_back(v);
        taken[i] = true;
        return true;
    };

    // stage one: candidates entirely inside the conditioning set, up to the
    // level quota |cond_set|-k-1
    const int quota = cond_set.size() - level - 1;
    if (quota > 0) {
        int placed = 0;
        for (std::size_t i = 0; i < cands.size() && placed < quota; ++i) {
            if (!cands[i].vertex.total().is_subset_of(cond_set)) continue;
            if (try_add(i)) ++placed;
        }
    }
    // stage two: everything not yet taken
    for (std::size_t i = 0; i < cands.size() && static_cast<int>(selected.size()) < want; ++i) {
        if (taken[i]) continue;
        try_add(i);
    }
    if (static_cast<int>(selected.size()) < want)
        throw StructureError("level " + std::to_string(level) + ": only " +
                             std::to_string(selected.size()) + " of " + std::to_string(want) +
                             " edges selectable (proximity starvation)");
    return selected;
}

// ---------------------------------------------------------------------------
// Level fitting shared by all three builders

namespace {

void check_obs(const PseudoObsMatrix& obs, const BuildConfig& cfg) {
    if (obs.d < 2) throw std::invalid_argument("build: need dimension >= 2, got " + std::to_string(obs.d));
    if (obs.d > 64) throw std::invalid_argument("build: dimension must be <= 64");
    if (obs.n < 10) throw DataError("build: need at least 10 rows, got " + std::to_string(obs.n));
    if (!cfg.cond_set.is_subset_of(VarSet::full(static_cast<int>(obs.d))))
        throw std::invalid_argument("build: cond_set contains out-of-range variables");
    if (cfg.cond_set.size() >= static_cast<int>(obs.d))
        throw std::invalid_argument("build: cond_set must leave at least one free variable");
    for (std::size_t j = 0; j < obs.d; ++j) {
        const auto col = obs.col(j);
        bool constant = true;
        for (std::size_t i = 0; i < obs.n; ++i) {
            if (!(col[i] > 0.0 && col[i] < 1.0))
                throw DataError("build: observation (" + std::to_string(i) + "," + std::to_string(j) +
                                ") outside (0,1)");
            if (col[i] != col[0]) constant = false;
        }
        if (constant)
            throw DataError("build: column " + std::to_string(j) + " is degenerate (constant ranks)");
    }
}

std::vector<LevelVertex> top_level_vertices(const PseudoObsMatrix& obs) {
    std::vector<LevelVertex> verts;
    verts.reserve(obs.d);
    for (std::size_t j = 0; j < obs.d; ++j) {
        const auto col = obs.col(j);
        verts.push_back({VariableVertex{static_cast<int>(j), {}},
                         std::vector<double>(col.begin(), col.end())});
    }
    return verts;
}

// Fit the selected vertices on their parent columns and compute both child
// pseudo-observation columns per vertex.
std::vector<LevelVertex> fit_level(std::vector<CopulaVertex>& selected,
                                   const std::vector<LevelVertex>& verts, const BuildConfig& cfg) {
    std::unordered_map<VariableVertex, const std::vector<double>*> cols;
    for (const LevelVertex& lv : verts) cols.emplace(lv.vertex, &lv.column);

    std::sort(selected.begin(), selected.end(),
              [](const CopulaVertex& a, const CopulaVertex& b) { return a.key() < b.key(); });

    std::vector<LevelVertex> next;
    const FitConfig fit_cfg{cfg.fit_method, cfg.independence_threshold};
    for (CopulaVertex& v : selected) {
        const auto lit = cols.find(v.parent_left());
        const auto rit = cols.find(v.parent_right());
        if (lit == cols.end() || rit == cols.end())
            throw StructureError("build: parents of {" + v.key() + "} have no pseudo-observations");
        const std::vector<double>& ul = *lit->second;
        const std::vector<double>& ur = *rit->second;
        v.copula = fit(cfg.family_set, ul, ur, fit_cfg);

        const std::size_t n = ul.size();
        std::vector<double> cl(n), cr(n);
        for (std::size_t i = 0; i < n; ++i) {
            cl[i] = hfunc1(*v.copula, ul[i], ur[i]);
            cr[i] = hfunc2(*v.copula, ul[i], ur[i]);
        }
        next.push_back({v.child_left(), std::move(cl)});
        next.push_back({v.child_right(), std::move(cr)});
    }
    return next;
}

}  // namespace

// ---------------------------------------------------------------------------
// R-vine

VineModel build_rvine(const PseudoObsMatrix& obs, const BuildConfig& cfg) {
    check_obs(obs, cfg);
    const int d = static_cast<int>(obs.d);
    std::vector<LevelVertex> verts = top_level_vertices(obs);
    std::vector<std::vector<CopulaVertex>> levels(static_cast<std::size_t>(d - 1));
    for (int k = 0; k <= d - 2; ++k) {
        std::vector<CandidateEdge> cands = candidate_edges(verts);
        sort_candidates(cands);
        std::vector<CopulaVertex> selected = kruskal_two_stage(cands, cfg.cond_set, k, d);
        verts = fit_level(selected, verts, cfg);
        levels[static_cast<std::size_t>(k)] = std::move(selected);
    }
    VineModel m(d, std::move(levels));
    m.cond_set = cfg.cond_set;
    return m;
}

// ---------------------------------------------------------------------------
// C-vine: one star per level; the center maximizes the |tau| row sum among
// the vertices its conditioned variable is allowed to come from.

VineModel build_cvine(const PseudoObsMatrix& obs, const BuildConfig& cfg) {
    check_obs(obs, cfg);
    const int d = static_cast<int>(obs.d);
    std::vector<LevelVertex> verts = top_level_vertices(obs);
    std::vector<std::vector<CopulaVertex>> levels(static_cast<std::size_t>(d - 1));

    for (int k = 0; k <= d - 2; ++k) {
        const bool want_cond_center = k < cfg.cond_set.size();
        std::vector<std::vector<double>> tau(verts.size(), std::vector<double>(verts.size(), 0.0));
        for (std::size_t i = 0; i < verts.size(); ++i)
            for (std::size_t j = i + 1; j < verts.size(); ++j)
                tau[i][j] = tau[j][i] = std::abs(kendall_tau(verts[i].column, verts[j].column));

        int center = -1;
        double best_sum = -1.0;
        for (std::size_t i = 0; i < verts.size(); ++i) {
            const int var = verts[i].vertex.conditioned;
            if (want_cond_center != cfg.cond_set.contains(var)) continue;
            double sum = 0.0;
            for (std::size_t j = 0; j < verts.size(); ++j) sum += tau[i][j];
            if (sum > best_sum || (sum == best_sum && var < verts[static_cast<std::size_t>(center)].vertex.conditioned)) {
                best_sum = sum;
                center = static_cast<int>(i);
            }
        }
        if (center < 0) throw StructureError("cvine: no admissible center at level " + std::to_string(k));

        std::vector<CopulaVertex> selected;
        for (std::size_t j = 0; j < verts.size(); ++j) {
            if (static_cast<int>(j) == center) continue;
            selected.emplace_back(verts[static_cast<std::size_t>(center)].vertex.conditioned,
                                  verts[j].vertex.conditioned, verts[j].vertex.conditioning);
        }
        std::vector<LevelVertex> children = fit_level(selected, verts, cfg);
        levels[static_cast<std::size_t>(k)] = std::move(selected);

        // keep only the children conditioned on the new center
        const int center_var = verts[static_cast<std::size_t>(center)].vertex.conditioned;
        std::vector<LevelVertex> next;
        for (LevelVertex& ch : children) {
            if (ch.vertex.conditioned != center_var) next.push_back(std::move(ch));
        }
        verts = std::move(next);
    }
    VineModel m(d, std::move(levels));
    m.cond_set = cfg.cond_set;
    return m;
}

// ---------------------------------------------------------------------------
// D-vine: a Hamiltonian path at level 0 (nearest neighbor + 2-opt on
// log(1 + 1/(w+eps)) travel costs, keeping cond_set contiguous); all higher
// levels are forced by proximity.

namespace {

struct TspCosts {
    std::vector<std::vector<double>> cost;
    double path_cost(const std::vector<int>& p) const {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < p.size(); ++i)
            s += cost[static_cast<std::size_t>(p[i])][static_cast<std::size_t>(p[i + 1])];
        return s;
    }
};

bool cond_contiguous(const std::vector<int>& path, VarSet cond) {
    if (cond.size() <= 1) return true;
    int first = -1, last = -1;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (cond.contains(path[i])) {
            if (first < 0) first = static_cast<int>(i);
            last = static_cast<int>(i);
        }
    }
    return last - first + 1 == cond.size();
}

// nearest-neighbor chain over `pool`, growing from both ends of `path`
void extend_nearest(std::vector<int>& path, VarSet pool, const TspCosts& tc) {
    while (!pool.empty()) {
        double best = std::numeric_limits<double>::infinity();
        int best_var = -1;
        bool at_front = false;
        for (int v : pool.to_vector()) {
            const double cf = tc.cost[static_cast<std::size_t>(path.front())][static_cast<std::size_t>(v)];
            const double cb = tc.cost[static_cast<std::size_t>(path.back())][static_cast<std::size_t>(v)];
            if (cf < best) best = cf, best_var = v, at_front = true;
            if (cb < best) best = cb, best_var = v, at_front = false;
        }
        if (at_front)
            path.insert(path.begin(), best_var);
        else
            path.push_back(best_var);
        pool.erase(best_var);
    }
}

void two_opt(std::vector<int>& path, VarSet cond, const TspCosts& tc) {
    bool improved = true;
    int guard = 0;
    while (improved && guard++ < 200) {
        improved = false;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            for (std::size_t j = i + 1; j < path.size(); ++j) {
                std::vector<int> trial = path;
                std::reverse(trial.begin() + static_cast<std::ptrdiff_t>(i),
                             trial.begin() + static_cast<std::ptrdiff_t>(j) + 1);
                if (!cond_contiguous(trial, cond)) continue;
                if (tc.path_cost(trial) < tc.path_cost(path) - 1e-12) {
                    path = std::move(trial);
                    improved = true;
                }
            }
        }
    }
}

}  // namespace

VineModel build_dvine(const PseudoObsMatrix& obs, const BuildConfig& cfg) {
    check_obs(obs, cfg);
    const int d = static_cast<int>(obs.d);

    TspCosts tc;
    tc.cost.assign(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d), 0.0));
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const double w = std::abs(kendall_tau(obs.col(static_cast<std::size_t>(i)),
                                                  obs.col(static_cast<std::size_t>(j))));
            const double c = std::log(1.0 + 1.0 / (w + cfg.tsp_epsilon));
            tc.cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c;
            tc.cost[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = c;
        }
    }

    std::vector<int> best_path;
    double best_cost = std::numeric_limits<double>::infinity();
    const VarSet frees = VarSet::full(d) - cfg.cond_set;
    if (cfg.cond_set.size() >= 2) {
        // grow the cond block first (so it stays contiguous), then the rest
        for (int start : cfg.cond_set.to_vector()) {
            std::vector<int> path{start};
            extend_nearest(path, cfg.cond_set.without(start), tc);
            extend_nearest(path, frees, tc);
            two_opt(path, cfg.cond_set, tc);
            const double c = tc.path_cost(path);
            if (c < best_cost) {
                best_cost = c;
                best_path = std::move(path);
            }
        }
    } else {
        for (int start = 0; start < d; ++start) {
            std::vector<int> path{start};
            extend_nearest(path, VarSet::full(d).without(start), tc);
            two_opt(path, cfg.cond_set, tc);
            const double c = tc.path_cost(path);
            if (c < best_cost) {
                best_cost = c;
                best_path = std::move(path);
            }
        }
    }

    // structure is fully determined by the path; fit level by level
    VineModel skeleton = path_vine_structure(best_path);
    std::vector<LevelVertex> verts = top_level_vertices(obs);
    std::vector<std::vector<CopulaVertex>> levels(static_cast<std::size_t>(d - 1));
    for (int k = 0; k <= d - 2; ++k) {
        std::vector<CopulaVertex> selected = skeleton.level(k);
        verts = fit_level(selected, verts, cfg);
        levels[static_cast<std::size_t>(k)] = std::move(selected);
    }
    VineModel m(d, std::move(levels));
    m.cond_set = cfg.cond_set;
    return m;
}

VineModel build(const PseudoObsMatrix& obs, const BuildConfig& cfg) {
    switch (cfg.structure_kind) {
        case StructureKind::rvine: return build_rvine(obs, cfg);
        case StructureKind::cvine: return build_cvine(obs, cfg);
        case StructureKind::dvine: return build_dvine(obs, cfg);
    }
    throw std::invalid_argument("build: unknown structure kind");
}

VineModel fit_with_structure(const PseudoObsMatrix& obs, const VineModel& structure,
                             const BuildConfig& cfg) {
    check_obs(obs, cfg);
    if (static_cast<int>(obs.d) != structure.dim())
        throw std::invalid_argument("fit_with_structure: dimension mismatch");
    std::vector<LevelVertex> verts = top_level_vertices(obs);
    std::vector<std::vector<CopulaVertex>> levels(static_cast<std::size_t>(structure.dim() - 1));
    for (int k = 0; k <= structure.dim() - 2; ++k) {
        std::vector<CopulaVertex> selected = structure.level(k);
        for (CopulaVertex& v : selected) v.copula.reset();
        verts = fit_level(selected, verts, cfg);
        levels[static_cast<std::size_t>(k)] = std::move(selected);
    }
    VineModel m(structure.dim(), std::move(levels));
    m.cond_set = structure.cond_set;
    return m;
}

}  // namespace vinecg
