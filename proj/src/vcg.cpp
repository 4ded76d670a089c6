#include "vinecg/vcg.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "vinecg/errors.hpp"

namespace vinecg {

CopulaVertex::CopulaVertex(int a, int b, VarSet cond, std::optional<BivariateCopula> cop)
    : left(std::min(a, b)), right(std::max(a, b)), conditioning(cond), copula(std::move(cop)) {
    if (a == b) throw std::invalid_argument("copula vertex: conditioned pair must be distinct");
}

VineModel::VineModel(int d, std::vector<std::vector<CopulaVertex>> levels)
    : d_(d), levels_(std::move(levels)) {
    if (d_ < 2) throw std::invalid_argument("vine model: dimension must be >= 2, got " + std::to_string(d_));
    if (d_ > 64) throw std::invalid_argument("vine model: dimension must be <= 64, got " + std::to_string(d_));
    if (levels_.size() != static_cast<std::size_t>(d_ - 1))
        throw std::invalid_argument("vine model: expected " + std::to_string(d_ - 1) +
                                    " levels, got " + std::to_string(levels_.size()));
    by_total_.resize(levels_.size());
    for (std::size_t k = 0; k < levels_.size(); ++k) {
        for (std::size_t i = 0; i < levels_[k].size(); ++i) {
            by_total_[k].emplace(levels_[k][i].total(), static_cast<int>(i));
        }
    }
}

const CopulaVertex* VineModel::find_by_total(int level, VarSet total) const {
    if (level < 0 || level >= num_levels()) return nullptr;
    const auto& map = by_total_[static_cast<std::size_t>(level)];
    const auto it = map.find(total);
    if (it == map.end()) return nullptr;
    return &levels_[static_cast<std::size_t>(level)][static_cast<std::size_t>(it->second)];
}

const CopulaVertex* VineModel::producer_of(const VariableVertex& v) const {
    if (v.depth() == 0) return nullptr;
    const CopulaVertex* cv = find_by_total(v.depth() - 1, v.total());
    if (cv == nullptr) return nullptr;
    if (cv->left != v.conditioned && cv->right != v.conditioned) return nullptr;
    return cv;
}

namespace {

// union-find over VarSet node keys, local to validation
struct NodeForest {
    std::unordered_map<VarSet, VarSet> parent;
    void make(VarSet x) { parent.emplace(x, x); }
    bool has(VarSet x) const { return parent.contains(x); }
    VarSet find(VarSet x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool unite(VarSet a, VarSet b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

}  // namespace

std::vector<std::string> validate(const VineModel& m) {
    std::vector<std::string> out;
    const int d = m.dim();

    for (int k = 0; k < m.num_levels(); ++k) {
        const auto& lv = m.level(k);
        const int expected = d - k - 1;
        if (static_cast<int>(lv.size()) != expected) {
            std::ostringstream os;
            os << "cardinality: level " << k << " has " << lv.size() << " copula vertices, expected "
               << expected;
            out.push_back(os.str());
        }

        // per-vertex well-formedness
        for (const auto& v : lv) {
            if (v.left < 0 || v.right >= d)
                out.push_back("range: vertex {" + v.key() + "} uses variables outside 0.." +
                              std::to_string(d - 1));
            if (v.conditioning.contains(v.left) || v.conditioning.contains(v.right))
                out.push_back("overlap: vertex {" + v.key() +
                              "} has conditioned variables inside its conditioning set");
            if (v.level() != k)
                out.push_back("level: vertex {" + v.key() + "} stored at level " + std::to_string(k) +
                              " but has conditioning size " + std::to_string(v.level()));
        }

        // distinct (k+2)-subsets
        std::unordered_map<VarSet, const CopulaVertex*> seen;
        for (const auto& v : lv) {
            auto [it, fresh] = seen.emplace(v.total(), &v);
            if (!fresh)
                out.push_back("duplicate: vertices {" + it->second->key() + "} and {" + v.key() +
                              "} at level " + std::to_string(k) + " cover the same variable subset");
        }

        // proximity: both parents must be produced one level below
        if (k >= 1) {
            for (const auto& v : lv) {
                for (const VariableVertex p : {v.parent_left(), v.parent_right()}) {
                    if (m.producer_of(p) == nullptr)
                        out.push_back("proximity: parent {" + p.key() + "} of {" + v.key() +
                                      "} is not produced at level " + std::to_string(k - 1));
                }
            }
        }

        // per-level spanning tree over the classical nodes
        NodeForest forest;
        if (k == 0) {
            for (int j = 0; j < d; ++j) forest.make(VarSet::of({j}));
        } else {
            for (const auto& below : m.level(k - 1)) forest.make(below.total());
        }
        const std::size_t nodes = forest.parent.size();
        bool cycle = false;
        std::size_t joins = 0;
        for (const auto& v : lv) {
            const VarSet a = v.conditioning.with(v.left);
            const VarSet b = v.conditioning.with(v.right);
            if (!forest.has(a) || !forest.has(b)) continue;  // reported via proximity
            if (forest.unite(a, b))
                ++joins;
            else
                cycle = true;
        }
        if (cycle) out.push_back("acyclicity: level " + std::to_string(k) + " edges contain a cycle");
        if (nodes > 0 && joins + 1 != nodes)
            out.push_back("spanning: level " + std::to_string(k) + " graph is disconnected (" +
                          std::to_string(nodes - joins) + " components over " + std::to_string(nodes) +
                          " nodes)");
    }
    return out;
}

VineModel fig1a_fixture() {
    std::vector<std::vector<CopulaVertex>> levels(4);
    levels[0] = {CopulaVertex(0, 2, {}), CopulaVertex(1, 2, {}), CopulaVertex(2, 4, {}),
                 CopulaVertex(3, 4, {})};
    levels[1] = {CopulaVertex(0, 4, VarSet::of({2})), CopulaVertex(1, 4, VarSet::of({2})),
                 CopulaVertex(2, 3, VarSet::of({4}))};
    levels[2] = {CopulaVertex(0, 3, VarSet::of({2, 4})), CopulaVertex(1, 3, VarSet::of({2, 4}))};
    levels[3] = {CopulaVertex(0, 1, VarSet::of({2, 3, 4}))};
    return VineModel(5, std::move(levels));
}

VineModel path_vine_structure(const std::vector<int>& path) {
    const int d = static_cast<int>(path.size());
    std::vector<std::vector<CopulaVertex>> levels(static_cast<std::size_t>(std::max(1, d - 1)));
    for (int k = 0; k <= d - 2; ++k) {
        for (int i = 0; i + k + 1 <= d - 1; ++i) {
            VarSet cond;
            for (int t = i + 1; t < i + k + 1; ++t) cond.insert(path[static_cast<std::size_t>(t)]);
            levels[static_cast<std::size_t>(k)].emplace_back(path[static_cast<std::size_t>(i)],
                                                             path[static_cast<std::size_t>(i + k + 1)], cond);
        }
    }
    return VineModel(d, std::move(levels));
}

VineModel star_vine_structure(const std::vector<int>& centers) {
    const int d = static_cast<int>(centers.size()) + 1;
    VarSet used;
    std::vector<std::vector<CopulaVertex>> levels(static_cast<std::size_t>(d - 1));
    VarSet rest = VarSet::full(d);
    for (int k = 0; k < d - 1; ++k) {
        const int c = centers[static_cast<std::size_t>(k)];
        rest.erase(c);
        for (int other : rest.to_vector())
            levels[static_cast<std::size_t>(k)].emplace_back(c, other, used);
        used.insert(c);
    }
    return VineModel(d, std::move(levels));
}

std::string export_dot(const VineModel& m) {
    if (const auto report = validate(m); !report.empty())
        throw StructureError("export_dot: model is not a valid vine computational graph: " + report.front());

    auto var_id = [](const VariableVertex& v) {
        std::string id = "v" + std::to_string(v.conditioned);
        for (int s : v.conditioning.to_vector()) id += "_" + std::to_string(s);
        return id;
    };
    auto cop_id = [](const CopulaVertex& v) {
        std::string id = "c" + std::to_string(v.left) + "_" + std::to_string(v.right);
        for (int s : v.conditioning.to_vector()) id += "_" + std::to_string(s);
        return id;
    };

    // collect variable vertices by depth: all parents and all children
    std::map<int, std::set<std::pair<std::string, std::string>>> vars;  // depth -> (key, id)
    for (int k = 0; k < m.num_levels(); ++k) {
        for (const auto& v : m.level(k)) {
            for (const VariableVertex& p : {v.parent_left(), v.parent_right()})
                vars[p.depth()].insert({p.key(), var_id(p)});
            for (const VariableVertex& c : {v.child_left(), v.child_right()})
                vars[c.depth()].insert({c.key(), var_id(c)});
        }
    }

    std::ostringstream os;
    os << "digraph vcg {\n";
    os << "  rankdir=TB;\n";
    for (const auto& [depth, set] : vars) {
        os << "  { rank=same;";
        for (const auto& [key, id] : set) os << " " << id << ";";
        os << " }\n";
        for (const auto& [key, id] : set)
            os << "  " << id << " [shape=ellipse, label=\"" << key << "\"];\n";
    }
    for (int k = 0; k < m.num_levels(); ++k) {
        std::vector<const CopulaVertex*> sorted;
        for (const auto& v : m.level(k)) sorted.push_back(&v);
        std::sort(sorted.begin(), sorted.end(),
                  [](const CopulaVertex* a, const CopulaVertex* b) { return a->key() < b->key(); });
        for (const CopulaVertex* v : sorted)
            os << "  " << cop_id(*v) << " [shape=box, label=\"" << v->key() << "\"];\n";
        for (const CopulaVertex* v : sorted) {
            os << "  " << var_id(v->parent_left()) << " -> " << cop_id(*v) << ";\n";
            os << "  " << var_id(v->parent_right()) << " -> " << cop_id(*v) << ";\n";
            os << "  " << cop_id(*v) << " -> " << var_id(v->child_left()) << ";\n";
            os << "  " << cop_id(*v) << " -> " << var_id(v->child_right()) << ";\n";
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace vinecg
