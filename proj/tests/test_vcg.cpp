#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "vinecg/errors.hpp"
#include "vinecg/vcg.hpp"

using namespace vinecg;

namespace {

int count_occurrences(const std::string& text, const std::string& needle) {
    int n = 0;
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

}  // namespace

TEST_CASE("vertex keys are canonical") {
    const VariableVertex v{3, VarSet::of({1, 4})};
    CHECK(v.key() == "3|1,4");
    CHECK(v.depth() == 2);
    const CopulaVertex c(4, 1, VarSet::of({2}));
    CHECK(c.left == 1);
    CHECK(c.right == 4);
    CHECK(c.key() == "1,4;2");
    CHECK(c.child_left() == VariableVertex{1, VarSet::of({2, 4})});
    CHECK(c.child_right() == VariableVertex{4, VarSet::of({1, 2})});
}

TEST_CASE("fig1a fixture matches the documented structure and validates") {
    const VineModel m = fig1a_fixture();
    CHECK(m.dim() == 5);
    CHECK(validate(m).empty());

    CHECK(m.level(0).size() == 4);
    CHECK(m.level(1).size() == 3);
    CHECK(m.level(2).size() == 2);
    CHECK(m.level(3).size() == 1);

    // level 2 contains {1,3;2,4}
    bool found = false;
    for (const CopulaVertex& v : m.level(2)) found = found || v.key() == "1,3;2,4";
    CHECK(found);

    // the child of {2,4} on the right branch is {4|2}
    const CopulaVertex* v24 = m.find_by_total(0, VarSet::of({2, 4}));
    REQUIRE(v24 != nullptr);
    CHECK(v24->child_right() == VariableVertex{4, VarSet::of({2})});
}

TEST_CASE("validate flags a proximity violation") {
    // d=3 with level-0 edges {0,1},{1,2} but a level-1 vertex conditioned on 0:
    // its parent {2|0} is never produced below
    std::vector<std::vector<CopulaVertex>> levels(2);
    levels[0] = {CopulaVertex(0, 1, {}), CopulaVertex(1, 2, {})};
    levels[1] = {CopulaVertex(1, 2, VarSet::of({0}))};
    const VineModel bad(3, std::move(levels));
    const auto report = validate(bad);
    REQUIRE(!report.empty());
    bool has_proximity = false;
    for (const std::string& r : report) has_proximity = has_proximity || r.find("proximity") != std::string::npos;
    CHECK(has_proximity);
}

TEST_CASE("validate flags missing edges as cardinality violations") {
    std::vector<std::vector<CopulaVertex>> levels(3);
    levels[0] = {CopulaVertex(0, 1, {}), CopulaVertex(1, 2, {})};  // missing one of three
    levels[1] = {CopulaVertex(0, 2, VarSet::of({1})), CopulaVertex(1, 3, VarSet::of({2}))};
    levels[2] = {CopulaVertex(0, 3, VarSet::of({1, 2}))};
    const VineModel bad(4, std::move(levels));
    const auto report = validate(bad);
    bool has_cardinality = false;
    for (const std::string& r : report)
        has_cardinality = has_cardinality || (r.find("cardinality") != std::string::npos &&
                                              r.find("level 0 has 2") != std::string::npos);
    CHECK(has_cardinality);
}

TEST_CASE("validate flags cycles and disconnection") {
    std::vector<std::vector<CopulaVertex>> levels(3);
    levels[0] = {CopulaVertex(0, 1, {}), CopulaVertex(1, 2, {}), CopulaVertex(0, 2, {})};  // triangle
    levels[1] = {CopulaVertex(0, 2, VarSet::of({1})), CopulaVertex(1, 3, VarSet::of({2}))};
    levels[2] = {CopulaVertex(0, 3, VarSet::of({1, 2}))};
    const VineModel bad(4, std::move(levels));
    const auto report = validate(bad);
    bool has_cycle = false, has_disconnect = false;
    for (const std::string& r : report) {
        has_cycle = has_cycle || r.find("acyclicity: level 0") != std::string::npos;
        has_disconnect = has_disconnect || r.find("spanning: level 0") != std::string::npos;
    }
    CHECK(has_cycle);
    CHECK(has_disconnect);  // variable 3 is untouched at level 0
}

TEST_CASE("children of a copula vertex carry the enlarged conditioning sets") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const VineModel m = oracles::random_vine(6, seed);
        for (int k = 0; k < m.num_levels(); ++k) {
            for (const CopulaVertex& v : m.level(k)) {
                CHECK(v.child_left().conditioning == v.conditioning.with(v.right));
                CHECK(v.child_right().conditioning == v.conditioning.with(v.left));
            }
        }
    }
}

TEST_CASE("level-k totals are pairwise distinct") {
    const VineModel m = oracles::random_vine(8, 9);
    for (int k = 0; k < m.num_levels(); ++k) {
        std::vector<VarSet> totals;
        for (const CopulaVertex& v : m.level(k)) totals.push_back(v.total());
        std::sort(totals.begin(), totals.end());
        CHECK(std::adjacent_find(totals.begin(), totals.end()) == totals.end());
    }
}

TEST_CASE("dimension bounds") {
    CHECK_THROWS_AS(VineModel(1, {}), std::invalid_argument);
    CHECK_THROWS_AS(VineModel(65, std::vector<std::vector<CopulaVertex>>(64)), std::invalid_argument);
}

TEST_CASE("export_dot renders the full DAG") {
    // d=2: one box, its two top-level parents, its two children
    std::vector<std::vector<CopulaVertex>> levels(1);
    levels[0] = {CopulaVertex(0, 1, {})};
    const VineModel d2(2, std::move(levels));
    const std::string dot2 = export_dot(d2);
    CHECK(count_occurrences(dot2, "shape=ellipse") == 4);
    CHECK(count_occurrences(dot2, "shape=box") == 1);
    CHECK(count_occurrences(dot2, "-> c0_1") == 2);       // up-edges into the box
    CHECK(count_occurrences(dot2, "c0_1 ->") == 2);       // down-edges out of it
    CHECK(dot2.find("label=\"0,1;\"") != std::string::npos);

    const std::string dot = export_dot(fig1a_fixture());
    CHECK(count_occurrences(dot, "shape=box") == 10);
    // parents and children per depth: 5 + 8 + 6 + 4 + 2
    CHECK(count_occurrences(dot, "shape=ellipse") == 25);
    CHECK(count_occurrences(dot, " -> ") == 40);  // 20 up + 20 down

    // invalid model is rejected
    std::vector<std::vector<CopulaVertex>> broken(1);
    broken[0] = {};
    CHECK_THROWS_AS(export_dot(VineModel(2, std::move(broken))), StructureError);
}

TEST_CASE("canonical path and star structures validate") {
    CHECK(validate(path_vine_structure({0, 1, 2, 3, 4, 5})).empty());
    CHECK(validate(star_vine_structure({0, 1, 2, 3})).empty());
    CHECK(validate(path_vine_structure({3, 0, 2, 1})).empty());
    CHECK(validate(star_vine_structure({2, 0, 1})).empty());
}
