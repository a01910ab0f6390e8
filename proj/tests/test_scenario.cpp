#include "ctxlab/scenario.hpp"

#include <algorithm>
#include <set>

#include "ctxlab/errors.hpp"
#include "doctest.h"

using namespace ctxlab;

TEST_CASE("Outcome canonicalisation and set operations") {
    Outcome a({3, 1, 2, 1});
    CHECK(a.members() == std::vector<std::uint32_t>{1, 2, 3});
    CHECK(a.size() == 3);
    CHECK(a.contains(2));
    CHECK_FALSE(a.contains(4));

    Outcome b({4, 5});
    CHECK(a.is_disjoint(b));
    CHECK_FALSE(a.is_disjoint(Outcome({3, 4})));
    CHECK(Outcome({1, 2}).is_subset_of(a));
    CHECK_FALSE(a.is_subset_of(Outcome({1, 2})));
    CHECK(a.union_with(b) == Outcome({1, 2, 3, 4, 5}));
    CHECK(a.intersect_with(Outcome({2, 3, 4})) == Outcome({2, 3}));
    CHECK(Outcome().empty());
    CHECK(Outcome::full(3) == Outcome({0, 1, 2}));
    CHECK(Outcome({0, 1}).to_string() == "{0,1}");
}

TEST_CASE("Scenario constructor validates the partition property") {
    // Overlapping cells.
    CHECK_THROWS_AS(Scenario("bad", 2, {Measurement{{Outcome({0, 1}), Outcome({1})}}}),
                    InvalidArgument);
    // Not covering.
    CHECK_THROWS_AS(Scenario("bad", 3, {Measurement{{Outcome({0}), Outcome({1})}}}),
                    InvalidArgument);
    // Out of range.
    CHECK_THROWS_AS(Scenario("bad", 2, {Measurement{{Outcome({0}), Outcome({5})}}}),
                    InvalidArgument);
    // Empty cell.
    CHECK_THROWS_AS(Scenario("bad", 1, {Measurement{{Outcome({0}), Outcome()}}}),
                    InvalidArgument);
    // No measurements.
    CHECK_THROWS_AS(Scenario("bad", 1, {}), InvalidArgument);
    // Duplicate labels.
    CHECK_THROWS_AS(Scenario("bad", 2, {Measurement{{Outcome({0}), Outcome({1})}}},
                             std::vector<std::string>{"x", "x"}),
                    InvalidArgument);

    Scenario ok("ok", 2, {Measurement{{Outcome({1}), Outcome({0})}}});
    // Cells are re-sorted canonically.
    CHECK(ok.measurements()[0].cells[0] == Outcome({0}));
}

TEST_CASE("chsh preset has the textbook shape") {
    Scenario s = preset_scenario("chsh");
    CHECK(s.element_count() == 16);
    CHECK(s.measurements().size() == 4);
    for (const auto& m : s.measurements()) CHECK(m.cells.size() == 4);
    CHECK(s.n_boxes() == 4);
    CHECK(s.contexts() ==
          std::vector<std::vector<std::uint32_t>>{{0, 2}, {0, 3}, {1, 2}, {1, 3}});
    CHECK(s.has_labels());
    CHECK(s.labels().front() == "0000");
    CHECK(s.labels().back() == "1111");
    CHECK(s.fine_outcomes().size() == 16);
    // Every cell has 4 elements (two free bits).
    for (const auto& m : s.measurements())
        for (const auto& c : m.cells) CHECK(c.size() == 4);
}

TEST_CASE("specker preset: three boxes, pairwise contexts, full support") {
    Scenario s = preset_scenario("specker");
    CHECK(s.element_count() == 8);
    CHECK(s.measurements().size() == 3);
    for (const auto& m : s.measurements()) CHECK(m.cells.size() == 4);
    CHECK(s.fine_outcomes().size() == 12);
}

TEST_CASE("cycle support sizes follow the Lucas numbers") {
    CHECK(preset_scenario("cycle", {3}).element_count() == 4);
    CHECK(preset_scenario("cycle", {4}).element_count() == 7);
    CHECK(preset_scenario("cycle", {5}).element_count() == 11);
    CHECK(preset_scenario("cycle", {6}).element_count() == 18);
    CHECK(preset_scenario("cycle", {7}).element_count() == 29);
}

TEST_CASE("pentagon preset: eleven elements, five contexts, ten fine outcomes") {
    Scenario s = preset_scenario("pentagon");
    CHECK(s.element_count() == 11);
    CHECK(s.measurements().size() == 5);
    for (const auto& m : s.measurements()) CHECK(m.cells.size() == 3);
    // 15 cells, but each "box i answers 1" cell is shared by two contexts.
    CHECK(s.fine_outcomes().size() == 10);
    // Same construction as cycle(5), only the name differs.
    Scenario c5 = preset_scenario_spec("cycle(5)");
    CHECK(s.labels() == c5.labels());
    CHECK(s.contexts() == c5.contexts());
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(s.measurements()[i].cells == c5.measurements()[i].cells);
}

TEST_CASE("gyni3 preset: six boxes, eight ternary contexts") {
    Scenario s = preset_scenario("gyni3");
    CHECK(s.element_count() == 64);
    CHECK(s.n_boxes() == 6);
    CHECK(s.measurements().size() == 8);
    for (const auto& m : s.measurements()) CHECK(m.cells.size() == 8);
    for (const auto& m : s.measurements())
        for (const auto& c : m.cells) CHECK(c.size() == 8);
    CHECK(s.contexts()[0] == std::vector<std::uint32_t>{0, 2, 4});
    CHECK(s.contexts()[7] == std::vector<std::uint32_t>{1, 3, 5});
}

TEST_CASE("bell preset matches chsh at (2,2,2) and rejects non-binary outputs") {
    Scenario b = preset_scenario("bell", {2, 2, 2});
    Scenario c = preset_scenario("chsh");
    CHECK(b.element_count() == c.element_count());
    CHECK(b.contexts() == c.contexts());
    CHECK_THROWS_AS(preset_scenario("bell", {2, 2, 3}), InvalidArgument);
    CHECK_THROWS_AS(preset_scenario("bell", {0, 2, 2}), InvalidArgument);
}

TEST_CASE("preset spec strings parse") {
    CHECK(preset_scenario_spec("cycle(7)").element_count() == 29);
    CHECK(preset_scenario_spec("bell(2,2,2)").n_boxes() == 4);
    CHECK(preset_scenario_spec("chsh").name() == "chsh");
    CHECK_THROWS_AS(preset_scenario_spec("nonsense"), InvalidArgument);
    CHECK_THROWS_AS(preset_scenario_spec("cycle(x)"), InvalidArgument);
    CHECK_THROWS_AS(preset_scenario_spec("cycle(2)"), InvalidArgument);
    CHECK_THROWS_AS(preset_scenario_spec("chsh(3)"), InvalidArgument);
}

TEST_CASE("marginal construction rejects bad inputs") {
    CHECK_THROWS_AS(build_marginal_scenario(2, {{0, 1}, {0, 1}}, Support::all()),
                    InvalidArgument);
    CHECK_THROWS_AS(build_marginal_scenario(2, {{0, 2}}, Support::all()), InvalidArgument);
    CHECK_THROWS_AS(build_marginal_scenario(2, {{}}, Support::all()), InvalidArgument);
    CHECK_THROWS_AS(build_marginal_scenario(2, {}, Support::all()), InvalidArgument);
    CHECK_THROWS_AS(
        build_marginal_scenario(2, {{0}}, Support::explicit_list({"00", "00"})),
        InvalidArgument);
    CHECK_THROWS_AS(build_marginal_scenario(2, {{0}}, Support::explicit_list({"0"})),
                    InvalidArgument);
    CHECK_THROWS_AS(build_marginal_scenario(2, {{0}}, Support::explicit_list({"0x"})),
                    InvalidArgument);
    CHECK_THROWS_AS(build_marginal_scenario(2, {{0}}, Support::explicit_list({})),
                    InvalidArgument);
    CHECK_THROWS_AS(build_marginal_scenario(17, {{0}}, Support::all()), ResourceError);
}

TEST_CASE("explicit support is normalised to lexicographic order") {
    Scenario s =
        build_marginal_scenario(2, {{0}, {1}}, Support::explicit_list({"10", "01"}));
    CHECK(s.labels() == std::vector<std::string>{"01", "10"});
    CHECK(s.measurements()[0].cells.size() == 2);
}

TEST_CASE("coarse_outcomes enumerates the full algebra of a measurement") {
    Scenario s = preset_scenario("chsh");
    auto alg = coarse_outcomes(s.measurements()[0]);
    CHECK(alg.size() == 16);
    CHECK(alg.front() == Outcome());
    CHECK(std::find(alg.begin(), alg.end(), Outcome::full(16)) != alg.end());
    CHECK(std::is_sorted(alg.begin(), alg.end()));

    Measurement two{{Outcome({0}), Outcome({1})}};
    CHECK(coarse_outcomes(two).size() == 4);
    Measurement three{{Outcome({0}), Outcome({1}), Outcome({2})}};
    CHECK(coarse_outcomes(three).size() == 8);

    Measurement wide;
    for (std::uint32_t i = 0; i < 25; ++i) wide.cells.push_back(Outcome({i}));
    CHECK_THROWS_AS(coarse_outcomes(wide), ResourceError);
}

TEST_CASE("strict vs coarse exclusivity on chsh") {
    Scenario s = preset_scenario("chsh");
    // a0=0,b0=0 and a0=0,b0=1: cells of the same context, disjoint.
    const auto& m0 = s.measurements()[0];
    CHECK(exclusive(s, m0.cells[0], m0.cells[1], ExclusivityMode::Strict));
    CHECK(exclusive(s, m0.cells[0], m0.cells[1], ExclusivityMode::Coarse));

    // a0=0,b0=0 vs a0=1,b1=1: disjoint but from different contexts. Not
    // strict; coarse holds because the a0 marginals already separate them.
    auto cell = [&](int mi, const std::string& bits0, const std::string& bits1) {
        std::vector<std::uint32_t> members;
        for (std::uint32_t e = 0; e < s.element_count(); ++e) {
            const auto& ctx = s.contexts()[mi];
            if (s.labels()[e].substr(ctx[0], 1) == bits0 &&
                s.labels()[e].substr(ctx[1], 1) == bits1)
                members.push_back(e);
        }
        return Outcome(members);
    };
    Outcome a = cell(0, "0", "0"); // a0=0, b0=0
    Outcome b = cell(1, "1", "1"); // a0=1, b1=1
    CHECK_FALSE(exclusive(s, a, b, ExclusivityMode::Strict));
    CHECK(exclusive(s, a, b, ExclusivityMode::Coarse));

    // Overlapping outcomes are never exclusive.
    Outcome c = cell(1, "0", "0"); // a0=0, b1=0: overlaps a
    CHECK_FALSE(exclusive(s, a, c, ExclusivityMode::Strict));
    CHECK_FALSE(exclusive(s, a, c, ExclusivityMode::Coarse));

    CHECK_THROWS_AS(exclusive(s, Outcome({99}), a, ExclusivityMode::Coarse),
                    InvalidArgument);
}

TEST_CASE("single measurement gives a complete exclusivity graph") {
    Scenario s = build_marginal_scenario(2, {{0, 1}}, Support::all());
    for (auto mode : {ExclusivityMode::Strict, ExclusivityMode::Coarse}) {
        ExclusivityGraph g = exclusivity_graph(s, mode);
        CHECK(g.vertex_count() == 4);
        CHECK(g.edge_count() == 6);
    }
}

TEST_CASE("pentagon exclusivity graph: ten vertices, five triangles") {
    Scenario s = preset_scenario("pentagon");
    ExclusivityGraph gs = exclusivity_graph(s, ExclusivityMode::Strict);
    ExclusivityGraph gc = exclusivity_graph(s, ExclusivityMode::Coarse);
    CHECK(gs.vertex_count() == 10);
    CHECK(gc.vertex_count() == 10);
    // Five contexts, each a triangle; the triangles share the "answer 1"
    // vertices pairwise, and no further disjoint pair exists.
    CHECK(gs.edge_count() == 15);
    CHECK(gc.edge_count() == 15);
    CHECK(gs.edges() == gc.edges());

    // The five "box i answers 1" cells form a 5-cycle in the graph.
    std::vector<std::uint32_t> ones;
    for (std::size_t box = 0; box < 5; ++box) {
        std::vector<std::uint32_t> members;
        for (std::uint32_t e = 0; e < s.element_count(); ++e)
            if (s.labels()[e][box] == '1') members.push_back(e);
        long idx = s.fine_outcome_index(Outcome(members));
        REQUIRE(idx >= 0);
        ones.push_back((std::uint32_t)idx);
    }
    REQUIRE(ones.size() == 5);
    int cycle_edges = 0;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j)
            if (gc.edge(ones[i], ones[j])) {
                ++cycle_edges;
                CHECK((j - i == 1 || j - i == 4));
            }
    CHECK(cycle_edges == 5);
}

TEST_CASE("strict edges are a subset of coarse edges") {
    for (const char* name : {"chsh", "specker", "gyni3"}) {
        Scenario s = preset_scenario(name);
        ExclusivityGraph gs = exclusivity_graph(s, ExclusivityMode::Strict);
        ExclusivityGraph gc = exclusivity_graph(s, ExclusivityMode::Coarse);
        for (auto [u, v] : gs.edges()) CHECK(gc.edge(u, v));
        CHECK(gs.edge_count() <= gc.edge_count());
        // Every coarse edge joins disjoint outcomes.
        for (auto [u, v] : gc.edges())
            CHECK(gc.vertices()[u].is_disjoint(gc.vertices()[v]));
    }
}

TEST_CASE("product scenario: indexing, labels, boxes") {
    Scenario p = preset_scenario("pentagon");
    Scenario pp = product_scenario(p, p);
    CHECK(pp.element_count() == 121);
    CHECK(pp.measurements().size() == 25);
    CHECK(pp.n_boxes() == 10);
    CHECK(pp.name() == "pentagon*pentagon");
    CHECK(pp.has_labels());
    CHECK(pp.labels()[0] == p.labels()[0] + p.labels()[0]);
    // Element (i1, i2) -> i1*11 + i2.
    CHECK(pp.labels()[3 * 11 + 7] == p.labels()[3] + p.labels()[7]);

    Scenario ppp = power_scenario(p, 3);
    CHECK(ppp.element_count() == 1331);
    CHECK(ppp.measurements().size() == 125);
    CHECK(power_scenario(p, 1) == p);
    CHECK_THROWS_AS(power_scenario(p, 0), InvalidArgument);
}

TEST_CASE("product exclusivity graph is the disjunctive product of factors") {
    Scenario p = preset_scenario("pentagon");
    Scenario pp = product_scenario(p, p);
    ExclusivityGraph g1 = exclusivity_graph(p, ExclusivityMode::Coarse);
    ExclusivityGraph g2 = exclusivity_graph(pp, ExclusivityMode::Coarse);
    std::size_t n1 = g1.vertex_count();
    REQUIRE(g2.vertex_count() == n1 * n1);

    // Map factor vertex pairs to product vertices.
    std::vector<std::vector<long>> id(n1, std::vector<long>(n1, -1));
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n1; ++j) {
            std::vector<std::uint32_t> members;
            for (auto e1 : g1.vertices()[i].members())
                for (auto e2 : g1.vertices()[j].members())
                    members.push_back(e1 * p.element_count() + e2);
            id[i][j] = pp.fine_outcome_index(Outcome(members));
            REQUIRE(id[i][j] >= 0);
        }
    }

    for (std::size_t i1 = 0; i1 < n1; ++i1)
        for (std::size_t j1 = 0; j1 < n1; ++j1)
            for (std::size_t i2 = 0; i2 < n1; ++i2)
                for (std::size_t j2 = 0; j2 < n1; ++j2) {
                    if (id[i1][j1] == id[i2][j2]) continue;
                    bool expect = (i1 != i2 && g1.edge(i1, i2)) ||
                                  (j1 != j2 && g1.edge(j1, j2));
                    CHECK(g2.edge((std::uint32_t)id[i1][j1], (std::uint32_t)id[i2][j2]) ==
                          expect);
                }
}

TEST_CASE("exclusivity graph vertex order matches fine outcome order") {
    Scenario s = preset_scenario("specker");
    ExclusivityGraph g = exclusivity_graph(s, ExclusivityMode::Coarse);
    CHECK(g.vertices() == s.fine_outcomes());
    CHECK(g.element_count() == 8);
    CHECK(to_string(g.mode()) == "coarse");
    CHECK(exclusivity_mode_from_string("strict") == ExclusivityMode::Strict);
    CHECK_THROWS_AS(exclusivity_mode_from_string("fuzzy"), InvalidArgument);
}
