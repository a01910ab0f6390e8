#include "ctxlab/cliques.hpp"

#include <algorithm>
#include <random>

#include "ctxlab/errors.hpp"
#include "ctxlab/probability.hpp"
#include "doctest.h"

using namespace ctxlab;

namespace {

ExclusivityGraph ring(std::uint32_t n) {
    std::vector<Outcome> verts;
    for (std::uint32_t i = 0; i < n; ++i) verts.push_back(Outcome({i}));
    ExclusivityGraph g(std::move(verts), ExclusivityMode::Strict, n);
    for (std::uint32_t i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

// Reference enumeration: test every subset of vertices for cliqueness and
// maximality. Only viable for small graphs.
std::vector<std::vector<std::uint32_t>> brute_force(const ExclusivityGraph& g) {
    std::uint32_t n = (std::uint32_t)g.vertex_count();
    std::vector<std::vector<std::uint32_t>> out;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<std::uint32_t> set;
        for (std::uint32_t v = 0; v < n; ++v)
            if ((mask >> v) & 1) set.push_back(v);
        bool clique = true;
        for (std::size_t a = 0; a < set.size() && clique; ++a)
            for (std::size_t b = a + 1; b < set.size() && clique; ++b)
                if (!g.edge(set[a], set[b])) clique = false;
        if (!clique) continue;
        bool maximal = true;
        for (std::uint32_t v = 0; v < n && maximal; ++v) {
            if ((mask >> v) & 1) continue;
            bool extends = true;
            for (auto u : set)
                if (!g.edge(u, v)) { extends = false; break; }
            if (extends) maximal = false;
        }
        if (maximal && !set.empty()) out.push_back(set);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Direct construction of the graph whose cliques the pair search must match:
// vertex (i, j) becomes index i * n2 + j, and two pairs are adjacent when
// they are adjacent in either coordinate.
ExclusivityGraph disjunctive_product(const ExclusivityGraph& a, const ExclusivityGraph& b) {
    std::uint32_t na = (std::uint32_t)a.vertex_count();
    std::uint32_t nb = (std::uint32_t)b.vertex_count();
    std::vector<Outcome> verts;
    for (std::uint32_t i = 0; i < na; ++i)
        for (std::uint32_t j = 0; j < nb; ++j) verts.push_back(Outcome({i * nb + j}));
    ExclusivityGraph g(std::move(verts), ExclusivityMode::Strict, na * nb);
    for (std::uint32_t u = 0; u < na * nb; ++u)
        for (std::uint32_t v = u + 1; v < na * nb; ++v) {
            std::uint32_t i1 = u / nb, j1 = u % nb, i2 = v / nb, j2 = v % nb;
            if ((i1 != i2 && a.edge(i1, i2)) || (j1 != j2 && b.edge(j1, j2)))
                g.add_edge(u, v);
        }
    return g;
}

ExclusivityGraph random_graph(std::mt19937& rng, std::uint32_t n, unsigned density_pct) {
    std::vector<Outcome> verts;
    for (std::uint32_t i = 0; i < n; ++i) verts.push_back(Outcome({i}));
    ExclusivityGraph g(std::move(verts), ExclusivityMode::Strict, n);
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = a + 1; b < n; ++b)
            if (rng() % 100 < density_pct) g.add_edge(a, b);
    return g;
}

Value resum(const std::vector<std::uint32_t>& set, const std::vector<Value>& w) {
    Value t;
    for (auto v : set) t += w[v];
    return t;
}

} // namespace

TEST_CASE("five-cycle has its edges as maximal cliques") {
    CliqueSet cs = maximal_cliques(ring(5));
    std::vector<std::vector<std::uint32_t>> expect = {
        {0, 1}, {0, 4}, {1, 2}, {2, 3}, {3, 4}};
    CHECK(cs.cliques == expect);
}

TEST_CASE("single four-outcome measurement gives one clique of size 4") {
    Scenario s("one", 4,
               {Measurement{{Outcome({0}), Outcome({1}), Outcome({2}), Outcome({3})}}});
    CliqueSet cs = maximal_cliques(exclusivity_graph(s, ExclusivityMode::Coarse));
    REQUIRE(cs.cliques.size() == 1);
    CHECK(cs.cliques[0] == std::vector<std::uint32_t>{0, 1, 2, 3});
}

TEST_CASE("pentagon graph decomposes into the five measurement triangles") {
    ScenarioRef s = std::make_shared<Scenario>(preset_scenario("pentagon"));
    ExclusivityGraph g = exclusivity_graph(*s, ExclusivityMode::Coarse);
    CliqueSet cs = maximal_cliques(g);
    REQUIRE(cs.cliques.size() == 5);
    // Every maximal clique is exactly one measurement's cell set.
    for (const auto& c : cs.cliques) {
        REQUIRE(c.size() == 3);
        Outcome hull = g.vertices()[c[0]]
                           .union_with(g.vertices()[c[1]])
                           .union_with(g.vertices()[c[2]]);
        CHECK(hull == Outcome::full(s->element_count()));
        bool is_measurement = false;
        for (const auto& m : s->measurements()) {
            std::vector<Outcome> cells = {g.vertices()[c[0]], g.vertices()[c[1]],
                                          g.vertices()[c[2]]};
            std::sort(cells.begin(), cells.end());
            if (cells == m.cells) is_measurement = true;
        }
        CHECK(is_measurement);
    }
}

TEST_CASE("matches brute force on random graphs") {
    std::mt19937 rng(907);
    for (int trial = 0; trial < 60; ++trial) {
        std::uint32_t n = 2 + rng() % 11;
        double density = (rng() % 100) / 100.0;
        std::vector<Outcome> verts;
        for (std::uint32_t i = 0; i < n; ++i) verts.push_back(Outcome({i}));
        ExclusivityGraph g(std::move(verts), ExclusivityMode::Strict, n);
        for (std::uint32_t a = 0; a < n; ++a)
            for (std::uint32_t b = a + 1; b < n; ++b)
                if ((rng() % 1000) < density * 1000) g.add_edge(a, b);
        CHECK(maximal_cliques(g).cliques == brute_force(g));
    }
}

TEST_CASE("count cap raises a resource error") {
    CHECK_THROWS_AS(maximal_cliques(ring(8), 3), ResourceError);
}

TEST_CASE("maximum-weight clique matches exhaustive search") {
    std::mt19937 rng(3301);
    for (int trial = 0; trial < 60; ++trial) {
        std::uint32_t n = 2 + rng() % 11;
        ExclusivityGraph g = random_graph(rng, n, 20 + rng() % 70);
        std::vector<Value> w;
        bool surd = trial % 5 == 4;
        for (std::uint32_t i = 0; i < n; ++i) {
            Rational a(1 + (long)(rng() % 6), 1 + (long)(rng() % 4));
            if (surd)
                w.push_back(Value(a, Rational((long)(rng() % 3), 3), 2));
            else
                w.push_back(rng() % 6 == 0 ? Value() : Value(a));
        }

        // Every subset is cheap to test at this size; keep the best clique sum.
        Value best;
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            std::vector<std::uint32_t> set;
            for (std::uint32_t v = 0; v < n; ++v)
                if ((mask >> v) & 1) set.push_back(v);
            bool clique = true;
            for (std::size_t a = 0; a < set.size() && clique; ++a)
                for (std::size_t b = a + 1; b < set.size() && clique; ++b)
                    if (!g.edge(set[a], set[b])) clique = false;
            if (!clique) continue;
            Value t = resum(set, w);
            if ((t - best).sign() > 0) best = t;
        }

        WeightedClique wc = max_weight_clique(g, w);
        CHECK((wc.weight - best).sign() == 0);
        CHECK((resum(wc.vertices, w) - wc.weight).sign() == 0);
        for (std::size_t a = 0; a < wc.vertices.size(); ++a)
            for (std::size_t b = a + 1; b < wc.vertices.size(); ++b)
                CHECK(g.edge(wc.vertices[a], wc.vertices[b]));
        bool over = (best - Value(1L)).sign() > 0;
        CHECK(clique_weight_exceeds_one(g, w) == over);
    }
}

TEST_CASE("pair search agrees with the search on the assembled product graph") {
    std::mt19937 rng(7717);
    for (int trial = 0; trial < 40; ++trial) {
        std::uint32_t n1 = 2 + rng() % 6, n2 = 2 + rng() % 6;
        ExclusivityGraph g1 = random_graph(rng, n1, 15 + rng() % 75);
        ExclusivityGraph g2 = random_graph(rng, n2, 15 + rng() % 75);
        auto weights = [&](std::uint32_t n) {
            std::vector<Value> w;
            for (std::uint32_t i = 0; i < n; ++i)
                w.push_back(rng() % 5 == 0
                                ? Value()
                                : Value(Rational(1 + (long)(rng() % 7),
                                                 2 + (long)(rng() % 5))));
            return w;
        };
        std::vector<Value> w1 = weights(n1), w2 = weights(n2);

        ExclusivityGraph gp = disjunctive_product(g1, g2);
        std::vector<Value> wp;
        for (std::uint32_t i = 0; i < n1; ++i)
            for (std::uint32_t j = 0; j < n2; ++j) wp.push_back(w1[i] * w2[j]);
        WeightedClique oracle = max_weight_clique(gp, wp);

        ProductClique pc = max_weight_clique_product(g1, w1, g2, w2);
        CHECK((pc.weight - oracle.weight).sign() == 0);
        std::vector<std::uint32_t> as_indices;
        for (auto [a, b] : pc.vertices) as_indices.push_back(a * n2 + b);
        CHECK((resum(as_indices, wp) - pc.weight).sign() == 0);
        for (std::size_t a = 0; a < as_indices.size(); ++a)
            for (std::size_t b = a + 1; b < as_indices.size(); ++b)
                CHECK(gp.edge(as_indices[a], as_indices[b]));

        bool over = (oracle.weight - Value(1L)).sign() > 0;
        CHECK(product_clique_weight_exceeds_one(g1, w1, g2, w2) == over);

        ProductClique again = max_weight_clique_product(g1, w1, g2, w2);
        CHECK(again.vertices == pc.vertices);
        CHECK((again.weight - pc.weight).sign() == 0);
    }
}

TEST_CASE("pair search stays exact on algebraic weights at the cycle threshold") {
    ScenarioRef s = std::make_shared<Scenario>(preset_scenario("pentagon"));
    ExclusivityGraph g = exclusivity_graph(*s, ExclusivityMode::Coarse);

    // Cycle-cell probability 1/sqrt(5) is the two-copy boundary: the cycle
    // of squared cells sums to exactly 1 and nothing beats it. Build the
    // weights by substituting surds into a rational template of the box.
    Value x = Value::sqrt_of(Rational(1, 5));
    Value rest = Value(1L) - x - x;
    ProbabilityFunction tmpl = preset_box("uniform_cycle(2/5)", s);
    std::vector<Value> w;
    for (const auto& o : g.vertices()) {
        REQUIRE(tmpl.value(o).is_rational());
        w.push_back(tmpl.value(o).rational() == Rational(2, 5) ? x : rest);
    }

    ProductClique pc = max_weight_clique_product(g, w, g, w);
    CHECK((pc.weight - Value(1L)).sign() == 0);
    CHECK_FALSE(product_clique_weight_exceeds_one(g, w, g, w));

    // Any rational step above the algebraic threshold must tip the decision.
    ProbabilityFunction above = preset_box("uniform_cycle(4573/10000)", s);
    std::vector<Value> wa;
    for (const auto& o : g.vertices()) wa.push_back(above.value(o));
    CHECK(product_clique_weight_exceeds_one(g, wa, g, wa));
}

TEST_CASE("product graph cliques contain factor cliques crossed") {
    ScenarioRef p = std::make_shared<Scenario>(preset_scenario("pentagon"));
    Scenario sq = power_scenario(*p, 2);
    ExclusivityGraph g = exclusivity_graph(sq, ExclusivityMode::Coarse);
    CliqueSet cs = maximal_cliques(g);
    CHECK(cs.cliques.size() > 5);
    for (const auto& c : cs.cliques)
        for (std::size_t a = 0; a < c.size(); ++a)
            for (std::size_t b = a + 1; b < c.size(); ++b)
                CHECK(g.edge(c[a], c[b]));
}
