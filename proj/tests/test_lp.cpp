#include "ctxlab/lp.hpp"

#include <random>

#include "ctxlab/errors.hpp"
#include "doctest.h"

using namespace ctxlab;

namespace {

Rational R(long n, long d = 1) {
    Rational r(n, d);
    r.canonicalize();
    return r;
}

} // namespace

TEST_CASE("box constraint: max x with 0 <= x <= 1") {
    LinearProgram lp(1);
    lp.set_objective({R(1)});
    lp.set_lower_bound(0, R(0));
    lp.add_inequality({R(1)}, R(1));
    for (auto mode : {LPMode::Exact, LPMode::Float}) {
        LPResult r = solve(lp, mode);
        CHECK(r.status == LPStatus::Optimal);
        CHECK(r.primal[0] == R(1));
        CHECK(r.objective_value == R(1));
    }
}

TEST_CASE("infeasible pair x <= 0, -x <= -1 yields a verified certificate") {
    LinearProgram lp(1);
    lp.add_inequality({R(1)}, R(0));
    lp.add_inequality({R(-1)}, R(-1));
    LPResult r = solve(lp);
    REQUIRE(r.status == LPStatus::Infeasible);
    CHECK(verify_farkas(lp, r.farkas, LPMode::Exact));
    // The canonical certificate is u = (1, 1): rows cancel, rhs sums to -1.
    CHECK(r.farkas.ineq_multipliers[0] == r.farkas.ineq_multipliers[1]);
    CHECK(sgn(r.farkas.ineq_multipliers[0]) > 0);
}

TEST_CASE("degenerate ties terminate and reach the optimum") {
    LinearProgram lp(2);
    lp.set_objective({R(1), R(1)});
    lp.set_lower_bound(0, R(0));
    lp.set_lower_bound(1, R(0));
    lp.add_inequality({R(1), R(1)}, R(1));
    // Redundant copies create ties in the ratio test.
    lp.add_inequality({R(1), R(1)}, R(1));
    lp.add_inequality({R(2), R(2)}, R(2));
    LPResult r = solve(lp);
    CHECK(r.status == LPStatus::Optimal);
    CHECK(r.objective_value == R(1));
}

TEST_CASE("feasibility examples") {
    {
        LinearProgram lp(1);
        lp.add_equality({R(1)}, R(1, 3));
        LPResult r = feasibility(lp);
        REQUIRE(r.status == LPStatus::Optimal);
        CHECK(r.primal[0] == R(1, 3)); // exact witness
    }
    {
        LinearProgram lp(3);
        LPResult r = feasibility(lp);
        REQUIRE(r.status == LPStatus::Optimal);
        CHECK(r.primal == std::vector<Rational>{R(0), R(0), R(0)});
    }
    {
        LinearProgram lp(1);
        lp.set_lower_bound(0, R(2));
        lp.add_inequality({R(1)}, R(1));
        LPResult r = feasibility(lp);
        REQUIRE(r.status == LPStatus::Infeasible);
        CHECK(verify_farkas(lp, r.farkas, LPMode::Exact));
        CHECK(sgn(r.farkas.bound_multipliers[0]) > 0);
    }
}

TEST_CASE("equality plus bounds: max 2x+3y, x+y=1") {
    LinearProgram lp(2);
    lp.set_objective({R(2), R(3)});
    lp.set_lower_bound(0, R(0));
    lp.set_lower_bound(1, R(0));
    lp.add_equality({R(1), R(1)}, R(1));
    LPResult r = solve(lp);
    REQUIRE(r.status == LPStatus::Optimal);
    CHECK(r.objective_value == R(3));
    CHECK(r.primal == std::vector<Rational>{R(0), R(1)});
    CHECK(verify_dual(lp, r.primal, r.dual, LPMode::Exact));
}

TEST_CASE("negative lower bounds are shifted correctly") {
    LinearProgram lp(1);
    lp.set_objective({R(-1)});
    lp.set_lower_bound(0, R(-5));
    LPResult r = solve(lp);
    REQUIRE(r.status == LPStatus::Optimal);
    CHECK(r.primal[0] == R(-5));
    CHECK(r.objective_value == R(5));
}

TEST_CASE("unbounded programs report a verified ray") {
    {
        LinearProgram lp(1);
        lp.set_objective({R(1)});
        lp.set_lower_bound(0, R(0));
        LPResult r = solve(lp);
        REQUIRE(r.status == LPStatus::Unbounded);
        CHECK(verify_ray(lp, r.primal, r.ray, LPMode::Exact));
    }
    {
        // Free variable, only an upper-style inequality on the other one.
        LinearProgram lp(2);
        lp.set_objective({R(0), R(1)});
        lp.set_lower_bound(0, R(0));
        lp.add_inequality({R(1), R(0)}, R(3));
        LPResult r = solve(lp);
        REQUIRE(r.status == LPStatus::Unbounded);
        CHECK(verify_ray(lp, r.primal, r.ray, LPMode::Exact));
    }
}

TEST_CASE("fractional data stays exact end to end") {
    LinearProgram lp(3);
    lp.set_objective({R(1, 7), R(2, 11), R(3, 13)});
    for (int i = 0; i < 3; ++i) lp.set_lower_bound(i, R(0));
    lp.add_inequality({R(1, 2), R(1, 3), R(1, 5)}, R(1, 30));
    LPResult r = solve(lp);
    REQUIRE(r.status == LPStatus::Optimal);
    // Best ratio of objective to row coefficient is x3: (3/13)/(1/5) = 15/13,
    // so optimum = (1/30)*(15/13) = 1/26.
    CHECK(r.objective_value == R(1, 26));
    CHECK(verify_primal(lp, r.primal, LPMode::Exact));
    CHECK(verify_dual(lp, r.primal, r.dual, LPMode::Exact));
}

TEST_CASE("redundant equalities leave inert rows, not wrong answers") {
    LinearProgram lp(2);
    lp.set_objective({R(1), R(0)});
    lp.set_lower_bound(0, R(0));
    lp.set_lower_bound(1, R(0));
    lp.add_equality({R(1), R(1)}, R(1));
    lp.add_equality({R(2), R(2)}, R(2)); // dependent
    lp.add_equality({R(1), R(1)}, R(1)); // duplicate
    LPResult r = solve(lp);
    REQUIRE(r.status == LPStatus::Optimal);
    CHECK(r.objective_value == R(1));
}

TEST_CASE("malformed programs are rejected") {
    LinearProgram lp(2);
    CHECK_THROWS_AS(lp.set_objective({R(1)}), InvalidArgument);
    CHECK_THROWS_AS(lp.add_equality({R(1)}, R(0)), InvalidArgument);
    CHECK_THROWS_AS(lp.add_inequality({R(1), R(1), R(1)}, R(0)), InvalidArgument);
    CHECK_THROWS_AS(lp.set_lower_bound(5, R(0)), InvalidArgument);
}

TEST_CASE("determinism: identical inputs give identical results") {
    LinearProgram lp(4);
    lp.set_objective({R(3), R(1), R(4), R(1)});
    for (int i = 0; i < 4; ++i) lp.set_lower_bound(i, R(0));
    lp.add_inequality({R(1), R(2), R(1), R(0)}, R(7));
    lp.add_inequality({R(0), R(1), R(2), R(1)}, R(5));
    lp.add_equality({R(1), R(1), R(1), R(1)}, R(4));
    LPResult a = solve(lp);
    LPResult b = solve(lp);
    CHECK(a.status == b.status);
    CHECK(a.primal == b.primal);
    CHECK(a.objective_value == b.objective_value);
    CHECK(a.dual.eq_multipliers == b.dual.eq_multipliers);
    CHECK(a.dual.ineq_multipliers == b.dual.ineq_multipliers);
}

TEST_CASE("incremental rows match a cold solve") {
    LinearProgram base(2);
    base.set_objective({R(1), R(1)});
    base.set_lower_bound(0, R(0));
    base.set_lower_bound(1, R(0));
    IncrementalLP inc(base);

    std::vector<std::pair<std::vector<Rational>, Rational>> rows = {
        {{R(1), R(0)}, R(5)},
        {{R(0), R(1)}, R(4)},
        {{R(1), R(1)}, R(6)},
        {{R(1), R(-1)}, R(2)},
    };
    for (auto& [coeffs, rhs] : rows) {
        inc.add_inequality(coeffs, rhs);
        LinearProgram cold = base;
        for (std::size_t k = 0; k < inc.program().inequalities.size(); ++k)
            cold.add_inequality(inc.program().inequalities[k].coeffs,
                                inc.program().inequalities[k].rhs);
        LPResult a = inc.solve();
        LPResult b = solve(cold);
        CHECK(a.status == b.status);
        CHECK(a.primal == b.primal);
        CHECK(a.objective_value == b.objective_value);
    }
}

TEST_CASE("random programs: float and exact modes agree, witnesses verify") {
    std::mt19937 rng(4242);
    int optimal_seen = 0, infeasible_seen = 0, unbounded_seen = 0;
    for (int trial = 0; trial < 120; ++trial) {
        std::size_t nv = 2 + rng() % 4;
        LinearProgram lp(nv);
        std::vector<Rational> obj(nv);
        for (auto& c : obj) c = R((long)(rng() % 11) - 5);
        lp.set_objective(obj);
        for (std::size_t i = 0; i < nv; ++i)
            if (rng() % 4) lp.set_lower_bound(i, R((long)(rng() % 5) - 2));
        std::size_t n_ineq = 1 + rng() % 5, n_eq = rng() % 2;
        for (std::size_t k = 0; k < n_ineq; ++k) {
            std::vector<Rational> row(nv);
            for (auto& c : row) c = R((long)(rng() % 7) - 3);
            lp.add_inequality(row, R((long)(rng() % 15) - 3));
        }
        for (std::size_t k = 0; k < n_eq; ++k) {
            std::vector<Rational> row(nv);
            for (auto& c : row) c = R((long)(rng() % 7) - 3);
            lp.add_equality(row, R((long)(rng() % 7) - 3));
        }

        LPResult exact = solve(lp, LPMode::Exact);
        LPResult approx = solve(lp, LPMode::Float);
        CHECK(exact.status == approx.status);
        switch (exact.status) {
        case LPStatus::Optimal:
            ++optimal_seen;
            CHECK(verify_primal(lp, exact.primal, LPMode::Exact));
            CHECK(verify_dual(lp, exact.primal, exact.dual, LPMode::Exact));
            CHECK(std::abs(exact.objective_value.get_d() -
                           approx.objective_value.get_d()) <= 1e-6);
            break;
        case LPStatus::Infeasible:
            ++infeasible_seen;
            CHECK(verify_farkas(lp, exact.farkas, LPMode::Exact));
            break;
        case LPStatus::Unbounded:
            ++unbounded_seen;
            CHECK(verify_ray(lp, exact.primal, exact.ray, LPMode::Exact));
            break;
        }
    }
    // The generator must exercise all three outcomes.
    CHECK(optimal_seen > 10);
    CHECK(infeasible_seen > 10);
    CHECK(unbounded_seen > 10);
}
