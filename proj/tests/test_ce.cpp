#include "ctxlab/ce.hpp"

#include <random>

#include "ctxlab/errors.hpp"
#include "doctest.h"

using namespace ctxlab;

namespace {

ScenarioRef preset(const std::string& name) {
    return std::make_shared<Scenario>(preset_scenario(name));
}

Rational R(long n, long d = 1) {
    Rational r(n, d);
    r.canonicalize();
    return r;
}

} // namespace

TEST_CASE("pentagon triangles are exactly tight at uniform_cycle(1/2)") {
    ScenarioRef s = preset("pentagon");
    CEReport rep = ce_check(preset_box("uniform_cycle(1/2)", s));
    CHECK(rep.holds);
    CHECK(rep.worst_clique.size() == 3);
    CHECK((rep.worst_sum - Value(1L)).sign() == 0);
    // Every triangle ties at 1, so the lexicographically first clique wins.
    ExclusivityGraph g = exclusivity_graph(*s, ExclusivityMode::Coarse);
    CHECK(rep.worst_clique == maximal_cliques(g).cliques.front());
}

TEST_CASE("single-copy CE is tight but never violated on the cycle family") {
    ScenarioRef s = preset("pentagon");
    for (const char* spec : {"uniform_cycle(0)", "uniform_cycle(1/5)",
                             "uniform_cycle(2/5)", "uniform_cycle(1/2)"}) {
        CEReport rep = ce_check(preset_box(spec, s));
        CHECK(rep.holds);
        CHECK((rep.worst_sum - Value(1L)).sign() == 0);
    }
}

TEST_CASE("two-copy CE separates the cycle family at 1/sqrt(5)") {
    ScenarioRef s = preset("pentagon");

    CEReport at_threshold = ce_check(preset_box("uniform_cycle(sqrt(1/5))", s), 2);
    CHECK(at_threshold.holds);
    CHECK((at_threshold.worst_sum - Value(1L)).sign() == 0);

    CEReport above = ce_check(preset_box("uniform_cycle(0.4573)", s), 2);
    CHECK_FALSE(above.holds);
    CHECK(above.worst_sum.to_double() > 1.0);

    CEReport well_above = ce_check(preset_box("uniform_cycle(0.46)", s), 2);
    CHECK_FALSE(well_above.holds);
    // A pentagram clique of five product events exceeds 1: 5 * 0.46^2 = 1.058.
    CHECK(well_above.worst_sum.to_double() == doctest::Approx(1.058).epsilon(1e-9));
    CHECK(well_above.worst_clique.size() == 5);
}

TEST_CASE("PR box passes one copy and fails two") {
    ScenarioRef s = preset("chsh");
    ProbabilityFunction pr = preset_box("pr", s);
    CHECK(ce_check(pr, 1).holds);
    CEReport two = ce_check(pr, 2);
    CHECK_FALSE(two.holds);
    CHECK(two.worst_sum.to_double() > 1.0);

    // Re-summing the reported clique reproduces worst_sum exactly.
    ProbabilityFunction pr2 = power_probability(pr, 2);
    Value resum;
    for (const auto& o : two.worst_outcomes) resum += pr2.value(o);
    CHECK((resum - two.worst_sum).sign() == 0);
}

TEST_CASE("two-copy acceptance implies one-copy acceptance on preset boxes") {
    struct Case {
        const char* scenario;
        const char* box;
    };
    for (const auto& c : {Case{"chsh", "pr"}, Case{"chsh", "isotropic(3/4)"},
                          Case{"chsh", "isotropic(1/2)"}, Case{"chsh", "uniform"},
                          Case{"pentagon", "uniform_cycle(1/2)"},
                          Case{"pentagon", "uniform_cycle(2/5)"},
                          Case{"pentagon", "uniform"}, Case{"specker", "uniform"}}) {
        ScenarioRef s = preset(c.scenario);
        ProbabilityFunction p = preset_box(c.box, s);
        bool two = ce_holds(p, 2);
        bool one = ce_holds(p, 1);
        if (two) CHECK(one);
        // The decision form must agree with the reporting form.
        CHECK(one == ce_check(p, 1).holds);
    }
}

TEST_CASE("nc_check: point masses are classical, PR and tight cycle are not") {
    ScenarioRef chsh = preset("chsh");
    NCResult det = nc_check(preset_box("deterministic(0110)", chsh));
    REQUIRE(det.feasible);
    int mass_at = -1;
    for (std::size_t i = 0; i < det.joint.weights.size(); ++i)
        if (det.joint.weights[i].sign() != 0) {
            CHECK((det.joint.weights[i] - Value(1L)).sign() == 0);
            mass_at = (int)i;
        }
    CHECK(mass_at == 6); // label 0110 read as a binary string

    NCResult pr = nc_check(preset_box("pr", chsh));
    CHECK_FALSE(pr.feasible);
    CHECK(pr.certificate.eq_multipliers.size() == pr.row_labels.size());

    ScenarioRef pent = preset("pentagon");
    CHECK_FALSE(nc_check(preset_box("uniform_cycle(1/2)", pent)).feasible);
    CHECK(nc_check(preset_box("uniform_cycle(1/5)", pent)).feasible);
}

TEST_CASE("nc_check witness reproduces the table exactly") {
    ScenarioRef s = preset("chsh");
    for (const char* spec : {"isotropic(1/2)", "isotropic(2/5)", "uniform",
                             "deterministic(1011)"}) {
        ProbabilityFunction p = preset_box(spec, s);
        NCResult r = nc_check(p);
        REQUIRE(r.feasible);
        CHECK(validate(r.joint, *s).empty());
        ProbabilityFunction induced = induced_probability(r.joint, s);
        for (const auto& [o, v] : p.values())
            CHECK((induced.value(o) - v).sign() == 0);
    }
    // The isotropic family crosses the classical boundary at v = 1/2.
    CHECK_FALSE(nc_check(preset_box("isotropic(3/4)", s)).feasible);
    CHECK_FALSE(nc_check(preset_box("isotropic(0.51)", s)).feasible);
}

TEST_CASE("optimization ladder: chsh anchors") {
    ScenarioRef s = preset("chsh");
    LinearFunctional f = preset_functional("chsh", s);

    NCOptimum nc = nc_optimize(f);
    CHECK(nc.value == R(2));
    CHECK(validate(nc.joint, *s).empty());

    TableOptimum cons = consistent_optimize(f);
    CHECK(cons.value == R(4));
    CHECK(validate(cons.table).empty());
    CHECK((evaluate(f, cons.table) - Value(R(4))).sign() == 0);

    TableOptimum ce1 = ce_optimize(f);
    CHECK(ce1.value == R(4));
    CHECK(validate(ce1.table).empty());
    CHECK(ce_check(ce1.table).holds);
}

TEST_CASE("optimization ladder: pentagon kcbs") {
    ScenarioRef s = preset("pentagon");
    LinearFunctional f = preset_functional("kcbs", s);
    CHECK(nc_optimize(f).value == R(2));
    CHECK(consistent_optimize(f).value == R(5, 2));
    TableOptimum ce1 = ce_optimize(f);
    CHECK(ce1.value == R(5, 2));
    CHECK(ce_check(ce1.table).holds);
}

TEST_CASE("optimization ladder: gyni classical equals CE") {
    ScenarioRef s = preset("gyni3");
    LinearFunctional f = preset_functional("gyni_payoff", s);

    // The four winning events are pairwise exclusive, hence a clique.
    const auto& terms = f.terms();
    REQUIRE(terms.size() == 4);
    for (std::size_t a = 0; a < terms.size(); ++a)
        for (std::size_t b = a + 1; b < terms.size(); ++b)
            CHECK(exclusive(*s, terms[a].first, terms[b].first, ExclusivityMode::Coarse));

    CHECK(nc_optimize(f).value == R(1, 4));
    CHECK(ce_optimize(f).value == R(1, 4));
}

TEST_CASE("single-measurement scenarios maximize at the best coefficient") {
    auto s = std::make_shared<Scenario>(
        "one", 3, std::vector<Measurement>{Measurement{
                      {Outcome({0}), Outcome({1}), Outcome({2})}}});
    LinearFunctional f("custom", s,
                       {{Outcome({0}), R(1, 3)}, {Outcome({1}), R(5, 7)},
                        {Outcome({2}), R(2, 7)}},
                       R(1, 10));
    CHECK(consistent_optimize(f).value == R(5, 7) + R(1, 10));
}

TEST_CASE("bounds nest across the three sets on all presets") {
    struct Case {
        const char* scenario;
        const char* functional;
    };
    for (const auto& c : {Case{"chsh", "chsh"}, Case{"pentagon", "kcbs"},
                          Case{"gyni3", "gyni_payoff"}}) {
        ScenarioRef s = preset(c.scenario);
        LinearFunctional f = preset_functional(c.functional, s);
        Rational nc = nc_optimize(f).value;
        Rational ce = ce_optimize(f).value;
        Rational cons = consistent_optimize(f).value;
        CHECK(nc <= ce);
        CHECK(ce <= cons);
    }
    // Specker triangle with the anti-correlation objective: classical boxes
    // manage two discordant pairs, consistent boxes all three.
    ScenarioRef sp = preset("specker");
    std::vector<std::pair<Outcome, Rational>> terms;
    for (std::size_t mi = 0; mi < sp->measurements().size(); ++mi) {
        const auto& ctx = sp->contexts()[mi];
        for (const auto& cell : sp->measurements()[mi].cells) {
            std::uint32_t e0 = cell.members().front();
            const std::string& lab = sp->labels()[e0];
            if (lab[ctx[0]] != lab[ctx[1]]) terms.push_back({cell, R(1)});
        }
    }
    LinearFunctional disc("discordant", sp, terms);
    Rational nc = nc_optimize(disc).value;
    Rational ce = ce_optimize(disc).value;
    Rational cons = consistent_optimize(disc).value;
    CHECK(nc == R(2));
    CHECK(cons == R(3));
    CHECK(nc <= ce);
    CHECK(ce <= cons);
}

TEST_CASE("random classical tables always pass single-copy CE") {
    std::mt19937 rng(551);
    for (const char* name : {"chsh", "pentagon", "specker"}) {
        ScenarioRef s = preset(name);
        for (int trial = 0; trial < 12; ++trial) {
            std::vector<Value> w(s->element_count());
            Rational total(0);
            std::vector<Rational> raw(s->element_count());
            for (auto& x : raw) {
                x = R((long)(rng() % 20));
                total += x;
            }
            if (sgn(total) == 0) raw[0] = total = 1;
            for (std::size_t i = 0; i < raw.size(); ++i) w[i] = Value(raw[i] / total);
            JointDistribution j{w};
            REQUIRE(validate(j, *s).empty());
            ProbabilityFunction p = induced_probability(j, s);
            CHECK(nc_check(p).feasible);
            CHECK(ce_check(p).holds);
        }
    }
}

TEST_CASE("threshold: two-copy cycle family stops at 1/sqrt(5)") {
    ScenarioRef s = preset("pentagon");
    ThresholdResult t = threshold_search(s, ThresholdFamily::UniformCycle, 2, R(1, 1000000));
    CHECK_FALSE(t.never_fails);
    CHECK(t.functional == "kcbs");
    CHECK(t.parameter.get_d() == doctest::Approx(0.4472136).epsilon(1e-5));
    CHECK(t.functional_value.get_d() == doctest::Approx(2.2360680).epsilon(1e-5));
}

TEST_CASE("threshold: single-copy families never fail") {
    ScenarioRef pent = preset("pentagon");
    ThresholdResult t1 = threshold_search(pent, ThresholdFamily::UniformCycle, 1, R(1, 1000));
    CHECK(t1.never_fails);
    CHECK(t1.parameter == R(1, 2));
    CHECK(t1.functional_value == R(5, 2));

    ScenarioRef chsh = preset("chsh");
    ThresholdResult t2 = threshold_search(chsh, ThresholdFamily::Isotropic, 1, R(1, 1000));
    CHECK(t2.never_fails);
    CHECK(t2.parameter == R(1));
    CHECK(t2.functional_value == R(4));
}

TEST_CASE("threshold: bad arguments are rejected") {
    ScenarioRef pent = preset("pentagon");
    CHECK_THROWS_AS(threshold_search(pent, ThresholdFamily::UniformCycle, 2, R(0)),
                    InvalidArgument);
    CHECK_THROWS_AS(threshold_search(pent, ThresholdFamily::Isotropic, 2, R(1, 100)),
                    InvalidArgument);
    ScenarioRef chsh = preset("chsh");
    CHECK_THROWS_AS(threshold_search(chsh, ThresholdFamily::UniformCycle, 2, R(1, 100)),
                    InvalidArgument);
    CHECK_THROWS_AS(threshold_family_from_string("nope"), InvalidArgument);
}
