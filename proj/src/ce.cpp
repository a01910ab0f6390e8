#include "ctxlab/ce.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "ctxlab/errors.hpp"

namespace ctxlab {

namespace {

// Objective vector over the scenario's fine outcomes.
std::vector<Rational> functional_coeffs(const LinearFunctional& f) {
    const Scenario& s = f.scenario();
    std::vector<Rational> obj(s.fine_outcomes().size(), Rational(0));
    for (const auto& [o, c] : f.terms()) {
        long idx = s.fine_outcome_index(o);
        if (idx < 0) throw InternalError("functional term is not a fine outcome");
        obj[(std::size_t)idx] += c;
    }
    return obj;
}

// Shared constraint matrix for optimization over probability tables:
// variables are the deduplicated fine outcomes, rows enforce nonnegativity
// (as bounds), per-measurement normalization, and consistency equalities.
LinearProgram table_program(const Scenario& s) {
    std::size_t n = s.fine_outcomes().size();
    LinearProgram lp(n);
    for (std::size_t i = 0; i < n; ++i) lp.set_lower_bound(i, Rational(0));

    for (const auto& m : s.measurements()) {
        std::vector<Rational> row(n, Rational(0));
        for (const auto& cell : m.cells) row[(std::size_t)s.fine_outcome_index(cell)] += 1;
        lp.add_equality(row, Rational(1));
    }

    for (const auto& sc : shared_components(s)) {
        const auto& ma = s.measurements()[sc.measurement_a];
        const auto& mb = s.measurements()[sc.measurement_b];
        std::vector<Rational> row(n, Rational(0));
        for (auto c : sc.cells_a) row[(std::size_t)s.fine_outcome_index(ma.cells[c])] += 1;
        for (auto c : sc.cells_b) row[(std::size_t)s.fine_outcome_index(mb.cells[c])] -= 1;
        bool nonzero = false;
        for (const auto& x : row)
            if (sgn(x) != 0) { nonzero = true; break; }
        // Components made of identified cells cancel to 0 = 0; skip them.
        if (nonzero) lp.add_equality(row, Rational(0));
    }
    return lp;
}

ProbabilityFunction table_from_primal(ScenarioRef s, const std::vector<Rational>& x) {
    std::map<Outcome, Value> values;
    for (std::size_t i = 0; i < s->fine_outcomes().size(); ++i)
        values.emplace(s->fine_outcomes()[i], Value(x[i]));
    return ProbabilityFunction(std::move(s), std::move(values));
}

} // namespace

CEReport ce_eval(const ProbabilityFunction& p, const ExclusivityGraph& g,
                 const CliqueSet& cliques, unsigned copies) {
    std::size_t nv = g.vertex_count();
    std::vector<Value> val;
    std::vector<double> vd;
    val.reserve(nv);
    vd.reserve(nv);
    for (const auto& v : g.vertices()) {
        val.push_back(p.value(v));
        vd.push_back(val.back().to_double());
    }

    CEReport rep;
    rep.copies = copies;
    rep.mode = g.mode();

    // Screen in doubles first, then settle the winner exactly. The double
    // error over a few hundred terms is far below the 1e-6 guard band.
    double max_d = -1e300;
    std::vector<double> sums(cliques.cliques.size());
    for (std::size_t i = 0; i < cliques.cliques.size(); ++i) {
        double t = 0;
        for (auto v : cliques.cliques[i]) t += vd[v];
        sums[i] = t;
        max_d = std::max(max_d, t);
    }

    bool first = true;
    Value worst;
    std::size_t worst_idx = 0;
    for (std::size_t i = 0; i < cliques.cliques.size(); ++i) {
        if (sums[i] < max_d - 1e-6) continue;
        Value t;
        for (auto v : cliques.cliques[i]) t += val[v];
        if (first || (t - worst).sign() > 0) {
            first = false;
            worst = t;
            worst_idx = i;
        }
    }
    if (first) throw InternalError("clique set is empty");

    rep.worst_clique = cliques.cliques[worst_idx];
    for (auto v : rep.worst_clique) rep.worst_outcomes.push_back(g.vertices()[v]);
    rep.worst_sum = worst;
    if (p.decimal_mode())
        rep.holds = worst.to_double() <= 1.0 + 1e-9;
    else
        rep.holds = (worst - Value(1L)).sign() <= 0;
    return rep;
}

namespace {

// Product graphs beyond this size have too many maximal cliques to list
// (two chsh copies already exceed 10^7), so the decision switches to an
// exact maximum-weight clique search; only the binding clique is found.
constexpr std::size_t kEnumerableVertices = 128;

std::vector<Value> vertex_weights(const ProbabilityFunction& p,
                                  const ExclusivityGraph& g) {
    std::vector<Value> w;
    w.reserve(g.vertex_count());
    for (const auto& v : g.vertices()) {
        Value x = p.value(v);
        // Decimal tables may carry -1e-9-size noise; the search needs true
        // nonnegativity.
        if (p.decimal_mode() && x.sign() < 0) x = Value();
        w.push_back(std::move(x));
    }
    return w;
}

CEReport ce_decide_weighted(const ProbabilityFunction& p, const ExclusivityGraph& g,
                            unsigned copies) {
    std::vector<Value> w = vertex_weights(p, g);
    WeightedClique wc = max_weight_clique(g, w);

    CEReport rep;
    rep.copies = copies;
    rep.mode = g.mode();
    rep.worst_clique = wc.vertices;
    for (auto v : wc.vertices) rep.worst_outcomes.push_back(g.vertices()[v]);
    rep.worst_sum = wc.weight;
    if (p.decimal_mode())
        rep.holds = wc.weight.to_double() <= 1.0 + 1e-9;
    else
        rep.holds = (wc.weight - Value(1L)).sign() <= 0;
    return rep;
}

CEReport ce_decide(const ProbabilityFunction& p, const ExclusivityGraph& g,
                   unsigned copies, std::size_t clique_cap) {
    if (g.vertex_count() <= kEnumerableVertices)
        return ce_eval(p, g, maximal_cliques(g, clique_cap), copies);
    return ce_decide_weighted(p, g, copies);
}

// Full report for two exact copies of a table whose single-copy graph fits in
// 64 vertices. The pair weights multiply, so the search runs on single-copy
// data; the winning pairs are translated back to power-graph vertices, whose
// hulls are the element-wise products of the factor hulls.
CEReport ce_product_report(const ProbabilityFunction& p, const ExclusivityGraph& g1,
                           const ExclusivityGraph& g) {
    std::vector<Value> w = vertex_weights(p, g1);
    ProductClique pc = max_weight_clique_product(g1, w, g1, w);

    std::map<Outcome, std::size_t> index;
    for (std::size_t i = 0; i < g.vertex_count(); ++i) index.emplace(g.vertices()[i], i);

    std::uint32_t ne = g1.element_count();
    CEReport rep;
    rep.copies = 2;
    rep.mode = g.mode();
    for (auto [a, b] : pc.vertices) {
        std::vector<std::uint32_t> members;
        for (auto ia : g1.vertices()[a].members())
            for (auto ib : g1.vertices()[b].members()) members.push_back(ia * ne + ib);
        auto it = index.find(Outcome(std::move(members)));
        if (it == index.end())
            throw InternalError("pair clique vertex missing from the power graph");
        rep.worst_clique.push_back((std::uint32_t)it->second);
    }
    std::sort(rep.worst_clique.begin(), rep.worst_clique.end());
    for (auto v : rep.worst_clique) rep.worst_outcomes.push_back(g.vertices()[v]);
    rep.worst_sum = pc.weight;
    rep.holds = (pc.weight - Value(1L)).sign() <= 0;
    return rep;
}

} // namespace

CEReport ce_check(const ProbabilityFunction& p, unsigned copies, ExclusivityMode mode,
                  std::size_t clique_cap) {
    if (copies < 1) throw InvalidArgument("copies must be at least 1");
    if (copies == 1) {
        ExclusivityGraph g = exclusivity_graph(p.scenario(), mode);
        return ce_decide(p, g, copies, clique_cap);
    }
    ProbabilityFunction pk = power_probability(p, copies);
    ExclusivityGraph g = exclusivity_graph(pk.scenario(), mode);
    if (g.vertex_count() <= kEnumerableVertices)
        return ce_eval(pk, g, maximal_cliques(g, clique_cap), copies);
    if (copies == 2 && !p.decimal_mode()) {
        ExclusivityGraph g1 = exclusivity_graph(p.scenario(), mode);
        if (g1.vertex_count() <= 64) return ce_product_report(p, g1, g);
    }
    return ce_decide_weighted(pk, g, copies);
}

bool ce_holds(const ProbabilityFunction& p, unsigned copies, ExclusivityMode mode,
              std::size_t clique_cap) {
    if (copies < 1) throw InvalidArgument("copies must be at least 1");
    if (copies == 2 && !p.decimal_mode()) {
        ExclusivityGraph g1 = exclusivity_graph(p.scenario(), mode);
        std::size_t n1 = g1.vertex_count();
        // Skip the power table and graph entirely; the product search only
        // needs single-copy data.
        if (n1 <= 64 && n1 * n1 > kEnumerableVertices) {
            std::vector<Value> w = vertex_weights(p, g1);
            return !product_clique_weight_exceeds_one(g1, w, g1, w);
        }
    }
    const ProbabilityFunction* table = &p;
    std::optional<ProbabilityFunction> pk;
    if (copies > 1) {
        pk.emplace(power_probability(p, copies));
        table = &*pk;
    }
    ExclusivityGraph g = exclusivity_graph(table->scenario(), mode);
    if (g.vertex_count() <= kEnumerableVertices)
        return ce_eval(*table, g, maximal_cliques(g, clique_cap), copies).holds;
    // Decimal tables keep the reporting path for its tolerance band; exact
    // ones take the primed-bound decision search.
    if (table->decimal_mode()) return ce_decide_weighted(*table, g, copies).holds;
    return !clique_weight_exceeds_one(g, vertex_weights(*table, g));
}

NCResult nc_check(const ProbabilityFunction& p, std::size_t element_cap) {
    const Scenario& s = p.scenario();
    if (s.element_count() > element_cap)
        throw ResourceError("sample space of " + std::to_string(s.element_count()) +
                            " elements exceeds the cap of " + std::to_string(element_cap));
    if (!p.is_rational())
        throw InvalidArgument("the joint-distribution LP requires rational probabilities");

    std::size_t n = s.element_count();
    LinearProgram lp(n);
    for (std::size_t i = 0; i < n; ++i) lp.set_lower_bound(i, Rational(0));

    NCResult out;
    lp.add_equality(std::vector<Rational>(n, Rational(1)), Rational(1));
    out.row_labels.push_back("total weight = 1");
    for (const auto& o : s.fine_outcomes()) {
        std::vector<Rational> row(n, Rational(0));
        for (auto e : o.members()) row[e] = 1;
        lp.add_equality(row, p.value(o).rational());
        out.row_labels.push_back("P(" + o.to_string() + ") = " +
                                 p.value(o).rational().get_str());
    }

    LPResult r = feasibility(lp);
    if (r.status == LPStatus::Optimal) {
        out.feasible = true;
        out.joint.weights.reserve(n);
        for (const auto& w : r.primal) out.joint.weights.push_back(Value(w));
    } else if (r.status == LPStatus::Infeasible) {
        out.certificate = r.farkas;
    } else {
        throw InternalError("feasibility probe cannot be unbounded");
    }
    return out;
}

NCOptimum nc_optimize(const LinearFunctional& f, std::size_t element_cap) {
    const Scenario& s = f.scenario();
    if (s.element_count() > element_cap)
        throw ResourceError("sample space of " + std::to_string(s.element_count()) +
                            " elements exceeds the cap of " + std::to_string(element_cap));

    std::size_t n = s.element_count();
    LinearProgram lp(n);
    for (std::size_t i = 0; i < n; ++i) lp.set_lower_bound(i, Rational(0));
    lp.add_equality(std::vector<Rational>(n, Rational(1)), Rational(1));

    // Weight gamma contributes the sum of coefficients of outcomes containing it.
    std::vector<Rational> obj(n, Rational(0));
    for (const auto& [o, c] : f.terms())
        for (auto e : o.members()) obj[e] += c;
    lp.set_objective(obj);

    LPResult r = solve(lp);
    if (r.status != LPStatus::Optimal)
        throw InternalError("the probability simplex is bounded and nonempty");
    NCOptimum out;
    out.value = r.objective_value + f.constant();
    out.joint.weights.reserve(n);
    for (const auto& w : r.primal) out.joint.weights.push_back(Value(w));
    return out;
}

TableOptimum consistent_optimize(const LinearFunctional& f) {
    ScenarioRef s = f.scenario_ref();
    LinearProgram lp = table_program(*s);
    lp.set_objective(functional_coeffs(f));
    LPResult r = solve(lp);
    if (r.status != LPStatus::Optimal)
        throw InternalError("the consistent polytope is bounded and nonempty");
    return {r.objective_value + f.constant(), table_from_primal(s, r.primal)};
}

TableOptimum ce_optimize(const LinearFunctional& f, ExclusivityMode mode,
                         std::size_t clique_cap) {
    ScenarioRef s = f.scenario_ref();
    LinearProgram lp = table_program(*s);
    std::size_t n = s->fine_outcomes().size();

    ExclusivityGraph g = exclusivity_graph(*s, mode);
    for (const auto& c : maximal_cliques(g, clique_cap).cliques) {
        std::vector<Rational> row(n, Rational(0));
        for (auto v : c) row[v] = 1;
        lp.add_inequality(row, Rational(1));
    }

    lp.set_objective(functional_coeffs(f));
    LPResult r = solve(lp);
    if (r.status != LPStatus::Optimal)
        throw InternalError("the CE polytope is bounded and nonempty");
    return {r.objective_value + f.constant(), table_from_primal(s, r.primal)};
}

std::string to_string(ThresholdFamily f) {
    return f == ThresholdFamily::Isotropic ? "isotropic" : "uniform-cycle";
}

ThresholdFamily threshold_family_from_string(const std::string& s) {
    if (s == "isotropic") return ThresholdFamily::Isotropic;
    if (s == "uniform-cycle" || s == "uniform_cycle") return ThresholdFamily::UniformCycle;
    throw InvalidArgument("unknown threshold family '" + s + "'");
}

ThresholdResult threshold_search(ScenarioRef s, ThresholdFamily family, unsigned copies,
                                 const Rational& tol, ExclusivityMode mode,
                                 std::size_t clique_cap) {
    if (sgn(tol) <= 0) throw InvalidArgument("tolerance must be positive");
    if (copies < 1) throw InvalidArgument("copies must be at least 1");

    std::string functional;
    long value_factor = 0;
    Rational lo(0), hi;
    if (family == ThresholdFamily::Isotropic) {
        if (!is_chsh_shaped(*s))
            throw InvalidArgument("the isotropic family needs a chsh-shaped scenario");
        functional = "chsh";
        value_factor = 4;
        hi = 1;
    } else {
        std::uint32_t n = cycle_length(*s);
        if (n == 0)
            throw InvalidArgument("the uniform-cycle family needs a cycle scenario");
        functional = "kcbs";
        value_factor = n;
        hi = Rational(1, 2);
    }

    // Two copies past the enumeration limit probe through the product search
    // on the single-copy graph; everything else builds the power graph once.
    // Small power graphs also pay for one clique enumeration and reuse it
    // across the whole bisection.
    ExclusivityGraph g1 = exclusivity_graph(*s, mode);
    std::size_t n1 = g1.vertex_count();
    bool product2 = copies == 2 && n1 <= 64 && n1 * n1 > kEnumerableVertices;
    std::optional<ExclusivityGraph> g;
    CliqueSet cliques;
    bool enumerable = false;
    if (!product2) {
        Scenario ks = power_scenario(*s, copies);
        g.emplace(exclusivity_graph(ks, mode));
        enumerable = g->vertex_count() <= kEnumerableVertices;
        if (enumerable) cliques = maximal_cliques(*g, clique_cap);
    }

    auto passes = [&](const Rational& param) {
        std::string spec = (family == ThresholdFamily::Isotropic ? "isotropic(" :
                                                                   "uniform_cycle(") +
                           to_string(param) + ")";
        ProbabilityFunction base = preset_box(spec, s);
        if (product2) {
            std::vector<Value> w = vertex_weights(base, g1);
            return !product_clique_weight_exceeds_one(g1, w, g1, w);
        }
        ProbabilityFunction pk =
            copies == 1 ? std::move(base) : power_probability(base, copies);
        if (enumerable) return ce_eval(pk, *g, cliques, copies).holds;
        return !clique_weight_exceeds_one(*g, vertex_weights(pk, *g));
    };

    if (!passes(lo))
        throw NonMonotoneError("family fails CE at the bottom of its range (" +
                               to_string(lo) + "); no threshold to bracket");
    if (passes(hi))
        return {hi, Rational(value_factor) * hi, functional, copies, mode, true};

    while (hi - lo > tol) {
        Rational mid = (lo + hi) / 2;
        if (passes(mid))
            lo = mid;
        else
            hi = mid;
    }
    Rational vstar = (lo + hi) / 2;
    return {vstar, Rational(value_factor) * vstar, functional, copies, mode, false};
}

} // namespace ctxlab
