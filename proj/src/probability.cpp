#include "ctxlab/probability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "ctxlab/errors.hpp"

namespace ctxlab {

namespace {

// Exact zero in exact mode, 1e-9 slack when the table was entered in
// decimal notation.
bool negligible(const Value& diff, bool decimal_mode) {
    if (!decimal_mode) return diff.sign() == 0;
    return std::fabs(diff.to_double()) <= 1e-9;
}

std::string measurement_name(const Scenario& s, std::size_t mi) {
    if (s.has_boxes()) {
        std::ostringstream os;
        os << "context {";
        const auto& ctx = s.contexts()[mi];
        for (std::size_t k = 0; k < ctx.size(); ++k) {
            if (k) os << ',';
            os << ctx[k] + 1; // boxes are 1-based in files and messages
        }
        os << '}';
        return os.str();
    }
    return "measurement " + std::to_string(mi);
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

} // namespace

// ---------------------------------------------------------------------------
// ProbabilityFunction

ProbabilityFunction::ProbabilityFunction(ScenarioRef scenario,
                                         std::map<Outcome, Value> values,
                                         bool decimal_mode)
    : scenario_(std::move(scenario)), values_(std::move(values)), decimal_(decimal_mode) {
    if (!scenario_) throw InvalidArgument("probability function needs a scenario");
    const auto& fine = scenario_->fine_outcomes();
    for (const auto& [o, v] : values_) {
        (void)v;
        if (scenario_->fine_outcome_index(o) < 0)
            throw InvalidArgument("outcome " + o.to_string() +
                                  " is not a fine-grained outcome of the scenario");
    }
    if (values_.size() != fine.size()) {
        for (const auto& o : fine)
            if (!values_.count(o))
                throw InvalidArgument("missing value for outcome " + o.to_string());
    }
}

const Value& ProbabilityFunction::value(const Outcome& fine_outcome) const {
    auto it = values_.find(fine_outcome);
    if (it == values_.end())
        throw InvalidArgument("no value for outcome " + fine_outcome.to_string());
    return it->second;
}

Value ProbabilityFunction::coarse_value(std::size_t measurement,
                                        const std::vector<std::size_t>& cells) const {
    if (measurement >= scenario_->measurements().size())
        throw InvalidArgument("measurement index out of range");
    const auto& m = scenario_->measurements()[measurement];
    Value sum;
    for (auto c : cells) {
        if (c >= m.cells.size()) throw InvalidArgument("cell index out of range");
        sum += value(m.cells[c]);
    }
    return sum;
}

bool ProbabilityFunction::is_rational() const {
    for (const auto& [o, v] : values_) {
        (void)o;
        if (!v.is_rational()) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Consistency

std::string ConsistencyViolation::to_string(const Scenario& s) const {
    std::ostringstream os;
    os << measurement_name(s, measurement_a) << " and " << measurement_name(s, measurement_b)
       << " disagree on " << merged.to_string() << ": " << sum_a.to_string() << " vs "
       << sum_b.to_string();
    return os.str();
}

std::vector<SharedComponent> shared_components(const Scenario& s) {
    std::size_t n_meas = s.measurements().size();

    // Element -> cell index, per measurement.
    std::vector<std::vector<std::uint32_t>> cell_of(n_meas);
    for (std::size_t mi = 0; mi < n_meas; ++mi) {
        cell_of[mi].assign(s.element_count(), 0);
        const auto& m = s.measurements()[mi];
        for (std::uint32_t c = 0; c < m.cells.size(); ++c)
            for (auto e : m.cells[c].members()) cell_of[mi][e] = c;
    }

    std::vector<SharedComponent> out;
    for (std::size_t a = 0; a < n_meas; ++a) {
        for (std::size_t b = a + 1; b < n_meas; ++b) {
            const auto& ma = s.measurements()[a];
            const auto& mb = s.measurements()[b];
            std::size_t na = ma.cells.size();
            UnionFind uf(na + mb.cells.size());
            for (std::uint32_t e = 0; e < s.element_count(); ++e)
                uf.unite(cell_of[a][e], na + cell_of[b][e]);

            std::map<std::size_t, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
                comps;
            for (std::size_t c = 0; c < na; ++c) comps[uf.find(c)].first.push_back(c);
            for (std::size_t c = 0; c < mb.cells.size(); ++c)
                comps[uf.find(na + c)].second.push_back(c);

            for (auto& [root, comp] : comps) {
                (void)root;
                SharedComponent sc;
                sc.measurement_a = a;
                sc.measurement_b = b;
                sc.cells_a = std::move(comp.first);
                sc.cells_b = std::move(comp.second);
                for (auto c : sc.cells_a) sc.merged = sc.merged.union_with(ma.cells[c]);
                out.push_back(std::move(sc));
            }
        }
    }
    return out;
}

std::vector<ConsistencyViolation> consistency_check(const ProbabilityFunction& p) {
    const Scenario& s = p.scenario();
    std::vector<ConsistencyViolation> out;
    for (const auto& sc : shared_components(s)) {
        const auto& ma = s.measurements()[sc.measurement_a];
        const auto& mb = s.measurements()[sc.measurement_b];
        Value sum_a, sum_b;
        for (auto c : sc.cells_a) sum_a += p.value(ma.cells[c]);
        for (auto c : sc.cells_b) sum_b += p.value(mb.cells[c]);
        if (!negligible(sum_a - sum_b, p.decimal_mode()))
            out.push_back({sc.measurement_a, sc.measurement_b, sc.merged, sum_a, sum_b});
    }
    return out;
}

std::vector<std::string> validate(const ProbabilityFunction& p) {
    std::vector<std::string> out;
    const Scenario& s = p.scenario();

    for (const auto& [o, v] : p.values())
        if (v.sign() < 0)
            out.push_back("negative probability " + v.to_string() + " for outcome " +
                          o.to_string());

    for (std::size_t mi = 0; mi < s.measurements().size(); ++mi) {
        Value sum;
        for (const auto& cell : s.measurements()[mi].cells) sum += p.value(cell);
        if (!negligible(sum - Value(1L), p.decimal_mode()))
            out.push_back(measurement_name(s, mi) + " sums to " + sum.to_string() +
                          ", expected 1");
    }

    for (const auto& v : consistency_check(p)) out.push_back(v.to_string(s));
    return out;
}

// ---------------------------------------------------------------------------
// Products

ProbabilityFunction product_probability(const ProbabilityFunction& p1,
                                        const ProbabilityFunction& p2) {
    auto product =
        std::make_shared<Scenario>(product_scenario(p1.scenario(), p2.scenario()));
    std::uint32_t n2 = p2.scenario().element_count();
    std::map<Outcome, Value> values;
    for (const auto& [a, va] : p1.values()) {
        for (const auto& [b, vb] : p2.values()) {
            std::vector<std::uint32_t> members;
            members.reserve(a.size() * b.size());
            for (auto e1 : a.members())
                for (auto e2 : b.members()) members.push_back(e1 * n2 + e2);
            values.emplace(Outcome(std::move(members)), va * vb);
        }
    }
    return ProbabilityFunction(std::move(product), std::move(values),
                               p1.decimal_mode() || p2.decimal_mode());
}

ProbabilityFunction power_probability(const ProbabilityFunction& p, unsigned copies) {
    if (copies == 0) throw InvalidArgument("need at least one copy");
    ProbabilityFunction result = p;
    for (unsigned k = 1; k < copies; ++k) result = product_probability(result, p);
    return result;
}

// ---------------------------------------------------------------------------
// Joint distributions

std::vector<std::string> validate(const JointDistribution& j, const Scenario& s) {
    std::vector<std::string> out;
    if (j.weights.size() != s.element_count()) {
        out.push_back("expected " + std::to_string(s.element_count()) + " weights, got " +
                      std::to_string(j.weights.size()));
        return out;
    }
    Value sum;
    for (std::size_t e = 0; e < j.weights.size(); ++e) {
        if (j.weights[e].sign() < 0)
            out.push_back("negative weight at element " + std::to_string(e));
        sum += j.weights[e];
    }
    if ((sum - Value(1L)).sign() != 0)
        out.push_back("weights sum to " + sum.to_string() + ", expected 1");
    return out;
}

ProbabilityFunction induced_probability(const JointDistribution& j, ScenarioRef s) {
    if (!s) throw InvalidArgument("null scenario");
    if (j.weights.size() != s->element_count())
        throw InvalidArgument("weight count does not match the sample space");
    std::map<Outcome, Value> values;
    for (const auto& o : s->fine_outcomes()) {
        Value sum;
        for (auto e : o.members()) sum += j.weights[e];
        values.emplace(o, sum);
    }
    return ProbabilityFunction(std::move(s), std::move(values));
}

// ---------------------------------------------------------------------------
// Shape predicates

bool is_chsh_shaped(const Scenario& s) {
    if (s.n_boxes() != 4 || s.element_count() != 16 || !s.has_labels()) return false;
    std::vector<std::vector<std::uint32_t>> want = {{0, 2}, {0, 3}, {1, 2}, {1, 3}};
    auto ctxs = s.contexts();
    std::sort(ctxs.begin(), ctxs.end());
    if (ctxs != want) return false;
    for (const auto& l : s.labels()) {
        if (l.size() != 4) return false;
        for (char c : l)
            if (c != '0' && c != '1') return false;
    }
    return true; // 16 distinct binary 4-strings = full support
}

std::uint32_t cycle_length(const Scenario& s) {
    std::uint32_t n = s.n_boxes();
    if (n < 3 || !s.has_labels()) return 0;
    if (s.measurements().size() != n) return 0;

    std::vector<std::vector<std::uint32_t>> want;
    for (std::uint32_t i = 0; i < n; ++i) {
        std::vector<std::uint32_t> ctx = {i, (i + 1) % n};
        std::sort(ctx.begin(), ctx.end());
        want.push_back(std::move(ctx));
    }
    std::sort(want.begin(), want.end());
    auto ctxs = s.contexts();
    std::sort(ctxs.begin(), ctxs.end());
    if (ctxs != want) return 0;

    for (const auto& l : s.labels()) {
        if (l.size() != n) return 0;
        for (std::uint32_t k = 0; k < n; ++k) {
            if (l[k] != '0' && l[k] != '1') return 0;
            if (l[k] == '1' && l[(k + 1) % n] == '1') return 0;
        }
    }
    // Count of cyclic binary strings without adjacent ones: the Lucas
    // recurrence L(2)=3, L(3)=4, L(n)=L(n-1)+L(n-2).
    std::uint64_t prev = 3, cur = 4;
    for (std::uint32_t k = 4; k <= n; ++k) {
        std::uint64_t next = prev + cur;
        prev = cur;
        cur = next;
    }
    std::uint64_t lucas = n == 2 ? 3 : cur;
    if (s.element_count() != lucas) return 0;
    return n;
}

bool is_gyni3_shaped(const Scenario& s) {
    if (s.n_boxes() != 6 || s.element_count() != 64 || !s.has_labels()) return false;
    std::vector<std::vector<std::uint32_t>> want;
    for (std::uint32_t x0 = 0; x0 < 2; ++x0)
        for (std::uint32_t x1 = 0; x1 < 2; ++x1)
            for (std::uint32_t x2 = 0; x2 < 2; ++x2) want.push_back({x0, 2 + x1, 4 + x2});
    std::sort(want.begin(), want.end());
    auto ctxs = s.contexts();
    std::sort(ctxs.begin(), ctxs.end());
    if (ctxs != want) return false;
    for (const auto& l : s.labels()) {
        if (l.size() != 6) return false;
        for (char c : l)
            if (c != '0' && c != '1') return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Preset boxes

namespace {

std::pair<std::string, std::string> split_spec(const std::string& spec) {
    auto open = spec.find('(');
    if (open == std::string::npos) return {spec, ""};
    if (spec.back() != ')') throw InvalidArgument("bad box spec '" + spec + "'");
    return {spec.substr(0, open), spec.substr(open + 1, spec.size() - open - 2)};
}

std::map<Outcome, Value> chsh_mix(const Scenario& s, const Value& v) {
    // v*PR + (1-v)*uniform, evaluated per cell. PR: P(ab|xy) = 1/2 when
    // a xor b = x and y, else 0; uniform gives every cell 1/4.
    std::map<Outcome, Value> values;
    Value quarter(Rational(1, 4)), half(Rational(1, 2));
    Value rest = (Value(1L) - v) * quarter;
    for (std::size_t mi = 0; mi < s.measurements().size(); ++mi) {
        const auto& ctx = s.contexts()[mi];
        int x = (int)ctx[0], y = (int)ctx[1] - 2;
        for (const auto& cell : s.measurements()[mi].cells) {
            const std::string& l = s.labels()[cell.members()[0]];
            int a = l[ctx[0]] - '0', b = l[ctx[1]] - '0';
            Value pr = ((a ^ b) == (x & y)) ? half : Value();
            values[cell] = v * pr + rest;
        }
    }
    return values;
}

} // namespace

ProbabilityFunction preset_box(const std::string& spec, ScenarioRef s) {
    if (!s) throw InvalidArgument("null scenario");
    auto [name, arg] = split_spec(spec);

    if (name == "pr" || name == "isotropic") {
        if (!is_chsh_shaped(*s))
            throw InvalidArgument("box family '" + name + "' needs a chsh-shaped scenario");
        Value v(1L);
        bool decimal = false;
        if (name == "isotropic") {
            if (arg.empty()) throw InvalidArgument("isotropic needs a parameter");
            v = parse_value(arg, &decimal);
            if (v.sign() < 0 || (v - Value(1L)).sign() > 0)
                throw InvalidArgument("isotropic parameter must lie in [0,1]");
        } else if (!arg.empty()) {
            throw InvalidArgument("pr takes no parameter");
        }
        return ProbabilityFunction(std::move(s), chsh_mix(*s, v), decimal);
    }

    if (name == "uniform") {
        if (!arg.empty()) throw InvalidArgument("uniform takes no parameter");
        std::map<Outcome, Value> values;
        for (const auto& o : s->fine_outcomes())
            values.emplace(o, Value(Rational((long)o.size(), (long)s->element_count())));
        return ProbabilityFunction(std::move(s), std::move(values));
    }

    if (name == "deterministic") {
        if (arg.empty()) throw InvalidArgument("deterministic needs an element label");
        long elem = -1;
        if (s->has_labels()) {
            const auto& ls = s->labels();
            auto it = std::find(ls.begin(), ls.end(), arg);
            if (it != ls.end()) elem = it - ls.begin();
        }
        if (elem < 0) {
            try {
                std::size_t pos = 0;
                elem = std::stol(arg, &pos);
                if (pos != arg.size() || elem < 0 || (std::uint64_t)elem >= s->element_count())
                    elem = -1;
            } catch (const std::exception&) {
                elem = -1;
            }
        }
        if (elem < 0)
            throw InvalidArgument("no element '" + arg + "' in scenario " + s->name());
        std::map<Outcome, Value> values;
        for (const auto& o : s->fine_outcomes())
            values.emplace(o, o.contains((std::uint32_t)elem) ? Value(1L) : Value());
        return ProbabilityFunction(std::move(s), std::move(values));
    }

    if (name == "uniform_cycle") {
        if (arg.empty()) throw InvalidArgument("uniform_cycle needs a parameter");
        std::uint32_t n = cycle_length(*s);
        if (n == 0)
            throw InvalidArgument("box family 'uniform_cycle' needs a cycle-shaped scenario");
        bool decimal = false;
        Value p = parse_value(arg, &decimal);
        if (p.sign() < 0 || (p - Value(Rational(1, 2))).sign() > 0)
            throw InvalidArgument(
                "uniform_cycle parameter must lie in [0,1/2] so the all-empty cell "
                "stays nonnegative");
        Value empty_cell = Value(1L) - p - p;
        std::map<Outcome, Value> values;
        for (std::size_t mi = 0; mi < s->measurements().size(); ++mi) {
            const auto& ctx = s->contexts()[mi];
            for (const auto& cell : s->measurements()[mi].cells) {
                const std::string& l = s->labels()[cell.members()[0]];
                int ones = (l[ctx[0]] == '1') + (l[ctx[1]] == '1');
                values[cell] = ones == 1 ? p : empty_cell;
            }
        }
        return ProbabilityFunction(std::move(s), std::move(values), decimal);
    }

    throw InvalidArgument("unknown box family '" + name + "'");
}

// ---------------------------------------------------------------------------
// Functionals

LinearFunctional::LinearFunctional(std::string name, ScenarioRef scenario,
                                   std::vector<std::pair<Outcome, Rational>> terms,
                                   Rational constant)
    : name_(std::move(name)),
      scenario_(std::move(scenario)),
      terms_(std::move(terms)),
      constant_(std::move(constant)) {
    if (!scenario_) throw InvalidArgument("functional needs a scenario");
    for (const auto& [o, c] : terms_) {
        (void)c;
        if (scenario_->fine_outcome_index(o) < 0)
            throw InvalidArgument("functional term " + o.to_string() +
                                  " is not a fine-grained outcome");
    }
}

LinearFunctional preset_functional(const std::string& name, ScenarioRef s) {
    if (!s) throw InvalidArgument("null scenario");

    if (name == "chsh") {
        if (!is_chsh_shaped(*s))
            throw InvalidArgument("functional 'chsh' needs a chsh-shaped scenario");
        std::vector<std::pair<Outcome, Rational>> terms;
        for (std::size_t mi = 0; mi < s->measurements().size(); ++mi) {
            const auto& ctx = s->contexts()[mi];
            int x = (int)ctx[0], y = (int)ctx[1] - 2;
            int sign = (x & y) ? -1 : 1;
            for (const auto& cell : s->measurements()[mi].cells) {
                const std::string& l = s->labels()[cell.members()[0]];
                int agree = l[ctx[0]] == l[ctx[1]] ? 1 : -1;
                terms.emplace_back(cell, Rational(sign * agree));
            }
        }
        return LinearFunctional("chsh", std::move(s), std::move(terms));
    }

    if (name == "kcbs") {
        std::uint32_t n = cycle_length(*s);
        if (n == 0) throw InvalidArgument("functional 'kcbs' needs a cycle-shaped scenario");
        std::vector<std::pair<Outcome, Rational>> terms;
        for (std::uint32_t box = 0; box < n; ++box) {
            std::vector<std::uint32_t> members;
            for (std::uint32_t e = 0; e < s->element_count(); ++e)
                if (s->labels()[e][box] == '1') members.push_back(e);
            terms.emplace_back(Outcome(std::move(members)), Rational(1));
        }
        return LinearFunctional("kcbs", std::move(s), std::move(terms));
    }

    if (name == "gyni_payoff") {
        if (!is_gyni3_shaped(*s))
            throw InvalidArgument("functional 'gyni_payoff' needs a gyni3-shaped scenario");
        // Promise inputs with even parity; party p wins by answering the
        // input of party p+1. Box 2p+x holds party p's answer under input x.
        std::vector<std::pair<Outcome, Rational>> terms;
        for (int x0 = 0; x0 < 2; ++x0) {
            for (int x1 = 0; x1 < 2; ++x1) {
                int x2 = x0 ^ x1;
                int a0 = x1, a1 = x2, a2 = x0;
                std::vector<std::uint32_t> members;
                for (std::uint32_t e = 0; e < 64; ++e) {
                    const std::string& l = s->labels()[e];
                    if (l[x0] - '0' == a0 && l[2 + x1] - '0' == a1 && l[4 + x2] - '0' == a2)
                        members.push_back(e);
                }
                terms.emplace_back(Outcome(std::move(members)), Rational(1, 4));
            }
        }
        return LinearFunctional("gyni_payoff", std::move(s), std::move(terms));
    }

    throw InvalidArgument("unknown functional '" + name + "'");
}

Value evaluate(const LinearFunctional& f, const ProbabilityFunction& p) {
    if (&f.scenario() != &p.scenario() && !(f.scenario() == p.scenario()))
        throw InvalidArgument("functional and probability table use different scenarios");
    Value sum(f.constant());
    for (const auto& [o, c] : f.terms()) sum += Value(c) * p.value(o);
    return sum;
}

} // namespace ctxlab
