#ifndef CTXLAB_PROBABILITY_HPP
#define CTXLAB_PROBABILITY_HPP

#include <map>
#include <string>
#include <vector>

#include "ctxlab/rational.hpp"
#include "ctxlab/scenario.hpp"

namespace ctxlab {

// A table of experimental probabilities: one value per fine-grained outcome,
// keyed by subset identity so outcomes shared between measurements carry a
// single value by construction. Values live in the quadratic extension type
// so boxes parameterised by surds (uniform_cycle(sqrt(1/5))) stay exact.
//
// The constructor enforces structure (keys are exactly the scenario's fine
// outcomes); the probabilistic requirements are reported by validate() so
// that broken tables can be inspected rather than rejected outright.
class ProbabilityFunction {
public:
    ProbabilityFunction(ScenarioRef scenario, std::map<Outcome, Value> values,
                        bool decimal_mode = false);

    const Scenario& scenario() const { return *scenario_; }
    const ScenarioRef& scenario_ref() const { return scenario_; }
    bool decimal_mode() const { return decimal_; }
    const std::map<Outcome, Value>& values() const { return values_; }
    const Value& value(const Outcome& fine_outcome) const;
    // Induced additive value of a union of cells of one measurement.
    Value coarse_value(std::size_t measurement, const std::vector<std::size_t>& cells) const;
    // True when every entry is rational (no surd part); LP-based set
    // membership requires this.
    bool is_rational() const;

private:
    ScenarioRef scenario_;
    std::map<Outcome, Value> values_;
    bool decimal_;
};

// A minimal subset lying in the algebras of two measurements: one connected
// component of the pair's bipartite cell-intersection graph. Any consistent
// table must give the two cell groups equal total probability.
struct SharedComponent {
    std::size_t measurement_a, measurement_b;
    std::vector<std::size_t> cells_a, cells_b; // cell indices, ascending
    Outcome merged;                            // union of either group
};

// All components of all measurement pairs, in (a, b, component) order.
std::vector<SharedComponent> shared_components(const Scenario& s);

struct ConsistencyViolation {
    std::size_t measurement_a, measurement_b;
    Outcome merged; // union of the component's cells, shared by both algebras
    Value sum_a, sum_b;
    std::string to_string(const Scenario& s) const;
};

// Cross-measurement consistency: for every measurement pair, connected
// components of the bipartite cell-intersection graph give the minimal
// subsets lying in both algebras; their two value sums must agree (exactly,
// or within 1e-9 in decimal mode).
std::vector<ConsistencyViolation> consistency_check(const ProbabilityFunction& p);

// Full check: nonnegativity, per-measurement normalization, consistency.
// Empty result means the table is a valid probability function.
std::vector<std::string> validate(const ProbabilityFunction& p);

// Independent copies: value of A x B is P1(A) * P2(B).
ProbabilityFunction product_probability(const ProbabilityFunction& p1,
                                        const ProbabilityFunction& p2);
ProbabilityFunction power_probability(const ProbabilityFunction& p, unsigned copies);

// A distribution over the sample space itself; the classical (non-contextual)
// explanations searched for by membership checks.
struct JointDistribution {
    std::vector<Value> weights; // one per element
};

std::vector<std::string> validate(const JointDistribution& j, const Scenario& s);
ProbabilityFunction induced_probability(const JointDistribution& j, ScenarioRef s);

// Named box families:
//   pr                     chsh-shaped scenarios
//   isotropic(v)           v*PR + (1-v)*uniform, v in [0,1]
//   uniform                any scenario (uniform joint distribution)
//   deterministic(label)   point mass on the element with that label
//   uniform_cycle(p)       cycle-shaped scenarios, 0 <= p <= 1/2
// The spec string carries the parameters, e.g. "isotropic(0.9)",
// "uniform_cycle(sqrt(1/5))", "deterministic(0000)".
ProbabilityFunction preset_box(const std::string& spec, ScenarioRef s);

// Linear objective over fine outcomes. Coefficients are rational; values are
// evaluated in the extension field.
class LinearFunctional {
public:
    LinearFunctional(std::string name, ScenarioRef scenario,
                     std::vector<std::pair<Outcome, Rational>> terms,
                     Rational constant = Rational(0));

    const std::string& name() const { return name_; }
    const Scenario& scenario() const { return *scenario_; }
    const ScenarioRef& scenario_ref() const { return scenario_; }
    const std::vector<std::pair<Outcome, Rational>>& terms() const { return terms_; }
    const Rational& constant() const { return constant_; }

private:
    std::string name_;
    ScenarioRef scenario_;
    std::vector<std::pair<Outcome, Rational>> terms_;
    Rational constant_;
};

// chsh: sum_{x,y} (-1)^{xy} [P(a=b|xy) - P(a!=b|xy)]      (chsh-shaped)
// kcbs: sum_i P(box i answers 1)                          (cycle-shaped)
// gyni_payoff: 1/4 * sum over the four winning events     (gyni3-shaped)
LinearFunctional preset_functional(const std::string& name, ScenarioRef s);

Value evaluate(const LinearFunctional& f, const ProbabilityFunction& p);

// Shape predicates shared by presets and the CLI.
bool is_chsh_shaped(const Scenario& s);
// Returns the cycle length when the scenario is a cycle construction, 0
// otherwise.
std::uint32_t cycle_length(const Scenario& s);
bool is_gyni3_shaped(const Scenario& s);

} // namespace ctxlab

#endif
