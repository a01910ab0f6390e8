#ifndef CTXLAB_QM_HPP
#define CTXLAB_QM_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ctxlab/lp.hpp"
#include "ctxlab/probability.hpp"
#include "ctxlab/rational.hpp"
#include "ctxlab/scenario.hpp"

namespace ctxlab {

// Singleton and unordered-pair values of a measure on subsets of the sample
// space. The pair sum rule makes these two layers determine the whole
// measure (see mu_eval); whether the extension stays nonnegative is exactly
// the feasibility question, so the raw fields carry no sign constraint.
struct PairMeasure {
    std::uint32_t element_count = 0;
    std::vector<Rational> sing; // one per element
    std::vector<Rational> pair; // unordered pairs {i<j}, lexicographic

    PairMeasure() = default;
    explicit PairMeasure(std::uint32_t n)
        : element_count(n), sing(n, Rational(0)),
          pair((std::size_t)n * (n - 1) / 2, Rational(0)) {}

    static std::size_t pair_index(std::uint32_t i, std::uint32_t j, std::uint32_t n);
    const Rational& pair_value(std::uint32_t i, std::uint32_t j) const;
    // Second-order term q_ij = mu({i,j}) - mu({i}) - mu({j}); zero for
    // classical (additive) measures.
    Rational interference(std::uint32_t i, std::uint32_t j) const;
};

// Value of the extended measure on an arbitrary subset:
//   mu(A) = (2 - |A|) * sum_{i in A} sing_i + sum_{{i,j} in A} pair_ij,
// the unique extension of the singleton/pair layers with vanishing
// third-order interference. mu(empty) = 0.
Rational mu_eval(const PairMeasure& pm, const Outcome& a);

// Left-hand side of the three-set alternating identity
//   mu(A)+mu(B)+mu(C) - mu(AB)-mu(BC)-mu(CA) + mu(ABC)
// for pairwise disjoint A, B, C. The accessor form exists so oracle tests
// can feed arbitrary subset-value tables, not just PairMeasure extensions.
Rational sorkin_residual(const std::function<Rational(const Outcome&)>& mu,
                         const Outcome& a, const Outcome& b, const Outcome& c);
Rational sorkin_residual(const PairMeasure& pm, const Outcome& a, const Outcome& b,
                         const Outcome& c);

enum class SeparationRegime { Exhaustive, BranchAndBound, Heuristic };

struct SeparationResult {
    bool found = false; // true when some subset has strictly negative measure
    Outcome subset;     // the most negative one (first attained in scan order)
    Rational value = Rational(0);
    bool exact = true;  // false when only the heuristic regime ran
};

// Minimizes mu over all subsets of the sample space. Exhaustive and
// BranchAndBound are exact (element counts up to 26 and 40 respectively);
// Heuristic is deterministic first-improvement local search with restarts
// and may miss violations.
SeparationResult separation_oracle(const PairMeasure& pm, SeparationRegime regime);

enum class QMStatus { Feasible, Infeasible, HeuristicallyFeasible };
enum class QMMethod { Enumerate, RowGeneration };

struct QMResult {
    QMStatus status = QMStatus::Infeasible;
    PairMeasure witness;          // (heuristically) feasible
    FarkasCertificate certificate; // infeasible; rows as in row_labels
    std::vector<std::string> row_labels;
    std::string unverified_note;  // nonempty only for HeuristicallyFeasible
};

// Existence of a nonnegative pair-determined measure matching the table on
// every coarse-grained outcome of every measurement. Matching rows reduce to
// one equality per fine outcome plus vanishing cross-cell interference per
// measurement (equivalent by additivity; verified against the table on all
// coarse outcomes before a witness is returned). Nonnegativity is enforced
// by lazy cuts: Enumerate uses exhaustive separation (element count capped),
// RowGeneration uses exact branch and bound up to bnb_cap elements and
// labeled heuristic search beyond.
QMResult qm_feasible(const ProbabilityFunction& p, QMMethod method = QMMethod::Enumerate,
                     std::size_t enumerate_cap = 20, std::size_t bnb_cap = 40);

struct QMOptimum {
    Rational value;
    ProbabilityFunction table; // cell values of the optimal measure
    PairMeasure witness;
};

// Maximum of a linear functional over tables carried by pair-determined
// nonnegative measures. Variables are the measure layers themselves; the
// table is read off the cells afterwards, so cross-measurement consistency
// holds by construction. Exhaustive separation throughout (enumerate-cap
// sized scenarios only); the witness is re-verified on every subset.
QMOptimum qm_optimize(const LinearFunctional& f, std::size_t enumerate_cap = 20);

// Deterministic random vertex of the same polytope: qm_optimize under a
// seeded random objective over the fine outcomes. Used by property tests.
std::pair<ProbabilityFunction, PairMeasure> sample_qm_vertex(
    ScenarioRef s, std::uint64_t seed, std::size_t enumerate_cap = 20);

} // namespace ctxlab

#endif
