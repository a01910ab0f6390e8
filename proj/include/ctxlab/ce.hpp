#ifndef CTXLAB_CE_HPP
#define CTXLAB_CE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ctxlab/cliques.hpp"
#include "ctxlab/lp.hpp"
#include "ctxlab/probability.hpp"
#include "ctxlab/rational.hpp"
#include "ctxlab/scenario.hpp"

namespace ctxlab {

// Outcome of a Consistent Exclusivity check: every set of pairwise-exclusive
// outcomes must carry total probability at most 1. Maximal cliques of the
// exclusivity graph suffice since probabilities are nonnegative.
struct CEReport {
    bool holds = false;
    std::vector<std::uint32_t> worst_clique; // vertex ids in the checked graph
    std::vector<Outcome> worst_outcomes;     // the same vertices as subsets
    Value worst_sum;
    unsigned copies = 1;
    ExclusivityMode mode = ExclusivityMode::Coarse;
};

// Checks P (or its `copies`-fold independent product) against every maximal
// clique. The worst clique is reported whether or not the bound holds; ties
// resolve to the lexicographically first clique.
CEReport ce_check(const ProbabilityFunction& p, unsigned copies = 1,
                  ExclusivityMode mode = ExclusivityMode::Coarse,
                  std::size_t clique_cap = 10000000);

// Same decision against a pre-enumerated clique set whose graph vertices are
// the fine outcomes of p's scenario. Bisection reuses one enumeration across
// many tables.
CEReport ce_eval(const ProbabilityFunction& p, const ExclusivityGraph& g,
                 const CliqueSet& cliques, unsigned copies);

// Decision-only form of ce_check, without the worst-clique report. On large
// product graphs this prunes against the bound 1 directly instead of finding
// the true maximum, which is far cheaper when the table passes comfortably.
bool ce_holds(const ProbabilityFunction& p, unsigned copies = 1,
              ExclusivityMode mode = ExclusivityMode::Coarse,
              std::size_t clique_cap = 10000000);

// Membership in the non-contextual set: is P the marginal of one joint
// distribution over the sample space?
struct NCResult {
    bool feasible = false;
    JointDistribution joint;       // when feasible
    FarkasCertificate certificate; // when infeasible
    // One label per LP row (normalization first, then one per fine outcome),
    // describing what each certificate multiplier weighs.
    std::vector<std::string> row_labels;
};

NCResult nc_check(const ProbabilityFunction& p, std::size_t element_cap = 4096);

struct NCOptimum {
    Rational value;
    JointDistribution joint;
};

// Exact maximum of f over the non-contextual set.
NCOptimum nc_optimize(const LinearFunctional& f, std::size_t element_cap = 4096);

struct TableOptimum {
    Rational value;
    ProbabilityFunction table;
};

// Exact maximum of f over all valid probability functions (normalization,
// nonnegativity, cross-measurement consistency).
TableOptimum consistent_optimize(const LinearFunctional& f);

// As consistent_optimize plus one sum <= 1 row per maximal clique: the
// single-copy CE set.
TableOptimum ce_optimize(const LinearFunctional& f,
                         ExclusivityMode mode = ExclusivityMode::Coarse,
                         std::size_t clique_cap = 10000000);

// Parametric box families with documented monotone CE behaviour.
enum class ThresholdFamily { Isotropic, UniformCycle };

std::string to_string(ThresholdFamily f);
ThresholdFamily threshold_family_from_string(const std::string& s);

struct ThresholdResult {
    Rational parameter;        // v* (dyadic from bisection, or the range top)
    Rational functional_value; // chsh: 4 v*; kcbs: n p*
    std::string functional;    // "chsh" or "kcbs"
    unsigned copies = 1;
    ExclusivityMode mode = ExclusivityMode::Coarse;
    // True when the predicate holds across the whole range (v* is the top).
    bool never_fails = false;
};

// Bisects the family parameter for the largest value still passing ce_check
// with the given copies. The predicate must hold at the bottom of the range;
// a family that fails there raises NonMonotoneError.
ThresholdResult threshold_search(ScenarioRef s, ThresholdFamily family,
                                 unsigned copies, const Rational& tol,
                                 ExclusivityMode mode = ExclusivityMode::Coarse,
                                 std::size_t clique_cap = 10000000);

} // namespace ctxlab

#endif
