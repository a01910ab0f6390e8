#ifndef CTXLAB_LP_HPP
#define CTXLAB_LP_HPP

#include <optional>
#include <vector>

#include "ctxlab/rational.hpp"

namespace ctxlab {

// Maximization LP over exact rationals. Variables are unbounded unless a
// lower bound is set; inequalities read row . x <= rhs.
struct LinearProgram {
    std::size_t variable_count = 0;
    std::vector<Rational> objective; // maximize; zero vector = feasibility
    struct Row {
        std::vector<Rational> coeffs;
        Rational rhs;
    };
    std::vector<Row> equalities;
    std::vector<Row> inequalities;
    std::vector<std::optional<Rational>> lower_bounds;

    explicit LinearProgram(std::size_t vars)
        : variable_count(vars), objective(vars, Rational(0)), lower_bounds(vars) {}

    void set_objective(std::vector<Rational> c);
    void add_equality(std::vector<Rational> coeffs, Rational rhs);
    void add_inequality(std::vector<Rational> coeffs, Rational rhs);
    void set_lower_bound(std::size_t var, Rational bound);
};

enum class LPStatus { Optimal, Infeasible, Unbounded };
enum class LPMode { Exact, Float };

// Nonnegative combination of the constraints proving 0 <= negative:
//   sum_e y_e (eq_e) + sum_k u_k (ineq_k) - sum_i w_i (x_i >= l_i)
// with u, w >= 0 must cancel every variable and leave a negative right side.
struct FarkasCertificate {
    std::vector<Rational> eq_multipliers;
    std::vector<Rational> ineq_multipliers;  // >= 0
    std::vector<Rational> bound_multipliers; // >= 0; zero where no bound exists
};

// Dual witness for an optimum: stationarity c = A_eq^T y + A_in^T u - w with
// u, w >= 0 (w supported on bounded variables) and matching objective
// y.b_eq + u.b_in - w.l.
struct DualWitness {
    std::vector<Rational> eq_multipliers;
    std::vector<Rational> ineq_multipliers;
    std::vector<Rational> bound_multipliers;
};

struct LPResult {
    LPStatus status = LPStatus::Infeasible;
    std::vector<Rational> primal; // Optimal (also the base point when Unbounded)
    Rational objective_value = Rational(0);
    FarkasCertificate farkas;     // Infeasible
    DualWitness dual;             // Optimal
    std::vector<Rational> ray;    // Unbounded: feasible direction, c.ray > 0
};

// Two-phase dense simplex. Deterministic: largest-improvement pivoting with
// lowest-index tie breaks, switching to Bland's rule after a degeneracy
// stall, so identical inputs give identical results. Exact mode carries no
// rounding anywhere; float mode uses 1e-9 tolerances. Every witness and
// certificate is re-verified before returning (InternalError on failure).
LPResult solve(const LinearProgram& lp, LPMode mode = LPMode::Exact);
// solve with a zero objective; status Optimal means feasible.
LPResult feasibility(const LinearProgram& lp, LPMode mode = LPMode::Exact);

// Independent re-evaluation of witnesses, used by solve itself and by tests.
bool verify_primal(const LinearProgram& lp, const std::vector<Rational>& x, LPMode mode);
bool verify_farkas(const LinearProgram& lp, const FarkasCertificate& f, LPMode mode);
bool verify_dual(const LinearProgram& lp, const std::vector<Rational>& x,
                 const DualWitness& d, LPMode mode);
bool verify_ray(const LinearProgram& lp, const std::vector<Rational>& point,
                const std::vector<Rational>& ray, LPMode mode);

// Row-by-row constraint growth for cut generation. Re-solves from scratch;
// results are identical to a cold solve on the accumulated program by
// construction.
class IncrementalLP {
public:
    explicit IncrementalLP(LinearProgram base) : lp_(std::move(base)) {}
    LinearProgram& program() { return lp_; }
    const LinearProgram& program() const { return lp_; }
    void add_inequality(std::vector<Rational> coeffs, Rational rhs) {
        lp_.add_inequality(std::move(coeffs), std::move(rhs));
    }
    void add_equality(std::vector<Rational> coeffs, Rational rhs) {
        lp_.add_equality(std::move(coeffs), std::move(rhs));
    }
    LPResult solve(LPMode mode = LPMode::Exact) const { return ctxlab::solve(lp_, mode); }

private:
    LinearProgram lp_;
};

} // namespace ctxlab

#endif
