#include "ctxlab/lp.hpp"

#include <algorithm>
#include <cstdlib>
#include <type_traits>

#include "ctxlab/errors.hpp"

namespace ctxlab {

void LinearProgram::set_objective(std::vector<Rational> c) {
    if (c.size() != variable_count) throw InvalidArgument("objective length mismatch");
    objective = std::move(c);
}

void LinearProgram::add_equality(std::vector<Rational> coeffs, Rational rhs) {
    if (coeffs.size() != variable_count) throw InvalidArgument("equality length mismatch");
    equalities.push_back({std::move(coeffs), std::move(rhs)});
}

void LinearProgram::add_inequality(std::vector<Rational> coeffs, Rational rhs) {
    if (coeffs.size() != variable_count)
        throw InvalidArgument("inequality length mismatch");
    inequalities.push_back({std::move(coeffs), std::move(rhs)});
}

void LinearProgram::set_lower_bound(std::size_t var, Rational bound) {
    if (var >= variable_count) throw InvalidArgument("variable index out of range");
    lower_bounds[var] = std::move(bound);
}

namespace {

struct ExactOps {
    using Scalar = Rational;
    static int sign(const Scalar& x) { return sgn(x); }
    static Scalar from_rational(const Rational& r) { return r; }
    static Rational to_rational(const Scalar& s) { return s; }
};

struct FloatOps {
    using Scalar = double;
    static constexpr double eps = 1e-9;
    static int sign(double x) { return x > eps ? 1 : (x < -eps ? -1 : 0); }
    static Scalar from_rational(const Rational& r) { return r.get_d(); }
    static Rational to_rational(double x) { return Rational(x); }
};

// Standard computational form: max cost . u  s.t.  rows u = b, u >= 0,
// with b >= 0. Free variables are split, lower-bounded variables shifted,
// inequalities get slack columns, rows are sign-normalized.
struct StdProgram {
    std::size_t cols = 0;
    std::vector<std::vector<Rational>> rows;
    std::vector<Rational> b;
    std::vector<Rational> cost;

    struct VarMap {
        bool is_free = false;
        std::size_t col_a = 0, col_b = 0; // free: x = u[a] - u[b]
        Rational shift;                   // bounded: x = shift + u[a]
    };
    std::vector<VarMap> vars;
    std::vector<int> row_sign; // +-1 applied to reach b >= 0
    std::size_t n_eq = 0;      // std rows [0, n_eq) are the equalities, in order
};

StdProgram standardize(const LinearProgram& lp) {
    StdProgram sp;
    sp.vars.resize(lp.variable_count);
    for (std::size_t i = 0; i < lp.variable_count; ++i) {
        auto& vm = sp.vars[i];
        if (lp.lower_bounds[i]) {
            vm.is_free = false;
            vm.shift = *lp.lower_bounds[i];
            vm.col_a = sp.cols++;
        } else {
            vm.is_free = true;
            vm.col_a = sp.cols++;
            vm.col_b = sp.cols++;
        }
    }
    std::size_t slack_base = sp.cols;
    sp.cols += lp.inequalities.size();

    sp.cost.assign(sp.cols, Rational(0));
    for (std::size_t i = 0; i < lp.variable_count; ++i) {
        const auto& vm = sp.vars[i];
        sp.cost[vm.col_a] += lp.objective[i];
        if (vm.is_free) sp.cost[vm.col_b] -= lp.objective[i];
    }

    sp.n_eq = lp.equalities.size();
    auto add_row = [&](const LinearProgram::Row& row, long slack) {
        std::vector<Rational> r(sp.cols, Rational(0));
        Rational rhs = row.rhs;
        for (std::size_t i = 0; i < lp.variable_count; ++i) {
            if (sgn(row.coeffs[i]) == 0) continue;
            const auto& vm = sp.vars[i];
            r[vm.col_a] += row.coeffs[i];
            if (vm.is_free)
                r[vm.col_b] -= row.coeffs[i];
            else
                rhs -= row.coeffs[i] * vm.shift;
        }
        if (slack >= 0) r[slack_base + slack] = 1;
        int sign = 1;
        if (sgn(rhs) < 0) {
            sign = -1;
            for (auto& c : r) c = -c;
            rhs = -rhs;
        }
        sp.rows.push_back(std::move(r));
        sp.b.push_back(std::move(rhs));
        sp.row_sign.push_back(sign);
    };
    for (const auto& row : lp.equalities) add_row(row, -1);
    for (std::size_t k = 0; k < lp.inequalities.size(); ++k)
        add_row(lp.inequalities[k], (long)k);
    return sp;
}

// Dense two-phase tableau simplex. Entering rule: most-improving reduced
// cost, ties to the lowest column; after a degeneracy stall it switches to
// Bland's rule (lowest eligible column) for guaranteed termination. Leaving
// rule: minimum ratio, ties to the lowest basis variable.
template <class Ops>
class Simplex {
    using S = typename Ops::Scalar;

public:
    explicit Simplex(const StdProgram& sp)
        : m_(sp.rows.size()), n_(sp.cols), total_(n_ + m_) {
        T_.assign(m_, std::vector<S>(total_, S(0)));
        b_.resize(m_);
        basis_.resize(m_);
        for (std::size_t r = 0; r < m_; ++r) {
            for (std::size_t j = 0; j < n_; ++j)
                T_[r][j] = Ops::from_rational(sp.rows[r][j]);
            T_[r][n_ + r] = S(1);
            b_[r] = Ops::from_rational(sp.b[r]);
            basis_[r] = n_ + r;
        }
        real_cost_.assign(total_, S(0));
        for (std::size_t j = 0; j < n_; ++j)
            real_cost_[j] = Ops::from_rational(sp.cost[j]);
    }

    // Returns false when the phase-1 optimum is negative (infeasible).
    bool phase1() {
        cost_.assign(total_, S(0));
        for (std::size_t r = 0; r < m_; ++r) cost_[n_ + r] = S(-1);
        recompute_objective();
        if (iterate() != Outcome::Optimal) {
            // The phase-1 objective is bounded by construction, so an
            // unbounded report can only be the float path misreading a
            // heavily degenerate stall. Accept the point reached; the
            // artificial sum below still decides feasibility.
            if constexpr (std::is_same_v<S, Rational>)
                throw InternalError("phase 1 cannot be unbounded");
        }
        if (Ops::sign(zval_) < 0) return false;

        // Drive leftover basic artificials out wherever the row still has a
        // real coefficient; rows that are all zero on real columns are inert
        // (they never change again and never admit a pivot).
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_) continue;
            for (std::size_t j = 0; j < n_; ++j) {
                if (Ops::sign(T_[r][j]) != 0) {
                    pivot(r, j);
                    break;
                }
            }
        }
        return true;
    }

    enum class Outcome { Optimal, Unbounded };

    Outcome phase2() {
        cost_ = real_cost_;
        bland_ = false;
        stall_ = 0;
        recompute_objective();
        return iterate();
    }

    // Multiplier for std row r: y_r = z(artificial column r) = zc + cost.
    Rational dual_value(std::size_t r) const {
        return Ops::to_rational(zc_[n_ + r] + cost_[n_ + r]);
    }

    std::vector<Rational> primal(std::size_t cols) const {
        std::vector<Rational> u(cols, Rational(0));
        for (std::size_t r = 0; r < m_; ++r)
            if (basis_[r] < cols) u[basis_[r]] = Ops::to_rational(b_[r]);
        return u;
    }

    std::vector<Rational> ray(std::size_t cols) const {
        std::vector<Rational> d(cols, Rational(0));
        d[unbounded_col_] = 1;
        for (std::size_t r = 0; r < m_; ++r)
            if (basis_[r] < cols) d[basis_[r]] = Ops::to_rational(-T_[r][unbounded_col_]);
        return d;
    }

    Rational objective() const { return Ops::to_rational(zval_); }

private:
    void recompute_objective() {
        zc_.assign(total_, S(0));
        zval_ = S(0);
        for (std::size_t j = 0; j < total_; ++j) {
            S z(0);
            for (std::size_t r = 0; r < m_; ++r)
                if (Ops::sign(T_[r][j]) != 0 && Ops::sign(cost_[basis_[r]]) != 0)
                    z += cost_[basis_[r]] * T_[r][j];
            zc_[j] = z - cost_[j];
        }
        for (std::size_t r = 0; r < m_; ++r)
            if (Ops::sign(cost_[basis_[r]]) != 0) zval_ += cost_[basis_[r]] * b_[r];
    }

    void pivot(std::size_t pr, std::size_t pc) {
        S piv = T_[pr][pc];
        if (Ops::sign(piv) == 0) throw InternalError("zero pivot");
        for (auto& t : T_[pr]) t /= piv;
        b_[pr] /= piv;
        T_[pr][pc] = S(1); // exact in float mode too
        for (std::size_t r = 0; r < m_; ++r) {
            if (r == pr) continue;
            S f = T_[r][pc];
            if (Ops::sign(f) == 0) continue;
            for (std::size_t j = 0; j < total_; ++j) T_[r][j] -= f * T_[pr][j];
            T_[r][pc] = S(0);
            b_[r] -= f * b_[pr];
        }
        S f = zc_[pc];
        if (Ops::sign(f) != 0) {
            for (std::size_t j = 0; j < total_; ++j) zc_[j] -= f * T_[pr][j];
            zc_[pc] = S(0);
            zval_ -= f * b_[pr];
        }
        basis_[pr] = pc;
    }

    Outcome iterate() {
        const long stall_threshold = 64 + 2 * (long)(m_ + n_);
        for (long it = 0; it < 2000000; ++it) {
            // Entering column: real columns only; artificials never re-enter.
            std::size_t enter = total_;
            for (std::size_t j = 0; j < n_; ++j) {
                if (Ops::sign(zc_[j]) >= 0) continue;
                if (bland_) {
                    enter = j;
                    break;
                }
                if (enter == total_ || zc_[j] < zc_[enter]) enter = j;
            }
            if (enter == total_) return Outcome::Optimal;

            std::size_t leave = m_;
            for (std::size_t r = 0; r < m_; ++r) {
                if (Ops::sign(T_[r][enter]) <= 0) continue;
                if (leave == m_) {
                    leave = r;
                    continue;
                }
                S lhs = b_[r] * T_[leave][enter];
                S rhs = b_[leave] * T_[r][enter];
                if (lhs < rhs || (Ops::sign(lhs - rhs) == 0 && basis_[r] < basis_[leave]))
                    leave = r;
            }
            if (leave == m_) {
                unbounded_col_ = enter;
                return Outcome::Unbounded;
            }
            if (Ops::sign(b_[leave]) == 0) {
                if (++stall_ > stall_threshold) bland_ = true;
            } else {
                stall_ = 0;
            }
            pivot(leave, enter);
        }
        throw InternalError("simplex iteration limit exceeded");
    }

    std::size_t m_, n_, total_;
    std::vector<std::vector<S>> T_;
    std::vector<S> b_, zc_, cost_, real_cost_;
    std::vector<std::size_t> basis_;
    S zval_ = S(0);
    bool bland_ = false;
    long stall_ = 0;
    std::size_t unbounded_col_ = 0;
};

std::vector<Rational> map_back(const StdProgram& sp, const std::vector<Rational>& u,
                               bool include_shift) {
    std::vector<Rational> x(sp.vars.size(), Rational(0));
    for (std::size_t i = 0; i < sp.vars.size(); ++i) {
        const auto& vm = sp.vars[i];
        if (vm.is_free)
            x[i] = u[vm.col_a] - u[vm.col_b];
        else
            x[i] = include_shift ? vm.shift + u[vm.col_a] : u[vm.col_a];
    }
    return x;
}

// Multipliers on the original constraint lists from the std-row multipliers.
void split_multipliers(const LinearProgram& lp, const StdProgram& sp,
                       const std::vector<Rational>& y, std::vector<Rational>& eq,
                       std::vector<Rational>& ineq) {
    eq.assign(lp.equalities.size(), Rational(0));
    ineq.assign(lp.inequalities.size(), Rational(0));
    for (std::size_t r = 0; r < y.size(); ++r) {
        Rational v = Rational(sp.row_sign[r]) * y[r];
        if (r < sp.n_eq)
            eq[r] = v;
        else
            ineq[r - sp.n_eq] = v;
    }
}

// Combination coefficient per original variable: A_eq^T y + A_in^T u.
std::vector<Rational> combine_columns(const LinearProgram& lp,
                                      const std::vector<Rational>& eq,
                                      const std::vector<Rational>& ineq) {
    std::vector<Rational> c(lp.variable_count, Rational(0));
    for (std::size_t e = 0; e < lp.equalities.size(); ++e) {
        if (sgn(eq[e]) == 0) continue;
        for (std::size_t i = 0; i < lp.variable_count; ++i)
            c[i] += eq[e] * lp.equalities[e].coeffs[i];
    }
    for (std::size_t k = 0; k < lp.inequalities.size(); ++k) {
        if (sgn(ineq[k]) == 0) continue;
        for (std::size_t i = 0; i < lp.variable_count; ++i)
            c[i] += ineq[k] * lp.inequalities[k].coeffs[i];
    }
    return c;
}

bool within(const Rational& x, LPMode mode, double tol = 1e-9) {
    if (mode == LPMode::Exact) return sgn(x) == 0;
    return std::abs(x.get_d()) <= tol;
}

bool nonneg(const Rational& x, LPMode mode, double tol = 1e-9) {
    if (mode == LPMode::Exact) return sgn(x) >= 0;
    return x.get_d() >= -tol;
}

template <class Ops>
LPResult solve_impl(const LinearProgram& lp) {
    StdProgram sp = standardize(lp);
    Simplex<Ops> sim(sp);
    LPResult res;

    if (!sim.phase1()) {
        res.status = LPStatus::Infeasible;
        std::vector<Rational> y(sp.rows.size());
        for (std::size_t r = 0; r < y.size(); ++r) y[r] = sim.dual_value(r);
        split_multipliers(lp, sp, y, res.farkas.eq_multipliers,
                          res.farkas.ineq_multipliers);
        auto col = combine_columns(lp, res.farkas.eq_multipliers,
                                   res.farkas.ineq_multipliers);
        res.farkas.bound_multipliers.assign(lp.variable_count, Rational(0));
        for (std::size_t i = 0; i < lp.variable_count; ++i)
            if (lp.lower_bounds[i]) res.farkas.bound_multipliers[i] = col[i];
        return res;
    }

    auto outcome = sim.phase2();
    if (outcome == Simplex<Ops>::Outcome::Unbounded) {
        res.status = LPStatus::Unbounded;
        res.primal = map_back(sp, sim.primal(sp.cols), true);
        res.ray = map_back(sp, sim.ray(sp.cols), false);
        return res;
    }

    res.status = LPStatus::Optimal;
    res.primal = map_back(sp, sim.primal(sp.cols), true);
    res.objective_value = Rational(0);
    for (std::size_t i = 0; i < lp.variable_count; ++i)
        res.objective_value += lp.objective[i] * res.primal[i];

    std::vector<Rational> y(sp.rows.size());
    for (std::size_t r = 0; r < y.size(); ++r) y[r] = sim.dual_value(r);
    split_multipliers(lp, sp, y, res.dual.eq_multipliers, res.dual.ineq_multipliers);
    auto col = combine_columns(lp, res.dual.eq_multipliers, res.dual.ineq_multipliers);
    res.dual.bound_multipliers.assign(lp.variable_count, Rational(0));
    for (std::size_t i = 0; i < lp.variable_count; ++i)
        if (lp.lower_bounds[i]) res.dual.bound_multipliers[i] = col[i] - lp.objective[i];
    return res;
}

void check_shape(const LinearProgram& lp) {
    if (lp.objective.size() != lp.variable_count ||
        lp.lower_bounds.size() != lp.variable_count)
        throw InvalidArgument("malformed program: vector sizes disagree");
    for (const auto& row : lp.equalities)
        if (row.coeffs.size() != lp.variable_count)
            throw InvalidArgument("equality row length mismatch");
    for (const auto& row : lp.inequalities)
        if (row.coeffs.size() != lp.variable_count)
            throw InvalidArgument("inequality row length mismatch");
}

} // namespace

bool verify_primal(const LinearProgram& lp, const std::vector<Rational>& x, LPMode mode) {
    if (x.size() != lp.variable_count) return false;
    for (const auto& row : lp.equalities) {
        Rational lhs(0);
        for (std::size_t i = 0; i < x.size(); ++i) lhs += row.coeffs[i] * x[i];
        if (!within(lhs - row.rhs, mode)) return false;
    }
    for (const auto& row : lp.inequalities) {
        Rational lhs(0);
        for (std::size_t i = 0; i < x.size(); ++i) lhs += row.coeffs[i] * x[i];
        if (!nonneg(row.rhs - lhs, mode)) return false;
    }
    for (std::size_t i = 0; i < x.size(); ++i)
        if (lp.lower_bounds[i] && !nonneg(x[i] - *lp.lower_bounds[i], mode)) return false;
    return true;
}

bool verify_farkas(const LinearProgram& lp, const FarkasCertificate& f, LPMode mode) {
    if (f.eq_multipliers.size() != lp.equalities.size() ||
        f.ineq_multipliers.size() != lp.inequalities.size() ||
        f.bound_multipliers.size() != lp.variable_count)
        return false;
    for (const auto& u : f.ineq_multipliers)
        if (!nonneg(u, mode)) return false;
    for (std::size_t i = 0; i < lp.variable_count; ++i) {
        if (!nonneg(f.bound_multipliers[i], mode)) return false;
        if (!lp.lower_bounds[i] && sgn(f.bound_multipliers[i]) != 0) return false;
    }
    auto col = combine_columns(lp, f.eq_multipliers, f.ineq_multipliers);
    for (std::size_t i = 0; i < lp.variable_count; ++i)
        if (!within(col[i] - f.bound_multipliers[i], mode)) return false;

    Rational rhs(0);
    for (std::size_t e = 0; e < lp.equalities.size(); ++e)
        rhs += f.eq_multipliers[e] * lp.equalities[e].rhs;
    for (std::size_t k = 0; k < lp.inequalities.size(); ++k)
        rhs += f.ineq_multipliers[k] * lp.inequalities[k].rhs;
    for (std::size_t i = 0; i < lp.variable_count; ++i)
        if (lp.lower_bounds[i]) rhs -= f.bound_multipliers[i] * *lp.lower_bounds[i];
    if (mode == LPMode::Exact) return sgn(rhs) < 0;
    return rhs.get_d() < -1e-9;
}

bool verify_dual(const LinearProgram& lp, const std::vector<Rational>& x,
                 const DualWitness& d, LPMode mode) {
    if (d.eq_multipliers.size() != lp.equalities.size() ||
        d.ineq_multipliers.size() != lp.inequalities.size() ||
        d.bound_multipliers.size() != lp.variable_count || x.size() != lp.variable_count)
        return false;
    for (const auto& u : d.ineq_multipliers)
        if (!nonneg(u, mode)) return false;
    for (std::size_t i = 0; i < lp.variable_count; ++i) {
        if (!nonneg(d.bound_multipliers[i], mode)) return false;
        if (!lp.lower_bounds[i] && sgn(d.bound_multipliers[i]) != 0) return false;
    }
    // Stationarity: A_eq^T y + A_in^T u - w = c.
    auto col = combine_columns(lp, d.eq_multipliers, d.ineq_multipliers);
    for (std::size_t i = 0; i < lp.variable_count; ++i)
        if (!within(col[i] - d.bound_multipliers[i] - lp.objective[i], mode)) return false;
    // Strong duality: dual objective equals primal objective.
    Rational dual_obj(0);
    for (std::size_t e = 0; e < lp.equalities.size(); ++e)
        dual_obj += d.eq_multipliers[e] * lp.equalities[e].rhs;
    for (std::size_t k = 0; k < lp.inequalities.size(); ++k)
        dual_obj += d.ineq_multipliers[k] * lp.inequalities[k].rhs;
    for (std::size_t i = 0; i < lp.variable_count; ++i)
        if (lp.lower_bounds[i]) dual_obj -= d.bound_multipliers[i] * *lp.lower_bounds[i];
    Rational primal_obj(0);
    for (std::size_t i = 0; i < lp.variable_count; ++i)
        primal_obj += lp.objective[i] * x[i];
    return within(dual_obj - primal_obj, mode);
}

bool verify_ray(const LinearProgram& lp, const std::vector<Rational>& point,
                const std::vector<Rational>& ray, LPMode mode) {
    if (ray.size() != lp.variable_count) return false;
    if (!verify_primal(lp, point, mode)) return false;
    for (const auto& row : lp.equalities) {
        Rational lhs(0);
        for (std::size_t i = 0; i < ray.size(); ++i) lhs += row.coeffs[i] * ray[i];
        if (!within(lhs, mode)) return false;
    }
    for (const auto& row : lp.inequalities) {
        Rational lhs(0);
        for (std::size_t i = 0; i < ray.size(); ++i) lhs += row.coeffs[i] * ray[i];
        if (!nonneg(-lhs, mode)) return false;
    }
    for (std::size_t i = 0; i < ray.size(); ++i)
        if (lp.lower_bounds[i] && !nonneg(ray[i], mode)) return false;
    Rational growth(0);
    for (std::size_t i = 0; i < ray.size(); ++i) growth += lp.objective[i] * ray[i];
    if (mode == LPMode::Exact) return sgn(growth) > 0;
    return growth.get_d() > 1e-9;
}

LPResult solve(const LinearProgram& lp, LPMode mode) {
    check_shape(lp);
    LPResult res =
        mode == LPMode::Exact ? solve_impl<ExactOps>(lp) : solve_impl<FloatOps>(lp);
    switch (res.status) {
    case LPStatus::Optimal:
        if (!verify_primal(lp, res.primal, mode))
            throw InternalError("optimal witness failed re-verification");
        if (!verify_dual(lp, res.primal, res.dual, mode))
            throw InternalError("dual witness failed re-verification");
        break;
    case LPStatus::Infeasible:
        if (!verify_farkas(lp, res.farkas, mode))
            throw InternalError("infeasibility certificate failed re-verification");
        break;
    case LPStatus::Unbounded:
        if (!verify_ray(lp, res.primal, res.ray, mode))
            throw InternalError("unbounded ray failed re-verification");
        break;
    }
    return res;
}

LPResult feasibility(const LinearProgram& lp, LPMode mode) {
    LinearProgram copy = lp;
    copy.objective.assign(copy.variable_count, Rational(0));
    return solve(copy, mode);
}

} // namespace ctxlab
