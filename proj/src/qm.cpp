#include "ctxlab/qm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <utility>

#include "ctxlab/errors.hpp"

namespace ctxlab {

namespace {

constexpr std::uint32_t kExhaustiveElements = 26;
constexpr std::size_t kMaxCutRounds = 5000;
constexpr std::size_t kFloatRounds = 120;
constexpr std::size_t kCutBatch = 8;
constexpr std::size_t kHeuristicRestarts = 24;
// Screen and pruning slacks for the float-guided phase. Loose screens only
// cost extra but always-valid rows; the exact phase re-separates everything.
constexpr double kFloatViolation = -1e-7;
constexpr double kFloatSlack = 1e-6;

std::size_t layer_count(std::uint32_t n) {
    return (std::size_t)n + (std::size_t)n * (n - 1) / 2;
}

void check_members(const Outcome& a, std::uint32_t n) {
    if (!a.empty() && a.members().back() >= n)
        throw InvalidArgument("outcome " + a.to_string() + " reaches outside a sample space of " +
                              std::to_string(n) + " elements");
}

// Coefficient row of mu(A) over the layered variables, singletons first.
std::vector<Rational> mu_row(const Outcome& a, std::uint32_t n) {
    check_members(a, n);
    std::vector<Rational> row(layer_count(n), Rational(0));
    Rational k(2 - (long)a.size());
    const auto& m = a.members();
    for (auto e : m) row[e] = k;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j)
            row[n + PairMeasure::pair_index(m[i], m[j], n)] = 1;
    return row;
}

PairMeasure measure_from_primal(const std::vector<Rational>& x, std::uint32_t n) {
    PairMeasure pm(n);
    for (std::uint32_t i = 0; i < n; ++i) pm.sing[i] = x[i];
    for (std::size_t k = 0; k < pm.pair.size(); ++k) pm.pair[k] = x[n + k];
    return pm;
}

// One equality per unordered cell pair of each measurement, forcing the
// summed second-order term between the two cells to vanish. Together with
// the per-cell rows this pins mu on every coarse outcome, because mu of a
// union of cells is the sum of the cell values plus the cross-cell terms.
void add_interference_rows(LinearProgram& lp, const Scenario& s,
                           std::vector<std::string>* labels) {
    std::uint32_t n = s.element_count();
    std::set<std::pair<Outcome, Outcome>> seen;
    for (const auto& m : s.measurements()) {
        for (std::size_t a = 0; a < m.cells.size(); ++a) {
            for (std::size_t b = a + 1; b < m.cells.size(); ++b) {
                const Outcome& c = m.cells[a];
                const Outcome& d = m.cells[b];
                if (!seen.insert({std::min(c, d), std::max(c, d)}).second) continue;
                std::vector<Rational> row(layer_count(n), Rational(0));
                for (auto i : c.members()) row[i] -= Rational((long)d.size());
                for (auto j : d.members()) row[j] -= Rational((long)c.size());
                for (auto i : c.members())
                    for (auto j : d.members())
                        row[n + PairMeasure::pair_index(i, j, n)] += 1;
                lp.add_equality(std::move(row), Rational(0));
                if (labels)
                    labels->push_back("no interference between " + c.to_string() + " and " +
                                      d.to_string());
            }
        }
    }
}

template <class T> T scalar_from(const Rational& r);
template <> Rational scalar_from<Rational>(const Rational& r) { return r; }
template <> double scalar_from<double>(const Rational& r) { return r.get_d(); }
template <class T> T scalar_from(double d) { return T(d); }

// Second-order terms q_ij as a symmetric matrix with zero diagonal.
template <class T, class S>
std::vector<std::vector<T>> interference_matrix(std::uint32_t n, const std::vector<S>& x) {
    std::vector<std::vector<T>> q(n, std::vector<T>(n, T(0)));
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            T v = scalar_from<T>(x[n + PairMeasure::pair_index(i, j, n)]) -
                  scalar_from<T>(x[i]) - scalar_from<T>(x[j]);
            q[i][j] = v;
            q[j][i] = v;
        }
    }
    return q;
}

// Depth-first scan over subsets in ascending element order, exclude branch
// first. add_cost[e] is the change of mu when e joins the current set; only
// entries above the branching depth are ever read, so updates stop there.
// The recorded minimum starts at the empty set's zero, and strict
// improvement keeps the first minimizer in scan order, which makes the
// pruned and unpruned scans return identical witnesses.
template <class T>
struct SubsetScan {
    std::uint32_t n;
    std::vector<std::vector<T>> q;
    std::vector<T> add_cost;
    std::vector<T> neg_total; // per element, sum of its negative q entries
    std::vector<std::uint32_t> cur;
    T cur_val = T(0);
    T best = T(0);
    std::vector<std::uint32_t> best_set;
    bool prune = false;
    bool collect = false;
    T collect_below = T(0);
    std::size_t max_batch = kCutBatch;
    std::vector<std::pair<T, Outcome>> batch; // most negative first

    template <class S>
    SubsetScan(std::uint32_t n_, const std::vector<S>& layers)
        : n(n_), q(interference_matrix<T>(n_, layers)), neg_total(n_, T(0)) {
        add_cost.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) add_cost.push_back(scalar_from<T>(layers[i]));
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = i + 1; j < n; ++j)
                if (q[i][j] < T(0)) {
                    neg_total[i] += q[i][j];
                    neg_total[j] += q[i][j];
                }
    }

    void offer(const T& v) {
        if (batch.size() == max_batch && !(v < batch.back().first)) return;
        Outcome o{cur};
        auto at = batch.begin();
        while (at != batch.end() && !(v < at->first)) ++at;
        batch.insert(at, {v, o});
        if (batch.size() > max_batch) batch.pop_back();
    }

    void run(std::uint32_t e) {
        if (e == n) {
            if (cur_val < best) {
                best = cur_val;
                best_set = cur;
            }
            if (collect && cur_val < collect_below) offer(cur_val);
            return;
        }
        if (prune) {
            // Admissible bound: each remaining element can at best add its
            // current join cost plus every negative pairing it has anywhere.
            T lb = cur_val;
            for (std::uint32_t f = e; f < n; ++f) {
                T gain = add_cost[f] + neg_total[f];
                if (gain < T(0)) lb += gain;
            }
            if (!(lb < best)) return;
        }
        run(e + 1);
        cur_val += add_cost[e];
        cur.push_back(e);
        for (std::uint32_t f = e + 1; f < n; ++f) add_cost[f] += q[e][f];
        run(e + 1);
        for (std::uint32_t f = e + 1; f < n; ++f) add_cost[f] -= q[e][f];
        cur.pop_back();
        cur_val -= add_cost[e];
    }
};

std::vector<Rational> layers_of(const PairMeasure& pm) {
    std::vector<Rational> x;
    x.reserve(layer_count(pm.element_count));
    x.insert(x.end(), pm.sing.begin(), pm.sing.end());
    x.insert(x.end(), pm.pair.begin(), pm.pair.end());
    return x;
}

SeparationResult scan_result(const SubsetScan<Rational>& scan, bool exact) {
    SeparationResult r;
    r.value = scan.best;
    r.subset = Outcome{scan.best_set};
    r.found = sgn(scan.best) < 0;
    r.exact = exact;
    return r;
}

// First-improvement toggles from a deterministic set of start points. Any
// negative it reports is a genuine violation; only a clean pass is
// inconclusive.
SeparationResult heuristic_scan(const PairMeasure& pm) {
    std::uint32_t n = pm.element_count;
    std::vector<std::vector<Rational>> q = interference_matrix<Rational>(n, layers_of(pm));
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);

    Rational best(0);
    std::vector<char> best_set(n, 0);
    for (std::size_t restart = 0; restart < kHeuristicRestarts; ++restart) {
        std::vector<char> in(n, 0);
        std::vector<Rational> add_cost = pm.sing;
        Rational val(0);
        if (restart > 0) {
            std::uint64_t bits = rng();
            for (std::uint32_t e = 0; e < n; ++e) {
                if ((bits >> (e % 64)) & 1) {
                    val += add_cost[e];
                    in[e] = 1;
                    for (std::uint32_t f = 0; f < n; ++f) add_cost[f] += q[e][f];
                }
            }
        }
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::uint32_t e = 0; e < n; ++e) {
                Rational delta = in[e] ? -add_cost[e] : add_cost[e];
                if (!(sgn(delta) < 0)) continue;
                val += delta;
                if (in[e]) {
                    in[e] = 0;
                    for (std::uint32_t f = 0; f < n; ++f) add_cost[f] -= q[e][f];
                } else {
                    in[e] = 1;
                    for (std::uint32_t f = 0; f < n; ++f) add_cost[f] += q[e][f];
                }
                improved = true;
            }
        }
        if (val < best) {
            best = val;
            best_set = in;
        }
    }

    SeparationResult r;
    r.value = best;
    std::vector<std::uint32_t> members;
    for (std::uint32_t e = 0; e < n; ++e)
        if (best_set[e]) members.push_back(e);
    r.subset = Outcome{std::move(members)};
    r.found = sgn(best) < 0;
    r.exact = false;
    return r;
}

// All coarse outcomes of every measurement must carry the additive cell sum.
// This is exactly the pairwise sum rule against the table, and it double
// checks the cell-plus-interference row reduction used by the LPs.
void verify_coarse_match(const PairMeasure& pm, const ProbabilityFunction& p) {
    for (const auto& m : p.scenario().measurements()) {
        for (const auto& a : coarse_outcomes(m)) {
            Rational additive(0);
            for (const auto& c : m.cells)
                if (c.is_subset_of(a)) additive += p.value(c).rational();
            if (mu_eval(pm, a) != additive)
                throw InternalError("pair measure disagrees with the table on " + a.to_string());
        }
    }
}

// Dense double-precision primal-dual interior-point solver for the float
// warmup. The cut LPs are massively degenerate (stacks of homogeneous
// rows), which trips tolerance-based simplex pivoting, while a barrier
// method never leaves the interior and converges to the analytic center of
// the optimal face. Accuracy only steers which cuts get discovered; every
// verdict is re-derived exactly afterwards.
//
// Standard form: maximize c.z subject to A z = b, z >= 0, with sparse rows.
struct BarrierLP {
    std::size_t rows = 0, cols = 0;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> a;
    std::vector<double> b, c;

    std::vector<double> z, y, s; // primal, row duals, dual slacks
    bool converged = false;

    void add_row(std::vector<std::pair<std::uint32_t, double>> coeffs, double rhs) {
        a.push_back(std::move(coeffs));
        b.push_back(rhs);
        ++rows;
    }

    void solve() {
        const double tol = 1e-9;
        // Work in minimization form: min f.z with f = -c, so the KKT system
        // is A z = b, A^T y + s = f, z s = 0 with z, s >= 0.
        std::vector<double> f(cols);
        for (std::size_t j = 0; j < cols; ++j) f[j] = -c[j];
        z.assign(cols, 1.0);
        s.assign(cols, 1.0);
        y.assign(rows, 0.0);
        std::vector<double> rp(rows), rd(cols), d2(cols), dy(rows), dz(cols), ds(cols);
        std::vector<std::vector<double>> m(rows, std::vector<double>(rows));
        std::vector<double> rhs(rows), rc(cols), daff_z(cols), daff_s(cols), daff_y(rows);

        double bnorm = 1.0, fnorm = 1.0;
        for (double v : b) bnorm = std::max(bnorm, std::abs(v));
        for (double v : f) fnorm = std::max(fnorm, std::abs(v));

        // Each instance has its own numerical floor, so rather than chase a
        // fixed tolerance we keep the best iterate and stop once progress
        // stalls or the steps start diverging off the floor.
        double best_err = HUGE_VAL;
        std::vector<double> best_z, best_s;
        int since_best = 0;

        for (int iter = 0; iter < 100; ++iter) {
            rp = b;
            for (std::size_t r = 0; r < rows; ++r)
                for (auto [j, v] : a[r]) rp[r] -= v * z[j];
            for (std::size_t j = 0; j < cols; ++j) rd[j] = f[j] - s[j];
            for (std::size_t r = 0; r < rows; ++r)
                for (auto [j, v] : a[r]) rd[j] -= v * y[r];
            double mu = 0.0;
            for (std::size_t j = 0; j < cols; ++j) mu += z[j] * s[j];
            mu /= (double)cols;

            double perr = 0.0, derr = 0.0;
            for (double v : rp) perr = std::max(perr, std::abs(v));
            for (double v : rd) derr = std::max(derr, std::abs(v));
            double err = std::max(std::max(perr / bnorm, derr / fnorm), mu);
            if (err < best_err) {
                best_err = err;
                best_z = z;
                best_s = s;
                since_best = 0;
            } else {
                ++since_best;
            }
            if (best_err < tol) break;
            if (since_best >= 6) break;
            if (err > 1e3 * best_err && err > 1e-7) break;

#ifdef CTXLAB_QM_TRACE
            std::fprintf(stderr, "[ipm] iter %d mu %.3e perr %.3e derr %.3e\n", iter, mu,
                         perr, derr);
#endif
            for (std::size_t j = 0; j < cols; ++j) d2[j] = z[j] / s[j];
            if (!factor(m, d2)) {
#ifdef CTXLAB_QM_TRACE
                std::fprintf(stderr, "[ipm] factorization failed at iter %d\n", iter);
#endif
                break;
            }

            // Newton step for complementarity target rc:
            //   A D^2 A^T dy = rp - A D^2 (rc / z - rd)
            //   dz = D^2 (A^T dy + rc / z - rd),  ds = (rc - s dz) / z.
            auto solve_dirs = [&](std::vector<double>& oz, std::vector<double>& os,
                                  std::vector<double>& oy) {
                for (std::size_t r = 0; r < rows; ++r) {
                    double acc = rp[r];
                    for (auto [j, v] : a[r]) acc -= v * d2[j] * (rc[j] / z[j] - rd[j]);
                    rhs[r] = acc;
                }
                chol_solve(m, rhs, oy);
                for (std::size_t j = 0; j < cols; ++j) oz[j] = rc[j] / z[j] - rd[j];
                for (std::size_t r = 0; r < rows; ++r)
                    for (auto [j, v] : a[r]) oz[j] += v * oy[r];
                for (std::size_t j = 0; j < cols; ++j) {
                    oz[j] *= d2[j];
                    os[j] = (rc[j] - s[j] * oz[j]) / z[j];
                }
            };

            // Mehrotra predictor-corrector: affine step gauges how much
            // centering the combined step needs.
            for (std::size_t j = 0; j < cols; ++j) rc[j] = -z[j] * s[j];
            solve_dirs(daff_z, daff_s, daff_y);
            double ap = step(z, daff_z), ad = step(s, daff_s);
            double mu_aff = 0.0;
            for (std::size_t j = 0; j < cols; ++j)
                mu_aff += (z[j] + ap * daff_z[j]) * (s[j] + ad * daff_s[j]);
            mu_aff /= (double)cols;
            double sigma = mu_aff / mu;
            sigma = sigma * sigma * sigma;

            for (std::size_t j = 0; j < cols; ++j)
                rc[j] = sigma * mu - z[j] * s[j] - daff_z[j] * daff_s[j];
            solve_dirs(dz, ds, dy);
            ap = 0.95 * step(z, dz);
            ad = 0.95 * step(s, ds);
            for (std::size_t j = 0; j < cols; ++j) {
                z[j] += ap * dz[j];
                s[j] += ad * ds[j];
            }
            for (std::size_t r = 0; r < rows; ++r) y[r] += ad * dy[r];
        }

        if (!best_z.empty()) {
            z = std::move(best_z);
            s = std::move(best_s);
        }
        converged = best_err <= 1e-6;
    }

private:
    static double step(const std::vector<double>& v, const std::vector<double>& dv) {
        double a = 1.0;
        for (std::size_t j = 0; j < v.size(); ++j)
            if (dv[j] < 0.0) a = std::min(a, -v[j] / dv[j]);
        return a;
    }

    // Normal matrix A diag(d2) A^T with a tiny ridge so redundant equality
    // rows cannot break the factorization; lower Cholesky in place.
    bool factor(std::vector<std::vector<double>>& m, const std::vector<double>& d2) {
        for (auto& row : m) std::fill(row.begin(), row.end(), 0.0);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t t = 0; t <= r; ++t) {
                // Sparse dot over the shorter row.
                const auto& ra = a[r];
                const auto& rb = a[t];
                double acc = 0.0;
                std::size_t i = 0, k = 0;
                while (i < ra.size() && k < rb.size()) {
                    if (ra[i].first < rb[k].first)
                        ++i;
                    else if (rb[k].first < ra[i].first)
                        ++k;
                    else {
                        acc += ra[i].second * rb[k].second * d2[ra[i].first];
                        ++i;
                        ++k;
                    }
                }
                m[r][t] = acc;
            }
        double ridge = 0.0;
        for (std::size_t r = 0; r < rows; ++r) ridge = std::max(ridge, m[r][r]);
        ridge = ridge * 1e-12 + 1e-12;
        for (std::size_t r = 0; r < rows; ++r) m[r][r] += ridge;
        // In-place lower Cholesky.
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t t = 0; t < r; ++t) {
                double acc = m[r][t];
                for (std::size_t k = 0; k < t; ++k) acc -= m[r][k] * m[t][k];
                m[r][t] = acc / m[t][t];
            }
            double acc = m[r][r];
            for (std::size_t k = 0; k < r; ++k) acc -= m[r][k] * m[r][k];
            if (acc <= 0.0) return false;
            m[r][r] = std::sqrt(acc);
        }
        return true;
    }

    void chol_solve(const std::vector<std::vector<double>>& m, const std::vector<double>& in,
                    std::vector<double>& out) const {
        out = in;
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t k = 0; k < r; ++k) out[r] -= m[r][k] * out[k];
            out[r] /= m[r][r];
        }
        for (std::size_t r = rows; r-- > 0;) {
            for (std::size_t k = r + 1; k < rows; ++k) out[r] -= m[k][r] * out[k];
            out[r] /= m[r][r];
        }
    }
};

// Exact Gauss-Jordan elimination of M v = rhs. Free variables get zero, so
// a pivot row reads off its solution entry directly. Returns false when the
// system is inconsistent. M and rhs are destroyed.
bool gauss_solve(std::vector<std::vector<Rational>>& m, std::vector<Rational>& rhs,
                 std::size_t cols, std::vector<Rational>& out) {
    const std::size_t rows = m.size();
    std::vector<std::pair<std::size_t, std::size_t>> pivots;
    std::size_t prow = 0;
    for (std::size_t pc = 0; pc < cols && prow < rows; ++pc) {
        std::size_t hit = rows;
        for (std::size_t r = prow; r < rows; ++r)
            if (sgn(m[r][pc]) != 0) {
                hit = r;
                break;
            }
        if (hit == rows) continue;
        std::swap(m[prow], m[hit]);
        std::swap(rhs[prow], rhs[hit]);
        Rational inv = m[prow][pc];
        for (std::size_t cc = pc; cc < cols; ++cc) m[prow][cc] /= inv;
        rhs[prow] /= inv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == prow || sgn(m[r][pc]) == 0) continue;
            Rational f = m[r][pc];
            for (std::size_t cc = pc; cc < cols; ++cc) m[r][cc] -= f * m[prow][cc];
            rhs[r] -= f * rhs[prow];
        }
        pivots.emplace_back(prow, pc);
        ++prow;
    }
    for (std::size_t r = prow; r < rows; ++r)
        if (sgn(rhs[r]) != 0) return false;
    out.assign(cols, Rational(0));
    for (auto [r, c] : pivots) out[c] = rhs[r];
    return true;
}

// Exact solve guided by the barrier solution: strict complementarity guesses
// which inequalities bind and which variables stay positive, the guess is
// solved as a linear system, and the result is verified primal and dual
// optimal in exact arithmetic. Any failure returns nothing and the caller
// falls back to the exact simplex, so a wrong guess costs time, never
// correctness.
#ifdef CTXLAB_QM_TRACE
#define CTXLAB_CERT_FAIL(tag)                                                                  \
    do {                                                                                       \
        std::fprintf(stderr, "[cert] fail: %s\n", tag);                                        \
        return std::nullopt;                                                                   \
    } while (0)
#else
#define CTXLAB_CERT_FAIL(tag) return std::nullopt
#endif

std::optional<std::pair<std::vector<Rational>, Rational>>
certified_solve(const LinearProgram& lp, const BarrierLP& flp) {
    const std::size_t nvars = lp.variable_count;
    const std::size_t n_eq = lp.equalities.size();
    const std::size_t n_in = lp.inequalities.size();
    if (!flp.converged || flp.cols != nvars + n_in) CTXLAB_CERT_FAIL("shape");

    std::vector<std::size_t> sup, act;
    for (std::size_t j = 0; j < nvars; ++j)
        if (flp.z[j] > flp.s[j]) sup.push_back(j);
    for (std::size_t k = 0; k < n_in; ++k)
        if (flp.z[nvars + k] <= flp.s[nvars + k]) act.push_back(k);

    // Primal guess: equalities and binding inequalities restricted to the
    // support, everything else pinned at its bound.
    std::vector<std::vector<Rational>> m;
    std::vector<Rational> rhs;
    auto add_row = [&](const LinearProgram::Row& row) {
        std::vector<Rational> r(sup.size(), Rational(0));
        for (std::size_t t = 0; t < sup.size(); ++t) r[t] = row.coeffs[sup[t]];
        m.push_back(std::move(r));
        rhs.push_back(row.rhs);
    };
    for (const auto& row : lp.equalities) add_row(row);
    for (std::size_t k : act) add_row(lp.inequalities[k]);
    std::vector<Rational> v;
    if (!gauss_solve(m, rhs, sup.size(), v)) return std::nullopt;
    std::vector<Rational> x(nvars, Rational(0));
    for (std::size_t t = 0; t < sup.size(); ++t) x[sup[t]] = std::move(v[t]);
    if (!verify_primal(lp, x, LPMode::Exact)) return std::nullopt;

    Rational value(0);
    for (std::size_t j = 0; j < nvars; ++j) value += lp.objective[j] * x[j];

    DualWitness d;
    d.eq_multipliers.assign(n_eq, Rational(0));
    d.ineq_multipliers.assign(n_in, Rational(0));
    d.bound_multipliers.assign(nvars, Rational(0));
    bool zero_obj = true;
    for (const auto& c : lp.objective)
        if (sgn(c) != 0) {
            zero_obj = false;
            break;
        }
    if (!zero_obj) {
        // Dual guess: stationarity on the support columns with multipliers
        // only on equalities and binding inequalities.
        const std::size_t dcols = n_eq + act.size();
        std::vector<std::vector<Rational>> dm;
        std::vector<Rational> drhs;
        for (std::size_t j : sup) {
            std::vector<Rational> r(dcols, Rational(0));
            for (std::size_t e = 0; e < n_eq; ++e) r[e] = lp.equalities[e].coeffs[j];
            for (std::size_t t = 0; t < act.size(); ++t)
                r[n_eq + t] = lp.inequalities[act[t]].coeffs[j];
            dm.push_back(std::move(r));
            drhs.push_back(lp.objective[j]);
        }
        std::vector<Rational> lam;
        if (!gauss_solve(dm, drhs, dcols, lam)) return std::nullopt;
        for (std::size_t e = 0; e < n_eq; ++e) d.eq_multipliers[e] = std::move(lam[e]);
        for (std::size_t t = 0; t < act.size(); ++t) {
            if (sgn(lam[n_eq + t]) < 0) return std::nullopt;
            d.ineq_multipliers[act[t]] = std::move(lam[n_eq + t]);
        }
        for (std::size_t j = 0; j < nvars; ++j) {
            Rational col(0);
            for (std::size_t e = 0; e < n_eq; ++e)
                col += d.eq_multipliers[e] * lp.equalities[e].coeffs[j];
            for (std::size_t k : act)
                col += d.ineq_multipliers[k] * lp.inequalities[k].coeffs[j];
            col -= lp.objective[j];
            if (sgn(col) < 0) return std::nullopt;
            d.bound_multipliers[j] = std::move(col);
        }
    }
    if (!verify_dual(lp, x, d, LPMode::Exact)) return std::nullopt;
    return std::make_pair(std::move(x), std::move(value));
}

// Lazy nonnegativity rows shared by the feasibility and optimization LPs.
// The barrier warmup discovers violated subsets cheaply and marks the rows
// binding at its optimum; the exact phase works from that small core, with
// the certified solve above replacing most exact simplex runs. Every pooled
// row is a valid constraint no matter how it was found, so the float phase
// can be sloppy with impunity.
struct CutLoop {
    std::uint32_t n;
    LinearProgram base;
    std::vector<Outcome> pool;
    std::vector<char> core; // rows the exact phase gets to see
    std::map<Outcome, std::size_t> seen;
    BarrierLP last_float;
    bool float_ok = false;

    CutLoop(std::uint32_t n_, LinearProgram base_) : n(n_), base(std::move(base_)) {}

    bool add(const Outcome& o) {
        if (!seen.emplace(o, pool.size()).second) return false;
        pool.push_back(o);
        core.push_back(0);
        return true;
    }

    // Core membership is sticky, which keeps the exact phase monotone: a
    // dirty round always adds a row or promotes one, so the loop terminates.
    bool add_core(const Outcome& o) {
        auto [it, fresh] = seen.emplace(o, pool.size());
        if (fresh) {
            pool.push_back(o);
            core.push_back(1);
            return true;
        }
        if (core[it->second]) return false;
        core[it->second] = 1;
        return true;
    }

    LinearProgram assemble(bool core_only) const {
        LinearProgram lp = base;
        for (std::size_t k = 0; k < pool.size(); ++k) {
            if (core_only && !core[k]) continue;
            std::vector<Rational> row = mu_row(pool[k], n);
            for (auto& c : row) c = -c;
            lp.add_inequality(std::move(row), Rational(0));
        }
        return lp;
    }

    // Standard-form copy for the barrier solver: every base variable already
    // carries a zero lower bound, base inequalities get slacks, and each
    // pooled subset row becomes mu(A) - slack = 0.
    BarrierLP assemble_float() const {
        BarrierLP flp;
        const std::size_t nvars = base.variable_count;
        flp.cols = nvars + base.inequalities.size() + pool.size();
        flp.c.assign(flp.cols, 0.0);
        for (std::size_t j = 0; j < nvars; ++j) flp.c[j] = base.objective[j].get_d();
        auto sparse = [](const std::vector<Rational>& coeffs) {
            std::vector<std::pair<std::uint32_t, double>> row;
            for (std::size_t j = 0; j < coeffs.size(); ++j)
                if (sgn(coeffs[j]) != 0) row.emplace_back((std::uint32_t)j, coeffs[j].get_d());
            return row;
        };
        for (const auto& r : base.equalities) flp.add_row(sparse(r.coeffs), r.rhs.get_d());
        std::uint32_t slack = (std::uint32_t)nvars;
        for (const auto& r : base.inequalities) {
            auto row = sparse(r.coeffs);
            row.emplace_back(slack++, 1.0);
            flp.add_row(std::move(row), r.rhs.get_d());
        }
        for (const auto& o : pool) {
            auto row = sparse(mu_row(o, n));
            row.emplace_back(slack++, -1.0);
            flp.add_row(std::move(row), 0.0);
        }
        return flp;
    }

    void float_phase() {
        if (n > kExhaustiveElements) return;
        float_ok = false;
        for (std::size_t round = 0; round < kFloatRounds; ++round) {
#ifdef CTXLAB_QM_TRACE
            auto trace_t0 = std::chrono::steady_clock::now();
#endif
            BarrierLP flp = assemble_float();
            flp.solve();
#ifdef CTXLAB_QM_TRACE
            std::fprintf(
                stderr, "[float] round %zu, %zu cuts, solve %.3fs converged %d\n", round,
                pool.size(),
                std::chrono::duration<double>(std::chrono::steady_clock::now() - trace_t0)
                    .count(),
                (int)flp.converged);
#endif
            if (!flp.converged) {
                last_float = std::move(flp);
                return;
            }
            std::vector<double> x(flp.z.begin(), flp.z.begin() + base.variable_count);
            SubsetScan<double> scan(n, x);
            scan.collect = true;
            scan.collect_below = kFloatViolation;
            scan.max_batch = 4 * kCutBatch;
            scan.run(0);
            if (scan.batch.empty()) {
                // Promote the rows binding at the barrier optimum.
                const std::size_t slack0 = base.variable_count + base.inequalities.size();
                for (std::size_t k = 0; k < pool.size(); ++k)
                    if (flp.z[slack0 + k] <= flp.s[slack0 + k]) core[k] = 1;
                last_float = std::move(flp);
                float_ok = true;
                return;
            }
            for (const auto& [v, o] : scan.batch) add(o);
        }
    }
};

std::string size_note(SeparationRegime regime) {
    if (regime != SeparationRegime::Heuristic) return {};
    return "nonnegativity was screened by local search only; the sample space is too "
           "large for exact separation";
}

} // namespace

std::size_t PairMeasure::pair_index(std::uint32_t i, std::uint32_t j, std::uint32_t n) {
    if (i > j) std::swap(i, j);
    if (i == j || j >= n) throw InvalidArgument("bad element pair in a pair measure");
    return (std::size_t)i * (2 * (std::size_t)n - i - 1) / 2 + (j - i - 1);
}

const Rational& PairMeasure::pair_value(std::uint32_t i, std::uint32_t j) const {
    return pair[pair_index(i, j, element_count)];
}

Rational PairMeasure::interference(std::uint32_t i, std::uint32_t j) const {
    return pair_value(i, j) - sing[i] - sing[j];
}

Rational mu_eval(const PairMeasure& pm, const Outcome& a) {
    check_members(a, pm.element_count);
    const auto& m = a.members();
    Rational out(0);
    for (auto e : m) out += pm.sing[e];
    out *= Rational(2 - (long)m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j)
            out += pm.pair_value(m[i], m[j]);
    return out;
}

Rational sorkin_residual(const std::function<Rational(const Outcome&)>& mu, const Outcome& a,
                         const Outcome& b, const Outcome& c) {
    if (!a.is_disjoint(b) || !b.is_disjoint(c) || !a.is_disjoint(c))
        throw InvalidArgument("the three-set identity needs pairwise disjoint sets");
    Outcome ab = a.union_with(b);
    Outcome bc = b.union_with(c);
    Outcome ca = c.union_with(a);
    return mu(a) + mu(b) + mu(c) - mu(ab) - mu(bc) - mu(ca) + mu(ab.union_with(c));
}

Rational sorkin_residual(const PairMeasure& pm, const Outcome& a, const Outcome& b,
                         const Outcome& c) {
    return sorkin_residual([&pm](const Outcome& o) { return mu_eval(pm, o); }, a, b, c);
}

SeparationResult separation_oracle(const PairMeasure& pm, SeparationRegime regime) {
    if (pm.sing.size() != pm.element_count ||
        pm.pair.size() != (std::size_t)pm.element_count * (pm.element_count - 1) / 2)
        throw InvalidArgument("pair measure layers do not match its element count");
    switch (regime) {
    case SeparationRegime::Exhaustive: {
        if (pm.element_count > kExhaustiveElements)
            throw InvalidArgument("exhaustive separation is capped at " +
                                  std::to_string(kExhaustiveElements) + " elements");
        SubsetScan<Rational> scan(pm.element_count, layers_of(pm));
        scan.run(0);
        return scan_result(scan, true);
    }
    case SeparationRegime::BranchAndBound: {
        SubsetScan<Rational> scan(pm.element_count, layers_of(pm));
        scan.prune = true;
        scan.run(0);
        return scan_result(scan, true);
    }
    case SeparationRegime::Heuristic:
        return heuristic_scan(pm);
    }
    throw InvalidArgument("unknown separation regime");
}

QMResult qm_feasible(const ProbabilityFunction& p, QMMethod method, std::size_t enumerate_cap,
                     std::size_t bnb_cap) {
    const Scenario& s = p.scenario();
    std::uint32_t n = s.element_count();
    if (!p.is_rational())
        throw InvalidArgument("the pair-measure LP requires rational probabilities");
    if (method == QMMethod::Enumerate && n > enumerate_cap)
        throw ResourceError("sample space of " + std::to_string(n) +
                            " elements exceeds the exhaustive cap of " +
                            std::to_string(enumerate_cap));
    SeparationRegime regime = method == QMMethod::Enumerate ? SeparationRegime::Exhaustive
                              : n <= bnb_cap               ? SeparationRegime::BranchAndBound
                                                           : SeparationRegime::Heuristic;

    std::vector<std::string> eq_labels;
    LinearProgram lp(layer_count(n));
    for (std::size_t i = 0; i < lp.variable_count; ++i) lp.set_lower_bound(i, Rational(0));
    for (const auto& o : s.fine_outcomes()) {
        lp.add_equality(mu_row(o, n), p.value(o).rational());
        eq_labels.push_back("mu(" + o.to_string() + ") = " + p.value(o).rational().get_str());
    }
    add_interference_rows(lp, s, &eq_labels);

    CutLoop loop(n, std::move(lp));
    loop.float_phase();

    QMResult out;
    auto fill_labels = [&] {
        out.row_labels = eq_labels;
        for (std::size_t k = 0; k < loop.pool.size(); ++k)
            if (loop.core[k])
                out.row_labels.push_back("mu(" + loop.pool[k].to_string() + ") >= 0");
    };

    for (std::size_t round = 0; round < kMaxCutRounds; ++round) {
#ifdef CTXLAB_QM_TRACE
        auto trace_t0 = std::chrono::steady_clock::now();
#endif
        std::vector<Rational> x;
        if (loop.float_ok)
            if (auto cert = certified_solve(loop.assemble(false), loop.last_float))
                x = std::move(cert->first);
        bool certified = !x.empty();
        if (!certified) {
            LPResult r = solve(loop.assemble(true));
            if (r.status == LPStatus::Infeasible) {
                out.status = QMStatus::Infeasible;
                out.certificate = r.farkas;
                fill_labels();
                return out;
            }
            if (r.status != LPStatus::Optimal)
                throw InternalError("a feasibility probe cannot be unbounded");
            x = std::move(r.primal);
        }
#ifdef CTXLAB_QM_TRACE
        std::fprintf(stderr, "[qm_feasible] exact round %zu, %zu cuts, certified %d, %.2fs\n",
                     round, loop.pool.size(), (int)certified,
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - trace_t0)
                         .count());
#endif

        bool violated = false;
        bool grew = false;
        if (regime == SeparationRegime::Exhaustive) {
            SubsetScan<Rational> scan(n, x);
            scan.collect = true;
            scan.run(0);
            violated = !scan.batch.empty();
            for (const auto& [v, o] : scan.batch) grew |= loop.add_core(o);
        } else {
            PairMeasure pm = measure_from_primal(x, n);
            SeparationResult sep = separation_oracle(pm, regime);
            violated = sep.found;
            if (sep.found) grew = loop.add_core(sep.subset);
        }
        if (violated && !grew)
            throw InternalError("separation repeated an existing nonnegativity row");
        if (grew) {
            loop.float_phase();
            continue;
        }

        PairMeasure pm = measure_from_primal(x, n);
        verify_coarse_match(pm, p);
        out.witness = std::move(pm);
        out.unverified_note = size_note(regime);
        out.status = out.unverified_note.empty() ? QMStatus::Feasible
                                                 : QMStatus::HeuristicallyFeasible;
        fill_labels();
        return out;
    }
    throw ResourceError("cut generation did not settle within " +
                        std::to_string(kMaxCutRounds) + " rounds");
}

QMOptimum qm_optimize(const LinearFunctional& f, std::size_t enumerate_cap) {
    const Scenario& s = f.scenario();
    std::uint32_t n = s.element_count();
    if (n > enumerate_cap)
        throw ResourceError("sample space of " + std::to_string(n) +
                            " elements exceeds the exhaustive cap of " +
                            std::to_string(enumerate_cap));

    LinearProgram lp(layer_count(n));
    for (std::size_t i = 0; i < lp.variable_count; ++i) lp.set_lower_bound(i, Rational(0));
    // Total weight one; with the interference rows this normalizes every
    // measurement at once.
    lp.add_equality(mu_row(Outcome::full(n), n), Rational(1));
    add_interference_rows(lp, s, nullptr);
    // Nonnegative cells keep the read-off table a genuine probability table
    // and bound the objective before any cuts arrive: every functional term
    // is a cell, so its value sits between 0 and the total weight.
    for (const auto& o : s.fine_outcomes()) {
        std::vector<Rational> row = mu_row(o, n);
        for (auto& c : row) c = -c;
        lp.add_inequality(std::move(row), Rational(0));
    }
    std::vector<Rational> obj(layer_count(n), Rational(0));
    for (const auto& [o, coeff] : f.terms()) {
        std::vector<Rational> row = mu_row(o, n);
        for (std::size_t i = 0; i < obj.size(); ++i) obj[i] += coeff * row[i];
    }
    lp.set_objective(std::move(obj));

    CutLoop loop(n, std::move(lp));
    loop.float_phase();

    for (std::size_t round = 0; round < kMaxCutRounds; ++round) {
#ifdef CTXLAB_QM_TRACE
        auto trace_t0 = std::chrono::steady_clock::now();
#endif
        std::vector<Rational> x;
        Rational value(0);
        if (loop.float_ok)
            if (auto cert = certified_solve(loop.assemble(false), loop.last_float)) {
                x = std::move(cert->first);
                value = std::move(cert->second);
            }
        bool certified = !x.empty();
        if (!certified) {
            LPResult r = solve(loop.assemble(true));
            if (r.status != LPStatus::Optimal)
                throw InternalError("the pair-measure polytope is bounded and nonempty");
            x = std::move(r.primal);
            value = std::move(r.objective_value);
        }
#ifdef CTXLAB_QM_TRACE
        std::fprintf(stderr, "[qm_optimize] exact round %zu, %zu cuts, certified %d, %.2fs\n",
                     round, loop.pool.size(), (int)certified,
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - trace_t0)
                         .count());
#endif
        SubsetScan<Rational> scan(n, x);
        scan.collect = true;
        scan.run(0);
        if (!scan.batch.empty()) {
            bool grew = false;
            for (const auto& [v, o] : scan.batch) grew |= loop.add_core(o);
            if (!grew) throw InternalError("separation repeated an existing nonnegativity row");
            loop.float_phase();
            continue;
        }

        PairMeasure pm = measure_from_primal(x, n);
        std::map<Outcome, Value> vals;
        for (const auto& o : s.fine_outcomes()) vals.emplace(o, Value(mu_eval(pm, o)));
        ProbabilityFunction table(f.scenario_ref(), std::move(vals));
        std::vector<std::string> problems = validate(table);
        if (!problems.empty())
            throw InternalError("optimal measure table fails validation: " + problems.front());
        verify_coarse_match(pm, table);
        return {value + f.constant(), std::move(table), std::move(pm)};
    }
    throw ResourceError("cut generation did not settle within " +
                        std::to_string(kMaxCutRounds) + " rounds");
}

std::pair<ProbabilityFunction, PairMeasure> sample_qm_vertex(ScenarioRef s, std::uint64_t seed,
                                                             std::size_t enumerate_cap) {
    if (!s) throw InvalidArgument("sample_qm_vertex needs a scenario");
    std::mt19937_64 rng(seed);
    std::vector<std::pair<Outcome, Rational>> terms;
    terms.reserve(s->fine_outcomes().size());
    for (const auto& o : s->fine_outcomes())
        terms.emplace_back(o, Rational((long)(rng() % 19) - 9));
    QMOptimum opt =
        qm_optimize(LinearFunctional("vertex-" + std::to_string(seed), s, std::move(terms)),
                    enumerate_cap);
    return {std::move(opt.table), std::move(opt.witness)};
}

} // namespace ctxlab
