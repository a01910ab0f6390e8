#include "ctxlab/cliques.hpp"

#include <algorithm>
#include <bit>

#include "ctxlab/errors.hpp"

namespace ctxlab {

namespace {

using Words = std::vector<std::uint64_t>;

std::size_t intersection_count(const Words& a, const Words& b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += std::popcount(a[i] & b[i]);
    return n;
}

bool any(const Words& w) {
    for (auto x : w)
        if (x) return true;
    return false;
}

struct Enumerator {
    const ExclusivityGraph& g;
    std::size_t cap;
    std::size_t words;
    std::vector<std::uint32_t> current;
    std::vector<std::vector<std::uint32_t>> out;

    Enumerator(const ExclusivityGraph& graph, std::size_t limit)
        : g(graph), cap(limit), words(graph.words_per_row()) {}

    void report() {
        if (out.size() >= cap)
            throw ResourceError("maximal clique count exceeds cap of " +
                                std::to_string(cap));
        std::vector<std::uint32_t> c = current;
        std::sort(c.begin(), c.end());
        out.push_back(std::move(c));
    }

    // Bron-Kerbosch with a Tomita pivot: branch only on candidates outside
    // the pivot's neighbourhood.
    void expand(Words p, Words x) {
        if (!any(p) && !any(x)) {
            report();
            return;
        }
        std::uint32_t pivot = 0;
        std::size_t best = 0;
        bool have_pivot = false;
        for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
            bool in_px = ((p[v >> 6] | x[v >> 6]) >> (v & 63)) & 1;
            if (!in_px) continue;
            std::size_t score = intersection_count(p, g.adjacency_row(v));
            if (!have_pivot || score > best) {
                have_pivot = true;
                best = score;
                pivot = v;
            }
        }
        const Words& piv_adj = g.adjacency_row(pivot);
        for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
            bool candidate = ((p[v >> 6] >> (v & 63)) & 1) &&
                             !((piv_adj[v >> 6] >> (v & 63)) & 1);
            if (!candidate) continue;
            const Words& adj = g.adjacency_row(v);
            Words np(words), nx(words);
            for (std::size_t i = 0; i < words; ++i) {
                np[i] = p[i] & adj[i];
                nx[i] = x[i] & adj[i];
            }
            current.push_back(v);
            expand(std::move(np), std::move(nx));
            current.pop_back();
            p[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
            x[v >> 6] |= std::uint64_t{1} << (v & 63);
        }
    }
};

} // namespace

CliqueSet maximal_cliques(const ExclusivityGraph& g, std::size_t cap) {
    Enumerator e(g, cap);
    Words p(g.words_per_row(), 0);
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v)
        p[v >> 6] |= std::uint64_t{1} << (v & 63);
    e.expand(std::move(p), Words(g.words_per_row(), 0));
    std::sort(e.out.begin(), e.out.end());
    return CliqueSet{std::move(e.out)};
}

namespace {

// Branch-and-bound maximum-weight clique with per-node coloring bounds,
// shared between the exact-integer fast path and the extension-field
// fallback. Vertices are permuted into weight-descending order first, so
// greedy first-fit coloring packs the heavy vertices into few classes and
// the bound (sum of class maxima) stays tight. A clique takes at most one
// vertex per color class, so a candidate in class c is bounded by the sum
// of the first c class maxima; branching runs from the last-colored
// candidate backwards and stops as soon as that bound cannot beat the
// incumbent. Improvements require strictly greater weight, so the first
// optimum in search order is kept and the whole search is deterministic.
// Priming `best` turns the search into a pure decision procedure: nothing
// at or below the primed weight is ever explored.
template <class W>
struct WeightedSearch {
    std::size_t n, words;
    W best{};
    bool stop_on_improvement = false;
    bool improved = false;
    std::vector<std::uint32_t> inv; // position in search order -> graph vertex
    std::vector<W> w;               // weights in search order
    std::vector<Words> adj;         // adjacency in search order
    std::vector<std::uint32_t> cur, best_set; // graph vertex ids
    // Per-depth candidate buffers plus coloring scratch, reused across nodes.
    std::vector<Words> pool;
    std::vector<std::vector<std::uint32_t>> order_at;
    std::vector<std::vector<W>> bound_at;
    std::vector<Words> cls_bits;
    std::vector<std::vector<std::uint32_t>> cls_members;
    std::vector<W> cls_max;

    WeightedSearch(const ExclusivityGraph& graph, const std::vector<W>& weights,
                   W floor = W{}, bool stop = false)
        : n(graph.vertex_count()), words(graph.words_per_row()),
          best(std::move(floor)), stop_on_improvement(stop) {
        std::vector<std::uint32_t> by_weight(n);
        for (std::uint32_t v = 0; v < n; ++v) by_weight[v] = v;
        std::stable_sort(by_weight.begin(), by_weight.end(),
                         [&](std::uint32_t a, std::uint32_t b) {
                             return weights[b] < weights[a];
                         });
        inv = std::move(by_weight);
        std::vector<std::uint32_t> perm(n);
        for (std::uint32_t i = 0; i < n; ++i) perm[inv[i]] = i;

        w.resize(n);
        adj.assign(n, Words(words, 0));
        for (std::uint32_t i = 0; i < n; ++i) {
            w[i] = weights[inv[i]];
            const Words& row = graph.adjacency_row(inv[i]);
            for (std::uint32_t v = 0; v < n; ++v)
                if ((row[v >> 6] >> (v & 63)) & 1)
                    adj[i][perm[v] >> 6] |= std::uint64_t{1} << (perm[v] & 63);
        }
    }

    W weighted_sum(const Words& s) const {
        W t{};
        for (std::size_t i = 0; i < words; ++i) {
            std::uint64_t word = s[i];
            while (word) {
                t += w[i * 64 + std::countr_zero(word)];
                word &= word - 1;
            }
        }
        return t;
    }

    // Greedy coloring bound of a set on its own: sum of class-opening
    // weights. Uses the shared scratch, so call it outside expand's
    // coloring phase only.
    W color_bound_of(const Words& s) {
        std::size_t used = 0;
        W bound{};
        for (std::size_t i = 0; i < words; ++i) {
            std::uint64_t word = s[i];
            while (word) {
                std::uint32_t v = (std::uint32_t)(i * 64 + std::countr_zero(word));
                word &= word - 1;
                std::size_t c = 0;
                for (; c < used; ++c) {
                    bool conflict = false;
                    for (std::size_t k = 0; k < words; ++k)
                        if (cls_bits[c][k] & adj[v][k]) { conflict = true; break; }
                    if (!conflict) break;
                }
                if (c == used) {
                    if (used == cls_bits.size()) {
                        cls_bits.emplace_back(words, 0);
                        cls_members.emplace_back();
                        cls_max.emplace_back();
                    } else {
                        std::fill(cls_bits[c].begin(), cls_bits[c].end(), 0);
                    }
                    ++used;
                    bound += w[v];
                }
                cls_bits[c][v >> 6] |= std::uint64_t{1} << (v & 63);
            }
        }
        return bound;
    }

    // Any clique through v lies inside {v} plus v's surviving neighbours, so
    // v can be deleted outright once that set's bound cannot beat the
    // incumbent. Rounds repeat because deletions weaken the other bounds.
    void root_reduce(Words& p) {
        Words nb(words);
        for (int round = 0; round < 4; ++round) {
            bool changed = false;
            for (std::uint32_t v = 0; v < n; ++v) {
                if (!((p[v >> 6] >> (v & 63)) & 1)) continue;
                for (std::size_t k = 0; k < words; ++k) nb[k] = p[k] & adj[v][k];
                W ub = w[v] + color_bound_of(nb);
                if (!(best < ub)) {
                    p[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
                    changed = true;
                }
            }
            if (!changed) break;
        }
    }

    void expand(std::size_t depth, const W& cw) {
        Words& p = pool[depth];
        // Greedy first-fit coloring in weight-descending vertex order;
        // vertices are emitted class by class so bounds are nondecreasing
        // along `order`.
        std::size_t used = 0;
        for (std::size_t i = 0; i < words; ++i) {
            std::uint64_t word = p[i];
            while (word) {
                std::uint32_t v = (std::uint32_t)(i * 64 + std::countr_zero(word));
                word &= word - 1;
                std::size_t c = 0;
                for (; c < used; ++c) {
                    bool conflict = false;
                    for (std::size_t k = 0; k < words; ++k)
                        if (cls_bits[c][k] & adj[v][k]) { conflict = true; break; }
                    if (!conflict) break;
                }
                if (c == used) {
                    if (used == cls_bits.size()) {
                        cls_bits.emplace_back(words, 0);
                        cls_members.emplace_back();
                        cls_max.emplace_back();
                    } else {
                        std::fill(cls_bits[c].begin(), cls_bits[c].end(), 0);
                        cls_members[c].clear();
                    }
                    cls_max[c] = W{};
                    ++used;
                }
                cls_bits[c][v >> 6] |= std::uint64_t{1} << (v & 63);
                cls_members[c].push_back(v);
                if (cls_max[c] < w[v]) cls_max[c] = w[v];
            }
        }

        auto& order = order_at[depth];
        auto& bound = bound_at[depth];
        order.clear();
        bound.clear();
        W run{};
        for (std::size_t c = 0; c < used; ++c) {
            run += cls_max[c];
            for (auto v : cls_members[c]) {
                order.push_back(v);
                bound.push_back(run);
            }
        }

        // `p` shrinks to the candidates before position i in coloring order,
        // so each recursion only looks at earlier vertices; cliques through a
        // later vertex were covered when that vertex was branched on.
        for (std::size_t i = order.size(); i-- > 0;) {
            if (!(best < cw + bound[i])) return;
            std::uint32_t v = order[i];
            p[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
            Words& np = pool[depth + 1];
            bool empty = true;
            for (std::size_t k = 0; k < words; ++k) {
                np[k] = p[k] & adj[v][k];
                if (np[k]) empty = false;
            }
            cur.push_back(inv[v]);
            if (empty) {
                W total = cw + w[v];
                if (best < total) {
                    best = std::move(total);
                    best_set = cur;
                    improved = true;
                }
            } else {
                expand(depth + 1, cw + w[v]);
            }
            cur.pop_back();
            if (improved && stop_on_improvement) return;
        }
    }

    void run_search() {
        // Zero-weight vertices cannot raise any clique's weight; dropping
        // them up front shrinks the search space (maximality is restored by
        // the caller where it matters).
        pool.assign(n + 2, Words(words, 0));
        order_at.assign(n + 2, {});
        bound_at.assign(n + 2, {});
        bool nonempty = false;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (W{} < w[v]) {
                pool[0][v >> 6] |= std::uint64_t{1} << (v & 63);
                nonempty = true;
            }
        }
        if (!nonempty) return;

        // Heaviest-first greedy clique seeds the incumbent, giving the root
        // reduction a target before the search proper starts.
        {
            Words q = pool[0];
            W gw{};
            std::vector<std::uint32_t> gset;
            while (true) {
                std::uint32_t v = (std::uint32_t)n;
                for (std::size_t i = 0; i < words; ++i)
                    if (q[i]) { v = (std::uint32_t)(i * 64 + std::countr_zero(q[i])); break; }
                if (v == n) break;
                gw += w[v];
                gset.push_back(inv[v]);
                for (std::size_t k = 0; k < words; ++k) q[k] &= adj[v][k];
            }
            if (best < gw) {
                best = std::move(gw);
                best_set = std::move(gset);
                improved = true;
                if (stop_on_improvement) return;
            }
        }

        root_reduce(pool[0]);
        cur.clear();
        expand(0, W{});
    }
};

// Rational weights rescaled to machine integers over the common denominator.
// Returns false when some scaled weight times (n + 1) additions would not fit,
// or when the denominator itself would not (it doubles as the scaled unit).
bool scale_to_ints(const std::vector<Value>& weights, std::vector<long long>& scaled,
                   long long& one) {
    mpz_class denom(1);
    for (const auto& v : weights) {
        mpz_class d = v.rational().get_den();
        mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), d.get_mpz_t());
    }
    std::size_t n = weights.size();
    std::vector<mpz_class> nums(n);
    mpz_class max_num = denom;
    for (std::size_t i = 0; i < n; ++i) {
        nums[i] = weights[i].rational().get_num() *
                  (denom / weights[i].rational().get_den());
        if (nums[i] > max_num) max_num = nums[i];
    }
    mpz_class budget = max_num * (long)(n + 1);
    if (!budget.fits_slong_p()) return false;
    scaled.resize(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = nums[i].get_si();
    one = denom.get_si();
    return true;
}

} // namespace

WeightedClique max_weight_clique(const ExclusivityGraph& g,
                                 const std::vector<Value>& weights) {
    if (weights.size() != g.vertex_count())
        throw InvalidArgument("one weight per vertex required");
    for (const auto& v : weights)
        if (v.sign() < 0)
            throw InvalidArgument("clique weights must be nonnegative");

    std::size_t n = g.vertex_count();
    std::vector<std::uint32_t> found;
    Value weight;

    // Rational weights over a common denominator usually fit machine words;
    // search in exact integers then. Surd-valued or oversized weights take
    // the extension-field fallback.
    bool rational = true;
    for (const auto& v : weights)
        if (!v.is_rational()) { rational = false; break; }

    bool done = false;
    std::vector<long long> scaled;
    long long one = 0;
    if (rational && scale_to_ints(weights, scaled, one)) {
        WeightedSearch<long long> s(g, scaled);
        s.run_search();
        found = s.best_set;
        Rational r = Rational(mpz_class((long)s.best)) / Rational(mpz_class((long)one));
        weight = Value(r);
        done = true;
    }
    if (!done) {
        WeightedSearch<Value> s(g, weights);
        s.run_search();
        found = s.best_set;
        weight = s.best;
    }

    std::sort(found.begin(), found.end());
    // Extend to a maximal clique; any extension vertex weighs zero, or the
    // search would have beaten this weight.
    for (std::uint32_t v = 0; v < n; ++v) {
        if (std::binary_search(found.begin(), found.end(), v)) continue;
        bool adjacent_to_all = true;
        for (auto u : found)
            if (!g.edge(u, v)) { adjacent_to_all = false; break; }
        if (adjacent_to_all) {
            found.insert(std::upper_bound(found.begin(), found.end(), v), v);
        }
    }
    return {std::move(found), weight};
}

namespace {

// All cliques over the positive-weight vertices of a <= 64-vertex factor
// graph: bitmask, weight, and common neighbourhood (vertices adjacent to
// every member). Sorted heaviest first so domain scans can stop early.
template <class W>
struct FactorCliques {
    std::vector<std::uint64_t> mask, common;
    std::vector<W> weight;
};

template <class W>
void grow_factor_cliques(const std::vector<std::uint64_t>& adj,
                         const std::vector<W>& w, std::uint64_t clique, const W& wsum,
                         std::uint64_t common, std::uint64_t cand,
                         FactorCliques<W>& out, std::size_t cap) {
    while (cand) {
        std::uint32_t v = (std::uint32_t)std::countr_zero(cand);
        cand &= cand - 1;
        if (out.mask.size() >= cap)
            throw ResourceError("factor clique count exceeds cap of " +
                                std::to_string(cap));
        std::uint64_t cl = clique | (std::uint64_t{1} << v);
        W sum = wsum + w[v];
        std::uint64_t cm = common & adj[v];
        out.mask.push_back(cl);
        out.weight.push_back(sum);
        out.common.push_back(cm);
        // Only higher-numbered candidates extend, so each clique is built
        // exactly once, in lexicographic order.
        grow_factor_cliques(adj, w, cl, sum, cm, cand & cm, out, cap);
    }
}

template <class W>
FactorCliques<W> factor_cliques(const std::vector<std::uint64_t>& adj,
                                const std::vector<W>& w) {
    FactorCliques<W> out;
    std::uint64_t positive = 0;
    for (std::uint32_t v = 0; v < adj.size(); ++v)
        if (W{} < w[v]) positive |= std::uint64_t{1} << v;
    std::uint64_t all = adj.size() == 64 ? ~std::uint64_t{0}
                                         : (std::uint64_t{1} << adj.size()) - 1;
    grow_factor_cliques(adj, w, 0, W{}, all, positive, out, 2000000);

    std::vector<std::uint32_t> idx(out.mask.size());
    for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
        return out.weight[b] < out.weight[a];
    });
    FactorCliques<W> sorted;
    sorted.mask.reserve(idx.size());
    sorted.common.reserve(idx.size());
    sorted.weight.reserve(idx.size());
    for (auto i : idx) {
        sorted.mask.push_back(out.mask[i]);
        sorted.common.push_back(out.common[i]);
        sorted.weight.push_back(out.weight[i]);
    }
    return sorted;
}

// Assigns second-factor cliques S_a to first-factor vertices a, skipping or
// constraining as the group structure demands: non-adjacent slots must keep
// their cliques inside each other's common neighbourhoods. Slots run
// heaviest first; per slot, candidate cliques run heaviest first, so the
// first strict improvement found is deterministic and option loops cut off
// as soon as the optimistic bound falls to the incumbent.
template <class W>
struct ProductSearch {
    const std::vector<std::uint64_t>& adj1;
    const std::vector<W>& P;
    const FactorCliques<W>& fc;
    std::vector<std::uint32_t> slots;
    std::vector<std::uint64_t> nonadj; // per first-factor vertex, non-neighbours
    W best{};
    bool stop_on_improvement = false, improved = false;
    std::vector<std::uint64_t> allowed;
    std::vector<std::vector<std::uint64_t>> saved; // per depth
    std::vector<std::pair<std::uint32_t, std::uint32_t>> cur_assign, best_assign;
    // Slots split into pairwise non-adjacent classes. The cliques assigned
    // within one class are disjoint and mutually cross-adjacent, so their
    // union is a single second-factor clique; the class can never pay out
    // more than its heaviest slot times the heaviest clique overall.
    std::vector<std::uint32_t> cls_of; // per slot position
    std::size_t n_classes = 0;
    W qtop{};
    std::vector<W> cls_sum, cls_top; // scratch for the tail bound

    ProductSearch(const std::vector<std::uint64_t>& a1, const std::vector<W>& p,
                  const FactorCliques<W>& f, std::uint64_t all2, W floor, bool stop)
        : adj1(a1), P(p), fc(f), best(std::move(floor)), stop_on_improvement(stop) {
        std::size_t n1 = adj1.size();
        std::uint64_t all1 = n1 == 64 ? ~std::uint64_t{0}
                                      : (std::uint64_t{1} << n1) - 1;
        for (std::uint32_t v = 0; v < n1; ++v)
            if (W{} < P[v]) slots.push_back(v);
        std::stable_sort(slots.begin(), slots.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return P[b] < P[a]; });
        nonadj.resize(n1);
        for (std::uint32_t v = 0; v < n1; ++v)
            nonadj[v] = all1 & ~adj1[v] & ~(std::uint64_t{1} << v);
        allowed.assign(n1, all2);
        saved.assign(slots.size() + 1, std::vector<std::uint64_t>(n1, 0));

        std::vector<std::uint64_t> members; // per class, as vertex bits
        cls_of.resize(slots.size());
        for (std::size_t i = 0; i < slots.size(); ++i) {
            std::uint32_t v = slots[i];
            std::size_t c = 0;
            while (c < members.size() && (members[c] & ~nonadj[v])) ++c;
            if (c == members.size()) members.push_back(0);
            members[c] |= std::uint64_t{1} << v;
            cls_of[i] = (std::uint32_t)c;
        }
        n_classes = members.size();
        cls_sum.resize(n_classes);
        cls_top.resize(n_classes);
        if (!fc.weight.empty()) qtop = fc.weight[0];
    }

    W qmax(std::uint64_t allow) const {
        if (!allow) return W{};
        for (std::size_t s = 0; s < fc.mask.size(); ++s)
            if (!(fc.mask[s] & ~allow)) return fc.weight[s];
        return W{};
    }

    void rec(std::size_t i, const W& cw) {
        if (i == slots.size()) {
            if (best < cw) {
                best = cw;
                best_assign = cur_assign;
                improved = true;
            }
            return;
        }
        std::uint32_t a = slots[i];
        std::fill(cls_sum.begin(), cls_sum.end(), W{});
        std::fill(cls_top.begin(), cls_top.end(), W{});
        for (std::size_t j = i + 1; j < slots.size(); ++j) {
            std::uint32_t b = slots[j];
            W q = qmax(allowed[b]);
            if (!(W{} < q)) continue;
            std::uint32_t c = cls_of[j];
            cls_sum[c] += P[b] * q;
            if (cls_top[c] < P[b]) cls_top[c] = P[b];
        }
        W tail{};
        for (std::size_t c = 0; c < n_classes; ++c) {
            W cap = cls_top[c] * qtop;
            tail += cap < cls_sum[c] ? cap : cls_sum[c];
        }

        saved[i] = allowed;
        for (std::size_t s = 0; s < fc.mask.size(); ++s) {
            if (fc.mask[s] & ~allowed[a]) continue;
            W gain = P[a] * fc.weight[s];
            if (!(best < cw + gain + tail)) break;
            for (std::size_t j = i + 1; j < slots.size(); ++j) {
                std::uint32_t b = slots[j];
                if ((nonadj[a] >> b) & 1) allowed[b] &= fc.common[s];
            }
            cur_assign.emplace_back(a, (std::uint32_t)s);
            rec(i + 1, cw + gain);
            cur_assign.pop_back();
            allowed = saved[i];
            if (improved && stop_on_improvement) return;
        }

        if (!(best < cw + tail)) return;
        rec(i + 1, cw); // slot left out of the clique
    }
};

std::vector<std::uint64_t> adjacency_masks(const ExclusivityGraph& g) {
    std::vector<std::uint64_t> adj(g.vertex_count(), 0);
    for (std::uint32_t u = 0; u < g.vertex_count(); ++u) {
        const Words& row = g.adjacency_row(u);
        for (std::uint32_t v = 0; v < g.vertex_count(); ++v)
            if ((row[v >> 6] >> (v & 63)) & 1) adj[u] |= std::uint64_t{1} << v;
    }
    return adj;
}

void validate_product_inputs(const ExclusivityGraph& g1, const std::vector<Value>& w1,
                             const ExclusivityGraph& g2, const std::vector<Value>& w2) {
    if (g1.vertex_count() > 64 || g2.vertex_count() > 64)
        throw InvalidArgument("product clique search needs factors of at most 64 vertices");
    if (w1.size() != g1.vertex_count() || w2.size() != g2.vertex_count())
        throw InvalidArgument("one weight per vertex required");
    for (const auto& v : w1)
        if (v.sign() < 0) throw InvalidArgument("clique weights must be nonnegative");
    for (const auto& v : w2)
        if (v.sign() < 0) throw InvalidArgument("clique weights must be nonnegative");
}

// Integer rescaling for one factor, without a fitting guarantee; the caller
// checks the product budget in exact arithmetic before using the result.
void scale_factor(const std::vector<Value>& ws, std::vector<mpz_class>& nums,
                  mpz_class& denom) {
    denom = 1;
    for (const auto& v : ws) {
        mpz_class d = v.rational().get_den();
        mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), d.get_mpz_t());
    }
    nums.resize(ws.size());
    for (std::size_t i = 0; i < ws.size(); ++i)
        nums[i] = ws[i].rational().get_num() * (denom / ws[i].rational().get_den());
}

struct ProductRun {
    bool improved = false;
    Value weight;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs; // (first, second vertex)
};

ProductRun run_product_search(const ExclusivityGraph& g1, const std::vector<Value>& w1,
                              const ExclusivityGraph& g2, const std::vector<Value>& w2,
                              bool decision) {
    validate_product_inputs(g1, w1, g2, w2);
    std::vector<std::uint64_t> adj1 = adjacency_masks(g1);
    std::vector<std::uint64_t> adj2 = adjacency_masks(g2);
    std::uint64_t all2 = g2.vertex_count() == 64
                             ? ~std::uint64_t{0}
                             : (std::uint64_t{1} << g2.vertex_count()) - 1;

    bool rational = true;
    for (const auto& v : w1)
        if (!v.is_rational()) { rational = false; break; }
    if (rational)
        for (const auto& v : w2)
            if (!v.is_rational()) { rational = false; break; }

    ProductRun out;
    if (rational) {
        std::vector<mpz_class> nums1, nums2;
        mpz_class d1, d2;
        scale_factor(w1, nums1, d1);
        scale_factor(w2, nums2, d2);
        mpz_class total1 = d1, total2 = d2; // the scaled unit also has to fit
        for (const auto& x : nums1) total1 += x;
        for (const auto& x : nums2) total2 += x;
        mpz_class budget = (total1 + 1) * (total2 + 1);
        if (budget.fits_slong_p()) {
            std::vector<long long> p(nums1.size()), q(nums2.size());
            for (std::size_t i = 0; i < nums1.size(); ++i) p[i] = nums1[i].get_si();
            for (std::size_t i = 0; i < nums2.size(); ++i) q[i] = nums2[i].get_si();
            long long one = d1.get_si() * d2.get_si();
            FactorCliques<long long> fc = factor_cliques(adj2, q);
            ProductSearch<long long> s(adj1, p, fc, all2, decision ? one : 0,
                                       decision);
            s.rec(0, 0);
            out.improved = s.improved;
            if (!decision || s.improved) {
                out.weight = Value(Rational(mpz_class((long)s.best)) /
                                   Rational(mpz_class((long)one)));
                for (const auto& [a, si] : s.best_assign) {
                    std::uint64_t m = fc.mask[si];
                    while (m) {
                        out.pairs.emplace_back(a, (std::uint32_t)std::countr_zero(m));
                        m &= m - 1;
                    }
                }
                std::sort(out.pairs.begin(), out.pairs.end());
            }
            return out;
        }
    }

    FactorCliques<Value> fc = factor_cliques(adj2, w2);
    ProductSearch<Value> s(adj1, w1, fc, all2, decision ? Value(1L) : Value(),
                           decision);
    s.rec(0, Value());
    out.improved = s.improved;
    if (!decision || s.improved) {
        out.weight = s.best;
        for (const auto& [a, si] : s.best_assign) {
            std::uint64_t m = fc.mask[si];
            while (m) {
                out.pairs.emplace_back(a, (std::uint32_t)std::countr_zero(m));
                m &= m - 1;
            }
        }
        std::sort(out.pairs.begin(), out.pairs.end());
    }
    return out;
}

} // namespace

ProductClique max_weight_clique_product(const ExclusivityGraph& g1,
                                        const std::vector<Value>& w1,
                                        const ExclusivityGraph& g2,
                                        const std::vector<Value>& w2) {
    ProductRun r = run_product_search(g1, w1, g2, w2, false);
    return {std::move(r.pairs), std::move(r.weight)};
}

bool product_clique_weight_exceeds_one(const ExclusivityGraph& g1,
                                       const std::vector<Value>& w1,
                                       const ExclusivityGraph& g2,
                                       const std::vector<Value>& w2) {
    return run_product_search(g1, w1, g2, w2, true).improved;
}

bool clique_weight_exceeds_one(const ExclusivityGraph& g,
                               const std::vector<Value>& weights) {
    if (weights.size() != g.vertex_count())
        throw InvalidArgument("one weight per vertex required");
    for (const auto& v : weights)
        if (v.sign() < 0)
            throw InvalidArgument("clique weights must be nonnegative");

    bool rational = true;
    for (const auto& v : weights)
        if (!v.is_rational()) { rational = false; break; }

    std::vector<long long> scaled;
    long long one = 0;
    if (rational && scale_to_ints(weights, scaled, one)) {
        WeightedSearch<long long> s(g, scaled, one, true);
        s.run_search();
        return s.improved;
    }
    WeightedSearch<Value> s(g, weights, Value(1L), true);
    s.run_search();
    return s.improved;
}

} // namespace ctxlab
