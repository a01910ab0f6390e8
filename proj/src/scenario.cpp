#include "ctxlab/scenario.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "ctxlab/errors.hpp"

namespace ctxlab {

// ---------------------------------------------------------------------------
// Outcome

Outcome::Outcome(std::vector<std::uint32_t> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

Outcome Outcome::full(std::uint32_t element_count) {
    std::vector<std::uint32_t> m(element_count);
    for (std::uint32_t i = 0; i < element_count; ++i) m[i] = i;
    return Outcome(std::move(m));
}

bool Outcome::contains(std::uint32_t e) const {
    return std::binary_search(members_.begin(), members_.end(), e);
}

bool Outcome::is_disjoint(const Outcome& o) const {
    auto a = members_.begin(), b = o.members_.begin();
    while (a != members_.end() && b != o.members_.end()) {
        if (*a == *b) return false;
        if (*a < *b)
            ++a;
        else
            ++b;
    }
    return true;
}

bool Outcome::is_subset_of(const Outcome& o) const {
    return std::includes(o.members_.begin(), o.members_.end(), members_.begin(),
                         members_.end());
}

Outcome Outcome::union_with(const Outcome& o) const {
    std::vector<std::uint32_t> m;
    m.reserve(members_.size() + o.members_.size());
    std::set_union(members_.begin(), members_.end(), o.members_.begin(), o.members_.end(),
                   std::back_inserter(m));
    Outcome r;
    r.members_ = std::move(m);
    return r;
}

Outcome Outcome::intersect_with(const Outcome& o) const {
    std::vector<std::uint32_t> m;
    std::set_intersection(members_.begin(), members_.end(), o.members_.begin(),
                          o.members_.end(), std::back_inserter(m));
    Outcome r;
    r.members_ = std::move(m);
    return r;
}

std::string Outcome::to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (i) os << ',';
        os << members_[i];
    }
    os << '}';
    return os.str();
}

std::string to_string(ExclusivityMode mode) {
    return mode == ExclusivityMode::Strict ? "strict" : "coarse";
}

ExclusivityMode exclusivity_mode_from_string(const std::string& s) {
    if (s == "strict") return ExclusivityMode::Strict;
    if (s == "coarse") return ExclusivityMode::Coarse;
    throw InvalidArgument("unknown exclusivity mode '" + s + "'");
}

// ---------------------------------------------------------------------------
// Scenario

Scenario::Scenario(std::string name, std::uint32_t element_count,
                   std::vector<Measurement> measurements,
                   std::optional<std::vector<std::string>> element_labels,
                   std::uint32_t n_boxes, std::vector<std::vector<std::uint32_t>> contexts)
    : name_(std::move(name)),
      element_count_(element_count),
      measurements_(std::move(measurements)),
      labels_(std::move(element_labels)),
      n_boxes_(n_boxes),
      contexts_(std::move(contexts)) {
    if (element_count_ == 0) throw InvalidArgument("scenario needs at least one element");
    if (measurements_.empty())
        throw InvalidArgument("scenario needs at least one measurement");

    for (auto& m : measurements_) {
        std::sort(m.cells.begin(), m.cells.end());
        std::vector<bool> seen(element_count_, false);
        std::size_t covered = 0;
        for (const auto& cell : m.cells) {
            if (cell.empty()) throw InvalidArgument("empty cell in measurement");
            for (auto e : cell.members()) {
                if (e >= element_count_)
                    throw InvalidArgument("cell element " + std::to_string(e) +
                                          " out of range");
                if (seen[e])
                    throw InvalidArgument("measurement cells are not disjoint at element " +
                                          std::to_string(e));
                seen[e] = true;
                ++covered;
            }
        }
        if (covered != element_count_)
            throw InvalidArgument("measurement cells do not cover the sample space");
    }

    if (labels_) {
        if (labels_->size() != element_count_)
            throw InvalidArgument("label count does not match element count");
        std::set<std::string> distinct(labels_->begin(), labels_->end());
        if (distinct.size() != labels_->size())
            throw InvalidArgument("element labels are not pairwise distinct");
    }

    if (n_boxes_ > 0) {
        if (contexts_.size() != measurements_.size())
            throw InvalidArgument("context list does not match measurement list");
        for (const auto& ctx : contexts_) {
            for (auto b : ctx)
                if (b >= n_boxes_) throw InvalidArgument("context box index out of range");
        }
    } else if (!contexts_.empty()) {
        throw InvalidArgument("contexts given without boxes");
    }

    for (const auto& m : measurements_)
        for (const auto& cell : m.cells) fine_outcomes_.push_back(cell);
    std::sort(fine_outcomes_.begin(), fine_outcomes_.end());
    fine_outcomes_.erase(std::unique(fine_outcomes_.begin(), fine_outcomes_.end()),
                         fine_outcomes_.end());
}

long Scenario::fine_outcome_index(const Outcome& o) const {
    auto it = std::lower_bound(fine_outcomes_.begin(), fine_outcomes_.end(), o);
    if (it == fine_outcomes_.end() || !(*it == o)) return -1;
    return it - fine_outcomes_.begin();
}

bool operator==(const Scenario& a, const Scenario& b) {
    if (a.name_ != b.name_ || a.element_count_ != b.element_count_ ||
        a.n_boxes_ != b.n_boxes_ || a.contexts_ != b.contexts_ || a.labels_ != b.labels_)
        return false;
    if (a.measurements_.size() != b.measurements_.size()) return false;
    for (std::size_t i = 0; i < a.measurements_.size(); ++i)
        if (a.measurements_[i].cells != b.measurements_[i].cells) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Marginal construction

namespace {

std::string bitstring_of(std::uint64_t v, std::uint32_t n) {
    std::string s(n, '0');
    for (std::uint32_t k = 0; k < n; ++k)
        if ((v >> (n - 1 - k)) & 1) s[k] = '1';
    return s;
}

bool cyclic_adjacent_ones(const std::string& s) {
    std::uint32_t n = s.size();
    for (std::uint32_t k = 0; k < n; ++k)
        if (s[k] == '1' && s[(k + 1) % n] == '1') return true;
    return false;
}

} // namespace

Scenario build_marginal_scenario(std::uint32_t n_boxes,
                                 const std::vector<std::vector<std::uint32_t>>& contexts,
                                 const Support& support, std::string name) {
    if (n_boxes == 0) throw InvalidArgument("need at least one box");
    if (contexts.empty()) throw InvalidArgument("need at least one context");

    std::vector<std::string> elems;
    switch (support.kind) {
    case Support::Kind::All: {
        if (n_boxes > 16)
            throw ResourceError("full support over " + std::to_string(n_boxes) +
                                " boxes exceeds the construction guard (16)");
        for (std::uint64_t v = 0; v < (1ull << n_boxes); ++v)
            elems.push_back(bitstring_of(v, n_boxes));
        break;
    }
    case Support::Kind::CyclicNoAdjacentOnes: {
        if (n_boxes < 2 || n_boxes > 24)
            throw InvalidArgument("cyclic support needs 2..24 boxes");
        for (std::uint64_t v = 0; v < (1ull << n_boxes); ++v) {
            std::string s = bitstring_of(v, n_boxes);
            if (!cyclic_adjacent_ones(s)) elems.push_back(s);
        }
        break;
    }
    case Support::Kind::Explicit: {
        elems = support.strings;
        for (const auto& s : elems) {
            if (s.size() != n_boxes)
                throw InvalidArgument("support string '" + s + "' has wrong length");
            for (char c : s)
                if (c != '0' && c != '1')
                    throw InvalidArgument("support string '" + s + "' is not binary");
        }
        std::sort(elems.begin(), elems.end());
        if (std::adjacent_find(elems.begin(), elems.end()) != elems.end())
            throw InvalidArgument("duplicate support strings");
        break;
    }
    }
    if (elems.empty()) throw InvalidArgument("empty support");

    std::vector<std::vector<std::uint32_t>> ctxs;
    for (auto ctx : contexts) {
        if (ctx.empty()) throw InvalidArgument("empty context");
        std::sort(ctx.begin(), ctx.end());
        if (std::adjacent_find(ctx.begin(), ctx.end()) != ctx.end())
            throw InvalidArgument("repeated box inside a context");
        for (auto b : ctx)
            if (b >= n_boxes)
                throw InvalidArgument("context box index " + std::to_string(b + 1) +
                                      " out of range");
        for (const auto& prev : ctxs)
            if (prev == ctx) throw InvalidArgument("duplicate context");
        ctxs.push_back(std::move(ctx));
    }

    std::vector<Measurement> measurements;
    for (const auto& ctx : ctxs) {
        // Group elements by their restriction to the context's boxes; empty
        // cells never arise (only realized restrictions produce groups).
        std::map<std::string, std::vector<std::uint32_t>> groups;
        for (std::uint32_t i = 0; i < elems.size(); ++i) {
            std::string key;
            for (auto b : ctx) key += elems[i][b];
            groups[key].push_back(i);
        }
        Measurement m;
        for (auto& [key, members] : groups) m.cells.emplace_back(std::move(members));
        measurements.push_back(std::move(m));
    }

    if (name.empty()) name = "marg" + std::to_string(n_boxes);
    std::uint32_t n_elems = (std::uint32_t)elems.size();
    return Scenario(std::move(name), n_elems, std::move(measurements), std::move(elems),
                    n_boxes, std::move(ctxs));
}

// ---------------------------------------------------------------------------
// Presets

Scenario preset_scenario(const std::string& name, const std::vector<long>& params) {
    auto expect_params = [&](std::size_t n) {
        if (params.size() != n)
            throw InvalidArgument("preset '" + name + "' expects " + std::to_string(n) +
                                  " parameter(s)");
    };
    if (name == "chsh") {
        expect_params(0);
        return build_marginal_scenario(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}}, Support::all(),
                                       "chsh");
    }
    if (name == "specker") {
        expect_params(0);
        return build_marginal_scenario(3, {{0, 1}, {1, 2}, {0, 2}}, Support::all(),
                                       "specker");
    }
    if (name == "pentagon" || name == "cycle") {
        std::uint32_t n = 5;
        if (name == "cycle") {
            expect_params(1);
            if (params[0] < 3 || params[0] > 24)
                throw InvalidArgument("cycle size must be in 3..24");
            n = (std::uint32_t)params[0];
        } else {
            expect_params(0);
        }
        std::vector<std::vector<std::uint32_t>> ctxs;
        for (std::uint32_t i = 0; i < n; ++i) ctxs.push_back({i, (i + 1) % n});
        std::string nm = name == "pentagon" ? "pentagon" : "cycle(" + std::to_string(n) + ")";
        return build_marginal_scenario(n, ctxs, Support::cyclic_no_adjacent_ones(), nm);
    }
    if (name == "bell") {
        expect_params(3);
        long parties = params[0], inputs = params[1], outputs = params[2];
        if (parties < 1 || inputs < 1) throw InvalidArgument("bell needs parties,inputs >= 1");
        if (outputs != 2)
            throw InvalidArgument("bell preset supports binary outputs only (boxes are bits)");
        long boxes = parties * inputs;
        if (boxes > 16) throw ResourceError("bell scenario too large: " +
                                            std::to_string(boxes) + " boxes");
        std::vector<std::vector<std::uint32_t>> ctxs;
        std::vector<long> input(parties, 0);
        for (;;) {
            std::vector<std::uint32_t> ctx;
            for (long p = 0; p < parties; ++p)
                ctx.push_back((std::uint32_t)(p * inputs + input[p]));
            ctxs.push_back(std::move(ctx));
            long p = parties - 1;
            while (p >= 0 && ++input[p] == inputs) input[p--] = 0;
            if (p < 0) break;
        }
        std::string nm = "bell(" + std::to_string(parties) + "," + std::to_string(inputs) +
                         "," + std::to_string(outputs) + ")";
        return build_marginal_scenario((std::uint32_t)boxes, ctxs, Support::all(), nm);
    }
    if (name == "gyni3") {
        expect_params(0);
        // Three parties with binary inputs; box 2p+x holds party p's answer
        // under input x. One context per input string.
        std::vector<std::vector<std::uint32_t>> ctxs;
        for (int x0 = 0; x0 < 2; ++x0)
            for (int x1 = 0; x1 < 2; ++x1)
                for (int x2 = 0; x2 < 2; ++x2)
                    ctxs.push_back({(std::uint32_t)x0, (std::uint32_t)(2 + x1),
                                    (std::uint32_t)(4 + x2)});
        return build_marginal_scenario(6, ctxs, Support::all(), "gyni3");
    }
    throw InvalidArgument("unknown preset '" + name + "'");
}

Scenario preset_scenario_spec(const std::string& spec) {
    auto open = spec.find('(');
    if (open == std::string::npos) return preset_scenario(spec);
    if (spec.back() != ')') throw InvalidArgument("bad preset spec '" + spec + "'");
    std::string name = spec.substr(0, open);
    std::string args = spec.substr(open + 1, spec.size() - open - 2);
    std::vector<long> params;
    std::istringstream is(args);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        try {
            params.push_back(std::stol(tok));
        } catch (const std::exception&) {
            throw InvalidArgument("bad preset parameter '" + tok + "'");
        }
    }
    return preset_scenario(name, params);
}

// ---------------------------------------------------------------------------
// Products

Scenario product_scenario(const Scenario& s1, const Scenario& s2) {
    std::uint32_t n1 = s1.element_count(), n2 = s2.element_count();
    std::uint64_t total = (std::uint64_t)n1 * n2;
    if (total > (1u << 20))
        throw ResourceError("product scenario exceeds 2^20 elements");

    std::vector<Measurement> measurements;
    std::vector<std::vector<std::uint32_t>> ctxs;
    bool boxes = s1.has_boxes() && s2.has_boxes();
    for (std::size_t m1 = 0; m1 < s1.measurements().size(); ++m1) {
        for (std::size_t m2 = 0; m2 < s2.measurements().size(); ++m2) {
            Measurement m;
            for (const auto& a : s1.measurements()[m1].cells) {
                for (const auto& b : s2.measurements()[m2].cells) {
                    std::vector<std::uint32_t> members;
                    members.reserve(a.size() * b.size());
                    for (auto i1 : a.members())
                        for (auto i2 : b.members())
                            members.push_back(i1 * n2 + i2);
                    m.cells.emplace_back(std::move(members));
                }
            }
            measurements.push_back(std::move(m));
            if (boxes) {
                std::vector<std::uint32_t> ctx = s1.contexts()[m1];
                for (auto b : s2.contexts()[m2]) ctx.push_back(b + s1.n_boxes());
                ctxs.push_back(std::move(ctx));
            }
        }
    }

    std::optional<std::vector<std::string>> labels;
    if (s1.has_labels() && s2.has_labels()) {
        std::vector<std::string> ls;
        ls.reserve(total);
        for (auto& l1 : s1.labels())
            for (auto& l2 : s2.labels()) ls.push_back(l1 + l2);
        labels = std::move(ls);
    }

    return Scenario(s1.name() + "*" + s2.name(), (std::uint32_t)total,
                    std::move(measurements), std::move(labels),
                    boxes ? s1.n_boxes() + s2.n_boxes() : 0, std::move(ctxs));
}

Scenario power_scenario(const Scenario& s, unsigned copies) {
    if (copies == 0) throw InvalidArgument("need at least one copy");
    Scenario result = s;
    for (unsigned k = 1; k < copies; ++k) result = product_scenario(result, s);
    return result;
}

// ---------------------------------------------------------------------------
// Coarse outcomes and exclusivity

std::vector<Outcome> coarse_outcomes(const Measurement& m, std::size_t cell_limit) {
    std::size_t k = m.cells.size();
    if (k > cell_limit)
        throw ResourceError("measurement has " + std::to_string(k) +
                            " cells, exceeding the coarse-outcome limit of " +
                            std::to_string(cell_limit));
    std::vector<Outcome> out(1ull << k);
    out[0] = Outcome();
    for (std::uint64_t mask = 1; mask < (1ull << k); ++mask) {
        std::uint64_t low = mask & (~mask + 1);
        unsigned bit = (unsigned)__builtin_ctzll(mask);
        out[mask] = out[mask ^ low].union_with(m.cells[bit]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

void check_range(const Scenario& s, const Outcome& o) {
    if (!o.empty() && o.members().back() >= s.element_count())
        throw InvalidArgument("outcome index out of range for scenario");
}

// True iff no cell of `m` intersects both `a` and `b`; since cells are
// disjoint this is exactly disjointness of the coarse hulls within `m`.
bool hulls_disjoint(const Measurement& m, const Outcome& a, const Outcome& b) {
    for (const auto& cell : m.cells)
        if (!cell.is_disjoint(a) && !cell.is_disjoint(b)) return false;
    return true;
}

} // namespace

bool exclusive(const Scenario& s, const Outcome& a, const Outcome& b,
               ExclusivityMode mode) {
    check_range(s, a);
    check_range(s, b);
    if (mode == ExclusivityMode::Strict) {
        if (!a.is_disjoint(b)) return false;
        for (const auto& m : s.measurements()) {
            bool has_a = std::binary_search(m.cells.begin(), m.cells.end(), a);
            bool has_b = std::binary_search(m.cells.begin(), m.cells.end(), b);
            if (has_a && has_b) return true;
        }
        return false;
    }
    for (const auto& m : s.measurements())
        if (hulls_disjoint(m, a, b)) return true;
    return false;
}

ExclusivityGraph::ExclusivityGraph(std::vector<Outcome> vertices, ExclusivityMode mode,
                                   std::uint32_t element_count)
    : vertices_(std::move(vertices)),
      mode_(mode),
      element_count_(element_count),
      words_((vertices_.size() + 63) / 64),
      adj_(vertices_.size(), std::vector<std::uint64_t>(words_, 0)) {}

void ExclusivityGraph::add_edge(std::uint32_t u, std::uint32_t v) {
    if (u == v) throw InvalidArgument("self loop");
    if (edge(u, v)) return;
    adj_[u][v / 64] |= 1ull << (v % 64);
    adj_[v][u / 64] |= 1ull << (u % 64);
    ++edge_count_;
}

bool ExclusivityGraph::edge(std::uint32_t u, std::uint32_t v) const {
    return (adj_[u][v / 64] >> (v % 64)) & 1;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> ExclusivityGraph::edges() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> es;
    for (std::uint32_t u = 0; u < vertices_.size(); ++u)
        for (std::uint32_t v = u + 1; v < vertices_.size(); ++v)
            if (edge(u, v)) es.emplace_back(u, v);
    return es;
}

ExclusivityGraph exclusivity_graph(const Scenario& s, ExclusivityMode mode) {
    ExclusivityGraph g(s.fine_outcomes(), mode, s.element_count());
    const auto& verts = g.vertices();
    std::uint32_t nv = (std::uint32_t)verts.size();

    if (mode == ExclusivityMode::Strict) {
        // Cells of one measurement are pairwise disjoint, so each measurement
        // contributes a complete graph on its cell vertices.
        for (const auto& m : s.measurements()) {
            std::vector<std::uint32_t> ids;
            for (const auto& cell : m.cells)
                ids.push_back((std::uint32_t)s.fine_outcome_index(cell));
            for (std::size_t i = 0; i < ids.size(); ++i)
                for (std::size_t j = i + 1; j < ids.size(); ++j)
                    g.add_edge(ids[i], ids[j]);
        }
        return g;
    }

    // Coarse: per measurement, record which cells each vertex touches; two
    // hulls are disjoint exactly when the touch masks are.
    std::size_t n_meas = s.measurements().size();
    std::vector<std::size_t> mask_words(n_meas);
    std::vector<std::vector<std::uint64_t>> touch(n_meas);
    for (std::size_t mi = 0; mi < n_meas; ++mi) {
        const auto& m = s.measurements()[mi];
        std::vector<std::uint32_t> cell_of(s.element_count());
        for (std::uint32_t c = 0; c < m.cells.size(); ++c)
            for (auto e : m.cells[c].members()) cell_of[e] = c;
        std::size_t words = (m.cells.size() + 63) / 64;
        mask_words[mi] = words;
        touch[mi].assign((std::size_t)nv * words, 0);
        for (std::uint32_t v = 0; v < nv; ++v)
            for (auto e : verts[v].members()) {
                std::uint32_t c = cell_of[e];
                touch[mi][(std::size_t)v * words + c / 64] |= 1ull << (c % 64);
            }
    }
    for (std::uint32_t u = 0; u < nv; ++u) {
        for (std::uint32_t v = u + 1; v < nv; ++v) {
            for (std::size_t mi = 0; mi < n_meas; ++mi) {
                std::size_t words = mask_words[mi];
                const std::uint64_t* mu = &touch[mi][(std::size_t)u * words];
                const std::uint64_t* mv = &touch[mi][(std::size_t)v * words];
                bool shared = false;
                for (std::size_t w = 0; w < words; ++w)
                    if (mu[w] & mv[w]) {
                        shared = true;
                        break;
                    }
                if (!shared) {
                    g.add_edge(u, v);
                    break;
                }
            }
        }
    }
    return g;
}

} // namespace ctxlab
