#ifndef CTXLAB_SCENARIO_HPP
#define CTXLAB_SCENARIO_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ctxlab {

// A subset of the sample space, canonically represented as a sorted
// duplicate-free index vector so subset identity is plain equality.
class Outcome {
public:
    Outcome() = default;
    explicit Outcome(std::vector<std::uint32_t> members);

    static Outcome full(std::uint32_t element_count);

    const std::vector<std::uint32_t>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    bool contains(std::uint32_t e) const;
    bool is_disjoint(const Outcome& o) const;
    bool is_subset_of(const Outcome& o) const;
    Outcome union_with(const Outcome& o) const;
    Outcome intersect_with(const Outcome& o) const;

    friend bool operator==(const Outcome& a, const Outcome& b) {
        return a.members_ == b.members_;
    }
    friend bool operator!=(const Outcome& a, const Outcome& b) { return !(a == b); }
    // Lexicographic on the sorted member list; the canonical order used for
    // cells, vertices and coarse outcomes throughout.
    friend bool operator<(const Outcome& a, const Outcome& b) {
        return a.members_ < b.members_;
    }

    std::string to_string() const;

private:
    std::vector<std::uint32_t> members_;
};

// One measurement: a partition of the sample space into fine-grained
// outcomes. Cells are kept in canonical (lexicographic) order.
struct Measurement {
    std::vector<Outcome> cells;
};

enum class ExclusivityMode { Strict, Coarse };

std::string to_string(ExclusivityMode mode);
ExclusivityMode exclusivity_mode_from_string(const std::string& s);

// A partition scenario: finite sample space plus a list of measurements.
// Box-based (marginal) scenarios additionally carry per-element assignment
// strings and the box set opened by each measurement.
class Scenario {
public:
    // Validates the partition property of every measurement, label
    // distinctness, and canonicalizes cell order. Throws InvalidArgument.
    Scenario(std::string name, std::uint32_t element_count,
             std::vector<Measurement> measurements,
             std::optional<std::vector<std::string>> element_labels = std::nullopt,
             std::uint32_t n_boxes = 0,
             std::vector<std::vector<std::uint32_t>> contexts = {});

    const std::string& name() const { return name_; }
    std::uint32_t element_count() const { return element_count_; }
    const std::vector<Measurement>& measurements() const { return measurements_; }
    bool has_labels() const { return labels_.has_value(); }
    const std::vector<std::string>& labels() const { return *labels_; }

    bool has_boxes() const { return n_boxes_ > 0; }
    std::uint32_t n_boxes() const { return n_boxes_; }
    // Box index sets (0-based, sorted), one per measurement; empty unless
    // box-based.
    const std::vector<std::vector<std::uint32_t>>& contexts() const { return contexts_; }

    // All fine-grained outcomes across measurements, deduplicated by subset
    // identity, in canonical order.
    const std::vector<Outcome>& fine_outcomes() const { return fine_outcomes_; }
    // Index into fine_outcomes(), or -1.
    long fine_outcome_index(const Outcome& o) const;

    friend bool operator==(const Scenario& a, const Scenario& b);

private:
    std::string name_;
    std::uint32_t element_count_ = 0;
    std::vector<Measurement> measurements_;
    std::optional<std::vector<std::string>> labels_;
    std::uint32_t n_boxes_ = 0;
    std::vector<std::vector<std::uint32_t>> contexts_;
    std::vector<Outcome> fine_outcomes_;
};

using ScenarioRef = std::shared_ptr<const Scenario>;

struct Support {
    enum class Kind { All, CyclicNoAdjacentOnes, Explicit };
    Kind kind = Kind::All;
    std::vector<std::string> strings; // Explicit only
    static Support all() { return {}; }
    static Support cyclic_no_adjacent_ones() { return {Kind::CyclicNoAdjacentOnes, {}}; }
    static Support explicit_list(std::vector<std::string> s) {
        return {Kind::Explicit, std::move(s)};
    }
};

// Boxes-and-contexts construction: sample space = the support strings, one
// measurement per context partitioning by the restriction to its boxes.
// Contexts are 0-based box index sets; duplicates are rejected.
Scenario build_marginal_scenario(std::uint32_t n_boxes,
                                 const std::vector<std::vector<std::uint32_t>>& contexts,
                                 const Support& support,
                                 std::string name = "");

// chsh | specker | pentagon | cycle(n) | bell(parties,inputs,outputs) | gyni3
Scenario preset_scenario(const std::string& name, const std::vector<long>& params = {});
// Accepts "cycle(7)", "bell(2,2,2)" or bare names.
Scenario preset_scenario_spec(const std::string& spec);

// Cartesian product: element (i1, i2) -> i1*|Xi2| + i2, measurements are all
// pairwise products, labels concatenated when both factors are labeled.
Scenario product_scenario(const Scenario& s1, const Scenario& s2);

// k-fold product, left associated. k >= 1; k == 1 returns a copy.
Scenario power_scenario(const Scenario& s, unsigned copies);

// All 2^|cells| unions of cells (the measurement's Boolean algebra),
// canonically ordered. Guarded by cell_limit.
std::vector<Outcome> coarse_outcomes(const Measurement& m, std::size_t cell_limit = 20);

// Strict: disjoint and cells of a common measurement. Coarse: the minimal
// coarse-grained hulls within some common measurement are disjoint.
bool exclusive(const Scenario& s, const Outcome& a, const Outcome& b, ExclusivityMode mode);

class ExclusivityGraph {
public:
    ExclusivityGraph(std::vector<Outcome> vertices, ExclusivityMode mode,
                     std::uint32_t element_count);

    const std::vector<Outcome>& vertices() const { return vertices_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    ExclusivityMode mode() const { return mode_; }
    std::uint32_t element_count() const { return element_count_; }

    void add_edge(std::uint32_t u, std::uint32_t v);
    bool edge(std::uint32_t u, std::uint32_t v) const;
    std::size_t edge_count() const { return edge_count_; }
    // Sorted (u < v) pair list.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges() const;

    // Adjacency row of v as bit words, (vertex_count+63)/64 words per row.
    const std::vector<std::uint64_t>& adjacency_row(std::uint32_t v) const {
        return adj_[v];
    }
    std::size_t words_per_row() const { return words_; }

private:
    std::vector<Outcome> vertices_;
    ExclusivityMode mode_;
    std::uint32_t element_count_;
    std::size_t words_;
    std::vector<std::vector<std::uint64_t>> adj_;
    std::size_t edge_count_ = 0;
};

// Vertices = deduplicated fine outcomes, edge iff exclusive under `mode`.
ExclusivityGraph exclusivity_graph(const Scenario& s, ExclusivityMode mode);

} // namespace ctxlab

#endif
