#ifndef CTXLAB_CLIQUES_HPP
#define CTXLAB_CLIQUES_HPP

#include <cstdint>
#include <vector>

#include "ctxlab/rational.hpp"
#include "ctxlab/scenario.hpp"

namespace ctxlab {

// All maximal cliques of an exclusivity graph, each as a sorted vertex list,
// the list itself in lexicographic order.
struct CliqueSet {
    std::vector<std::vector<std::uint32_t>> cliques;
};

// Exact pivoted recursive enumeration. Throws ResourceError once the number
// of cliques exceeds `cap`; never truncates silently.
CliqueSet maximal_cliques(const ExclusivityGraph& g, std::size_t cap = 10000000);

struct WeightedClique {
    std::vector<std::uint32_t> vertices; // sorted, extended to a maximal clique
    Value weight;
};

// Exact maximum-weight clique, for graphs whose maximal cliques are too many
// to enumerate. Weights must be nonnegative. Branch and bound in fixed vertex
// order; the first optimum encountered is returned (deterministic), then
// extended to a maximal clique, which cannot change the weight since any
// extension vertex necessarily weighs zero.
WeightedClique max_weight_clique(const ExclusivityGraph& g,
                                 const std::vector<Value>& weights);

// Decision form: is there a clique of weight strictly greater than one? Same
// exact search, but the bound starts primed at one, so every subtree that
// cannot beat it is pruned outright and the search stops at the first
// violating clique. Much faster than max_weight_clique when the answer is
// needed but the maximizer is not.
bool clique_weight_exceeds_one(const ExclusivityGraph& g,
                               const std::vector<Value>& weights);

// Cliques of the disjunctive product of two exclusivity graphs group by
// first coordinate: {a} x S_a with every S_a a clique of the second factor,
// and S_a, S_b fully cross-adjacent whenever a, b are non-adjacent in the
// first factor. Under product weights the maximum can therefore be found by
// assigning second-factor cliques to first-factor vertices directly, which
// sidesteps the product graph's symmetry blowup entirely. Both factors must
// have at most 64 vertices; weights must be nonnegative.
struct ProductClique {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> vertices; // (first, second)
    Value weight;
};

ProductClique max_weight_clique_product(const ExclusivityGraph& g1,
                                        const std::vector<Value>& w1,
                                        const ExclusivityGraph& g2,
                                        const std::vector<Value>& w2);

// Decision form of the product search, primed at weight one.
bool product_clique_weight_exceeds_one(const ExclusivityGraph& g1,
                                       const std::vector<Value>& w1,
                                       const ExclusivityGraph& g2,
                                       const std::vector<Value>& w2);

} // namespace ctxlab

#endif
