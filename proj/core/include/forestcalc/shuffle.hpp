#pragma once

#include "forestcalc/presheaf.hpp"

namespace forestcalc {

// tensor-lattice operations outside the proven territory (neither factor a
// simplex and not both open) are refused unless explicitly unchecked
struct HypothesisViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One interleaving of two factors. Edges carry the pair of factor colours,
// vertices remember which factor they percolated from. Multi-component
// factors contribute one block component per component pair, in (i,j) order.
struct Shuffle {
    Forest forest;
    std::vector<std::pair<int, int>> edgePairs;    // global edge -> (left edge, right edge)
    std::vector<std::pair<bool, int>> provenance;  // global vertex -> (fromLeft, source vertex)
};

enum class PercDirection {
    left_minimal,   // minimum grafts right-factor copies onto left-factor leaves
    right_minimal,  // the reverse
};

// nodes[0] is the unique minimum; covers are single percolation moves and
// rank counts moves from the minimum
struct PercolationDag {
    std::vector<Shuffle> nodes;
    std::vector<std::pair<int, int>> covers;
    std::vector<int> rank;
};

PercolationDag percolation_order(const Forest& f, const Forest& g,
                                 PercDirection dir = PercDirection::left_minimal);

// the distinct maximal interleavings (nullary collisions deduplicated, since
// two stumps on the same colour denote one operation)
std::vector<Shuffle> shuffles(const Forest& f, const Forest& g);

// Tensor subcomplexes -------------------------------------------------------

// edge universe of a tensor product: pairs of factor edges, flattened
struct TensorUniverse {
    Forest left, right;
    int edge_id(int a, int b) const { return a * right.edge_count() + b; }
    std::pair<int, int> edge_pair(int id) const {
        return {id / right.edge_count(), id % right.edge_count()};
    }
    bool operator==(const TensorUniverse& o) const {
        return left == o.left && right == o.right;
    }
};

struct TensorSubcomplex {
    TensorUniverse universe;
    std::vector<FaceRef> maximal;

    const std::vector<FaceRef>& closure() const;
    bool contains(const FaceRef& f) const;
    bool empty() const { return maximal.empty(); }
    bool operator==(const TensorSubcomplex& o) const {
        return universe == o.universe && maximal == o.maximal;
    }
    bool operator!=(const TensorSubcomplex& o) const { return !(*this == o); }

  private:
    mutable std::shared_ptr<const std::vector<FaceRef>> cache_;
};

// validation is structural (edge range, operation shape); whether a face sits
// inside the tensor image is the caller's concern
TensorSubcomplex make_tensor_subcomplex(TensorUniverse u, std::vector<FaceRef> faces);
// a shuffle of subforests of the factors, as a face of the tensor universe
FaceRef shuffle_face(const TensorUniverse& u, const Shuffle& s);

bool is_simplex(const Forest& f);
bool tensor_hypotheses_hold(const Forest& f, const Forest& g);

// union of the images x ⊗ y over cells of X and Y; refuses factor pairs
// outside the proven hypotheses unless enforce is false
TensorSubcomplex tensor_subcomplex(const Subcomplex& x, const Subcomplex& y,
                                   bool enforce = true);

TensorSubcomplex meet(const TensorSubcomplex& x, const TensorSubcomplex& y);
TensorSubcomplex join(const TensorSubcomplex& x, const TensorSubcomplex& y);
bool tensor_le(const TensorSubcomplex& x, const TensorSubcomplex& y);

// N-ary shuffles --------------------------------------------------------------

// single-tree factors only; edges carry one colour per factor
struct NaryShuffle {
    Tree tree;
    std::vector<std::vector<int>> edgeColours;
    std::vector<std::pair<int, int>> provenance;  // (factor index, vertex)
};

std::vector<NaryShuffle> nary_shuffles(const std::vector<Forest>& factors);
// shuffles whose interleaving pattern factors through the grouping shape;
// shape leaves correspond to factors in canonical leaf order
std::vector<NaryShuffle> grouped_shuffles(const Tree& shape, const std::vector<Forest>& factors);

struct ExpansionInclusion {
    std::vector<NaryShuffle> grouped;
    std::vector<NaryShuffle> whole;
    std::vector<int> indexInWhole;  // position of each grouped shuffle in whole
};

ExpansionInclusion expansion_inclusion(const Tree& shape, const std::vector<Forest>& factors);

// Layered structure -----------------------------------------------------------

// lambda grows by exactly one along every step toward the root
struct LayeredForest {
    Forest forest;
    std::vector<int> lambda;  // per global vertex
};

bool valid_layering(const LayeredForest& lf);

std::string to_dot(const PercolationDag& dag);

}  // namespace forestcalc
