#pragma once

#include "forestcalc/finpointed.hpp"
#include "forestcalc/shuffle.hpp"

namespace forestcalc {

// The subobject machinery below is sound only for chains of surjective
// partial maps; outside that range face intersections stop matching
// subobject intersections (two nullary operations can collide), so the
// offending inputs are refused with this.
struct OverNFNotNFo : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dendrification of a nerve simplex ----------------------------------------

// The forest of a chain <a_0> -> ... -> <a_n>. Edge (i,p) stands for point p
// of level i; for i >= 1 it is the output of vertex (i,p), whose inputs are
// the chain fiber of p in level i-1. Level 0 edges are leaves, an edge is a
// root when its point is undefined under the next map (or i = n). Empty
// fibers become stumps, which over surjective chains cannot occur.
// The constant-<0> chain dendrifies to the empty forest (`empty` set, no
// components).
struct OmegaImage {
    bool empty = false;
    Forest forest;
    std::vector<std::pair<int, int>> edgeNames;    // global edge -> (level, point)
    std::vector<std::pair<int, int>> vertexNames;  // global vertex -> (level, point)
    std::vector<std::vector<int>> levelEdges;      // [level][point-1] -> global edge
    std::vector<std::vector<int>> levelVertices;   // [level][point-1] -> global vertex
    std::vector<int> markedCorollas;  // vertices under the marked chain edges, sorted
};

OmegaImage omega_object(const NFSimplex& a);

// the natural layering: a vertex of level i sits in layer i
LayeredForest omega_layering(const OmegaImage& im);

// dendrified face/degeneracy maps; both send edge (j,p) to the level the
// simplicial operator moves j to, so composing them realizes the simplicial
// identities on the nose. A constant-<0> source yields the morphism with no
// components (the one map out of the initial object; valid_forest_mor does
// not apply to it).
ForestMor omega_face(const NFSimplex& a, int i);
ForestMor omega_degeneracy(const NFSimplex& a, int j);

// Subcomplexes of the dendrification ----------------------------------------

// the subobject of omega(a) spanned by the levels in s (a sorted, nonempty
// vertex subset of the simplex); vertices between consecutive kept levels
// collapse into composite regions
FaceRef omega_face_ref(const OmegaImage& im, const NFSimplex& a, const std::vector<int>& s);

// Union of faces of a single simplex, with marks. Faces are vertex subsets;
// markedEdges are simplex edges (p,q) lying inside some face, each of whose
// chain composites must be inert. The simplex's own marked chain edges
// contribute where they lie in a face. The result marks one unary region
// cell per point of the marked edge's target level. Throws OverNFNotNFo
// when the chain is not surjective and std::invalid_argument for marks on
// non-inert edges or faces outside the simplex.
MarkedSubcomplex omega_shriek(const NFSimplex& a, const std::vector<std::vector<int>>& faces,
                              const std::vector<std::pair<int, int>>& markedEdges = {});

// Simplices over a fixed forest ----------------------------------------------

// A simplex of the right adjoint at a forest F: a chain together with
// per-level assignments zeta[i] (point p -> global edge of F), injective
// with pairwise independent image level by level. edgeTypes[j] classifies
// chain edge j: 1 forgets one point (inert order-preserving drop, unary
// vertices land on identities), 2 permutes (vertices on identities),
// 3 composes (the distinguished active map, its top vertex landing on an
// actual vertex of F, the rest on identities); 0 when none applies.
// elementary means every edge is typed, obliviant that all are type 1.
struct OmegaStarSimplex {
    NFSimplex base;  // markedEdges filled by the marking rule
    std::vector<std::vector<int>> zeta;
    std::vector<int> edgeTypes;
    bool elementary = false;
    bool obliviant = false;
    auto operator<=>(const OmegaStarSimplex&) const = default;
};

// all n-simplices over f, degenerate ones included, sorted; marks carries
// the marked unary corolla cells of f (degenerate ones are implicit). A
// chain edge of the result is marked when its map is inert and every unary
// region it induces is degenerate or marked.
std::vector<OmegaStarSimplex> omega_star_simplices(const Forest& f,
                                                   const std::vector<FaceRef>& marks, int n);

bool omega_star_degenerate(const OmegaStarSimplex& s);
OmegaStarSimplex omega_star_face(const OmegaStarSimplex& s, int i, const Forest& f,
                                 const std::vector<FaceRef>& marks = {});
// the forest morphism omega(base) -> f the assignment underlies
ForestMor omega_star_mor(const OmegaStarSimplex& s, const Forest& f);

// Layered shuffles and the comparison inclusion -------------------------------

// whether the shuffle admits a layering in which every layer consists of the
// copies of exactly one layer of one factor; lambda gives each factor vertex
// its layer
bool shuffle_layered(const Shuffle& s, const std::vector<int>& lambdaLeft,
                     const std::vector<int>& lambdaRight);

// the shuffles of the two dendrifications that are layered for the natural
// layerings; their union is the image of the comparison map out of the
// pointwise smash, inside the full tensor of the dendrifications
std::vector<Shuffle> layered_shuffles(const NFSimplex& a, const NFSimplex& b);
TensorSubcomplex theta(const NFSimplex& a, const NFSimplex& b);

}  // namespace forestcalc
