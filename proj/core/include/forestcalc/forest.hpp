#pragma once

#include "forestcalc/tree.hpp"

namespace forestcalc {

// Raised when an operation would produce or consume a forest with no
// components; only the simplicial comparison functor may handle it.
struct EmptyForest : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A non-empty direct sum of trees. Edges are addressed either locally as
// (component, edge) or globally by offsetting component edge counts.
struct Forest {
    std::vector<Tree> components;

    int component_count() const { return static_cast<int>(components.size()); }
    int edge_count() const;
    int vertex_count() const;
    int offset(int comp) const;
    int voffset(int comp) const;
    int global(int comp, int e) const { return offset(comp) + e; }
    std::pair<int, int> locate(int globalEdge) const;
    std::pair<int, int> locate_vertex(int globalVertex) const;
    bool open() const;

    bool operator==(const Forest& o) const { return components == o.components; }
    bool operator!=(const Forest& o) const { return !(*this == o); }
};

Forest forest_of(Tree t);
Forest direct_sum(const Forest& a, const Forest& b);
// component multisets agree up to isomorphism
bool isomorphic_forests(const Forest& a, const Forest& b);

// Morphisms ---------------------------------------------------------------

// alpha sends source components to target components; edgeMaps[i] maps the
// edges of source component i into target component alpha[i]
struct ForestMor {
    Forest source;
    Forest target;
    std::vector<int> alpha;
    std::vector<std::vector<int>> edgeMaps;
};

// components hitting a common target must land on pairwise incomparable roots
bool validate_independence(const ForestMor& m);
bool valid_forest_mor(const ForestMor& m);
ForestMor identity_forest_mor(const Forest& f);
ForestMor compose_forest(const ForestMor& g, const ForestMor& f);
bool is_forest_iso(const ForestMor& m);
std::vector<ForestMor> forest_automorphisms(const Forest& f);

// Elementary faces ----------------------------------------------------------

enum class ForestFaceKind { inner, leaf, phi_root, eta_summand };

struct ForestFace {
    ForestFaceKind kind;
    int component;
    int datum;  // inner: contracted edge, leaf: chopped vertex, otherwise unused
    Forest face;
    ForestMor emb;
};

// inner contractions, leaf chops (a corolla chops to its root edge), root
// crowns (splitting into the branches above the root vertex), and droppable
// edge summands
std::vector<ForestFace> elementary_faces_forest(const Forest& f);

// Factorization ---------------------------------------------------------------

struct ForestFactorization {
    std::vector<ForestMor> degeneracies;
    ForestMor iso;
    std::vector<ForestMor> faces;  // faces.front() includes into the original target
};

// degeneracies, then an isomorphism, then elementary face inclusions;
// the greedy descent makes the word canonical
ForestFactorization factorize_forest(const ForestMor& m);
ForestMor recompose_forest(const ForestFactorization& w);

std::string to_dot(const Forest& f, const std::string& graph_name);

}  // namespace forestcalc
