#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace forestcalc {

struct CycleDetected : std::runtime_error { using std::runtime_error::runtime_error; };
struct MultipleRoots : std::runtime_error { using std::runtime_error::runtime_error; };
struct DanglingVertex : std::runtime_error { using std::runtime_error::runtime_error; };
struct InvalidMorphism : std::runtime_error { using std::runtime_error::runtime_error; };

// A vertex has its output edge below it and its ordered inputs above it.
struct Vertex {
    std::vector<int> in;
    int out = -1;
};

// Finite rooted tree. Edges and vertices are dense indices; after construction
// the structure is always in canonical form: edges are numbered in preorder of
// the canonical planar embedding (root edge = 0), vertices in discovery order.
// `names` carries display labels along; it never takes part in equality.
struct Tree {
    std::vector<std::string> names;  // per edge
    std::vector<int> top;            // per edge: vertex whose output it is, -1 for a leaf
    std::vector<Vertex> verts;
    int root = 0;

    int edge_count() const { return static_cast<int>(top.size()); }
    int vertex_count() const { return static_cast<int>(verts.size()); }
    bool is_eta() const { return verts.empty(); }
    bool is_leaf_edge(int e) const { return top[e] < 0; }
    bool is_inner_edge(int e) const { return e != root && top[e] >= 0; }
    bool open() const;

    // vertex having e among its inputs; -1 for the root edge
    int bottom(int e) const;
    // output edge of bottom(e); -1 for the root edge
    int parent_edge(int e) const;
    // true when a lies on the path from b to the root (a at or below b)
    bool at_or_below(int a, int b) const;
    // e together with everything above it
    std::vector<int> branch(int e) const;

    std::vector<int> inner_edges() const;
    // vertices all of whose inputs are leaves (stumps included)
    std::vector<int> leaf_vertices() const;

    const std::string& enc() const;  // canonical AHU encoding with stump markers

    bool operator==(const Tree& o) const { return root == o.root && top == o.top && verts_equal(o); }
    bool operator!=(const Tree& o) const { return !(*this == o); }

private:
    bool verts_equal(const Tree& o) const;
    mutable std::string enc_cache_;
};

// Construction -----------------------------------------------------------

struct ParentEntry {
    std::string edge;
    // vertex keyed by its output edge, plus the input slot it occupies
    std::optional<std::pair<std::string, int>> parent;
};

// Canonicalizes an arbitrary incidence structure given as edge -> parent vertex.
// Vertices are keyed by their output edge; `stumps` lists edges carrying a
// vertex with no inputs. Throws CycleDetected / MultipleRoots / DanglingVertex.
Tree build_tree(const std::vector<ParentEntry>& spec,
                const std::vector<std::string>& stumps = {});

// Same validation, but from explicit vertex data (the JSON shape).
Tree build_tree_from_vertices(const std::vector<std::string>& edges,
                              const std::string& root,
                              const std::vector<std::pair<std::vector<std::string>, std::string>>& vertices);

// Canonicalize a raw structure in place; returns (edge old->new, vertex old->new).
std::pair<std::vector<int>, std::vector<int>> canonicalize(Tree& t);

Tree eta();
Tree corolla(int n);
// Δ^n as a linear tree: n vertices, edge 0 the root end, edge n the leaf end
Tree linear_tree(int n);
// graft: a copy of `upper` replaces the branch above leaf edge `leaf` of lower
Tree graft(const Tree& lower, int leaf, const Tree& upper);

// Morphisms --------------------------------------------------------------

// A morphism of Ω is determined by its edge map: the tree operad is thin, so a
// vertex's image operation, when it exists, is the unique grafting region with
// the prescribed root and frontier.
struct OmegaMor {
    Tree source;
    Tree target;
    std::vector<int> edgeMap;
};

// The grafting region of target with root r and frontier exactly L (sorted, no
// duplicates): returns its vertex set, or nullopt when no such operation exists.
// L = {r} is the identity operation (empty region).
std::optional<std::vector<int>> op_region(const Tree& t, int r, const std::vector<int>& L);

bool valid_omega_mor(const OmegaMor& m);
OmegaMor identity_mor(const Tree& t);
OmegaMor compose(const OmegaMor& g, const OmegaMor& f);  // g after f
bool is_iso(const OmegaMor& m);

std::vector<std::vector<int>> automorphisms(const Tree& t);

// Elementary faces -------------------------------------------------------

enum class FaceKind { inner, leaf, omega_root };

struct TreeFace {
    FaceKind kind;
    int datum;  // inner: the contracted edge; leaf: the chopped vertex; omega_root: the surviving input edge
    Tree face;
    OmegaMor emb;
};

// Inner face per inner edge; leaf face per leaf vertex; the Ω-root face exactly
// when the root vertex has one inner input (corollas contribute their n+1 edge
// inclusions, the leaf face giving the root edge and omega_root faces the rest).
std::vector<TreeFace> elementary_faces(const Tree& t);

// contract inner edge e; returns the face and the edge map face-edge -> t-edge
std::pair<Tree, std::vector<int>> contract_edge(const Tree& t, int e);
// delete leaf vertex v and its inputs
std::pair<Tree, std::vector<int>> chop_leaf_vertex(const Tree& t, int v);
// the subtree spanned by branch(e)
std::pair<Tree, std::vector<int>> subtree_above(const Tree& t, int e);
// merge the input and output of unary vertex v; the map is the edge surjection
std::pair<Tree, std::vector<int>> collapse_unary_vertex(const Tree& t, int v);

// Factorization ----------------------------------------------------------

struct OmegaFactorization {
    std::vector<OmegaMor> degeneracies;  // applied first, source side
    OmegaMor iso;
    std::vector<OmegaMor> faces;  // applied last; faces[k+1] includes into faces[k]'s source
};

// Unique normal form: degeneracies, then an isomorphism, then elementary faces.
// Throws InvalidMorphism when the edge map is not an operad map.
OmegaFactorization factorize(const OmegaMor& f);
OmegaMor recompose(const OmegaFactorization& w);

std::string to_dot(const Tree& t, const std::string& graph_name = "tree");

}  // namespace forestcalc
