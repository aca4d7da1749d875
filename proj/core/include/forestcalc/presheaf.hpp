#pragma once

#include "forestcalc/forest.hpp"

#include <compare>
#include <memory>

namespace forestcalc {

struct AmbientMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotInnerEdge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A subobject: the edges it uses (sorted universe ids) and the operations its
// vertices map to, each a grafting region (sorted inputs, output). The pair is
// a complete invariant; edges alone cannot tell a stump from its root edge.
// The ops determine the underlying forest shape, so most queries need no
// ambient: edges in no op are bare components.
struct FaceRef {
    std::vector<int> edges;
    std::vector<std::pair<std::vector<int>, int>> ops;
    auto operator<=>(const FaceRef&) const = default;
    int size() const { return static_cast<int>(edges.size()); }
};

FaceRef normalize_face(FaceRef f);  // sorts both levels
// the subobject's own forest plus the map from its global edge ids back to
// universe ids (components ordered by smallest universe id)
std::pair<Forest, std::vector<int>> materialize_face(const FaceRef& f);
int face_component_count(const FaceRef& f);
bool face_is_eta(const FaceRef& f);
bool face_is_unary_corolla(const FaceRef& f);

// subobject order: edges contained and every op of a realized as a grafting
// region of b's forest
bool face_le(const FaceRef& a, const FaceRef& b);
// every subobject of f, f included, sorted
std::vector<FaceRef> face_closure(const FaceRef& f);

// maximal elements of the input under face_le, normalized and deduplicated
std::vector<FaceRef> face_antichain(std::vector<FaceRef> faces);
// the codimension-one faces of f (inner, leaf, crown split, summand drop),
// expressed in the same universe
std::vector<FaceRef> face_boundary_faces(const FaceRef& f);

// whole forest as a face of itself
FaceRef whole_face(const Forest& f);
// image of a forest mono in target coordinates
FaceRef face_of_mor(const ForestMor& m);
// checks region validity and component independence inside the ambient forest
bool valid_face(const Forest& ambient, const FaceRef& f);

// Subcomplexes ---------------------------------------------------------------

// maximal faces form an antichain; the downward closure is lazy and shared
// between copies
struct Subcomplex {
    Forest ambient;
    std::vector<FaceRef> maximal;

    const std::vector<FaceRef>& closure() const;  // sorted
    bool contains(const FaceRef& f) const;
    bool empty() const { return maximal.empty(); }
    bool operator==(const Subcomplex& o) const {
        return ambient == o.ambient && maximal == o.maximal;
    }
    bool operator!=(const Subcomplex& o) const { return !(*this == o); }

  private:
    mutable std::shared_ptr<const std::vector<FaceRef>> cache_;
};

// keeps only the maximal members; the presentation is then canonical
Subcomplex make_subcomplex(Forest ambient, std::vector<FaceRef> faces);
Subcomplex empty_subcomplex(Forest ambient);
Subcomplex full_subcomplex(Forest ambient);

Subcomplex boundary(const Forest& f);
// all faces except the contractions of the edges in A (global ids)
Subcomplex inner_horn(const Forest& f, const std::vector<int>& A);
// union of the subforests all of whose trees have at most one vertex
Subcomplex segal_core(const Forest& f);

Subcomplex meet(const Subcomplex& x, const Subcomplex& y);
Subcomplex join(const Subcomplex& x, const Subcomplex& y);
bool subcomplex_le(const Subcomplex& x, const Subcomplex& y);

// image of the external sum in the sum ambient: cells x ⊕ y with either side
// allowed to be absent (but not both)
Subcomplex direct_sum(const Subcomplex& x, const Subcomplex& y);

// view over the tree category: keeps the connected cells only
Subcomplex restrict_u(const Subcomplex& x);

// Markings -------------------------------------------------------------------

// marked holds nondegenerate marked 1-corollas (degenerate ones are implicit)
struct MarkedSubcomplex {
    Subcomplex base;
    std::vector<FaceRef> marked;  // sorted
    bool operator==(const MarkedSubcomplex& o) const {
        return base == o.base && marked == o.marked;
    }
};

MarkedSubcomplex flat(Subcomplex base);
MarkedSubcomplex sharp(Subcomplex base);  // marks every unary corolla cell
MarkedSubcomplex with_marks(Subcomplex base, std::vector<FaceRef> marked);
MarkedSubcomplex meet(const MarkedSubcomplex& x, const MarkedSubcomplex& y);
MarkedSubcomplex join(const MarkedSubcomplex& x, const MarkedSubcomplex& y);

}  // namespace forestcalc
