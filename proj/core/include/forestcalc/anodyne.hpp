#pragma once

// Horn-filling certificates. A certificate lists, step by step, which cell a
// filtration adjoins and along which horn; the verifier replays the steps
// against closure arithmetic and accepts a step only when the complex built
// so far meets the new cell's closure in exactly the stated horn. The
// certify_* builders emit the filtrations behind the Segal-core,
// generalized-horn and pushout-product statements; verify_certificate is
// deliberately independent of how they were produced.

#include "forestcalc/finpointed.hpp"
#include "forestcalc/shuffle.hpp"

#include <set>
#include <variant>

namespace forestcalc {

struct SizeBoundExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cell-level moves used to name horn faces; edges are universe ids.
FaceRef contract_face(const FaceRef& f, int e);
// removes the root operation with output r; r must head its component
FaceRef chop_root_face(const FaceRef& f, int r);
// removes operation op (all of whose inputs must be cell leaves) and its inputs
FaceRef chop_leaf_face(const FaceRef& f, int op);

// One pushout. `gen` selects the horn family:
//   InnerHorn        adjoin cell along the horn omitting contract(cell, sigma[0])
//   GeneralizedHorn  omit every contraction listed in sigma
//   RootHorn         omit the root chop at the unary root op with output
//                    `special`; marks that corolla
//   LeafHorn         omit the leaf chop at the unary op over leaf `special`;
//                    marks that corolla
//   M3               no new cells: cell is a two-op linear face whose short
//                    corollas are marked; marks the composite corolla
//   M5               tensor ambient only: adjoin everything outside
//                    boundary(left) x right and left x (single summands)
// M4 is recognized but always rejected: it concerns the infinite marked
// interval, which has no finite cell image here.
struct CertStep {
    std::string gen;
    FaceRef cell;
    std::vector<int> sigma;
    int special = -1;
    std::vector<FaceRef> marks;
    bool operator==(const CertStep&) const = default;
};

struct Certificate {
    std::variant<Forest, TensorUniverse> ambient;
    std::vector<FaceRef> start;  // maximal cells
    std::vector<FaceRef> end;
    std::vector<FaceRef> startMarks;
    std::vector<FaceRef> endMarks;
    std::vector<CertStep> steps;
};

struct VerifyReport {
    bool ok = true;
    int step = -1;  // failing step, -1 for a start or end condition
    std::string reason;
};

VerifyReport verify_certificate(const Certificate& c);

// filtration for the horn withholding the contractions of `inner`: one
// single-edge step per subset, contraction-heavy cells first
Certificate certify_generalized_horn(const Tree& t, const std::vector<int>& inner);

// filtration for the Segal core: vertex-spanned subforests in order of
// component weight, each attached along the horn withholding all of its
// inner contractions
Certificate certify_segal_core(const Forest& f);

enum class PPKind { inner, root, leaf };

// Pushout-product filtrations over f (x) g, shuffle by shuffle. `special`
// names the designated inner edge of f (inner) or the chopped leaf under a
// unary vertex (leaf); root ignores it and requires the root vertex of f to
// be unary. g must be a single tree; root and leaf need f to be one too.
Certificate certify_pushout_product(PPKind kind, const Forest& f, int special,
                                    const Forest& g);

// Pointed-category side -------------------------------------------------------

// strips identity links
NFSimplex nf_core(NFSimplex a);
// nondegenerate cores of all iterated faces, a included
std::set<NFSimplex> nf_cells_closure(const NFSimplex& a);

// face-closed set of nondegenerate chains over the surjective subcategory;
// marks are inert one-simplices held separately (cells carry no markedEdges)
struct PComplex {
    std::set<NFSimplex> cells;
    std::set<NFSimplex> marked;
    bool operator==(const PComplex&) const = default;
};

PComplex make_pcomplex(const std::vector<NFSimplex>& cells,
                       const std::vector<NFSimplex>& marked = {});

// One pushout against a pointed generator:
//   PA0  cell: 2-simplex with edges 01 and 12 marked; marks 02
//   PA1  cell: 3-simplex whose 02 and 13 composites are identities; marks
//        its four nondegenerate spine edges
//   PB0  cell: inert non-identity edge out of a present vertex; marks it
//        (the target vertex may exist already: distinct cone points of the
//        abstract pushout collapse inside a subobject)
//   PB1  cell: the apex vertex; legs: inert maps partitioning it; adjoins
//        the apex and its marked leg edges (two legs is the plain shape)
//   PC0  cell: simplex with edge 01 marked; adjoins cell and its 0th face
//   PC1  cell + hornIndex: plain inner horn
//   PC2  cell + legs from its last vertex: boundary-join horn; adjoins cell
//        (unless an identity leg already provides it degenerately) and each
//        nondegenerate leg join
struct PStep {
    std::string gen;
    NFSimplex cell;
    int hornIndex = -1;
    std::vector<PartialMap> legs;
    bool operator==(const PStep&) const = default;
};

struct PReport {
    bool ok = true;
    std::string reason;
};

// shape and attachment check only; apply separately
PReport p_anodyne_step_check(const PComplex& cur, const PStep& s);
// checked application; throws std::invalid_argument when the check fails
PComplex p_apply(const PComplex& cur, const PStep& s);

// right-cone filtration: one PB0 step per vertex, then one PC2 step per
// nondegenerate simplex, with an identity leg and an empty leg; collapsing
// the cone points is representation bookkeeping, not a step
std::vector<PStep> certify_cone(const PComplex& x);

}  // namespace forestcalc
