#pragma once

#include "forestcalc/forest.hpp"

#include <compare>

namespace forestcalc {

struct NotThin : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An operation with its input colour multiset (kept sorted) and output colour.
struct TOp {
    std::vector<int> in;
    int out = -1;
    auto operator<=>(const TOp&) const = default;
};

// Finite coloured operad with at most one operation per signature. The ops
// vector is sorted; duplicates may only appear through make_operad, which is
// how deliberately non-thin diagnostics enter tests.
struct ThinOperad {
    std::vector<std::string> colourNames;
    std::vector<TOp> ops;  // identities included
    bool openFlag = true;

    int colour_count() const { return static_cast<int>(colourNames.size()); }
    bool is_thin() const;
    bool has_op(const TOp& op) const;
    bool is_identity(const TOp& op) const { return op.in.size() == 1 && op.in[0] == op.out; }
};

// sorts ops, adds identities, derives openFlag; no closure or thinness check
ThinOperad make_operad(std::vector<std::string> colourNames, std::vector<TOp> ops);

// colours are the edges; ops are all (frontier, root) grafting regions within
// single components, plus identities
ThinOperad free_operad(const Forest& f);

// Boardman-Vogt tensor by saturation: generators p x colour and colour x q,
// closed under composition. Inputs must be thin; a repeated-input composite
// aborts with NotThin (it cannot arise for tensors of free operads).
ThinOperad bv_tensor(const ThinOperad& p, const ThinOperad& q);

// one colour, one operation of every arity from 1 to maxArity (no nullary)
ThinOperad com_minus(int maxArity);

struct ThinOperadMap {
    std::vector<int> colourMap;
    auto operator<=>(const ThinOperadMap&) const = default;
};

bool valid_operad_map(const ThinOperad& p, const ThinOperad& q, const ThinOperadMap& f);
// colour injectivity plus faithfulness on the operation multiset; for thin
// source and target this reduces to colour injectivity
bool is_mono(const ThinOperad& p, const ThinOperad& q, const ThinOperadMap& f);

// all operad maps free_operad(f) -> p, one per edge colouring whose vertex
// images are operations of p
std::vector<ThinOperadMap> dendrices(const ThinOperad& p, const Forest& f);

// maximal tree-shaped subobjects, grown from root colours (never an input of
// a non-identity op) through indecomposable operations; edges named by colour
std::vector<Tree> maximal_subtrees(const ThinOperad& p);

}  // namespace forestcalc
