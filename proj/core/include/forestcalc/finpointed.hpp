#pragma once

// Finite pointed sets in partial-map form, the inert/active factorization
// system, smash products, nerve simplices over the surjective-map subcategory,
// and the category of operators of a thin operad.

#include <compare>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "forestcalc/thin_operad.hpp"

namespace forestcalc {

// Thrown by check_operator_conditions.  `which` is 1, 2 or 3, matching the
// numbered conditions documented at that function.
struct ConditionFailed : std::runtime_error {
    int which;
    ConditionFailed(int which_, const std::string& witness);
};

// A partial map <m> -> <n> between finite sets {1..m} and {1..n}: defined on
// `defn` (sorted, 1-based), with `map[k]` the image of `defn[k]`.  Equivalent
// to a basepoint-preserving map of pointed sets <m>_+ -> <n>_+ where the
// undefined points go to the basepoint.
struct PartialMap {
    int m = 0;
    int n = 0;
    std::vector<int> defn;
    std::vector<int> map;

    bool total() const { return static_cast<int>(defn.size()) == m; }
    bool surjective() const;
    // Every point of <n> has exactly one preimage.
    bool inert() const;
    // Defined everywhere.
    bool active() const { return total(); }
    // Image of k, or 0 when undefined there.
    int at(int k) const;

    auto operator<=>(const PartialMap&) const = default;
};

bool valid_partial_map(const PartialMap& f);

PartialMap identity_pmap(int n);
// g after f; defined where f is defined and lands in the domain of g.
PartialMap compose(const PartialMap& g, const PartialMap& f);

// Generators: rho(n,i) is the inert <n> -> <1> defined only at i.
// forget(n,i) is the order-preserving inert <n> -> <n-1> undefined at i.
// permutation(sigma) is the bijection k -> sigma[k-1].
// mu(k,l) is the active <k+l> -> <1+l> folding {1..k} to 1 and shifting the
// remaining l points up by one.
PartialMap rho(int n, int i);
PartialMap forget(int n, int i);
PartialMap permutation(const std::vector<int>& sigma);
PartialMap mu(int k, int l);

// Unique factorization f = active . inert through <|defn(f)|>.
// Returned as {inert, active}.
std::pair<PartialMap, PartialMap> factor_inert_active(const PartialMap& f);

// Smash product <m n> -> <m' n'> on the lexicographic identification
// (k,l) = (k-1)n + l; strictly associative and preserves inert/active
// factorwise.
PartialMap smash(const PartialMap& f, const PartialMap& g);

// All partial maps <m> -> <n>, optionally restricted to surjective ones,
// in a deterministic order.
std::vector<PartialMap> all_partial_maps(int m, int n, bool surjectiveOnly = false);

// The same data as a map of pointed sets {0..m} -> {0..n}, basepoint 0.
struct PointedMap {
    int m = 0;
    int n = 0;
    std::vector<int> map;  // size m, entries in 0..n

    auto operator<=>(const PointedMap&) const = default;
};

PointedMap to_pointed(const PartialMap& f);
PartialMap from_pointed(const PointedMap& f);

// An n-simplex of the nerve of the partial-map category: a composable chain
// <sizes[0]> -> <sizes[1]> -> ... together with a set of marked chain edges.
// Marked edges must be inert; over the surjective subcategory every chain map
// must be surjective.
struct NFSimplex {
    std::vector<int> sizes;          // length dim+1
    std::vector<PartialMap> chain;   // chain[i]: <sizes[i]> -> <sizes[i+1]>
    std::vector<int> markedEdges;    // sorted subset of {0..dim-1}

    int dim() const { return static_cast<int>(sizes.size()) - 1; }

    auto operator<=>(const NFSimplex&) const = default;
};

bool valid_nf_simplex(const NFSimplex& a, bool surjectiveOnly = true);

// Face i composes at (or drops) position i; the merged edge is marked only
// when both constituents were.  Degeneracy i inserts a marked identity.
NFSimplex nf_face(const NFSimplex& a, int i);
NFSimplex nf_degeneracy(const NFSimplex& a, int i);

// Category of operators of a thin operad, truncated to colour tuples of
// length <= maxArity (the empty tuple included).  A morphism c -> d over a
// partial map phi exists when every fibre of phi carries an operation of the
// operad; thinness makes that a yes/no question, so each hom set is stored
// as the sorted list of admissible phi.
struct OperatorCategory {
    ThinOperad operad;
    int maxArity = 0;
    std::vector<std::vector<int>> objects;        // colour tuples
    std::vector<std::vector<PartialMap>> homs;    // [src * objects.size() + dst]

    int object_index(const std::vector<int>& tuple) const;  // -1 if absent
    const std::vector<PartialMap>& hom(int src, int dst) const;
    bool has_mor(int src, int dst, const PartialMap& phi) const;
};

OperatorCategory category_of_operators(const ThinOperad& p, int maxArity);

struct OperatorReport {
    long long objects = 0;
    long long morphisms = 0;
    long long liftsChecked = 0;
    long long productsChecked = 0;
};

// Verifies, over the stored hom sets:
//   1. every inert map out of an object has the canonical lift, and that
//      lift is coCartesian (composition with it is a bijection on homs);
//   2. a hom set over phi is the product of the hom sets over rho^j . phi;
//   3. the fibre over <n> is the n-th power of the fibre over <1>.
// Throws ConditionFailed naming the first violated condition.
OperatorReport check_operator_conditions(const OperatorCategory& c);

}  // namespace forestcalc
