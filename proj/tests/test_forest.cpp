#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "forestcalc/forest.hpp"

#include <algorithm>
#include <map>

using namespace forestcalc;

namespace {

Forest etaF() { return forest_of(eta()); }

bool same_forest_mor(const ForestMor& a, const ForestMor& b) {
    return a.source == b.source && a.target == b.target && a.alpha == b.alpha &&
           a.edgeMaps == b.edgeMaps;
}

std::map<ForestFaceKind, int> kind_census(const std::vector<ForestFace>& faces) {
    std::map<ForestFaceKind, int> c;
    for (const auto& f : faces) c[f.kind]++;
    return c;
}

}  // namespace

TEST_CASE("forest structure") {
    Forest f = direct_sum(forest_of(corolla(3)), forest_of(corolla(4)));
    CHECK(f.component_count() == 2);
    CHECK(f.edge_count() == 9);
    CHECK(f.vertex_count() == 2);
    CHECK(f.offset(1) == 4);
    CHECK(f.locate(4) == std::pair<int, int>{1, 0});
    CHECK(f.global(1, 0) == 4);
    CHECK(f.open());
    CHECK_FALSE(direct_sum(f, forest_of(corolla(0))).open());

    CHECK(isomorphic_forests(f, direct_sum(forest_of(corolla(4)), forest_of(corolla(3)))));
    CHECK_FALSE(isomorphic_forests(f, forest_of(corolla(3))));

    CHECK_THROWS_AS(direct_sum(Forest{}, f), EmptyForest);
    CHECK_THROWS_AS(elementary_faces_forest(Forest{}), EmptyForest);
}

TEST_CASE("independence of component images") {
    Tree c2 = corolla(2);
    Forest src = direct_sum(etaF(), etaF());
    Forest tgt = forest_of(c2);

    ForestMor leaves{src, tgt, {0, 0}, {{1}, {2}}};
    CHECK(valid_forest_mor(leaves));

    // root and leaf are comparable
    ForestMor nested{src, tgt, {0, 0}, {{0}, {1}}};
    CHECK(validate_independence(nested) == false);
    CHECK_FALSE(valid_forest_mor(nested));
}

TEST_CASE("forest faces") {
    // a bare edge has no faces at all
    CHECK(elementary_faces_forest(etaF()).empty());

    // a corolla has the root edge and its crown of leaves
    for (int n = 1; n <= 5; ++n) {
        auto faces = elementary_faces_forest(forest_of(corolla(n)));
        REQUIRE(faces.size() == 2);
        auto census = kind_census(faces);
        CHECK(census[ForestFaceKind::leaf] == 1);
        CHECK(census[ForestFaceKind::phi_root] == 1);
        for (const auto& fc : faces) {
            CHECK(valid_forest_mor(fc.emb));
            if (fc.kind == ForestFaceKind::leaf) {
                CHECK(fc.face.component_count() == 1);
                CHECK(fc.face.components[0].is_eta());
            } else {
                CHECK(fc.face.component_count() == n);
                for (const auto& t : fc.face.components) CHECK(t.is_eta());
            }
        }
    }

    // the closed 0-corolla only chops to its root edge
    {
        auto faces = elementary_faces_forest(forest_of(corolla(0)));
        REQUIRE(faces.size() == 1);
        CHECK(faces[0].kind == ForestFaceKind::leaf);
        CHECK(faces[0].face.components[0].is_eta());
    }

    // edge summands drop one at a time
    {
        auto faces = elementary_faces_forest(direct_sum(etaF(), etaF()));
        REQUIRE(faces.size() == 2);
        for (const auto& fc : faces) {
            CHECK(fc.kind == ForestFaceKind::eta_summand);
            CHECK(fc.face.component_count() == 1);
            CHECK(valid_forest_mor(fc.emb));
        }
    }

    // faces act one summand at a time
    {
        Forest fg = direct_sum(forest_of(corolla(2)), etaF());
        auto faces = elementary_faces_forest(fg);
        REQUIRE(faces.size() == 3);
        auto census = kind_census(faces);
        CHECK(census[ForestFaceKind::leaf] == 1);
        CHECK(census[ForestFaceKind::phi_root] == 1);
        CHECK(census[ForestFaceKind::eta_summand] == 1);
    }

    // a taller tree: crowning can split a component in two
    {
        Tree t = build_tree({
            {"a", std::nullopt},
            {"b", {{"a", 0}}},
            {"c", {{"a", 1}}},
            {"b0", {{"b", 0}}},
            {"b1", {{"b", 1}}},
        });
        auto faces = elementary_faces_forest(forest_of(t));
        auto census = kind_census(faces);
        CHECK(census[ForestFaceKind::inner] == 1);
        CHECK(census[ForestFaceKind::leaf] == 1);
        CHECK(census[ForestFaceKind::phi_root] == 1);
        for (const auto& fc : faces) {
            CHECK(valid_forest_mor(fc.emb));
            if (fc.kind == ForestFaceKind::phi_root) {
                CHECK(fc.face.component_count() == 2);
                CHECK(isomorphic_forests(
                    fc.face, direct_sum(forest_of(corolla(2)), etaF())));
            }
        }
    }
}

TEST_CASE("forest automorphisms") {
    CHECK(forest_automorphisms(etaF()).size() == 1);
    CHECK(forest_automorphisms(direct_sum(etaF(), etaF())).size() == 2);
    CHECK(forest_automorphisms(direct_sum(forest_of(corolla(2)), forest_of(corolla(3)))).size() ==
          2 * 6);
    CHECK(forest_automorphisms(direct_sum(forest_of(corolla(3)), forest_of(corolla(3)))).size() ==
          2 * 6 * 6);
    for (const auto& m :
         forest_automorphisms(direct_sum(forest_of(corolla(2)), forest_of(corolla(2))))) {
        CHECK(is_forest_iso(m));
        CHECK(valid_forest_mor(m));
    }
}

TEST_CASE("forest factorization") {
    Forest fg = direct_sum(forest_of(corolla(2)), etaF());

    SUBCASE("identity") {
        auto w = factorize_forest(identity_forest_mor(fg));
        CHECK(w.degeneracies.empty());
        CHECK(w.faces.empty());
        CHECK(same_forest_mor(recompose_forest(w), identity_forest_mor(fg)));
    }

    SUBCASE("elementary face embeddings") {
        for (const auto& fc : elementary_faces_forest(fg)) {
            auto w = factorize_forest(fc.emb);
            CHECK(w.degeneracies.empty());
            CHECK(w.faces.size() == 1);
            CHECK(same_forest_mor(recompose_forest(w), fc.emb));
        }
    }

    SUBCASE("two edges onto the leaves of a corolla") {
        ForestMor m{direct_sum(etaF(), etaF()), forest_of(corolla(2)), {0, 0}, {{1}, {2}}};
        REQUIRE(valid_forest_mor(m));
        auto w = factorize_forest(m);
        CHECK(same_forest_mor(recompose_forest(w), m));
        CHECK(w.faces.size() == 1);  // the crown does it in one step
    }

    SUBCASE("degeneracy inside one component") {
        ForestMor m{direct_sum(forest_of(linear_tree(2)), etaF()),
                    direct_sum(forest_of(linear_tree(1)), etaF()),
                    {0, 1},
                    {{0, 1, 1}, {0}}};
        REQUIRE(valid_forest_mor(m));
        auto w = factorize_forest(m);
        CHECK(w.degeneracies.size() == 1);
        CHECK(w.faces.empty());
        CHECK(same_forest_mor(recompose_forest(w), m));
    }

    SUBCASE("component permutation is pure isomorphism") {
        Forest ab = direct_sum(forest_of(corolla(2)), etaF());
        Forest ba = direct_sum(etaF(), forest_of(corolla(2)));
        ForestMor m{ab, ba, {1, 0}, {{0, 1, 2}, {0}}};
        REQUIRE(valid_forest_mor(m));
        auto w = factorize_forest(m);
        CHECK(w.degeneracies.empty());
        CHECK(w.faces.empty());
        CHECK(is_forest_iso(w.iso));
        CHECK(same_forest_mor(recompose_forest(w), m));
    }

    SUBCASE("mixed word round trip") {
        // eta + eta -> (corolla leaves) inside a larger forest with a spare summand
        Forest src = direct_sum(etaF(), etaF());
        Forest tgt = direct_sum(forest_of(corolla(2)), forest_of(corolla(0)));
        ForestMor m{src, tgt, {0, 0}, {{1}, {2}}};
        REQUIRE(valid_forest_mor(m));
        auto w = factorize_forest(m);
        CHECK(same_forest_mor(recompose_forest(w), m));
        for (const auto& fm : w.faces) CHECK(valid_forest_mor(fm));
    }

    SUBCASE("invalid maps throw") {
        ForestMor bad{direct_sum(etaF(), etaF()), forest_of(corolla(2)), {0, 0}, {{0}, {1}}};
        CHECK_THROWS_AS(factorize_forest(bad), InvalidMorphism);
    }
}
