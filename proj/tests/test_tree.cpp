#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "forestcalc/tree.hpp"

#include <algorithm>
#include <set>

using namespace forestcalc;

namespace {

int eid(const Tree& t, const std::string& name) {
    for (int e = 0; e < t.edge_count(); ++e)
        if (t.names[e] == name) return e;
    REQUIRE(false);
    return -1;
}

// ternary root vertex p on a with inputs b,e,f; q on b with inputs c,d; stump r on e
Tree six_edge_tree() {
    return build_tree(
        {
            {"a", std::nullopt},
            {"b", {{"a", 0}}},
            {"e", {{"a", 1}}},
            {"f", {{"a", 2}}},
            {"c", {{"b", 0}}},
            {"d", {{"b", 1}}},
        },
        {"e"});
}

// binary root vertex whose inputs carry a 3-corolla and a 4-corolla
Tree asym_tree() {
    std::vector<ParentEntry> spec{
        {"a", std::nullopt}, {"b", {{"a", 0}}}, {"c", {{"a", 1}}},
    };
    for (int i = 0; i < 3; ++i) spec.push_back({"b" + std::to_string(i), {{"b", i}}});
    for (int i = 0; i < 4; ++i) spec.push_back({"c" + std::to_string(i), {{"c", i}}});
    return build_tree(spec);
}

bool same_mor(const OmegaMor& a, const OmegaMor& b) {
    return a.source == b.source && a.target == b.target && a.edgeMap == b.edgeMap;
}

}  // namespace

TEST_CASE("construction and validation") {
    Tree t = six_edge_tree();
    CHECK(t.edge_count() == 6);
    CHECK(t.vertex_count() == 3);
    CHECK_FALSE(t.open());
    CHECK_FALSE(t.is_eta());
    CHECK(t.names[t.root] == "a");
    CHECK(t.is_inner_edge(eid(t, "b")));
    CHECK(t.is_inner_edge(eid(t, "e")));
    CHECK(t.is_leaf_edge(eid(t, "c")));
    CHECK(t.is_leaf_edge(eid(t, "f")));
    CHECK(t.inner_edges().size() == 2);
    CHECK(t.leaf_vertices().size() == 2);  // q and the stump
    CHECK(t.branch(eid(t, "b")).size() == 3);
    CHECK(t.at_or_below(eid(t, "a"), eid(t, "d")));
    CHECK_FALSE(t.at_or_below(eid(t, "b"), eid(t, "f")));

    CHECK(eta().is_eta());
    CHECK(corolla(0).edge_count() == 1);
    CHECK(corolla(0).vertex_count() == 1);
    CHECK_FALSE(corolla(0).open());
    CHECK(corolla(3).open());
    CHECK(linear_tree(3).edge_count() == 4);
    CHECK(linear_tree(3).inner_edges().size() == 2);

    CHECK_THROWS_AS(build_tree({{"a", std::nullopt}, {"b", std::nullopt}}), MultipleRoots);
    CHECK_THROWS_AS(build_tree({{"a", {{"b", 0}}}, {"b", {{"a", 0}}}}), CycleDetected);
    CHECK_THROWS_AS(build_tree({{"a", std::nullopt}, {"b", {{"z", 0}}}}), DanglingVertex);
    CHECK_THROWS_AS(build_tree({{"a", std::nullopt}, {"b", {{"a", 1}}}}), DanglingVertex);

    Tree t2 = build_tree_from_vertices(
        {"c", "d", "b", "f", "e", "a"}, "a",
        {{{"b", "e", "f"}, "a"}, {{"c", "d"}, "b"}, {{}, "e"}});
    CHECK(t == t2);
    CHECK_THROWS_AS(build_tree_from_vertices({"a", "b"}, "b", {{{"b"}, "a"}}), MultipleRoots);
}

TEST_CASE("canonical form is stable under relabelling") {
    Tree t = six_edge_tree();
    Tree s = build_tree(
        {
            {"f", {{"a", 2}}},
            {"d", {{"b", 1}}},
            {"a", std::nullopt},
            {"e", {{"a", 1}}},
            {"c", {{"b", 0}}},
            {"b", {{"a", 0}}},
        },
        {"e"});
    CHECK(t == s);
    CHECK(t.enc() == s.enc());
    Tree renamed = build_tree(
        {
            {"x1", std::nullopt},
            {"x2", {{"x1", 0}}},
            {"x3", {{"x1", 1}}},
            {"x4", {{"x1", 2}}},
            {"x5", {{"x2", 0}}},
            {"x6", {{"x2", 1}}},
        },
        {"x3"});
    CHECK(t == renamed);
}

TEST_CASE("operation regions") {
    Tree t = six_edge_tree();
    const int a = eid(t, "a"), b = eid(t, "b"), c = eid(t, "c"), d = eid(t, "d"),
              e = eid(t, "e"), f = eid(t, "f");

    auto sorted = [](std::vector<int> v) {
        std::sort(v.begin(), v.end());
        return v;
    };

    // identity operation
    auto idreg = op_region(t, b, {b});
    REQUIRE(idreg);
    CHECK(idreg->empty());

    // p composed with the stump: frontier {b,f}, the stump sits inside the region
    auto pr = op_region(t, a, sorted({b, f}));
    REQUIRE(pr);
    CHECK(pr->size() == 2);

    // p composed with q: frontier {c,d,e,f}
    auto pq = op_region(t, a, sorted({c, d, e, f}));
    REQUIRE(pq);
    CHECK(pq->size() == 2);

    // the full tree as one operation
    auto whole = op_region(t, a, sorted({c, d, f}));
    REQUIRE(whole);
    CHECK(whole->size() == 3);

    // f is a dangling leaf outside the frontier
    CHECK_FALSE(op_region(t, a, sorted({b, e})));
    // b lies below d: comparable frontier
    CHECK_FALSE(op_region(t, a, sorted({b, c, d, f})));
    // nullary region needs a vertex above the root
    CHECK_FALSE(op_region(t, c, {}));
    auto stump_reg = op_region(t, e, {});
    REQUIRE(stump_reg);
    CHECK(stump_reg->size() == 1);
}

TEST_CASE("morphism validity, composition, iso") {
    Tree t = six_edge_tree();
    Tree c2 = corolla(2);

    OmegaMor f{c2, t, {}};
    f.edgeMap.assign(3, -1);
    f.edgeMap[c2.root] = eid(t, "b");
    f.edgeMap[c2.verts[0].in[0]] = eid(t, "c");
    f.edgeMap[c2.verts[0].in[1]] = eid(t, "d");
    CHECK(valid_omega_mor(f));
    CHECK_FALSE(is_iso(f));

    OmegaMor bad = f;
    bad.edgeMap[c2.verts[0].in[1]] = eid(t, "c");
    CHECK_FALSE(valid_omega_mor(bad));

    // forgetting an input of a vertex is not allowed
    OmegaMor forget{corolla(1), c2, {}};
    forget.edgeMap = {c2.root, c2.verts[0].in[0]};
    CHECK_FALSE(valid_omega_mor(forget));

    CHECK(valid_omega_mor(identity_mor(t)));
    CHECK(is_iso(identity_mor(t)));
    for (const auto& am : automorphisms(t)) {
        OmegaMor g{t, t, am};
        CHECK(is_iso(g));
        CHECK(same_mor(compose(g, identity_mor(t)), g));
    }
}

TEST_CASE("automorphism counts") {
    CHECK(automorphisms(eta()).size() == 1);
    CHECK(automorphisms(corolla(3)).size() == 6);
    CHECK(automorphisms(six_edge_tree()).size() == 2);  // swap c,d only
    CHECK(automorphisms(asym_tree()).size() == 144);    // 3! * 4!

    // symmetric: binary root with two binary corollas on top, 2*2*2
    std::vector<ParentEntry> spec{{"a", std::nullopt}, {"b", {{"a", 0}}}, {"c", {{"a", 1}}}};
    for (int i = 0; i < 2; ++i) {
        spec.push_back({"b" + std::to_string(i), {{"b", i}}});
        spec.push_back({"c" + std::to_string(i), {{"c", i}}});
    }
    CHECK(automorphisms(build_tree(spec)).size() == 8);
}

TEST_CASE("elementary faces") {
    CHECK(elementary_faces(eta()).empty());

    // corolla faces are the n+1 edge inclusions
    for (int n = 0; n <= 4; ++n) {
        auto faces = elementary_faces(corolla(n));
        CHECK(static_cast<int>(faces.size()) == n + 1);
        for (const auto& fc : faces) {
            CHECK(fc.face.is_eta());
            CHECK(valid_omega_mor(fc.emb));
        }
        int leaf_kind = 0;
        for (const auto& fc : faces)
            if (fc.kind == FaceKind::leaf) ++leaf_kind;
        CHECK(leaf_kind == 1);
    }

    // linear tree: inner contraction, top chop, root subtree
    {
        auto faces = elementary_faces(linear_tree(2));
        CHECK(faces.size() == 3);
        std::multiset<FaceKind> kinds;
        for (const auto& fc : faces) {
            kinds.insert(fc.kind);
            CHECK(fc.face.edge_count() == 2);
            CHECK(valid_omega_mor(fc.emb));
        }
        CHECK(kinds.count(FaceKind::inner) == 1);
        CHECK(kinds.count(FaceKind::leaf) == 1);
        CHECK(kinds.count(FaceKind::omega_root) == 1);
    }

    // the six edge tree: two inner contractions, chop q, chop the stump,
    // no root face (the root vertex has two non-leaf inputs)
    {
        Tree t = six_edge_tree();
        auto faces = elementary_faces(t);
        CHECK(faces.size() == 4);
        for (const auto& fc : faces) CHECK(valid_omega_mor(fc.emb));
        std::multiset<FaceKind> kinds;
        for (const auto& fc : faces) kinds.insert(fc.kind);
        CHECK(kinds.count(FaceKind::inner) == 2);
        CHECK(kinds.count(FaceKind::leaf) == 2);
        CHECK(kinds.count(FaceKind::omega_root) == 0);

        // chopping the stump keeps all six edges
        for (const auto& fc : faces)
            if (fc.kind == FaceKind::leaf && fc.face.edge_count() == 6) {
                CHECK(fc.face.vertex_count() == 2);
                CHECK(fc.face.open());
            }
    }
}

TEST_CASE("factorization round trips") {
    Tree t = six_edge_tree();

    SUBCASE("identity") {
        auto w = factorize(identity_mor(t));
        CHECK(w.degeneracies.empty());
        CHECK(w.faces.empty());
        CHECK(is_iso(w.iso));
        CHECK(same_mor(recompose(w), identity_mor(t)));
    }

    SUBCASE("every elementary face embedding") {
        for (const auto& fc : elementary_faces(t)) {
            auto w = factorize(fc.emb);
            CHECK(w.degeneracies.empty());
            CHECK(w.faces.size() == 1);
            CHECK(same_mor(recompose(w), fc.emb));
        }
    }

    SUBCASE("degeneracy") {
        Tree d2 = linear_tree(2), d1 = linear_tree(1);
        OmegaMor s{d2, d1, {0, 1, 1}};
        REQUIRE(valid_omega_mor(s));
        auto w = factorize(s);
        CHECK(w.degeneracies.size() == 1);
        CHECK(w.faces.empty());
        CHECK(same_mor(recompose(w), s));
    }

    SUBCASE("mono through composite operation") {
        Tree c2 = corolla(2);
        OmegaMor f{c2, t, {}};
        f.edgeMap.assign(3, -1);
        f.edgeMap[c2.root] = eid(t, "a");
        f.edgeMap[c2.verts[0].in[0]] = eid(t, "b");
        f.edgeMap[c2.verts[0].in[1]] = eid(t, "f");
        REQUIRE(valid_omega_mor(f));  // the stump is swallowed by the composite
        auto w = factorize(f);
        CHECK(w.degeneracies.empty());
        CHECK(same_mor(recompose(w), f));
        for (const auto& fm : w.faces) CHECK(valid_omega_mor(fm));
    }

    SUBCASE("eta onto each edge") {
        for (int e = 0; e < t.edge_count(); ++e) {
            OmegaMor f{eta(), t, {e}};
            REQUIRE(valid_omega_mor(f));
            auto w = factorize(f);
            CHECK(same_mor(recompose(w), f));
        }
    }

    SUBCASE("epi-mono mixture") {
        Tree d3 = linear_tree(3), d1 = linear_tree(1);
        OmegaMor s{d3, d1, {0, 1, 1, 1}};
        REQUIRE(valid_omega_mor(s));
        auto w = factorize(s);
        CHECK(w.degeneracies.size() == 2);
        CHECK(w.faces.empty());
        CHECK(same_mor(recompose(w), s));
    }

    SUBCASE("invalid maps throw") {
        Tree c2 = corolla(2);
        OmegaMor bad{c2, c2, {0, 1, 1}};
        CHECK_THROWS_AS(factorize(bad), InvalidMorphism);
    }
}

TEST_CASE("graft") {
    Tree g = graft(corolla(2), 1, corolla(3));
    CHECK(g.edge_count() == 6);
    CHECK(g.vertex_count() == 2);
    CHECK(g.open());
    CHECK(automorphisms(g).size() == 6);  // the grafted corolla's inputs
}

TEST_CASE("dot export mentions every edge") {
    Tree t = six_edge_tree();
    auto dot = to_dot(t, "t");
    for (int e = 0; e < t.edge_count(); ++e)
        CHECK(dot.find("\"" + t.names[e] + "\"") != std::string::npos);
}
