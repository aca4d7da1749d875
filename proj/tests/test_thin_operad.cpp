#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "forestcalc/thin_operad.hpp"

#include <algorithm>

using namespace forestcalc;

namespace {

int colour_id(const ThinOperad& p, const std::string& name) {
    for (int c = 0; c < p.colour_count(); ++c)
        if (p.colourNames[c] == name) return c;
    REQUIRE(false);
    return -1;
}

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

TOp op_of(const ThinOperad& p, std::vector<std::string> in, const std::string& out) {
    TOp op;
    for (const auto& n : in) op.in.push_back(colour_id(p, n));
    std::sort(op.in.begin(), op.in.end());
    op.out = colour_id(p, out);
    return op;
}

ThinOperadMap identity_map(const ThinOperad& p) {
    ThinOperadMap m;
    m.colourMap.resize(p.colour_count());
    for (int c = 0; c < p.colour_count(); ++c) m.colourMap[c] = c;
    return m;
}

}  // namespace

TEST_CASE("free operads") {
    auto pe = free_operad(forest_of(eta()));
    CHECK(pe.colour_count() == 1);
    CHECK(pe.ops.size() == 1);
    CHECK(pe.openFlag);

    auto p2 = free_operad(forest_of(corolla(2)));
    CHECK(p2.colour_count() == 3);
    CHECK(p2.ops.size() == 4);  // three identities and the vertex
    CHECK(p2.is_thin());

    auto p0 = free_operad(forest_of(corolla(0)));
    CHECK(p0.ops.size() == 2);
    CHECK_FALSE(p0.openFlag);

    auto pt = free_operad(forest_of(six_edge_tree()));
    CHECK_FALSE(pt.openFlag);
    CHECK(pt.is_thin());
    // the three vertices, the inner composite, the stump-swallowing
    // composites, and the full-tree operation
    CHECK(pt.has_op(op_of(pt, {"b", "e", "f"}, "a")));
    CHECK(pt.has_op(op_of(pt, {"c", "d"}, "b")));
    CHECK(pt.has_op(op_of(pt, {}, "e")));
    CHECK(pt.has_op(op_of(pt, {"b", "f"}, "a")));
    CHECK(pt.has_op(op_of(pt, {"c", "d", "e", "f"}, "a")));
    CHECK(pt.has_op(op_of(pt, {"c", "d", "f"}, "a")));
    CHECK_FALSE(pt.has_op(op_of(pt, {"c", "f"}, "a")));
    // identities + 3 vertices + 3 composites
    CHECK(pt.ops.size() == 6 + 6);

    // summands never interact
    auto psum = free_operad(direct_sum(forest_of(corolla(1)), forest_of(corolla(1))));
    CHECK(psum.colour_count() == 4);
    CHECK(psum.ops.size() == 4 + 2);
    for (const auto& op : psum.ops)
        for (int c : op.in) CHECK((c < 2) == (op.out < 2));
}

TEST_CASE("tensor of interval with interval") {
    auto d1 = free_operad(forest_of(linear_tree(1)));
    auto t = bv_tensor(d1, d1);
    CHECK(t.colour_count() == 4);
    CHECK(t.ops.size() == 9);
    CHECK(t.is_thin());
    // composition closure
    for (const auto& g : t.ops)
        for (const auto& f : t.ops)
            for (int c : g.in)
                if (f.out == c) {
                    TOp h;
                    h.out = g.out;
                    for (int x : g.in)
                        if (x != c) h.in.push_back(x);
                    for (int x : f.in) h.in.push_back(x);
                    std::sort(h.in.begin(), h.in.end());
                    CHECK(t.has_op(h));
                }
}

TEST_CASE("tensor unit") {
    auto pe = free_operad(forest_of(eta()));
    auto q = free_operad(forest_of(six_edge_tree()));
    auto t = bv_tensor(pe, q);
    CHECK(t.colour_count() == q.colour_count());
    CHECK(t.ops == q.ops);  // the unit relabelling is the identity on indices
    CHECK(t.openFlag == q.openFlag);
}

TEST_CASE("maximal subtrees of small tensors") {
    auto d1 = free_operad(forest_of(linear_tree(1)));

    // interval x interval: the two chains through the square
    auto square = maximal_subtrees(bv_tensor(d1, d1));
    REQUIRE(square.size() == 2);
    for (const auto& s : square) {
        CHECK(s.edge_count() == 3);
        CHECK(s.vertex_count() == 2);
        for (const auto& v : s.verts) CHECK(v.in.size() == 1);
    }

    // interval x binary corolla: the vertex passes the interval as a whole
    auto c2 = free_operad(forest_of(corolla(2)));
    auto mix = maximal_subtrees(bv_tensor(d1, c2));
    REQUIRE(mix.size() == 2);
    std::multiset<int> sizes;
    for (const auto& s : mix) sizes.insert(s.edge_count());
    CHECK(sizes == std::multiset<int>{4, 5});
}

TEST_CASE("com minus truncations") {
    auto c3 = com_minus(3);
    CHECK(c3.colour_count() == 1);
    CHECK(c3.ops.size() == 3);
    CHECK(c3.openFlag);
    CHECK_FALSE(c3.is_thin());  // repeated inputs by design
}

TEST_CASE("dendrices") {
    auto pt = free_operad(forest_of(six_edge_tree()));
    CHECK(dendrices(pt, forest_of(eta())).size() ==
          static_cast<size_t>(pt.colour_count()));

    // exactly the automorphisms land isomorphically; nothing degenerate fits
    auto dx = dendrices(pt, forest_of(six_edge_tree()));
    CHECK(dx.size() == automorphisms(six_edge_tree()).size());

    auto c2ops = free_operad(forest_of(corolla(2)));
    CHECK(dendrices(c2ops, forest_of(corolla(2))).size() == 2);

    CHECK(dendrices(com_minus(3), forest_of(corolla(2))).size() == 1);
    CHECK(dendrices(com_minus(3), forest_of(corolla(3))).size() == 1);
    CHECK(dendrices(com_minus(2), forest_of(corolla(3))).empty());

    // forest shapes multiply componentwise
    auto two = dendrices(c2ops, direct_sum(forest_of(eta()), forest_of(eta())));
    CHECK(two.size() == 9);
}

TEST_CASE("monomorphism detection") {
    auto pt = free_operad(forest_of(six_edge_tree()));
    CHECK(is_mono(pt, pt, identity_map(pt)));

    // collapsing two colours is caught
    auto pe2 = free_operad(direct_sum(forest_of(eta()), forest_of(eta())));
    ThinOperadMap collapse{{0, 0}};
    CHECK(valid_operad_map(pe2, pe2, collapse));
    CHECK_FALSE(is_mono(pe2, pe2, collapse));

    // two nullary operations on a shared edge are distinct upstairs but
    // collide downstairs even though the colour map is injective
    auto src = make_operad({"spare", "glued"},
                           {{{}, 1}, {{}, 1}});
    auto dst = make_operad({"spare", "glued"}, {{{}, 1}});
    CHECK_FALSE(src.is_thin());
    ThinOperadMap f{{0, 1}};
    CHECK(valid_operad_map(src, dst, f));
    CHECK_FALSE(is_mono(src, dst, f));
}
