#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "forestcalc/shuffle.hpp"
#include "forestcalc/thin_operad.hpp"

#include <algorithm>
#include <map>
#include <set>

using namespace forestcalc;

namespace {

Forest delta(int n) { return forest_of(linear_tree(n)); }
Forest cp(int p) { return forest_of(corolla(p)); }

// root r carrying a binary vertex over e and f, a unary vertex above e
Tree pinched() {
    return build_tree({{"r", {}},
                       {"e", {{"r", 0}}},
                       {"f", {{"r", 1}}},
                       {"k", {{"e", 0}}}});
}

// binary root with a unary vertex on one branch
Tree branchy() {
    return build_tree({{"rt", {}},
                       {"x", {{"rt", 0}}},
                       {"y", {{"rt", 1}}},
                       {"z", {{"x", 0}}}});
}

int eid(const Forest& f, int comp, const std::string& name) {
    const auto& names = f.components[comp].names;
    auto it = std::find(names.begin(), names.end(), name);
    REQUIRE(it != names.end());
    return f.global(comp, static_cast<int>(it - names.begin()));
}

long long choose(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// the elementary face of a one-tree forest matching kind and local datum
Subcomplex one_face(const Forest& f, ForestFaceKind kind, int datum = -1) {
    for (const ForestFace& ff : elementary_faces_forest(f))
        if (ff.kind == kind && (datum < 0 || ff.datum == datum))
            return make_subcomplex(f, {face_of_mor(ff.emb)});
    REQUIRE(false);
    return empty_subcomplex(f);
}

// simplicial face i of the linear tree with n vertices
Subcomplex delta_face(int n, int i) {
    Forest d = delta(n);
    if (i == 0) return one_face(d, ForestFaceKind::phi_root);
    if (i == n) return one_face(d, ForestFaceKind::leaf);
    return one_face(d, ForestFaceKind::inner, i);
}

std::set<FaceRef> shuffle_refs(const Forest& f, const Forest& g) {
    TensorUniverse u{f, g};
    std::set<FaceRef> out;
    for (const Shuffle& s : shuffles(f, g)) out.insert(shuffle_face(u, s));
    return out;
}

// independent enumeration of the same antichain through the operad side
std::set<FaceRef> subtree_refs(const Forest& f, const Forest& g) {
    ThinOperad tensor = bv_tensor(free_operad(f), free_operad(g));
    std::map<std::string, int> colour;
    for (int c = 0; c < tensor.colour_count(); ++c) colour[tensor.colourNames[c]] = c;
    std::set<FaceRef> out;
    for (const Tree& t : maximal_subtrees(tensor)) {
        FaceRef fr;
        for (const std::string& n : t.names) fr.edges.push_back(colour.at(n));
        for (const Vertex& v : t.verts) {
            std::vector<int> ins;
            for (int a : v.in) ins.push_back(fr.edges[a]);
            fr.ops.push_back({std::move(ins), fr.edges[v.out]});
        }
        out.insert(normalize_face(std::move(fr)));
    }
    return out;
}

int indegree_zero_count(const PercolationDag& dag) {
    std::vector<int> indeg(dag.nodes.size(), 0);
    for (auto [a, b] : dag.covers) {
        (void)a;
        ++indeg[b];
    }
    return static_cast<int>(std::count(indeg.begin(), indeg.end(), 0));
}

bool dag_connected(const PercolationDag& dag) {
    std::vector<char> seen(dag.nodes.size(), 0);
    seen[0] = 1;
    std::vector<int> work{0};
    while (!work.empty()) {
        int h = work.back();
        work.pop_back();
        for (auto [a, b] : dag.covers)
            if (a == h && !seen[b]) {
                seen[b] = 1;
                work.push_back(b);
            }
    }
    return std::count(seen.begin(), seen.end(), 0) == 0;
}

// a layering built by walking each component down from its top vertices
std::vector<int> stepwise_lambda(const Forest& f, int base) {
    std::vector<int> lam(f.vertex_count(), -1);
    for (int c = 0; c < f.component_count(); ++c) {
        const Tree& t = f.components[c];
        int off = f.voffset(c);
        for (int v = 0; v < t.vertex_count(); ++v) {
            int down = 0;  // vertices strictly below v
            int cur = v;
            while (t.bottom(t.verts[cur].out) >= 0) {
                cur = t.bottom(t.verts[cur].out);
                ++down;
            }
            lam[off + v] = base - down;
        }
    }
    return lam;
}

std::string colour_key(const NaryShuffle& s) {
    std::vector<std::string> parts;
    for (const Vertex& v : s.tree.verts) {
        std::vector<std::string> ins;
        for (int a : v.in) ins.push_back(s.tree.names[a]);
        std::sort(ins.begin(), ins.end());
        std::string p;
        for (const auto& i : ins) p += i + "|";
        parts.push_back(p + ">" + s.tree.names[v.out]);
    }
    std::sort(parts.begin(), parts.end());
    std::string key;
    for (const auto& p : parts) key += p + ";";
    return key;
}

}  // namespace

TEST_CASE("shuffles with a unit factor") {
    for (const Tree& t : {linear_tree(2), corolla(3), pinched(), branchy()}) {
        Forest f = forest_of(t);
        auto left = shuffles(forest_of(eta()), f);
        auto right = shuffles(f, forest_of(eta()));
        REQUIRE(left.size() == 1);
        REQUIRE(right.size() == 1);
        CHECK(left[0].forest.components[0] == t);
        CHECK(right[0].forest.components[0] == t);
        PercolationDag dag = percolation_order(forest_of(eta()), f);
        CHECK(dag.nodes.size() == 1);
        CHECK(dag.covers.empty());
    }
}

TEST_CASE("simplex shuffle counts are binomial") {
    for (int m = 0; m <= 3; ++m)
        for (int n = 0; n <= 3; ++n)
            CHECK(shuffles(delta(m), delta(n)).size() == static_cast<size_t>(choose(m + n, m)));
}

TEST_CASE("percolation order of two 1-simplices is a two-element chain") {
    PercolationDag dag = percolation_order(delta(1), delta(1));
    REQUIRE(dag.nodes.size() == 2);
    REQUIRE(dag.covers.size() == 1);
    CHECK(dag.covers[0] == std::pair{0, 1});
    CHECK(dag.rank == std::vector{0, 1});
    for (const Shuffle& s : dag.nodes) CHECK(s.forest.components[0] == linear_tree(2));

    // the opposite direction starts from the other interleaving
    PercolationDag rev = percolation_order(delta(1), delta(1), PercDirection::right_minimal);
    TensorUniverse u{delta(1), delta(1)};
    CHECK(shuffle_face(u, rev.nodes[0]) == shuffle_face(u, dag.nodes[1]));
    CHECK(shuffle_face(u, rev.nodes[1]) == shuffle_face(u, dag.nodes[0]));
}

TEST_CASE("percolation DAGs are graded with a unique minimum") {
    auto pairs = std::vector<std::pair<Forest, Forest>>{
        {delta(2), delta(2)},
        {cp(2), cp(2)},
        {delta(1), cp(3)},
        {cp(2), delta(2)},
        {forest_of(pinched()), delta(1)},
    };
    for (const auto& [f, g] : pairs) {
        PercolationDag dag = percolation_order(f, g);
        CHECK(indegree_zero_count(dag) == 1);
        CHECK(dag.rank[0] == 0);
        CHECK(dag_connected(dag));
        for (auto [a, b] : dag.covers) CHECK(dag.rank[b] == dag.rank[a] + 1);
    }
}

TEST_CASE("shuffles are exactly the maximal subtrees of the tensor operad") {
    auto pairs = std::vector<std::pair<Forest, Forest>>{
        {delta(1), cp(2)},
        {cp(2), cp(2)},
        {delta(2), delta(1)},
        {cp(2), cp(0)},
        {cp(0), cp(0)},
        {cp(1), cp(3)},
        {forest_of(pinched()), cp(0)},
        {forest_of(branchy()), delta(1)},
    };
    for (const auto& [f, g] : pairs) CHECK(shuffle_refs(f, g) == subtree_refs(f, g));

    auto two = shuffles(delta(1), cp(2));
    REQUIRE(two.size() == 2);
    std::set<int> sizes;
    for (const Shuffle& s : two) sizes.insert(s.forest.edge_count());
    CHECK(sizes == std::set<int>{4, 5});
}

TEST_CASE("shuffle vertices collapse to tensor generators") {
    Forest f = cp(2), g = delta(1);
    ThinOperad tensor = bv_tensor(free_operad(f), free_operad(g));
    TensorUniverse u{f, g};
    for (const Shuffle& s : shuffles(f, g))
        for (int c = 0; c < s.forest.component_count(); ++c) {
            const Tree& t = s.forest.components[c];
            int off = s.forest.offset(c);
            for (int v = 0; v < t.vertex_count(); ++v) {
                TOp op;
                for (int a : t.verts[v].in) {
                    auto [fa, ga] = s.edgePairs[off + a];
                    op.in.push_back(u.edge_id(fa, ga));
                }
                std::sort(op.in.begin(), op.in.end());
                auto [fo, go] = s.edgePairs[off + t.verts[v].out];
                op.out = u.edge_id(fo, go);
                CHECK(tensor.has_op(op));
                // a vertex moves in one factor only, the other coordinate frozen
                bool left = s.provenance[s.forest.voffset(c) + v].first;
                for (int a : t.verts[v].in) {
                    auto [fa, ga] = s.edgePairs[off + a];
                    if (left)
                        CHECK(ga == go);
                    else
                        CHECK(fa == fo);
                }
            }
        }
}

TEST_CASE("stump factors identify interleavings") {
    // both raw orders survive as nodes but describe one subobject
    PercolationDag dag = percolation_order(cp(0), cp(0));
    CHECK(dag.nodes.size() == 2);
    CHECK(shuffles(cp(0), cp(0)).size() == 1);
    CHECK(shuffles(cp(0), delta(1)).size() == 1);  // the stump composite dominates
}

TEST_CASE("shuffles distribute over direct sums") {
    Forest f = direct_sum(cp(2), delta(1));
    Forest g = cp(2);
    auto whole = shuffles(f, g);
    CHECK(whole.size() == shuffles(cp(2), g).size() * shuffles(delta(1), g).size());
    for (const Shuffle& s : whole) {
        REQUIRE(s.forest.component_count() == 2);
        // blocks pair factor components in order
        CHECK(s.edgePairs[0].first < f.offset(1));
        CHECK(s.edgePairs[s.forest.offset(1)].first >= f.offset(1));
    }
    PercolationDag dag = percolation_order(f, g);
    PercolationDag d1 = percolation_order(cp(2), g);
    PercolationDag d2 = percolation_order(delta(1), g);
    CHECK(*std::max_element(dag.rank.begin(), dag.rank.end()) ==
          *std::max_element(d1.rank.begin(), d1.rank.end()) +
              *std::max_element(d2.rank.begin(), d2.rank.end()));
}

TEST_CASE("double simplicial faces tensor as intersections") {
    for (int n : {2, 3})
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j <= n; ++j) {
                Subcomplex di = delta_face(n, i), dj = delta_face(n, j);
                Forest g = cp(2);
                TensorSubcomplex lhs = tensor_subcomplex(meet(di, dj), full_subcomplex(g));
                TensorSubcomplex rhs = meet(tensor_subcomplex(di, full_subcomplex(g)),
                                            tensor_subcomplex(dj, full_subcomplex(g)));
                CHECK(lhs == rhs);
            }
}

TEST_CASE("mixed faces tensor as intersections when a factor is open") {
    Forest f = cp(2), g = cp(2);
    for (const ForestFace& xf : elementary_faces_forest(f))
        for (const ForestFace& yf : elementary_faces_forest(g)) {
            Subcomplex x = make_subcomplex(f, {face_of_mor(xf.emb)});
            Subcomplex y = make_subcomplex(g, {face_of_mor(yf.emb)});
            TensorSubcomplex lhs = meet(tensor_subcomplex(x, full_subcomplex(g)),
                                        tensor_subcomplex(full_subcomplex(f), y));
            CHECK(lhs == tensor_subcomplex(x, y));
        }
}

TEST_CASE("closed factors break the mixed-face law") {
    Forest c0 = cp(0);
    CHECK_THROWS_AS(tensor_subcomplex(full_subcomplex(c0), full_subcomplex(c0)),
                    HypothesisViolated);
    Subcomplex bd = boundary(c0);
    TensorSubcomplex lhs = meet(tensor_subcomplex(bd, full_subcomplex(c0), false),
                                tensor_subcomplex(full_subcomplex(c0), bd, false));
    TensorSubcomplex rhs = tensor_subcomplex(bd, bd, false);
    CHECK(lhs != rhs);
    CHECK(tensor_le(rhs, lhs));
    // both boundary tensors already fill the whole stump
    CHECK(lhs.closure().size() == 2);
    CHECK(rhs.closure().size() == 1);
}

TEST_CASE("face intersections do not commute with closed tensor factors") {
    Forest f = forest_of(pinched());
    Forest g = cp(0);
    int vtx = -1;  // the unary vertex above e
    for (int v = 0; v < f.components[0].vertex_count(); ++v)
        if (f.components[0].verts[v].in.size() == 1) vtx = v;
    REQUIRE(vtx >= 0);
    Subcomplex h1 = one_face(f, ForestFaceKind::leaf, vtx);
    Subcomplex h2 = one_face(f, ForestFaceKind::inner, eid(f, 0, "e"));

    // with a simplex as the second factor both sides agree
    for (int n : {0, 1}) {
        Forest open = delta(n);
        TensorSubcomplex a = tensor_subcomplex(meet(h1, h2), full_subcomplex(open));
        TensorSubcomplex b = meet(tensor_subcomplex(h1, full_subcomplex(open)),
                                  tensor_subcomplex(h2, full_subcomplex(open)));
        CHECK(a == b);
    }

    // with the stump they differ: the images meet in a whole two-edge tree
    TensorUniverse u{f, g};
    TensorSubcomplex lhs = tensor_subcomplex(meet(h1, h2), full_subcomplex(g), false);
    TensorSubcomplex rhs = meet(tensor_subcomplex(h1, full_subcomplex(g), false),
                                tensor_subcomplex(h2, full_subcomplex(g), false));
    int rg = u.edge_id(eid(f, 0, "r"), 0);
    int fg = u.edge_id(eid(f, 0, "f"), 0);
    FaceRef spine = normalize_face({{rg, fg}, {{{fg}, rg}, {{}, fg}}});
    REQUIRE(rhs.maximal.size() == 1);
    CHECK(rhs.maximal[0] == spine);
    CHECK(tensor_le(lhs, rhs));
    CHECK(lhs != rhs);
    // the disjoint stumps miss the connecting operations entirely
    CHECK(lhs.closure().size() == 4);
    CHECK(!lhs.contains(spine));
}

TEST_CASE("tensor subcomplex validation") {
    TensorUniverse u{delta(1), delta(1)};
    CHECK_THROWS_AS(make_tensor_subcomplex(u, {FaceRef{{99}, {}}}), std::invalid_argument);
    CHECK_THROWS_AS(make_tensor_subcomplex(u, {FaceRef{{-1}, {}}}), std::invalid_argument);
    // repeated edges normalize away, matching the forest-side behaviour
    TensorSubcomplex dup = make_tensor_subcomplex(u, {FaceRef{{0, 0}, {}}});
    CHECK(dup.maximal == std::vector<FaceRef>{FaceRef{{0}, {}}});
    TensorSubcomplex ok = make_tensor_subcomplex(u, {FaceRef{{0, 3}, {}}});
    CHECK(ok.closure().size() == 3);  // each piece and their sum
}

TEST_CASE("n-ary shuffles agree with binary enumeration") {
    CHECK(nary_shuffles({delta(1)}).size() == 1);
    auto pairs = std::vector<std::pair<Forest, Forest>>{
        {delta(1), delta(1)},
        {cp(2), cp(2)},
        {delta(2), cp(1)},
        {cp(0), delta(1)},
    };
    for (const auto& [f, g] : pairs)
        CHECK(nary_shuffles({f, g}).size() == shuffles(f, g).size());
}

TEST_CASE("n-ary shuffles match iterated tensor operads") {
    auto triples = std::vector<std::vector<Forest>>{
        {delta(1), delta(1), delta(1)},
        {cp(2), cp(0), delta(1)},
    };
    for (const auto& fs : triples) {
        ThinOperad t01 = bv_tensor(free_operad(fs[0]), free_operad(fs[1]));
        ThinOperad t = bv_tensor(t01, free_operad(fs[2]));
        int n1 = fs[1].edge_count(), n2 = fs[2].edge_count();
        std::map<std::string, int> colour;
        for (int c = 0; c < t.colour_count(); ++c) colour[t.colourNames[c]] = c;
        std::set<FaceRef> fromOperad;
        for (const Tree& mt : maximal_subtrees(t)) {
            FaceRef fr;
            for (const std::string& nm : mt.names) fr.edges.push_back(colour.at(nm));
            for (const Vertex& v : mt.verts) {
                std::vector<int> ins;
                for (int a : v.in) ins.push_back(fr.edges[a]);
                fr.ops.push_back({std::move(ins), fr.edges[v.out]});
            }
            fromOperad.insert(normalize_face(std::move(fr)));
        }
        std::set<FaceRef> fromShuffles;
        for (const NaryShuffle& s : nary_shuffles(fs)) {
            FaceRef fr;
            for (const auto& c : s.edgeColours) fr.edges.push_back((c[0] * n1 + c[1]) * n2 + c[2]);
            for (const Vertex& v : s.tree.verts) {
                std::vector<int> ins;
                for (int a : v.in) ins.push_back(fr.edges[a]);
                fr.ops.push_back({std::move(ins), fr.edges[v.out]});
            }
            fromShuffles.insert(normalize_face(std::move(fr)));
        }
        CHECK(fromShuffles == fromOperad);
    }
    CHECK(nary_shuffles({delta(1), delta(1), delta(1)}).size() == 6);
    CHECK(nary_shuffles({delta(1), delta(1), delta(2)}).size() == 12);
}

TEST_CASE("grouping shapes carve out shuffle subsets") {
    std::vector<Forest> fs{cp(2), cp(2), cp(2)};

    // the grouping X1 x (X2 x X3) misses the fully mixed interleavings
    Tree comb = graft(corolla(2), 2, corolla(2));
    ExpansionInclusion inc = expansion_inclusion(comb, fs);
    CHECK(inc.grouped.size() < inc.whole.size());
    std::set<int> hit(inc.indexInWhole.begin(), inc.indexInWhole.end());
    CHECK(hit.size() == inc.grouped.size());

    // the corolla grouping is no constraint at all
    auto viaCorolla = grouped_shuffles(corolla(3), fs);
    CHECK(viaCorolla.size() == inc.whole.size());
    std::set<std::string> a, b;
    for (const auto& s : viaCorolla) a.insert(colour_key(s));
    for (const auto& s : inc.whole) b.insert(colour_key(s));
    CHECK(a == b);

    // a lone leaf is the identity grouping
    CHECK(grouped_shuffles(eta(), {fs[0]}).size() == 1);
    CHECK(expansion_inclusion(eta(), {fs[0]}).indexInWhole == std::vector{0});

    CHECK_THROWS_AS(grouped_shuffles(corolla(2), fs), std::invalid_argument);
    CHECK_THROWS_AS(nary_shuffles({direct_sum(cp(1), cp(1))}), std::invalid_argument);
    Tree stumped = build_tree({{"a", {}}, {"b", {{"a", 0}}}, {"c", {{"a", 1}}}}, {"b"});
    CHECK_THROWS_AS(grouped_shuffles(stumped, {fs[0]}), std::invalid_argument);
}

TEST_CASE("layerings grow stepwise toward the root") {
    Forest d = delta(3);
    std::vector<int> good = stepwise_lambda(d, 7);
    CHECK(valid_layering({d, good}));
    std::vector<int> bad = good;
    bad[0] += 1;
    CHECK(!valid_layering({d, bad}));
    CHECK(!valid_layering({d, {1, 1, 1}}));
    CHECK(!valid_layering({d, {1, 2}}));
    std::vector<int> neg = good;
    for (int& l : neg) l -= *std::min_element(good.begin(), good.end()) + 1;
    CHECK(!valid_layering({d, neg}));

    // components are layered independently
    Forest pair = direct_sum(delta(1), delta(2));
    std::vector<int> lam = stepwise_lambda(pair, 4);
    lam[0] += 3;  // shift the first component wholesale
    CHECK(valid_layering({pair, lam}));
}

TEST_CASE("percolation DAG renders to dot") {
    std::string dot = to_dot(percolation_order(delta(1), delta(1)));
    CHECK(dot.find("digraph percolation") != std::string::npos);
    CHECK(dot.find("s0 -> s1") != std::string::npos);
}
