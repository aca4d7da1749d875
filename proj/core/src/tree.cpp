#include "forestcalc/tree.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace forestcalc {

bool Tree::open() const {
    for (const auto& v : verts)
        if (v.in.empty()) return false;
    return true;
}

int Tree::bottom(int e) const {
    for (int v = 0; v < vertex_count(); ++v)
        for (int x : verts[v].in)
            if (x == e) return v;
    return -1;
}

int Tree::parent_edge(int e) const {
    int v = bottom(e);
    return v < 0 ? -1 : verts[v].out;
}

bool Tree::at_or_below(int a, int b) const {
    for (int cur = b; cur >= 0; cur = parent_edge(cur))
        if (cur == a) return true;
    return false;
}

std::vector<int> Tree::branch(int e) const {
    std::vector<int> out;
    std::vector<int> stack{e};
    while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        out.push_back(cur);
        if (top[cur] >= 0)
            for (int x : verts[top[cur]].in) stack.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> Tree::inner_edges() const {
    std::vector<int> out;
    for (int e = 0; e < edge_count(); ++e)
        if (is_inner_edge(e)) out.push_back(e);
    return out;
}

std::vector<int> Tree::leaf_vertices() const {
    std::vector<int> out;
    for (int v = 0; v < vertex_count(); ++v) {
        bool all_leaves = true;
        for (int x : verts[v].in)
            if (top[x] >= 0) all_leaves = false;
        if (all_leaves) out.push_back(v);
    }
    return out;
}

bool Tree::verts_equal(const Tree& o) const {
    if (verts.size() != o.verts.size()) return false;
    for (size_t i = 0; i < verts.size(); ++i)
        if (verts[i].in != o.verts[i].in || verts[i].out != o.verts[i].out) return false;
    return true;
}

namespace {

std::string edge_enc(const Tree& t, int e, std::vector<std::string>& memo) {
    if (!memo[e].empty()) return memo[e];
    std::string s;
    if (t.top[e] < 0) {
        s = "l";
    } else {
        std::vector<std::string> kids;
        for (int x : t.verts[t.top[e]].in) kids.push_back(edge_enc(t, x, memo));
        std::sort(kids.begin(), kids.end());
        s = "(";
        for (const auto& k : kids) s += k;
        s += ")";
    }
    memo[e] = s;
    return s;
}

}  // namespace

const std::string& Tree::enc() const {
    if (enc_cache_.empty() && edge_count() > 0) {
        std::vector<std::string> memo(edge_count());
        enc_cache_ = edge_enc(*this, root, memo);
    }
    return enc_cache_;
}

std::pair<std::vector<int>, std::vector<int>> canonicalize(Tree& t) {
    const int E = t.edge_count(), V = t.vertex_count();
    std::vector<std::string> memo(E);
    for (int e = 0; e < E; ++e) edge_enc(t, e, memo);

    // canonical planar order: inputs sorted by subtree encoding, then by label
    for (auto& v : t.verts)
        std::stable_sort(v.in.begin(), v.in.end(), [&](int a, int b) {
            if (memo[a] != memo[b]) return memo[a] < memo[b];
            return t.names[a] < t.names[b];
        });

    std::vector<int> emap(E, -1), vmap(V, -1);
    int enext = 0, vnext = 0;
    std::vector<int> stack{t.root};
    while (!stack.empty()) {
        int e = stack.back();
        stack.pop_back();
        emap[e] = enext++;
        if (t.top[e] >= 0) {
            vmap[t.top[e]] = vnext++;
            const auto& in = t.verts[t.top[e]].in;
            for (auto it = in.rbegin(); it != in.rend(); ++it) stack.push_back(*it);
        }
    }

    Tree out;
    out.names.resize(E);
    out.top.assign(E, -1);
    out.verts.resize(V);
    out.root = 0;
    for (int e = 0; e < E; ++e) {
        out.names[emap[e]] = t.names[e];
        out.top[emap[e]] = t.top[e] < 0 ? -1 : vmap[t.top[e]];
    }
    for (int v = 0; v < V; ++v) {
        Vertex nv;
        nv.out = emap[t.verts[v].out];
        for (int x : t.verts[v].in) nv.in.push_back(emap[x]);
        out.verts[vmap[v]] = std::move(nv);
    }
    t = std::move(out);
    return {emap, vmap};
}

namespace {

void validate_and_finish(Tree& t) {
    const int E = t.edge_count();
    // every edge is output of at most one vertex, input of at most one vertex
    std::vector<int> outs(E, 0), ins(E, 0);
    for (const auto& v : t.verts) {
        outs[v.out]++;
        for (int x : v.in) ins[x]++;
    }
    for (int e = 0; e < E; ++e) {
        if (outs[e] > 1 || ins[e] > 1)
            throw DanglingVertex("edge '" + t.names[e] + "' has multiple incidences");
    }
    int roots = 0;
    for (int e = 0; e < E; ++e)
        if (ins[e] == 0) {
            roots++;
            t.root = e;
        }
    if (roots == 0) throw CycleDetected("no root edge");
    if (roots > 1) throw MultipleRoots(std::to_string(roots) + " root edges");
    // acyclic and connected: every edge walks down to the root
    for (int e = 0; e < E; ++e) {
        std::set<int> seen;
        int cur = e;
        while (cur != t.root) {
            if (!seen.insert(cur).second) throw CycleDetected("cycle through edge '" + t.names[cur] + "'");
            cur = t.parent_edge(cur);
            if (cur < 0) throw CycleDetected("edge '" + t.names[e] + "' does not reach the root");
        }
    }
    canonicalize(t);
}

}  // namespace

Tree build_tree(const std::vector<ParentEntry>& spec, const std::vector<std::string>& stumps) {
    Tree t;
    std::map<std::string, int> eid;
    for (const auto& p : spec) {
        if (eid.count(p.edge)) throw DanglingVertex("duplicate edge '" + p.edge + "'");
        eid[p.edge] = static_cast<int>(t.names.size());
        t.names.push_back(p.edge);
    }
    t.top.assign(t.names.size(), -1);
    // vertices keyed by output edge
    std::map<std::string, std::vector<std::pair<int, int>>> vin;  // key -> (slot, edge)
    for (const auto& p : spec) {
        if (!p.parent) continue;
        if (!eid.count(p.parent->first))
            throw DanglingVertex("vertex key '" + p.parent->first + "' is not an edge");
        vin[p.parent->first].emplace_back(p.parent->second, eid[p.edge]);
    }
    for (const auto& s : stumps) {
        if (!eid.count(s)) throw DanglingVertex("stump edge '" + s + "' is not an edge");
        if (vin.count(s)) throw DanglingVertex("stump edge '" + s + "' also has inputs");
        vin[s] = {};
    }
    for (auto& [key, slots] : vin) {
        std::sort(slots.begin(), slots.end());
        for (size_t i = 0; i < slots.size(); ++i)
            if (slots[i].first != static_cast<int>(i))
                throw DanglingVertex("input slots of vertex '" + key + "' are not 0..n-1");
        Vertex v;
        v.out = eid[key];
        for (auto& [slot, e] : slots) v.in.push_back(e);
        t.top[eid[key]] = static_cast<int>(t.verts.size());
        t.verts.push_back(std::move(v));
    }
    if (t.names.empty()) throw MultipleRoots("0 root edges");
    validate_and_finish(t);
    return t;
}

Tree build_tree_from_vertices(
    const std::vector<std::string>& edges, const std::string& root,
    const std::vector<std::pair<std::vector<std::string>, std::string>>& vertices) {
    Tree t;
    std::map<std::string, int> eid;
    for (const auto& e : edges) {
        if (eid.count(e)) throw DanglingVertex("duplicate edge '" + e + "'");
        eid[e] = static_cast<int>(t.names.size());
        t.names.push_back(e);
    }
    t.top.assign(t.names.size(), -1);
    for (const auto& [in, out] : vertices) {
        if (!eid.count(out)) throw DanglingVertex("vertex output '" + out + "' is not an edge");
        Vertex v;
        v.out = eid[out];
        for (const auto& x : in) {
            if (!eid.count(x)) throw DanglingVertex("vertex input '" + x + "' is not an edge");
            v.in.push_back(eid[x]);
        }
        if (t.top[v.out] >= 0) throw DanglingVertex("edge '" + out + "' is the output of two vertices");
        t.top[v.out] = static_cast<int>(t.verts.size());
        t.verts.push_back(std::move(v));
    }
    if (t.names.empty()) throw MultipleRoots("0 root edges");
    validate_and_finish(t);
    if (!eid.count(root) || t.names[t.root] != root)
        throw MultipleRoots("declared root '" + root + "' is not the unique non-input edge");
    return t;
}

Tree eta() {
    Tree t;
    t.names = {"0"};
    t.top = {-1};
    t.root = 0;
    return t;
}

Tree corolla(int n) {
    std::vector<ParentEntry> spec{{"r", std::nullopt}};
    for (int i = 0; i < n; ++i) spec.push_back({"l" + std::to_string(i), {{"r", i}}});
    if (n == 0) return build_tree(spec, {"r"});
    return build_tree(spec);
}

Tree linear_tree(int n) {
    std::vector<ParentEntry> spec{{"0", std::nullopt}};
    for (int i = 1; i <= n; ++i)
        spec.push_back({std::to_string(i), {{std::to_string(i - 1), 0}}});
    return build_tree(spec);
}

Tree graft(const Tree& lower, int leaf, const Tree& upper) {
    assert(lower.is_leaf_edge(leaf));
    Tree t = lower;
    const int E0 = lower.edge_count();
    // upper's root is identified with `leaf`; other upper edges are appended
    std::vector<int> umap(upper.edge_count());
    for (int e = 0; e < upper.edge_count(); ++e) {
        if (e == upper.root) {
            umap[e] = leaf;
        } else {
            umap[e] = static_cast<int>(t.names.size());
            t.names.push_back(lower.names[leaf] + "." + upper.names[e]);
            t.top.push_back(-1);
        }
    }
    (void)E0;
    for (const auto& v : upper.verts) {
        Vertex nv;
        nv.out = umap[v.out];
        for (int x : v.in) nv.in.push_back(umap[x]);
        t.top[nv.out] = static_cast<int>(t.verts.size());
        t.verts.push_back(std::move(nv));
    }
    canonicalize(t);
    return t;
}

// Morphisms ----------------------------------------------------------------

std::optional<std::vector<int>> op_region(const Tree& t, int r, const std::vector<int>& L) {
    if (L.size() == 1 && L[0] == r) return std::vector<int>{};
    for (size_t i = 0; i + 1 < L.size(); ++i)
        if (L[i] == L[i + 1]) return std::nullopt;
    for (int l : L)
        if (l == r) return std::nullopt;
    if (t.top[r] < 0) return std::nullopt;
    std::set<int> inL(L.begin(), L.end());
    std::set<int> region{t.top[r]};
    for (int l : L) {
        int cur = l;
        while (cur != r) {
            int v = t.bottom(cur);
            if (v < 0) return std::nullopt;  // l is not above r
            region.insert(v);
            cur = t.verts[v].out;
        }
    }
    // close upward: any non-frontier input must continue into the region
    std::vector<int> work(region.begin(), region.end());
    while (!work.empty()) {
        int v = work.back();
        work.pop_back();
        for (int x : t.verts[v].in) {
            if (inL.count(x)) continue;
            int w = t.top[x];
            if (w < 0) return std::nullopt;  // dangling leaf not in the frontier
            if (region.insert(w).second) work.push_back(w);
        }
    }
    // no frontier edge may sit below region vertices
    for (int v : region)
        if (inL.count(t.verts[v].out)) return std::nullopt;
    return std::vector<int>(region.begin(), region.end());
}

bool valid_omega_mor(const OmegaMor& m) {
    if (static_cast<int>(m.edgeMap.size()) != m.source.edge_count()) return false;
    for (int x : m.edgeMap)
        if (x < 0 || x >= m.target.edge_count()) return false;
    for (const auto& v : m.source.verts) {
        std::vector<int> L;
        for (int x : v.in) L.push_back(m.edgeMap[x]);
        std::sort(L.begin(), L.end());
        if (std::adjacent_find(L.begin(), L.end()) != L.end()) return false;
        if (!op_region(m.target, m.edgeMap[v.out], L)) return false;
    }
    return true;
}

OmegaMor identity_mor(const Tree& t) {
    OmegaMor m{t, t, {}};
    m.edgeMap.resize(t.edge_count());
    std::iota(m.edgeMap.begin(), m.edgeMap.end(), 0);
    return m;
}

OmegaMor compose(const OmegaMor& g, const OmegaMor& f) {
    assert(f.target == g.source);
    OmegaMor m{f.source, g.target, {}};
    m.edgeMap.resize(f.edgeMap.size());
    for (size_t i = 0; i < f.edgeMap.size(); ++i) m.edgeMap[i] = g.edgeMap[f.edgeMap[i]];
    return m;
}

bool is_iso(const OmegaMor& m) {
    if (m.source.edge_count() != m.target.edge_count()) return false;
    if (m.source.vertex_count() != m.target.vertex_count()) return false;
    std::vector<int> inv(m.target.edge_count(), -1);
    for (int e = 0; e < m.source.edge_count(); ++e) {
        if (m.edgeMap[e] < 0 || m.edgeMap[e] >= m.target.edge_count()) return false;
        if (inv[m.edgeMap[e]] >= 0) return false;
        inv[m.edgeMap[e]] = e;
    }
    if (!valid_omega_mor(m)) return false;
    // bijective and valid still allows vertices onto composite regions
    // (a stump chop is edge-bijective); demand singleton regions throughout
    for (const auto& v : m.source.verts) {
        std::vector<int> L;
        for (int x : v.in) L.push_back(m.edgeMap[x]);
        std::sort(L.begin(), L.end());
        auto reg = op_region(m.target, m.edgeMap[v.out], L);
        if (!reg || reg->size() != 1) return false;
    }
    return true;
}

namespace {

using EdgeMapList = std::vector<std::vector<int>>;

// all structure-preserving bijections branch(a) -> branch(b); encodings must agree
void branch_bijections(const Tree& t, int a, int b, const std::vector<std::string>& memo,
                       EdgeMapList& acc) {
    EdgeMapList local;
    {
        std::vector<int> base(t.edge_count(), -1);
        base[a] = b;
        local.push_back(base);
    }
    if (t.top[a] < 0) {
        acc = local;
        return;
    }
    const auto& ain = t.verts[t.top[a]].in;
    const auto& bin = t.verts[t.top[b]].in;
    // group children by encoding; canonical order makes equal groups contiguous
    size_t i = 0;
    while (i < ain.size()) {
        size_t j = i;
        while (j < ain.size() && memo[ain[j]] == memo[ain[i]]) ++j;
        std::vector<int> idx(j - i);
        std::iota(idx.begin(), idx.end(), 0);
        EdgeMapList group_maps;
        do {
            EdgeMapList combo{std::vector<int>(t.edge_count(), -1)};
            for (size_t k = 0; k < idx.size(); ++k) {
                EdgeMapList sub;
                branch_bijections(t, ain[i + k], bin[i + idx[k]], memo, sub);
                EdgeMapList next;
                for (const auto& c : combo)
                    for (const auto& s : sub) {
                        auto merged = c;
                        for (int e = 0; e < t.edge_count(); ++e)
                            if (s[e] >= 0) merged[e] = s[e];
                        next.push_back(std::move(merged));
                    }
                combo = std::move(next);
            }
            for (auto& c : combo) group_maps.push_back(std::move(c));
        } while (std::next_permutation(idx.begin(), idx.end()));
        EdgeMapList next;
        for (const auto& l : local)
            for (const auto& g : group_maps) {
                auto merged = l;
                for (int e = 0; e < t.edge_count(); ++e)
                    if (g[e] >= 0) merged[e] = g[e];
                next.push_back(std::move(merged));
            }
        local = std::move(next);
        i = j;
    }
    acc = local;
}

}  // namespace

std::vector<std::vector<int>> automorphisms(const Tree& t) {
    if (t.is_eta()) return {{0}};
    std::vector<std::string> memo(t.edge_count());
    for (int e = 0; e < t.edge_count(); ++e) edge_enc(t, e, memo);
    EdgeMapList maps;
    branch_bijections(t, t.root, t.root, memo, maps);
    return maps;
}

// Faces ----------------------------------------------------------------------

namespace {

// rebuilds a raw sub/quotient structure and canonicalizes, returning the
// composite map new-canonical-edge -> old-tree-edge
std::pair<Tree, std::vector<int>> finish_face(Tree raw, std::vector<int> rawToOld) {
    auto [emap, vmap] = canonicalize(raw);
    (void)vmap;
    std::vector<int> newToOld(raw.edge_count());
    for (size_t rawId = 0; rawId < emap.size(); ++rawId)
        newToOld[emap[rawId]] = rawToOld[rawId];
    return {std::move(raw), std::move(newToOld)};
}

}  // namespace

std::pair<Tree, std::vector<int>> contract_edge(const Tree& t, int e) {
    assert(t.is_inner_edge(e));
    const int u = t.top[e], v = t.bottom(e);
    Tree raw;
    std::vector<int> rawToOld;
    std::vector<int> oldToRaw(t.edge_count(), -1);
    for (int x = 0; x < t.edge_count(); ++x) {
        if (x == e) continue;
        oldToRaw[x] = static_cast<int>(rawToOld.size());
        rawToOld.push_back(x);
        raw.names.push_back(t.names[x]);
    }
    raw.top.assign(rawToOld.size(), -1);
    for (int w = 0; w < t.vertex_count(); ++w) {
        if (w == u) continue;
        Vertex nv;
        nv.out = oldToRaw[t.verts[w].out];
        for (int x : t.verts[w].in) {
            if (w == v && x == e) {
                for (int y : t.verts[u].in) nv.in.push_back(oldToRaw[y]);
            } else {
                nv.in.push_back(oldToRaw[x]);
            }
        }
        raw.top[nv.out] = static_cast<int>(raw.verts.size());
        raw.verts.push_back(std::move(nv));
    }
    raw.root = oldToRaw[t.root];
    return finish_face(std::move(raw), std::move(rawToOld));
}

std::pair<Tree, std::vector<int>> chop_leaf_vertex(const Tree& t, int v) {
    Tree raw;
    std::vector<int> rawToOld;
    std::vector<int> oldToRaw(t.edge_count(), -1);
    std::set<int> dropped(t.verts[v].in.begin(), t.verts[v].in.end());
    for (int x = 0; x < t.edge_count(); ++x) {
        if (dropped.count(x)) continue;
        oldToRaw[x] = static_cast<int>(rawToOld.size());
        rawToOld.push_back(x);
        raw.names.push_back(t.names[x]);
    }
    raw.top.assign(rawToOld.size(), -1);
    for (int w = 0; w < t.vertex_count(); ++w) {
        if (w == v) continue;
        Vertex nv;
        nv.out = oldToRaw[t.verts[w].out];
        for (int x : t.verts[w].in) nv.in.push_back(oldToRaw[x]);
        raw.top[nv.out] = static_cast<int>(raw.verts.size());
        raw.verts.push_back(std::move(nv));
    }
    raw.root = oldToRaw[t.root];
    return finish_face(std::move(raw), std::move(rawToOld));
}

std::pair<Tree, std::vector<int>> subtree_above(const Tree& t, int e) {
    auto edges = t.branch(e);
    Tree raw;
    std::vector<int> rawToOld;
    std::vector<int> oldToRaw(t.edge_count(), -1);
    for (int x : edges) {
        oldToRaw[x] = static_cast<int>(rawToOld.size());
        rawToOld.push_back(x);
        raw.names.push_back(t.names[x]);
    }
    raw.top.assign(rawToOld.size(), -1);
    for (int w = 0; w < t.vertex_count(); ++w) {
        if (oldToRaw[t.verts[w].out] < 0) continue;
        Vertex nv;
        nv.out = oldToRaw[t.verts[w].out];
        for (int x : t.verts[w].in) nv.in.push_back(oldToRaw[x]);
        raw.top[nv.out] = static_cast<int>(raw.verts.size());
        raw.verts.push_back(std::move(nv));
    }
    raw.root = oldToRaw[e];
    return finish_face(std::move(raw), std::move(rawToOld));
}

std::vector<TreeFace> elementary_faces(const Tree& t) {
    std::vector<TreeFace> out;
    if (t.is_eta()) return out;
    if (t.vertex_count() == 1) {
        // a corolla has the n+1 edge inclusions as its faces
        auto mk = [&](FaceKind kind, int datum, int edge) {
            Tree f = eta();
            f.names = {t.names[edge]};
            out.push_back({kind, datum, f, OmegaMor{f, t, {edge}}});
        };
        mk(FaceKind::leaf, 0, t.verts[0].out);
        for (int x : t.verts[0].in) mk(FaceKind::omega_root, x, x);
        return out;
    }
    for (int e : t.inner_edges()) {
        auto [f, m] = contract_edge(t, e);
        out.push_back({FaceKind::inner, e, f, OmegaMor{f, t, m}});
    }
    for (int v : t.leaf_vertices()) {
        auto [f, m] = chop_leaf_vertex(t, v);
        out.push_back({FaceKind::leaf, v, f, OmegaMor{f, t, m}});
    }
    {
        const Vertex& vr = t.verts[t.top[t.root]];
        std::vector<int> inner;
        for (int x : vr.in)
            if (t.top[x] >= 0) inner.push_back(x);
        if (inner.size() == 1) {
            auto [f, m] = subtree_above(t, inner[0]);
            out.push_back({FaceKind::omega_root, inner[0], f, OmegaMor{f, t, m}});
        }
    }
    return out;
}

// Factorization ---------------------------------------------------------------

std::pair<Tree, std::vector<int>> collapse_unary_vertex(const Tree& t, int v) {
    assert(t.verts[v].in.size() == 1);
    const int ein = t.verts[v].in[0], eout = t.verts[v].out;
    Tree raw;
    std::vector<int> oldToRaw(t.edge_count(), -1);
    std::vector<int> rawToOld;
    for (int x = 0; x < t.edge_count(); ++x) {
        if (x == ein) continue;
        oldToRaw[x] = static_cast<int>(rawToOld.size());
        rawToOld.push_back(x);
        raw.names.push_back(t.names[x]);
    }
    oldToRaw[ein] = oldToRaw[eout];
    raw.top.assign(rawToOld.size(), -1);
    for (int w = 0; w < t.vertex_count(); ++w) {
        if (w == v) continue;
        Vertex nv;
        nv.out = oldToRaw[t.verts[w].out];
        for (int x : t.verts[w].in) nv.in.push_back(oldToRaw[x]);
        raw.top[nv.out] = static_cast<int>(raw.verts.size());
        raw.verts.push_back(std::move(nv));
    }
    raw.root = oldToRaw[t.root];
    auto [emap, vmap] = canonicalize(raw);
    (void)vmap;
    // map old S edge -> new canonical edge (a surjection, both merged edges land together)
    std::vector<int> oldToNew(t.edge_count());
    for (int x = 0; x < t.edge_count(); ++x) oldToNew[x] = emap[oldToRaw[x]];
    return {std::move(raw), std::move(oldToNew)};
}

namespace {

struct ImageData {
    std::set<int> edges;                           // in current-tree ids
    std::vector<std::pair<std::vector<int>, int>> ops;  // (sorted frontier, root) per source vertex
};

bool image_is_whole(const ImageData& img, const Tree& cur) {
    return static_cast<int>(img.edges.size()) == cur.edge_count() &&
           static_cast<int>(img.ops.size()) == cur.vertex_count();
}

ImageData remap_image(const ImageData& img, const std::vector<int>& newToOld) {
    std::vector<int> oldToNew;
    for (size_t n = 0; n < newToOld.size(); ++n) {
        if (newToOld[n] >= static_cast<int>(oldToNew.size()))
            oldToNew.resize(newToOld[n] + 1, -1);
        oldToNew[newToOld[n]] = static_cast<int>(n);
    }
    ImageData out;
    for (int e : img.edges) out.edges.insert(oldToNew[e]);
    for (const auto& [L, r] : img.ops) {
        std::vector<int> L2;
        for (int l : L) L2.push_back(oldToNew[l]);
        std::sort(L2.begin(), L2.end());
        out.ops.emplace_back(std::move(L2), oldToNew[r]);
    }
    return out;
}

}  // namespace

OmegaFactorization factorize(const OmegaMor& f) {
    if (!valid_omega_mor(f)) throw InvalidMorphism("edge map is not an operad map");
    OmegaFactorization w;

    // degeneracy part: strip unary vertices mapped to identity operations
    OmegaMor cur = f;
    for (;;) {
        int found = -1;
        for (int v = 0; v < cur.source.vertex_count(); ++v)
            if (cur.source.verts[v].in.size() == 1 &&
                cur.edgeMap[cur.source.verts[v].in[0]] == cur.edgeMap[cur.source.verts[v].out]) {
                found = v;
                break;
            }
        if (found < 0) break;
        auto [collapsed, oldToNew] = collapse_unary_vertex(cur.source, found);
        OmegaMor sigma{cur.source, collapsed, oldToNew};
        std::vector<int> newMap(collapsed.edge_count(), -1);
        for (int x = 0; x < cur.source.edge_count(); ++x) newMap[oldToNew[x]] = cur.edgeMap[x];
        w.degeneracies.push_back(std::move(sigma));
        cur = OmegaMor{collapsed, cur.target, std::move(newMap)};
    }
    {
        std::set<int> img(cur.edgeMap.begin(), cur.edgeMap.end());
        if (img.size() != cur.edgeMap.size())
            throw InvalidMorphism("morphism is not injective after removing degeneracies");
    }

    // face part: descend from the target to the image subobject
    ImageData img;
    for (int x : cur.edgeMap) img.edges.insert(x);
    for (const auto& v : cur.source.verts) {
        std::vector<int> L;
        for (int x : v.in) L.push_back(cur.edgeMap[x]);
        std::sort(L.begin(), L.end());
        img.ops.emplace_back(std::move(L), cur.edgeMap[v.out]);
    }
    Tree current = f.target;
    std::vector<OmegaMor> steps;
    auto push_step = [&](std::pair<Tree, std::vector<int>> fm) {
        steps.push_back(OmegaMor{fm.first, current, fm.second});
        img = remap_image(img, fm.second);
        current = std::move(fm.first);
    };
    while (!image_is_whole(img, current)) {
        // region vertices of the image inside the current tree
        std::set<int> regionVerts;
        for (const auto& [L, r] : img.ops) {
            auto reg = op_region(current, r, L);
            assert(reg);
            for (int v : *reg) regionVerts.insert(v);
        }
        int chop = -1;
        for (int v : current.leaf_vertices()) {
            if (regionVerts.count(v)) continue;
            bool touches = false;
            for (int x : current.verts[v].in)
                if (img.edges.count(x)) touches = true;
            if (!touches) {
                chop = v;
                break;
            }
        }
        if (chop >= 0) {
            push_step(chop_leaf_vertex(current, chop));
            continue;
        }
        if (!img.edges.count(current.root)) {
            if (current.vertex_count() == 1) {
                // corolla: a single edge face finishes the descent
                assert(img.edges.size() == 1);
                int e = *img.edges.begin();
                Tree face = eta();
                face.names = {current.names[e]};
                push_step({face, {e}});
                continue;
            }
            const Vertex& vr = current.verts[current.top[current.root]];
            std::vector<int> inner;
            for (int x : vr.in)
                if (current.top[x] >= 0) inner.push_back(x);
            assert(inner.size() == 1);
            push_step(subtree_above(current, inner[0]));
            continue;
        }
        int contract = -1;
        for (int e : current.inner_edges())
            if (!img.edges.count(e)) {
                contract = e;
                break;
            }
        if (contract < 0) throw InvalidMorphism("face descent is stuck");
        push_step(contract_edge(current, contract));
    }

    // middle isomorphism: cur.source -> final current, through the step chain
    std::vector<int> targetToFinal(f.target.edge_count(), -1);
    {
        std::vector<int> finalToTarget(current.edge_count());
        std::iota(finalToTarget.begin(), finalToTarget.end(), 0);
        for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
            // pre-compose: finalToTarget currently maps final -> it->source
            for (auto& x : finalToTarget) x = it->edgeMap[x];
        }
        for (int e = 0; e < current.edge_count(); ++e) targetToFinal[finalToTarget[e]] = e;
    }
    OmegaMor iso{cur.source, current, {}};
    iso.edgeMap.resize(cur.source.edge_count());
    for (int e = 0; e < cur.source.edge_count(); ++e)
        iso.edgeMap[e] = targetToFinal[cur.edgeMap[e]];
    assert(is_iso(iso));
    w.iso = std::move(iso);
    w.faces = std::move(steps);  // faces[0] includes into the original target
    return w;
}

OmegaMor recompose(const OmegaFactorization& w) {
    OmegaMor m = identity_mor(w.degeneracies.empty() ? w.iso.source
                                                     : w.degeneracies.front().source);
    for (const auto& d : w.degeneracies) m = compose(d, m);
    m = compose(w.iso, m);
    for (auto it = w.faces.rbegin(); it != w.faces.rend(); ++it) m = compose(*it, m);
    return m;
}

std::string to_dot(const Tree& t, const std::string& graph_name) {
    std::ostringstream os;
    os << "graph \"" << graph_name << "\" {\n  rankdir=BT;\n";
    for (int v = 0; v < t.vertex_count(); ++v) {
        os << "  v" << v << " [shape=circle,style=filled,label=\"\"";
        if (t.verts[v].in.empty()) os << ",xlabel=\"stump\"";
        os << "];\n";
    }
    int phantom = 0;
    for (int e = 0; e < t.edge_count(); ++e) {
        std::string lo = t.bottom(e) >= 0 ? "v" + std::to_string(t.bottom(e)) : "";
        std::string hi = t.top[e] >= 0 ? "v" + std::to_string(t.top[e]) : "";
        if (lo.empty()) {
            lo = "p" + std::to_string(phantom++);
            os << "  " << lo << " [shape=none,label=\"\"];\n";
        }
        if (hi.empty()) {
            hi = "p" + std::to_string(phantom++);
            os << "  " << hi << " [shape=none,label=\"\"];\n";
        }
        os << "  " << lo << " -- " << hi << " [label=\"" << t.names[e] << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace forestcalc
