#include "forestcalc/shuffle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace forestcalc {

namespace {

std::string tuple_name(const std::vector<int>& t) {
    std::string s = "(";
    for (size_t i = 0; i < t.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(t[i]);
    }
    return s + ")";
}

std::vector<int> parse_tuple(const std::string& s) {
    std::vector<int> out;
    size_t i = 1;
    while (i < s.size() && s[i] != ')') {
        size_t j = s.find_first_of(",)", i);
        out.push_back(std::stoi(s.substr(i, j - i)));
        i = s[j] == ',' ? j + 1 : j;
    }
    return out;
}

// One factor-vertex copy inside an interleaving: `v` lives in the factor
// named by `left`, `e` is the spectator edge of the other factor.
struct SVert {
    bool left;
    int v;
    int e;
    auto operator<=>(const SVert&) const = default;
};

using VSet = std::vector<SVert>;  // sorted

// minimum of the percolation order: copies of the high factor grafted onto
// the leaves of the low one
VSet minimal_vset(const Tree& s, const Tree& t, bool leftDir) {
    const Tree& low = leftDir ? s : t;
    const Tree& high = leftDir ? t : s;
    VSet out;
    for (int v = 0; v < low.vertex_count(); ++v) out.push_back({leftDir, v, high.root});
    for (int w = 0; w < high.vertex_count(); ++w)
        for (int e = 0; e < low.edge_count(); ++e)
            if (low.is_leaf_edge(e)) out.push_back({!leftDir, w, e});
    std::sort(out.begin(), out.end());
    return out;
}

// a high-factor vertex sitting over every input of a low copy percolates
// below it; each application is one covering move
std::vector<VSet> percolation_moves(const Tree& s, const Tree& t, bool leftDir, const VSet& cur) {
    const Tree& low = leftDir ? s : t;
    const Tree& high = leftDir ? t : s;
    std::set<SVert> have(cur.begin(), cur.end());
    std::vector<VSet> out;
    for (const SVert& x : cur) {
        if (x.left != leftDir) continue;
        int w = high.top[x.e];
        if (w < 0) continue;
        bool ok = true;
        for (int a : low.verts[x.v].in)
            if (!have.count({!leftDir, w, a})) {
                ok = false;
                break;
            }
        if (!ok) continue;
        std::set<SVert> nxt = have;
        nxt.erase(x);
        for (int a : low.verts[x.v].in) nxt.erase({!leftDir, w, a});
        nxt.insert({!leftDir, w, low.verts[x.v].out});
        for (int c : high.verts[w].in) nxt.insert({leftDir, x.v, c});
        out.emplace_back(nxt.begin(), nxt.end());
    }
    return out;
}

struct BuiltBlock {
    Tree tree;                                     // names are local "(a,b)" pairs
    std::vector<std::pair<int, int>> pairs;        // per local edge
    std::vector<std::pair<bool, int>> prov;        // per local vertex
};

BuiltBlock materialize_vset(const Tree& s, const Tree& t, const VSet& vs) {
    auto nm = [](int a, int b) { return tuple_name({a, b}); };
    std::set<std::string> edgeNames;
    std::vector<std::pair<std::vector<std::string>, std::string>> vspec;
    std::map<std::string, SVert> byOut;
    for (const SVert& x : vs) {
        int a = x.left ? s.verts[x.v].out : x.e;
        int b = x.left ? x.e : t.verts[x.v].out;
        std::string out = nm(a, b);
        std::vector<std::string> ins;
        if (x.left)
            for (int p : s.verts[x.v].in) ins.push_back(nm(p, x.e));
        else
            for (int q : t.verts[x.v].in) ins.push_back(nm(x.e, q));
        edgeNames.insert(out);
        edgeNames.insert(ins.begin(), ins.end());
        vspec.push_back({std::move(ins), out});
        byOut.emplace(std::move(out), x);
    }
    edgeNames.insert(nm(s.root, t.root));
    BuiltBlock bb;
    bb.tree = build_tree_from_vertices({edgeNames.begin(), edgeNames.end()},
                                       nm(s.root, t.root), vspec);
    bb.pairs.resize(bb.tree.edge_count());
    for (int e = 0; e < bb.tree.edge_count(); ++e) {
        std::vector<int> tup = parse_tuple(bb.tree.names[e]);
        bb.pairs[e] = {tup[0], tup[1]};
    }
    for (int v = 0; v < bb.tree.vertex_count(); ++v) {
        const SVert& x = byOut.at(bb.tree.names[bb.tree.verts[v].out]);
        bb.prov.push_back({x.left, x.v});
    }
    return bb;
}

struct BlockDag {
    std::vector<BuiltBlock> built;
    std::vector<std::pair<int, int>> covers;
    std::vector<int> rank;
};

BlockDag block_dag(const Tree& s, const Tree& t, bool leftDir) {
    BlockDag bd;
    std::vector<VSet> nodes{minimal_vset(s, t, leftDir)};
    std::map<VSet, int> index{{nodes[0], 0}};
    bd.rank.push_back(0);
    for (size_t h = 0; h < nodes.size(); ++h) {
        VSet cur = nodes[h];
        for (VSet& nx : percolation_moves(s, t, leftDir, cur)) {
            auto [it, fresh] = index.try_emplace(nx, static_cast<int>(nodes.size()));
            if (fresh) {
                nodes.push_back(std::move(nx));
                bd.rank.push_back(bd.rank[h] + 1);
            }
            bd.covers.push_back({static_cast<int>(h), it->second});
        }
    }
    std::sort(bd.covers.begin(), bd.covers.end());
    bd.covers.erase(std::unique(bd.covers.begin(), bd.covers.end()), bd.covers.end());
    for (const VSet& vs : nodes) bd.built.push_back(materialize_vset(s, t, vs));
    return bd;
}

Shuffle assemble_shuffle(const Forest& f, const Forest& g, const std::vector<BlockDag>& blocks,
                         const std::vector<int>& pick) {
    int gc = g.component_count();
    Shuffle sh;
    for (int k = 0; k < static_cast<int>(blocks.size()); ++k) {
        int fi = k / gc, gj = k % gc;
        const BuiltBlock& bb = blocks[k].built[pick[k]];
        Tree tr = bb.tree;
        for (int e = 0; e < tr.edge_count(); ++e) {
            auto [a, b] = bb.pairs[e];
            tr.names[e] = "(" + f.components[fi].names[a] + "," + g.components[gj].names[b] + ")";
            sh.edgePairs.push_back({f.global(fi, a), g.global(gj, b)});
        }
        for (auto [left, lv] : bb.prov)
            sh.provenance.push_back({left, left ? f.voffset(fi) + lv : g.voffset(gj) + lv});
        sh.forest.components.push_back(std::move(tr));
    }
    return sh;
}

FaceRef shuffle_face_mapped(const TensorUniverse& u, const Shuffle& s,
                            const std::vector<int>& amap, const std::vector<int>& bmap) {
    FaceRef fr;
    for (auto [a, b] : s.edgePairs) fr.edges.push_back(u.edge_id(amap[a], bmap[b]));
    for (int c = 0; c < s.forest.component_count(); ++c) {
        const Tree& t = s.forest.components[c];
        int off = s.forest.offset(c);
        for (const Vertex& v : t.verts) {
            std::vector<int> ins;
            for (int a : v.in) ins.push_back(fr.edges[off + a]);
            fr.ops.push_back({std::move(ins), fr.edges[off + v.out]});
        }
    }
    return normalize_face(std::move(fr));
}

std::vector<int> identity_map(int n) {
    std::vector<int> m(n);
    for (int i = 0; i < n; ++i) m[i] = i;
    return m;
}

}  // namespace

PercolationDag percolation_order(const Forest& f, const Forest& g, PercDirection dir) {
    bool leftDir = dir == PercDirection::left_minimal;
    int gc = g.component_count();
    std::vector<BlockDag> blocks;
    for (const Tree& s : f.components)
        for (const Tree& t : g.components) blocks.push_back(block_dag(s, t, leftDir));
    int nb = static_cast<int>(blocks.size());
    std::vector<long long> stride(nb);
    long long total = 1;
    for (int k = nb - 1; k >= 0; --k) {
        stride[k] = total;
        total *= static_cast<long long>(blocks[k].built.size());
    }
    PercolationDag dag;
    std::vector<int> pick(nb);
    for (long long idx = 0; idx < total; ++idx) {
        for (int k = 0; k < nb; ++k)
            pick[k] = static_cast<int>(idx / stride[k] % static_cast<long long>(blocks[k].built.size()));
        dag.nodes.push_back(assemble_shuffle(f, g, blocks, pick));
        int r = 0;
        for (int k = 0; k < nb; ++k) r += blocks[k].rank[pick[k]];
        dag.rank.push_back(r);
        for (int k = 0; k < nb; ++k)
            for (auto [a, b] : blocks[k].covers)
                if (pick[k] == a)
                    dag.covers.push_back({static_cast<int>(idx),
                                          static_cast<int>(idx + (b - a) * stride[k])});
    }
    (void)gc;
    return dag;
}

std::vector<Shuffle> shuffles(const Forest& f, const Forest& g) {
    PercolationDag dag = percolation_order(f, g, PercDirection::left_minimal);
    TensorUniverse u{f, g};
    std::vector<int> am = identity_map(f.edge_count()), bm = identity_map(g.edge_count());
    std::vector<FaceRef> refs;
    refs.reserve(dag.nodes.size());
    for (const Shuffle& s : dag.nodes) refs.push_back(shuffle_face_mapped(u, s, am, bm));
    std::vector<FaceRef> top = face_antichain(refs);
    std::set<FaceRef> want(top.begin(), top.end());
    std::set<FaceRef> taken;
    std::vector<Shuffle> out;
    for (size_t i = 0; i < dag.nodes.size(); ++i)
        if (want.count(refs[i]) && taken.insert(refs[i]).second) out.push_back(dag.nodes[i]);
    return out;
}

// Tensor subcomplexes ---------------------------------------------------------

const std::vector<FaceRef>& TensorSubcomplex::closure() const {
    if (!cache_) {
        std::set<FaceRef> acc;
        for (const FaceRef& f : maximal)
            for (FaceRef& s : face_closure(f)) acc.insert(std::move(s));
        cache_ = std::make_shared<const std::vector<FaceRef>>(acc.begin(), acc.end());
    }
    return *cache_;
}

bool TensorSubcomplex::contains(const FaceRef& f) const {
    const auto& cl = closure();
    return std::binary_search(cl.begin(), cl.end(), f);
}

TensorSubcomplex make_tensor_subcomplex(TensorUniverse u, std::vector<FaceRef> faces) {
    long long range = static_cast<long long>(u.left.edge_count()) * u.right.edge_count();
    for (FaceRef& f : faces) {
        f = normalize_face(std::move(f));
        for (int e : f.edges)
            if (e < 0 || e >= range) throw std::invalid_argument("tensor face edge out of range");
        materialize_face(f);  // validates the operation structure
    }
    TensorSubcomplex ts;
    ts.universe = std::move(u);
    ts.maximal = face_antichain(std::move(faces));
    return ts;
}

FaceRef shuffle_face(const TensorUniverse& u, const Shuffle& s) {
    return shuffle_face_mapped(u, s, identity_map(u.left.edge_count()),
                               identity_map(u.right.edge_count()));
}

bool is_simplex(const Forest& f) {
    if (f.component_count() != 1) return false;
    for (const Vertex& v : f.components[0].verts)
        if (v.in.size() != 1) return false;
    return true;
}

bool tensor_hypotheses_hold(const Forest& f, const Forest& g) {
    return is_simplex(f) || is_simplex(g) || (f.open() && g.open());
}

TensorSubcomplex tensor_subcomplex(const Subcomplex& x, const Subcomplex& y, bool enforce) {
    if (enforce && !tensor_hypotheses_hold(x.ambient, y.ambient))
        throw HypothesisViolated(
            "tensor lattice computations need a simplex factor or two open factors");
    TensorUniverse u{x.ambient, y.ambient};
    std::vector<FaceRef> faces;
    for (const FaceRef& xf : x.maximal)
        for (const FaceRef& yf : y.maximal) {
            auto [mx, xmap] = materialize_face(xf);
            auto [my, ymap] = materialize_face(yf);
            for (const Shuffle& sh : shuffles(mx, my))
                faces.push_back(shuffle_face_mapped(u, sh, xmap, ymap));
        }
    TensorSubcomplex ts;
    ts.universe = std::move(u);
    ts.maximal = face_antichain(std::move(faces));
    return ts;
}

namespace {

void require_same_universe(const TensorSubcomplex& x, const TensorSubcomplex& y) {
    if (!(x.universe == y.universe))
        throw AmbientMismatch("tensor subcomplexes live over different universes");
}

TensorSubcomplex over(TensorUniverse u, std::vector<FaceRef> maximal) {
    TensorSubcomplex ts;
    ts.universe = std::move(u);
    ts.maximal = std::move(maximal);
    return ts;
}

}  // namespace

TensorSubcomplex meet(const TensorSubcomplex& x, const TensorSubcomplex& y) {
    require_same_universe(x, y);
    const auto& a = x.closure();
    const auto& b = y.closure();
    std::vector<FaceRef> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    return over(x.universe, face_antichain(std::move(common)));
}

TensorSubcomplex join(const TensorSubcomplex& x, const TensorSubcomplex& y) {
    require_same_universe(x, y);
    std::vector<FaceRef> faces = x.maximal;
    faces.insert(faces.end(), y.maximal.begin(), y.maximal.end());
    return over(x.universe, face_antichain(std::move(faces)));
}

bool tensor_le(const TensorSubcomplex& x, const TensorSubcomplex& y) {
    require_same_universe(x, y);
    for (const FaceRef& f : x.maximal)
        if (!y.contains(f)) return false;
    return true;
}

// N-ary shuffles --------------------------------------------------------------

namespace {

// a factor-vertex copy in an n-fold interleaving: `others` holds one
// spectator edge per foreign factor, -1 in the home slot
struct NVert {
    int fac;
    int v;
    std::vector<int> others;
    auto operator<=>(const NVert&) const = default;
};

using NSet = std::vector<NVert>;

std::vector<Tree> single_trees(const std::vector<Forest>& factors) {
    if (factors.empty()) throw std::invalid_argument("need at least one factor");
    std::vector<Tree> ts;
    for (const Forest& f : factors) {
        if (f.component_count() != 1)
            throw std::invalid_argument("n-ary shuffles take single-tree factors");
        ts.push_back(f.components[0]);
    }
    return ts;
}

std::vector<NSet> nary_moves(const std::vector<Tree>& ts, const NSet& cur) {
    std::set<NVert> have(cur.begin(), cur.end());
    std::vector<NSet> out;
    for (const NVert& x : cur) {
        const Tree& ti = ts[x.fac];
        for (int j = 0; j < static_cast<int>(ts.size()); ++j) {
            if (j == x.fac) continue;
            int w = ts[j].top[x.others[j]];
            if (w < 0) continue;
            auto jcopy = [&](int homeEdge) {
                NVert y{j, w, x.others};
                y.others[x.fac] = homeEdge;
                y.others[j] = -1;
                return y;
            };
            bool ok = true;
            for (int a : ti.verts[x.v].in)
                if (!have.count(jcopy(a))) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            std::set<NVert> nxt = have;
            nxt.erase(x);
            for (int a : ti.verts[x.v].in) nxt.erase(jcopy(a));
            nxt.insert(jcopy(ti.verts[x.v].out));
            for (int c : ts[j].verts[w].in) {
                NVert y = x;
                y.others[j] = c;
                nxt.insert(y);
            }
            out.emplace_back(nxt.begin(), nxt.end());
        }
    }
    return out;
}

std::vector<NSet> nary_vsets(const std::vector<Tree>& ts) {
    int n = static_cast<int>(ts.size());
    std::vector<std::vector<int>> leaves(n);
    for (int i = 0; i < n; ++i)
        for (int e = 0; e < ts[i].edge_count(); ++e)
            if (ts[i].is_leaf_edge(e)) leaves[i].push_back(e);
    NSet minimal;
    for (int i = 0; i < n; ++i) {
        std::vector<std::vector<int>> spots{{}};
        for (int j = 0; j < i; ++j) {
            std::vector<std::vector<int>> nx;
            for (const auto& sp : spots)
                for (int l : leaves[j]) {
                    auto c = sp;
                    c.push_back(l);
                    nx.push_back(std::move(c));
                }
            spots = std::move(nx);
        }
        for (const auto& sp : spots)
            for (int v = 0; v < ts[i].vertex_count(); ++v) {
                std::vector<int> others(n, -1);
                for (int j = 0; j < i; ++j) others[j] = sp[j];
                for (int j = i + 1; j < n; ++j) others[j] = ts[j].root;
                minimal.push_back({i, v, std::move(others)});
            }
    }
    std::sort(minimal.begin(), minimal.end());
    std::vector<NSet> nodes{std::move(minimal)};
    std::set<NSet> seen(nodes.begin(), nodes.end());
    for (size_t h = 0; h < nodes.size(); ++h) {
        NSet cur = nodes[h];
        for (NSet& nx : nary_moves(ts, cur))
            if (seen.insert(nx).second) nodes.push_back(std::move(nx));
    }
    return nodes;
}

NaryShuffle materialize_nset(const std::vector<Tree>& ts, const NSet& vs) {
    int n = static_cast<int>(ts.size());
    std::set<std::string> edgeNames;
    std::vector<std::pair<std::vector<std::string>, std::string>> vspec;
    std::map<std::string, std::pair<int, int>> byOut;
    for (const NVert& x : vs) {
        std::vector<int> out = x.others;
        out[x.fac] = ts[x.fac].verts[x.v].out;
        std::string outName = tuple_name(out);
        std::vector<std::string> ins;
        for (int a : ts[x.fac].verts[x.v].in) {
            std::vector<int> in = x.others;
            in[x.fac] = a;
            ins.push_back(tuple_name(in));
        }
        edgeNames.insert(outName);
        edgeNames.insert(ins.begin(), ins.end());
        vspec.push_back({std::move(ins), outName});
        byOut.emplace(std::move(outName), std::pair{x.fac, x.v});
    }
    std::vector<int> rootTuple(n);
    for (int i = 0; i < n; ++i) rootTuple[i] = ts[i].root;
    edgeNames.insert(tuple_name(rootTuple));
    NaryShuffle s;
    s.tree = build_tree_from_vertices({edgeNames.begin(), edgeNames.end()},
                                      tuple_name(rootTuple), vspec);
    s.edgeColours.resize(s.tree.edge_count());
    for (int e = 0; e < s.tree.edge_count(); ++e) s.edgeColours[e] = parse_tuple(s.tree.names[e]);
    for (int v = 0; v < s.tree.vertex_count(); ++v)
        s.provenance.push_back(byOut.at(s.tree.names[s.tree.verts[v].out]));
    return s;
}

// identity of a shuffle as a subobject: its coloured operations
std::string shuffle_key(const NaryShuffle& s) {
    std::vector<std::string> parts;
    for (const Vertex& v : s.tree.verts) {
        std::vector<std::string> ins;
        for (int a : v.in) ins.push_back(tuple_name(s.edgeColours[a]));
        std::sort(ins.begin(), ins.end());
        std::string p;
        for (const auto& i : ins) p += i;
        p += ">" + tuple_name(s.edgeColours[v.out]);
        parts.push_back(std::move(p));
    }
    std::sort(parts.begin(), parts.end());
    std::vector<std::string> es;
    for (const auto& c : s.edgeColours) es.push_back(tuple_name(c));
    std::sort(es.begin(), es.end());
    std::string key;
    for (const auto& e : es) key += e;
    key += "|";
    for (const auto& p : parts) key += p + ";";
    return key;
}

// drop duplicates and shuffles dominated by another as a subobject
std::vector<NaryShuffle> nary_antichain(std::vector<NaryShuffle> all) {
    std::map<std::vector<int>, int> id;
    for (const NaryShuffle& s : all)
        for (const auto& c : s.edgeColours) id.try_emplace(c, static_cast<int>(id.size()));
    std::vector<FaceRef> refs;
    for (const NaryShuffle& s : all) {
        FaceRef fr;
        for (const auto& c : s.edgeColours) fr.edges.push_back(id.at(c));
        for (const Vertex& v : s.tree.verts) {
            std::vector<int> ins;
            for (int a : v.in) ins.push_back(fr.edges[a]);
            fr.ops.push_back({std::move(ins), fr.edges[v.out]});
        }
        refs.push_back(normalize_face(std::move(fr)));
    }
    std::vector<FaceRef> top = face_antichain(refs);
    std::set<FaceRef> want(top.begin(), top.end());
    std::set<FaceRef> taken;
    std::vector<NaryShuffle> out;
    for (size_t i = 0; i < all.size(); ++i)
        if (want.count(refs[i]) && taken.insert(refs[i]).second) out.push_back(std::move(all[i]));
    return out;
}

void prettify(NaryShuffle& s, const std::vector<Tree>& ts) {
    for (int e = 0; e < s.tree.edge_count(); ++e) {
        std::string nm = "(";
        for (size_t i = 0; i < s.edgeColours[e].size(); ++i) {
            if (i) nm += ',';
            nm += ts[i].names[s.edgeColours[e][i]];
        }
        s.tree.names[e] = nm + ")";
    }
}

// intermediate of the grouped recursion: a shuffle tree whose edges carry
// colour tuples over the factors covered so far
struct LabTree {
    Tree tree;
    std::vector<std::vector<int>> lab;
    std::vector<std::pair<int, int>> prov;
};

std::vector<LabTree> grouped_rec(const Tree& shape, int edge, const std::vector<Forest>& factors,
                                 int& nextLeaf) {
    if (shape.is_leaf_edge(edge)) {
        const Tree& t = factors[nextLeaf].components[0];
        LabTree base;
        base.tree = t;
        for (int e = 0; e < t.edge_count(); ++e) base.lab.push_back({e});
        for (int v = 0; v < t.vertex_count(); ++v) base.prov.push_back({nextLeaf, v});
        ++nextLeaf;
        return {std::move(base)};
    }
    int w = shape.top[edge];
    std::vector<std::vector<LabTree>> kids;
    for (int c : shape.verts[w].in) kids.push_back(grouped_rec(shape, c, factors, nextLeaf));
    std::vector<std::vector<const LabTree*>> picks{{}};
    for (const auto& k : kids) {
        std::vector<std::vector<const LabTree*>> nx;
        for (const auto& p : picks)
            for (const LabTree& lt : k) {
                auto q = p;
                q.push_back(&lt);
                nx.push_back(std::move(q));
            }
        picks = std::move(nx);
    }
    std::vector<LabTree> out;
    for (const auto& p : picks) {
        std::vector<Tree> ts;
        for (const LabTree* lt : p) ts.push_back(lt->tree);
        for (const NSet& vs : nary_vsets(ts)) {
            NaryShuffle m = materialize_nset(ts, vs);
            LabTree lt;
            lt.tree = m.tree;
            for (int e = 0; e < m.tree.edge_count(); ++e) {
                std::vector<int> col;
                for (size_t i = 0; i < p.size(); ++i) {
                    const auto& part = p[i]->lab[m.edgeColours[e][i]];
                    col.insert(col.end(), part.begin(), part.end());
                }
                lt.lab.push_back(std::move(col));
            }
            for (auto [m_fac, m_v] : m.provenance) lt.prov.push_back(p[m_fac]->prov[m_v]);
            for (int e = 0; e < lt.tree.edge_count(); ++e) lt.tree.names[e] = tuple_name(lt.lab[e]);
            out.push_back(std::move(lt));
        }
    }
    return out;
}

}  // namespace

std::vector<NaryShuffle> nary_shuffles(const std::vector<Forest>& factors) {
    std::vector<Tree> ts = single_trees(factors);
    std::vector<NaryShuffle> all;
    for (const NSet& vs : nary_vsets(ts)) all.push_back(materialize_nset(ts, vs));
    all = nary_antichain(std::move(all));
    for (NaryShuffle& s : all) prettify(s, ts);
    return all;
}

std::vector<NaryShuffle> grouped_shuffles(const Tree& shape, const std::vector<Forest>& factors) {
    std::vector<Tree> ts = single_trees(factors);
    int nl = 0;
    for (int e = 0; e < shape.edge_count(); ++e)
        if (shape.is_leaf_edge(e)) ++nl;
    for (const Vertex& v : shape.verts)
        if (v.in.empty()) throw std::invalid_argument("grouping shape cannot have stumps");
    if (nl != static_cast<int>(factors.size()))
        throw std::invalid_argument("grouping shape needs one leaf per factor");
    int nextLeaf = 0;
    std::vector<LabTree> raw = grouped_rec(shape, shape.root, factors, nextLeaf);
    std::vector<NaryShuffle> all;
    for (LabTree& lt : raw) {
        NaryShuffle s;
        s.tree = std::move(lt.tree);
        s.edgeColours = std::move(lt.lab);
        s.provenance = std::move(lt.prov);
        all.push_back(std::move(s));
    }
    all = nary_antichain(std::move(all));
    for (NaryShuffle& s : all) prettify(s, ts);
    return all;
}

ExpansionInclusion expansion_inclusion(const Tree& shape, const std::vector<Forest>& factors) {
    ExpansionInclusion inc;
    inc.grouped = grouped_shuffles(shape, factors);
    inc.whole = nary_shuffles(factors);
    std::map<std::string, int> where;
    for (size_t i = 0; i < inc.whole.size(); ++i) where[shuffle_key(inc.whole[i])] = static_cast<int>(i);
    for (const NaryShuffle& s : inc.grouped) {
        auto it = where.find(shuffle_key(s));
        if (it == where.end())
            throw std::logic_error("grouped shuffle missing from the full enumeration");
        inc.indexInWhole.push_back(it->second);
    }
    return inc;
}

bool valid_layering(const LayeredForest& lf) {
    if (static_cast<int>(lf.lambda.size()) != lf.forest.vertex_count()) return false;
    for (int l : lf.lambda)
        if (l < 0) return false;
    for (int c = 0; c < lf.forest.component_count(); ++c) {
        const Tree& t = lf.forest.components[c];
        int off = lf.forest.voffset(c);
        for (int v = 0; v < t.vertex_count(); ++v) {
            int below = t.bottom(t.verts[v].out);
            if (below >= 0 && lf.lambda[off + below] != lf.lambda[off + v] + 1) return false;
        }
    }
    return true;
}

std::string to_dot(const PercolationDag& dag) {
    std::ostringstream os;
    os << "digraph percolation {\n  rankdir=BT;\n";
    for (size_t i = 0; i < dag.nodes.size(); ++i) {
        os << "  s" << i << " [label=\"S" << i + 1 << " rank " << dag.rank[i] << "\\n";
        for (int c = 0; c < dag.nodes[i].forest.component_count(); ++c) {
            if (c) os << " + ";
            const Tree& t = dag.nodes[i].forest.components[c];
            for (int e = 0; e < t.edge_count(); ++e) os << (e ? " " : "") << t.names[e];
        }
        os << "\"];\n";
    }
    for (auto [a, b] : dag.covers) os << "  s" << a << " -> s" << b << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace forestcalc
