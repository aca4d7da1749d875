#include "forestcalc/presheaf.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace forestcalc {

namespace {

void sort_unique(std::vector<int>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

// positions of f.edges used as some op input / output, -1 when unused
struct EdgeUsage {
    std::vector<int> asInput;
    std::vector<int> asOutput;
};

int edge_pos(const FaceRef& f, int e) {
    auto it = std::lower_bound(f.edges.begin(), f.edges.end(), e);
    if (it == f.edges.end() || *it != e) return -1;
    return static_cast<int>(it - f.edges.begin());
}

EdgeUsage edge_usage(const FaceRef& f) {
    EdgeUsage u;
    u.asInput.assign(f.edges.size(), -1);
    u.asOutput.assign(f.edges.size(), -1);
    for (int k = 0; k < static_cast<int>(f.ops.size()); ++k) {
        for (int l : f.ops[k].first) u.asInput[edge_pos(f, l)] = k;
        u.asOutput[edge_pos(f, f.ops[k].second)] = k;
    }
    return u;
}

struct Dsu {
    std::vector<int> p;
    explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int a) { return p[a] == a ? a : p[a] = find(p[a]); }
    void unite(int a, int b) { p[find(a)] = find(b); }
};

}  // namespace

FaceRef normalize_face(FaceRef f) {
    sort_unique(f.edges);
    for (auto& op : f.ops) sort_unique(op.first);
    std::sort(f.ops.begin(), f.ops.end());
    f.ops.erase(std::unique(f.ops.begin(), f.ops.end()), f.ops.end());
    return f;
}

std::pair<Forest, std::vector<int>> materialize_face(const FaceRef& f) {
    const int n = static_cast<int>(f.edges.size());
    if (n == 0) throw EmptyForest("face with no edges");
    EdgeUsage use = edge_usage(f);
    Dsu dsu(n);
    for (const auto& [ins, out] : f.ops) {
        int rp = edge_pos(f, out);
        for (int l : ins) dsu.unite(edge_pos(f, l), rp);
    }
    // one component per position not consumed as an input
    std::vector<std::pair<int, int>> roots;  // (universe id, position)
    for (int p = 0; p < n; ++p)
        if (use.asInput[p] < 0) roots.emplace_back(f.edges[p], p);
    std::sort(roots.begin(), roots.end());

    Forest out;
    std::vector<int> emap;
    for (auto [rootId, rootPos] : roots) {
        int g = dsu.find(rootPos);
        std::vector<std::string> edgeNames;
        for (int p = 0; p < n; ++p)
            if (dsu.find(p) == g) edgeNames.push_back(std::to_string(f.edges[p]));
        std::vector<std::pair<std::vector<std::string>, std::string>> verts;
        for (const auto& [ins, outEdge] : f.ops) {
            if (dsu.find(edge_pos(f, outEdge)) != g) continue;
            std::vector<std::string> inNames;
            for (int l : ins) inNames.push_back(std::to_string(l));
            verts.emplace_back(std::move(inNames), std::to_string(outEdge));
        }
        Tree t = build_tree_from_vertices(edgeNames, std::to_string(rootId), verts);
        for (const auto& name : t.names) emap.push_back(std::stoi(name));
        out.components.push_back(std::move(t));
    }
    return {std::move(out), std::move(emap)};
}

int face_component_count(const FaceRef& f) {
    EdgeUsage use = edge_usage(f);
    int c = 0;
    for (int v : use.asInput) c += (v < 0);
    return c;
}

bool face_is_eta(const FaceRef& f) { return f.edges.size() == 1 && f.ops.empty(); }

bool face_is_unary_corolla(const FaceRef& f) {
    return f.edges.size() == 2 && f.ops.size() == 1 && f.ops[0].first.size() == 1;
}

namespace {

// op realizability against a fixed materialization of b
bool ops_realizable(const FaceRef& a, const Forest& B, const std::vector<int>& bmap) {
    std::map<int, std::pair<int, int>> where;  // universe id -> (comp, local)
    for (int c = 0; c < B.component_count(); ++c)
        for (int e = 0; e < B.components[c].edge_count(); ++e)
            where[bmap[B.global(c, e)]] = {c, e};
    for (const auto& [ins, out] : a.ops) {
        auto itr = where.find(out);
        if (itr == where.end()) return false;
        auto [c, r] = itr->second;
        std::vector<int> L;
        for (int l : ins) {
            auto itl = where.find(l);
            if (itl == where.end() || itl->second.first != c) return false;
            L.push_back(itl->second.second);
        }
        std::sort(L.begin(), L.end());
        if (!op_region(B.components[c], r, L)) return false;
    }
    return true;
}

}  // namespace

bool face_le(const FaceRef& a, const FaceRef& b) {
    if (!std::includes(b.edges.begin(), b.edges.end(), a.edges.begin(), a.edges.end()))
        return false;
    if (a.ops.empty()) return true;
    auto [B, bmap] = materialize_face(b);
    return ops_realizable(a, B, bmap);
}

namespace {

struct LocalSub {
    std::vector<int> edges;  // global ids of the host forest
    std::vector<std::pair<std::vector<int>, int>> ops;
};

LocalSub merge_subs(const LocalSub& x, const LocalSub& y) {
    LocalSub r = x;
    r.edges.insert(r.edges.end(), y.edges.begin(), y.edges.end());
    r.ops.insert(r.ops.end(), y.ops.begin(), y.ops.end());
    return r;
}

// all grafting frontiers reachable from e upward, {e} excluded
void frontiers_from(const Tree& t, int e, std::vector<std::vector<int>>& out) {
    int v = t.top[e];
    if (v < 0) return;
    std::vector<std::vector<int>> acc{{}};
    for (int l : t.verts[v].in) {
        std::vector<std::vector<int>> lifts{{l}};
        frontiers_from(t, l, lifts);
        std::vector<std::vector<int>> next;
        for (const auto& base : acc)
            for (const auto& lift : lifts) {
                auto merged = base;
                merged.insert(merged.end(), lift.begin(), lift.end());
                next.push_back(std::move(merged));
            }
        acc = std::move(next);
    }
    for (auto& L : acc) {
        std::sort(L.begin(), L.end());
        out.push_back(std::move(L));
    }
}

// every subobject of t rooted at edge e, in (component-local + off) ids
const std::vector<LocalSub>& rooted_subs(const Tree& t, int off, int e,
                                         std::vector<std::vector<LocalSub>>& memo) {
    auto& slot = memo[e];
    if (!slot.empty()) return slot;
    slot.push_back(LocalSub{{off + e}, {}});
    std::vector<std::vector<int>> Ls;
    frontiers_from(t, e, Ls);
    for (const auto& L : Ls) {
        std::vector<LocalSub> acc;
        std::vector<int> gL;
        for (int l : L) gL.push_back(off + l);
        acc.push_back(LocalSub{{off + e}, {{gL, off + e}}});
        for (int l : L) {
            const auto& lifts = rooted_subs(t, off, l, memo);
            std::vector<LocalSub> next;
            for (const auto& base : acc)
                for (const auto& lift : lifts) next.push_back(merge_subs(base, lift));
            acc = std::move(next);
        }
        for (auto& s : acc) slot.push_back(std::move(s));
    }
    return slot;
}

bool comparable(const Tree& t, int a, int b) {
    return t.at_or_below(a, b) || t.at_or_below(b, a);
}

void edge_antichains(const Tree& t, int start, std::vector<int>& cur,
                     std::vector<std::vector<int>>& out) {
    if (!cur.empty()) out.push_back(cur);
    for (int e = start; e < t.edge_count(); ++e) {
        bool ok = true;
        for (int a : cur)
            if (comparable(t, a, e)) { ok = false; break; }
        if (!ok) continue;
        cur.push_back(e);
        edge_antichains(t, e + 1, cur, out);
        cur.pop_back();
    }
}

// all subobjects of one component, global ids
std::vector<LocalSub> component_subs(const Tree& t, int off) {
    std::vector<std::vector<LocalSub>> memo(t.edge_count());
    std::vector<std::vector<int>> chains;
    std::vector<int> cur;
    edge_antichains(t, 0, cur, chains);
    std::vector<LocalSub> out;
    for (const auto& A : chains) {
        std::vector<LocalSub> acc{LocalSub{}};
        for (int a : A) {
            const auto& lifts = rooted_subs(t, off, a, memo);
            std::vector<LocalSub> next;
            for (const auto& base : acc)
                for (const auto& lift : lifts) next.push_back(merge_subs(base, lift));
            acc = std::move(next);
        }
        for (auto& s : acc) out.push_back(std::move(s));
    }
    return out;
}

std::vector<FaceRef> all_subobjects(const Forest& B) {
    std::vector<std::vector<LocalSub>> per;
    for (int c = 0; c < B.component_count(); ++c)
        per.push_back(component_subs(B.components[c], B.offset(c)));
    std::vector<LocalSub> acc{LocalSub{}};
    for (const auto& subs : per) {
        std::vector<LocalSub> next;
        for (const auto& base : acc) {
            next.push_back(base);  // component absent
            for (const auto& s : subs) next.push_back(merge_subs(base, s));
        }
        acc = std::move(next);
    }
    std::vector<FaceRef> out;
    for (auto& s : acc) {
        if (s.edges.empty()) continue;
        out.push_back(normalize_face(FaceRef{std::move(s.edges), std::move(s.ops)}));
    }
    return out;
}

}  // namespace

std::vector<FaceRef> face_closure(const FaceRef& f) {
    auto [B, emap] = materialize_face(f);
    std::vector<FaceRef> out;
    for (FaceRef& s : all_subobjects(B)) {
        for (int& e : s.edges) e = emap[e];
        for (auto& [ins, outEdge] : s.ops) {
            for (int& l : ins) l = emap[l];
            outEdge = emap[outEdge];
        }
        out.push_back(normalize_face(std::move(s)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<FaceRef> face_boundary_faces(const FaceRef& f) {
    auto [B, emap] = materialize_face(f);
    std::vector<FaceRef> out;
    for (const ForestFace& ff : elementary_faces_forest(B)) {
        FaceRef r = face_of_mor(ff.emb);
        for (int& e : r.edges) e = emap[e];
        for (auto& [ins, outEdge] : r.ops) {
            for (int& l : ins) l = emap[l];
            outEdge = emap[outEdge];
        }
        out.push_back(normalize_face(std::move(r)));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

FaceRef whole_face(const Forest& f) {
    FaceRef r;
    r.edges.resize(f.edge_count());
    std::iota(r.edges.begin(), r.edges.end(), 0);
    for (int c = 0; c < f.component_count(); ++c) {
        int off = f.offset(c);
        for (const Vertex& v : f.components[c].verts) {
            std::vector<int> ins;
            for (int l : v.in) ins.push_back(off + l);
            std::sort(ins.begin(), ins.end());
            r.ops.emplace_back(std::move(ins), off + v.out);
        }
    }
    std::sort(r.ops.begin(), r.ops.end());
    return r;
}

FaceRef face_of_mor(const ForestMor& m) {
    FaceRef r;
    for (int i = 0; i < m.source.component_count(); ++i) {
        const Tree& s = m.source.components[i];
        int toff = m.target.offset(m.alpha[i]);
        for (int e = 0; e < s.edge_count(); ++e)
            r.edges.push_back(toff + m.edgeMaps[i][e]);
        for (const Vertex& v : s.verts) {
            std::vector<int> ins;
            for (int l : v.in) ins.push_back(toff + m.edgeMaps[i][l]);
            r.ops.emplace_back(std::move(ins), toff + m.edgeMaps[i][v.out]);
        }
    }
    return normalize_face(std::move(r));
}

bool valid_face(const Forest& ambient, const FaceRef& f) {
    if (f.edges.empty()) return false;
    for (size_t i = 0; i < f.edges.size(); ++i) {
        if (f.edges[i] < 0 || f.edges[i] >= ambient.edge_count()) return false;
        if (i > 0 && f.edges[i] <= f.edges[i - 1]) return false;
    }
    std::vector<int> inCount(f.edges.size(), 0), outCount(f.edges.size(), 0);
    for (size_t k = 0; k < f.ops.size(); ++k) {
        if (k > 0 && f.ops[k] <= f.ops[k - 1]) return false;
        const auto& [ins, out] = f.ops[k];
        int rp = edge_pos(f, out);
        if (rp < 0) return false;
        ++outCount[rp];
        auto [rc, rl] = ambient.locate(out);
        std::vector<int> L;
        for (size_t j = 0; j < ins.size(); ++j) {
            if (j > 0 && ins[j] <= ins[j - 1]) return false;
            int lp = edge_pos(f, ins[j]);
            if (lp < 0) return false;
            ++inCount[lp];
            auto [lc, ll] = ambient.locate(ins[j]);
            if (lc != rc) return false;
            L.push_back(ll);
        }
        if (L.size() == 1 && L[0] == rl) return false;  // identity op, degenerate
        if (!op_region(ambient.components[rc], rl, L)) return false;
    }
    std::vector<int> roots;
    for (size_t p = 0; p < f.edges.size(); ++p) {
        if (inCount[p] > 1 || outCount[p] > 1) return false;
        if (inCount[p] == 0) roots.push_back(f.edges[p]);
    }
    for (size_t i = 0; i < roots.size(); ++i)
        for (size_t j = i + 1; j < roots.size(); ++j) {
            auto [ci, ei] = ambient.locate(roots[i]);
            auto [cj, ej] = ambient.locate(roots[j]);
            if (ci == cj && comparable(ambient.components[ci], ei, ej)) return false;
        }
    return true;
}

// Subcomplexes ---------------------------------------------------------------

std::vector<FaceRef> face_antichain(std::vector<FaceRef> faces) {
    for (auto& f : faces) f = normalize_face(std::move(f));
    std::sort(faces.begin(), faces.end());
    faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
    std::vector<FaceRef> keep;
    for (size_t i = 0; i < faces.size(); ++i) {
        bool dominated = false;
        for (size_t j = 0; j < faces.size() && !dominated; ++j)
            if (i != j && face_le(faces[i], faces[j])) dominated = true;
        if (!dominated) keep.push_back(faces[i]);
    }
    return keep;
}

namespace {

Subcomplex assemble(Forest ambient, std::vector<FaceRef> maximal) {
    Subcomplex s;
    s.ambient = std::move(ambient);
    s.maximal = std::move(maximal);
    return s;
}

}  // namespace

const std::vector<FaceRef>& Subcomplex::closure() const {
    if (!cache_) {
        std::set<FaceRef> acc;
        for (const FaceRef& f : maximal)
            for (FaceRef& s : face_closure(f)) acc.insert(std::move(s));
        cache_ = std::make_shared<const std::vector<FaceRef>>(acc.begin(), acc.end());
    }
    return *cache_;
}

bool Subcomplex::contains(const FaceRef& f) const {
    const auto& cl = closure();
    return std::binary_search(cl.begin(), cl.end(), f);
}

Subcomplex make_subcomplex(Forest ambient, std::vector<FaceRef> faces) {
    for (const FaceRef& f : faces)
        if (!valid_face(ambient, normalize_face(f)))
            throw std::invalid_argument("face does not describe a subobject of the ambient forest");
    return assemble(std::move(ambient), face_antichain(std::move(faces)));
}

Subcomplex empty_subcomplex(Forest ambient) { return assemble(std::move(ambient), {}); }

Subcomplex full_subcomplex(Forest ambient) {
    FaceRef whole = whole_face(ambient);
    return assemble(std::move(ambient), {std::move(whole)});
}

Subcomplex boundary(const Forest& f) {
    std::vector<FaceRef> faces;
    for (const ForestFace& ff : elementary_faces_forest(f)) faces.push_back(face_of_mor(ff.emb));
    return assemble(f, face_antichain(std::move(faces)));
}

Subcomplex inner_horn(const Forest& f, const std::vector<int>& A) {
    if (A.empty()) throw NotInnerEdge("horn needs at least one inner edge");
    std::set<std::pair<int, int>> drop;
    for (int a : A) {
        if (a < 0 || a >= f.edge_count()) throw NotInnerEdge("edge id out of range");
        auto [c, e] = f.locate(a);
        if (!f.components[c].is_inner_edge(e)) throw NotInnerEdge("edge " + std::to_string(a) + " is not inner");
        drop.insert({c, e});
    }
    std::vector<FaceRef> faces;
    for (const ForestFace& ff : elementary_faces_forest(f)) {
        if (ff.kind == ForestFaceKind::inner && drop.count({ff.component, ff.datum})) continue;
        faces.push_back(face_of_mor(ff.emb));
    }
    return assemble(f, face_antichain(std::move(faces)));
}

Subcomplex segal_core(const Forest& f) {
    // cells are one-vertex-per-tree subforests; the maximal ones sit over
    // maximal edge antichains, a corolla whenever the edge has a vertex on top
    std::vector<std::vector<std::vector<int>>> perComp;
    for (const Tree& t : f.components) {
        std::vector<std::vector<int>> chains;
        std::vector<int> cur;
        edge_antichains(t, 0, cur, chains);
        std::vector<std::vector<int>> maximalChains;
        for (const auto& A : chains) {
            bool extendable = false;
            for (int e = 0; e < t.edge_count() && !extendable; ++e) {
                if (std::find(A.begin(), A.end(), e) != A.end()) continue;
                bool indep = true;
                for (int a : A)
                    if (comparable(t, a, e)) { indep = false; break; }
                extendable = indep;
            }
            if (!extendable) maximalChains.push_back(A);
        }
        perComp.push_back(std::move(maximalChains));
    }
    std::vector<FaceRef> cells{FaceRef{}};
    for (int c = 0; c < f.component_count(); ++c) {
        const Tree& t = f.components[c];
        int off = f.offset(c);
        std::vector<FaceRef> next;
        for (const FaceRef& base : cells)
            for (const auto& A : perComp[c]) {
                FaceRef cell = base;
                for (int e : A) {
                    cell.edges.push_back(off + e);
                    if (t.top[e] >= 0) {
                        std::vector<int> ins;
                        for (int l : t.verts[t.top[e]].in) {
                            ins.push_back(off + l);
                            cell.edges.push_back(off + l);
                        }
                        std::sort(ins.begin(), ins.end());
                        cell.ops.emplace_back(std::move(ins), off + e);
                    }
                }
                next.push_back(std::move(cell));
            }
        cells = std::move(next);
    }
    return assemble(f, face_antichain(std::move(cells)));
}

namespace {

void require_same_ambient(const Subcomplex& x, const Subcomplex& y) {
    if (x.ambient != y.ambient)
        throw AmbientMismatch("subcomplexes live over different forests");
}

}  // namespace

Subcomplex meet(const Subcomplex& x, const Subcomplex& y) {
    require_same_ambient(x, y);
    const auto& a = x.closure();
    const auto& b = y.closure();
    std::vector<FaceRef> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    return assemble(x.ambient, face_antichain(std::move(common)));
}

Subcomplex join(const Subcomplex& x, const Subcomplex& y) {
    require_same_ambient(x, y);
    std::vector<FaceRef> faces = x.maximal;
    faces.insert(faces.end(), y.maximal.begin(), y.maximal.end());
    return assemble(x.ambient, face_antichain(std::move(faces)));
}

bool subcomplex_le(const Subcomplex& x, const Subcomplex& y) {
    require_same_ambient(x, y);
    for (const FaceRef& f : x.maximal)
        if (!y.contains(f)) return false;
    return true;
}

Subcomplex direct_sum(const Subcomplex& x, const Subcomplex& y) {
    Forest ambient = direct_sum(x.ambient, y.ambient);
    int off = x.ambient.edge_count();
    auto shifted = [off](FaceRef f) {
        for (int& e : f.edges) e += off;
        for (auto& [ins, out] : f.ops) {
            for (int& l : ins) l += off;
            out += off;
        }
        return f;
    };
    std::vector<FaceRef> faces;
    for (const FaceRef& a : x.maximal) faces.push_back(a);
    for (const FaceRef& b : y.maximal) faces.push_back(shifted(b));
    for (const FaceRef& a : x.maximal)
        for (const FaceRef& b : y.maximal) {
            FaceRef both = a;
            FaceRef sb = shifted(b);
            both.edges.insert(both.edges.end(), sb.edges.begin(), sb.edges.end());
            both.ops.insert(both.ops.end(), sb.ops.begin(), sb.ops.end());
            faces.push_back(normalize_face(std::move(both)));
        }
    return assemble(std::move(ambient), face_antichain(std::move(faces)));
}

Subcomplex restrict_u(const Subcomplex& x) {
    if (x.ambient.component_count() != 1)
        throw AmbientMismatch("tree restriction needs a one-component ambient");
    std::vector<FaceRef> connected;
    for (const FaceRef& f : x.closure())
        if (face_component_count(f) == 1) connected.push_back(f);
    return assemble(x.ambient, face_antichain(std::move(connected)));
}

// Markings -------------------------------------------------------------------

MarkedSubcomplex flat(Subcomplex base) { return {std::move(base), {}}; }

MarkedSubcomplex sharp(Subcomplex base) {
    std::vector<FaceRef> marked;
    for (const FaceRef& f : base.closure())
        if (face_is_unary_corolla(f)) marked.push_back(f);
    return {std::move(base), std::move(marked)};
}

MarkedSubcomplex with_marks(Subcomplex base, std::vector<FaceRef> marked) {
    for (auto& f : marked) f = normalize_face(std::move(f));
    std::sort(marked.begin(), marked.end());
    marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
    for (const FaceRef& f : marked) {
        if (!face_is_unary_corolla(f))
            throw std::invalid_argument("marked element is not a 1-corolla");
        if (!base.contains(f))
            throw std::invalid_argument("marked element lies outside the base");
    }
    return {std::move(base), std::move(marked)};
}

MarkedSubcomplex meet(const MarkedSubcomplex& x, const MarkedSubcomplex& y) {
    MarkedSubcomplex r;
    r.base = meet(x.base, y.base);
    std::set_intersection(x.marked.begin(), x.marked.end(), y.marked.begin(), y.marked.end(),
                          std::back_inserter(r.marked));
    return r;
}

MarkedSubcomplex join(const MarkedSubcomplex& x, const MarkedSubcomplex& y) {
    MarkedSubcomplex r;
    r.base = join(x.base, y.base);
    std::set_union(x.marked.begin(), x.marked.end(), y.marked.begin(), y.marked.end(),
                   std::back_inserter(r.marked));
    return r;
}

}  // namespace forestcalc
