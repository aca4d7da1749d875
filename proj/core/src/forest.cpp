#include "forestcalc/forest.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace forestcalc {

namespace {

void require_nonempty(const Forest& f) {
    if (f.components.empty()) throw EmptyForest("forest has no components");
}

}  // namespace

int Forest::edge_count() const {
    int n = 0;
    for (const auto& t : components) n += t.edge_count();
    return n;
}

int Forest::vertex_count() const {
    int n = 0;
    for (const auto& t : components) n += t.vertex_count();
    return n;
}

int Forest::offset(int comp) const {
    int n = 0;
    for (int i = 0; i < comp; ++i) n += components[i].edge_count();
    return n;
}

int Forest::voffset(int comp) const {
    int n = 0;
    for (int i = 0; i < comp; ++i) n += components[i].vertex_count();
    return n;
}

std::pair<int, int> Forest::locate(int globalEdge) const {
    for (int i = 0; i < component_count(); ++i) {
        if (globalEdge < components[i].edge_count()) return {i, globalEdge};
        globalEdge -= components[i].edge_count();
    }
    assert(false);
    return {-1, -1};
}

std::pair<int, int> Forest::locate_vertex(int globalVertex) const {
    for (int i = 0; i < component_count(); ++i) {
        if (globalVertex < components[i].vertex_count()) return {i, globalVertex};
        globalVertex -= components[i].vertex_count();
    }
    assert(false);
    return {-1, -1};
}

bool Forest::open() const {
    for (const auto& t : components)
        if (!t.open()) return false;
    return true;
}

Forest forest_of(Tree t) { return Forest{{std::move(t)}}; }

Forest direct_sum(const Forest& a, const Forest& b) {
    require_nonempty(a);
    require_nonempty(b);
    Forest out = a;
    out.components.insert(out.components.end(), b.components.begin(), b.components.end());
    return out;
}

bool isomorphic_forests(const Forest& a, const Forest& b) {
    std::multiset<std::string> ea, eb;
    for (const auto& t : a.components) ea.insert(t.enc());
    for (const auto& t : b.components) eb.insert(t.enc());
    return ea == eb;
}

// Morphisms -------------------------------------------------------------------

bool validate_independence(const ForestMor& m) {
    for (int i = 0; i < m.source.component_count(); ++i)
        for (int j = i + 1; j < m.source.component_count(); ++j) {
            if (m.alpha[i] != m.alpha[j]) continue;
            const Tree& tk = m.target.components[m.alpha[i]];
            int ri = m.edgeMaps[i][m.source.components[i].root];
            int rj = m.edgeMaps[j][m.source.components[j].root];
            if (tk.at_or_below(ri, rj) || tk.at_or_below(rj, ri)) return false;
        }
    return true;
}

bool valid_forest_mor(const ForestMor& m) {
    if (m.source.components.empty() || m.target.components.empty()) return false;
    if (static_cast<int>(m.alpha.size()) != m.source.component_count()) return false;
    if (m.edgeMaps.size() != m.alpha.size()) return false;
    for (int i = 0; i < m.source.component_count(); ++i) {
        if (m.alpha[i] < 0 || m.alpha[i] >= m.target.component_count()) return false;
        OmegaMor piece{m.source.components[i], m.target.components[m.alpha[i]], m.edgeMaps[i]};
        if (!valid_omega_mor(piece)) return false;
    }
    return validate_independence(m);
}

ForestMor identity_forest_mor(const Forest& f) {
    ForestMor m{f, f, {}, {}};
    for (int i = 0; i < f.component_count(); ++i) {
        m.alpha.push_back(i);
        std::vector<int> id(f.components[i].edge_count());
        std::iota(id.begin(), id.end(), 0);
        m.edgeMaps.push_back(std::move(id));
    }
    return m;
}

ForestMor compose_forest(const ForestMor& g, const ForestMor& f) {
    assert(f.target == g.source);
    ForestMor m{f.source, g.target, {}, {}};
    for (int i = 0; i < f.source.component_count(); ++i) {
        int mid = f.alpha[i];
        m.alpha.push_back(g.alpha[mid]);
        std::vector<int> em(f.edgeMaps[i].size());
        for (size_t e = 0; e < em.size(); ++e) em[e] = g.edgeMaps[mid][f.edgeMaps[i][e]];
        m.edgeMaps.push_back(std::move(em));
    }
    return m;
}

bool is_forest_iso(const ForestMor& m) {
    if (m.source.component_count() != m.target.component_count()) return false;
    std::vector<int> seen(m.target.component_count(), 0);
    for (int a : m.alpha) {
        if (a < 0 || a >= m.target.component_count() || seen[a]) return false;
        seen[a] = 1;
    }
    for (int i = 0; i < m.source.component_count(); ++i) {
        OmegaMor piece{m.source.components[i], m.target.components[m.alpha[i]], m.edgeMaps[i]};
        if (!is_iso(piece)) return false;
    }
    return true;
}

std::vector<ForestMor> forest_automorphisms(const Forest& f) {
    require_nonempty(f);
    // components with equal encodings are structurally identical and may permute
    std::map<std::string, std::vector<int>> groups;
    for (int i = 0; i < f.component_count(); ++i) groups[f.components[i].enc()].push_back(i);

    std::vector<std::vector<int>> alphas{std::vector<int>(f.component_count(), -1)};
    for (auto& [enc, members] : groups) {
        std::vector<int> idx(members.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::vector<std::vector<int>> next;
        do {
            for (const auto& a : alphas) {
                auto b = a;
                for (size_t k = 0; k < members.size(); ++k) b[members[k]] = members[idx[k]];
                next.push_back(std::move(b));
            }
        } while (std::next_permutation(idx.begin(), idx.end()));
        alphas = std::move(next);
    }

    std::vector<std::vector<std::vector<int>>> treeAuts;
    for (const auto& t : f.components) treeAuts.push_back(automorphisms(t));

    std::vector<ForestMor> out;
    for (const auto& alpha : alphas) {
        std::vector<ForestMor> batch{ForestMor{f, f, alpha, std::vector<std::vector<int>>(f.component_count())}};
        for (int i = 0; i < f.component_count(); ++i) {
            std::vector<ForestMor> next;
            for (const auto& m : batch)
                // equal encodings make an automorphism of component i a valid
                // structural map onto component alpha[i]
                for (const auto& am : treeAuts[i]) {
                    auto m2 = m;
                    m2.edgeMaps[i] = am;
                    next.push_back(std::move(m2));
                }
            batch = std::move(next);
        }
        for (auto& m : batch) out.push_back(std::move(m));
    }
    return out;
}

// Elementary faces -------------------------------------------------------------

namespace {

// replace component `comp` of f by the given trees (with edge maps into the
// old component); an empty replacement drops the component
ForestFace make_face(const Forest& f, ForestFaceKind kind, int comp, int datum,
                     std::vector<std::pair<Tree, std::vector<int>>> repl) {
    ForestFace fc;
    fc.kind = kind;
    fc.component = comp;
    fc.datum = datum;
    ForestMor emb;
    emb.target = f;
    for (int i = 0; i < f.component_count(); ++i) {
        if (i != comp) {
            fc.face.components.push_back(f.components[i]);
            emb.alpha.push_back(i);
            std::vector<int> id(f.components[i].edge_count());
            std::iota(id.begin(), id.end(), 0);
            emb.edgeMaps.push_back(std::move(id));
        } else {
            for (auto& [t, m] : repl) {
                fc.face.components.push_back(std::move(t));
                emb.alpha.push_back(comp);
                emb.edgeMaps.push_back(std::move(m));
            }
        }
    }
    emb.source = fc.face;
    fc.emb = std::move(emb);
    return fc;
}

}  // namespace

std::vector<ForestFace> elementary_faces_forest(const Forest& f) {
    require_nonempty(f);
    std::vector<ForestFace> out;
    for (int c = 0; c < f.component_count(); ++c) {
        const Tree& t = f.components[c];
        if (t.is_eta()) {
            if (f.component_count() >= 2)
                out.push_back(make_face(f, ForestFaceKind::eta_summand, c, 0, {}));
            continue;
        }
        for (int e : t.inner_edges())
            out.push_back(make_face(f, ForestFaceKind::inner, c, e, {contract_edge(t, e)}));
        for (int v : t.leaf_vertices())
            out.push_back(make_face(f, ForestFaceKind::leaf, c, v, {chop_leaf_vertex(t, v)}));
        const Vertex& vr = t.verts[t.top[t.root]];
        if (!vr.in.empty()) {
            std::vector<std::pair<Tree, std::vector<int>>> crown;
            for (int x : vr.in) crown.push_back(subtree_above(t, x));
            out.push_back(make_face(f, ForestFaceKind::phi_root, c, 0, std::move(crown)));
        }
    }
    return out;
}

// Factorization ------------------------------------------------------------------

namespace {

struct CompImage {
    std::set<int> edges;
    std::vector<std::pair<std::vector<int>, int>> ops;  // (sorted frontier, root)
};

// remap image data through a face embedding (new forest -> old forest)
std::vector<CompImage> remap(const std::vector<CompImage>& img, const ForestMor& emb) {
    // reverse lookup: old (comp, edge) -> new (comp, edge)
    std::map<std::pair<int, int>, std::pair<int, int>> rev;
    for (int j = 0; j < emb.source.component_count(); ++j)
        for (size_t e = 0; e < emb.edgeMaps[j].size(); ++e)
            rev[{emb.alpha[j], emb.edgeMaps[j][e]}] = {j, static_cast<int>(e)};
    std::vector<CompImage> out(emb.source.component_count());
    for (int k = 0; k < static_cast<int>(img.size()); ++k) {
        for (int e : img[k].edges) {
            auto it = rev.find({k, e});
            assert(it != rev.end());
            out[it->second.first].edges.insert(it->second.second);
        }
        for (const auto& [L, r] : img[k].ops) {
            auto rit = rev.find({k, r});
            assert(rit != rev.end());
            std::vector<int> L2;
            for (int l : L) {
                auto lit = rev.find({k, l});
                assert(lit != rev.end() && lit->second.first == rit->second.first);
                L2.push_back(lit->second.second);
            }
            std::sort(L2.begin(), L2.end());
            out[rit->second.first].ops.emplace_back(std::move(L2), rit->second.second);
        }
    }
    return out;
}

}  // namespace

ForestFactorization factorize_forest(const ForestMor& f0) {
    if (!valid_forest_mor(f0)) throw InvalidMorphism("not a forest morphism");
    ForestFactorization w;

    // strip unary vertices mapped to identity operations, one per step
    ForestMor cur = f0;
    for (;;) {
        int ci = -1, cv = -1;
        for (int i = 0; i < cur.source.component_count() && ci < 0; ++i) {
            const Tree& s = cur.source.components[i];
            for (int v = 0; v < s.vertex_count(); ++v)
                if (s.verts[v].in.size() == 1 &&
                    cur.edgeMaps[i][s.verts[v].in[0]] == cur.edgeMaps[i][s.verts[v].out]) {
                    ci = i;
                    cv = v;
                    break;
                }
        }
        if (ci < 0) break;
        auto [collapsed, oldToNew] = collapse_unary_vertex(cur.source.components[ci], cv);
        ForestMor sigma = identity_forest_mor(cur.source);
        sigma.target.components[ci] = collapsed;
        sigma.edgeMaps[ci] = oldToNew;
        std::vector<int> newMap(collapsed.edge_count(), -1);
        for (size_t x = 0; x < oldToNew.size(); ++x) newMap[oldToNew[x]] = cur.edgeMaps[ci][x];
        cur.source.components[ci] = collapsed;
        cur.edgeMaps[ci] = std::move(newMap);
        w.degeneracies.push_back(std::move(sigma));
    }
    for (const auto& em : cur.edgeMaps) {
        std::set<int> img(em.begin(), em.end());
        if (img.size() != em.size())
            throw InvalidMorphism("component map not injective after degeneracies");
    }

    // image data per target component
    std::vector<CompImage> img(f0.target.component_count());
    for (int i = 0; i < cur.source.component_count(); ++i) {
        int k = cur.alpha[i];
        for (int e : cur.edgeMaps[i]) img[k].edges.insert(e);
        for (const auto& v : cur.source.components[i].verts) {
            std::vector<int> L;
            for (int x : v.in) L.push_back(cur.edgeMaps[i][x]);
            std::sort(L.begin(), L.end());
            img[k].ops.emplace_back(std::move(L), cur.edgeMaps[i][v.out]);
        }
    }

    Forest current = f0.target;
    ForestMor down = identity_forest_mor(current);  // current -> original target
    auto apply = [&](ForestFace fc) {
        img = remap(img, fc.emb);
        down = compose_forest(down, fc.emb);
        current = fc.emb.source;
        w.faces.push_back(std::move(fc.emb));
    };

    for (;;) {
        bool done = true;
        for (int k = 0; k < current.component_count(); ++k)
            if (static_cast<int>(img[k].edges.size()) != current.components[k].edge_count() ||
                static_cast<int>(img[k].ops.size()) != current.components[k].vertex_count())
                done = false;
        if (done) break;

        int stepped = -1;
        // chop a leaf vertex no image op or edge touches
        for (int k = 0; k < current.component_count() && stepped < 0; ++k) {
            const Tree& t = current.components[k];
            std::set<int> regionVerts;
            for (const auto& [L, r] : img[k].ops) {
                auto reg = op_region(t, r, L);
                assert(reg);
                regionVerts.insert(reg->begin(), reg->end());
            }
            for (int v : t.leaf_vertices()) {
                if (regionVerts.count(v)) continue;
                bool touches = false;
                for (int x : t.verts[v].in)
                    if (img[k].edges.count(x)) touches = true;
                if (!touches) {
                    apply(make_face(current, ForestFaceKind::leaf, k, v, {chop_leaf_vertex(t, v)}));
                    stepped = k;
                    break;
                }
            }
        }
        if (stepped >= 0) continue;
        // drop a spare edge summand
        for (int k = 0; k < current.component_count() && stepped < 0; ++k)
            if (current.components[k].is_eta() && img[k].edges.empty()) {
                assert(current.component_count() >= 2);
                apply(make_face(current, ForestFaceKind::eta_summand, k, 0, {}));
                stepped = k;
            }
        if (stepped >= 0) continue;
        // crown a component whose root edge is spare
        for (int k = 0; k < current.component_count() && stepped < 0; ++k) {
            const Tree& t = current.components[k];
            if (t.is_eta() || img[k].edges.count(t.root)) continue;
            const Vertex& vr = t.verts[t.top[t.root]];
            assert(!vr.in.empty());
            std::vector<std::pair<Tree, std::vector<int>>> crown;
            for (int x : vr.in) crown.push_back(subtree_above(t, x));
            apply(make_face(current, ForestFaceKind::phi_root, k, 0, std::move(crown)));
            stepped = k;
        }
        if (stepped >= 0) continue;
        // contract a spare inner edge
        for (int k = 0; k < current.component_count() && stepped < 0; ++k) {
            const Tree& t = current.components[k];
            for (int e : t.inner_edges())
                if (!img[k].edges.count(e)) {
                    apply(make_face(current, ForestFaceKind::inner, k, e, {contract_edge(t, e)}));
                    stepped = k;
                    break;
                }
        }
        if (stepped < 0) throw InvalidMorphism("face descent is stuck");
    }

    // middle isomorphism through the composed embedding chain
    std::map<std::pair<int, int>, std::pair<int, int>> rev;  // target (comp,edge) -> current
    for (int j = 0; j < current.component_count(); ++j)
        for (size_t e = 0; e < down.edgeMaps[j].size(); ++e)
            rev[{down.alpha[j], down.edgeMaps[j][e]}] = {j, static_cast<int>(e)};
    ForestMor iso{cur.source, current, {}, {}};
    for (int i = 0; i < cur.source.component_count(); ++i) {
        auto seat = rev.at({cur.alpha[i], cur.edgeMaps[i][cur.source.components[i].root]});
        iso.alpha.push_back(seat.first);
        std::vector<int> em(cur.edgeMaps[i].size());
        for (size_t e = 0; e < em.size(); ++e) {
            auto it = rev.at({cur.alpha[i], cur.edgeMaps[i][e]});
            assert(it.first == seat.first);
            em[e] = it.second;
        }
        iso.edgeMaps.push_back(std::move(em));
    }
    assert(is_forest_iso(iso));
    w.iso = std::move(iso);
    return w;
}

ForestMor recompose_forest(const ForestFactorization& w) {
    ForestMor m = identity_forest_mor(w.degeneracies.empty() ? w.iso.source
                                                             : w.degeneracies.front().source);
    for (const auto& d : w.degeneracies) m = compose_forest(d, m);
    m = compose_forest(w.iso, m);
    for (auto it = w.faces.rbegin(); it != w.faces.rend(); ++it) m = compose_forest(*it, m);
    return m;
}

std::string to_dot(const Forest& f, const std::string& graph_name) {
    std::ostringstream os;
    os << "graph \"" << graph_name << "\" {\n  rankdir=BT;\n";
    for (int c = 0; c < f.component_count(); ++c) {
        const Tree& t = f.components[c];
        os << "  subgraph cluster_" << c << " {\n    label=\"component " << c << "\";\n";
        auto vn = [&](int v) { return "c" + std::to_string(c) + "v" + std::to_string(v); };
        int phantom = 0;
        auto pn = [&]() { return "c" + std::to_string(c) + "p" + std::to_string(phantom++); };
        for (int v = 0; v < t.vertex_count(); ++v) {
            os << "    " << vn(v) << " [shape=circle,style=filled,label=\"\"";
            if (t.verts[v].in.empty()) os << ",xlabel=\"stump\"";
            os << "];\n";
        }
        for (int e = 0; e < t.edge_count(); ++e) {
            std::string lo = t.bottom(e) >= 0 ? vn(t.bottom(e)) : "";
            std::string hi = t.top[e] >= 0 ? vn(t.top[e]) : "";
            if (lo.empty()) {
                lo = pn();
                os << "    " << lo << " [shape=none,label=\"\"];\n";
            }
            if (hi.empty()) {
                hi = pn();
                os << "    " << hi << " [shape=none,label=\"\"];\n";
            }
            os << "    " << lo << " -- " << hi << " [label=\"" << t.names[e] << "\"];\n";
        }
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace forestcalc
