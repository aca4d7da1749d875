#include "forestcalc/dendrify.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <string>

namespace forestcalc {

namespace {

std::string level_name(int i, int p) {
    return "(" + std::to_string(i) + "," + std::to_string(p) + ")";
}

// composite of the chain maps from level `from` to level `to`
PartialMap chain_composite(const NFSimplex& a, int from, int to) {
    PartialMap r = identity_pmap(a.sizes[from]);
    for (int k = from; k < to; ++k) r = compose(a.chain[k], r);
    return r;
}

}  // namespace

OmegaImage omega_object(const NFSimplex& a) {
    if (!valid_nf_simplex(a, false)) throw std::invalid_argument("omega_object: invalid chain");
    const int n = a.dim();
    OmegaImage im;
    im.levelEdges.assign(n + 1, {});
    im.levelVertices.assign(n + 1, {});
    for (int i = 0; i <= n; ++i) {
        im.levelEdges[i].assign(a.sizes[i], -1);
        im.levelVertices[i].assign(a.sizes[i], -1);
    }

    // an edge is a root when nothing below it consumes its point
    auto parent = [&](std::pair<int, int> e) -> std::pair<int, int> {
        auto [i, p] = e;
        if (i == n) return {-1, -1};
        int q = a.chain[i].at(p);
        return q == 0 ? std::pair<int, int>{-1, -1} : std::pair<int, int>{i + 1, q};
    };
    std::vector<std::pair<int, int>> roots;
    std::map<std::pair<int, int>, std::pair<int, int>> rootOf;
    for (int i = 0; i <= n; ++i)
        for (int p = 1; p <= a.sizes[i]; ++p) {
            std::pair<int, int> e{i, p};
            std::vector<std::pair<int, int>> path;
            while (parent(e) != std::pair<int, int>{-1, -1} && !rootOf.count(e)) {
                path.push_back(e);
                e = parent(e);
            }
            auto r = rootOf.count(e) ? rootOf[e] : e;
            if (!rootOf.count(e)) {
                rootOf[e] = r;
                roots.push_back(r);
            }
            for (auto& x : path) rootOf[x] = r;
        }
    if (roots.empty()) {
        im.empty = true;
        return im;
    }
    std::sort(roots.begin(), roots.end());

    for (auto& r : roots) {
        std::vector<std::string> edges;
        std::vector<std::pair<std::vector<std::string>, std::string>> vertices;
        for (int i = 0; i <= n; ++i)
            for (int p = 1; p <= a.sizes[i]; ++p) {
                if (rootOf[{i, p}] != r) continue;
                edges.push_back(level_name(i, p));
                if (i == 0) continue;
                std::vector<std::string> in;
                for (int b = 1; b <= a.sizes[i - 1]; ++b)
                    if (a.chain[i - 1].at(b) == p) in.push_back(level_name(i - 1, b));
                vertices.push_back({std::move(in), level_name(i, p)});
            }
        im.forest.components.push_back(
            build_tree_from_vertices(edges, level_name(r.first, r.second), vertices));
    }

    // read the level bijections back off the canonicalized names
    std::map<std::string, std::pair<int, int>> named;
    for (int i = 0; i <= n; ++i)
        for (int p = 1; p <= a.sizes[i]; ++p) named[level_name(i, p)] = {i, p};
    im.edgeNames.assign(im.forest.edge_count(), {-1, -1});
    im.vertexNames.assign(im.forest.vertex_count(), {-1, -1});
    for (int c = 0; c < im.forest.component_count(); ++c) {
        const Tree& t = im.forest.components[c];
        for (int e = 0; e < t.edge_count(); ++e) {
            auto [i, p] = named.at(t.names[e]);
            int g = im.forest.global(c, e);
            im.edgeNames[g] = {i, p};
            im.levelEdges[i][p - 1] = g;
        }
        for (int v = 0; v < t.vertex_count(); ++v) {
            auto [i, p] = named.at(t.names[t.verts[v].out]);
            int g = im.forest.voffset(c) + v;
            im.vertexNames[g] = {i, p};
            im.levelVertices[i][p - 1] = g;
        }
    }
    for (int j : a.markedEdges)
        for (int p = 1; p <= a.sizes[j + 1]; ++p)
            im.markedCorollas.push_back(im.levelVertices[j + 1][p - 1]);
    std::sort(im.markedCorollas.begin(), im.markedCorollas.end());
    return im;
}

LayeredForest omega_layering(const OmegaImage& im) {
    LayeredForest lf;
    lf.forest = im.forest;
    for (auto& [i, p] : im.vertexNames) lf.lambda.push_back(i);
    return lf;
}

namespace {

// morphism induced by a relabelling of levels; point indices are untouched
ForestMor level_remap(const OmegaImage& src, const OmegaImage& dst,
                      const std::function<int(int)>& levelTo) {
    if (src.empty) return {Forest{}, dst.forest, {}, {}};
    ForestMor m{src.forest, dst.forest, {}, {}};
    for (int c = 0; c < src.forest.component_count(); ++c) {
        const Tree& t = src.forest.components[c];
        std::vector<int> em(t.edge_count());
        int comp = -1;
        for (int e = 0; e < t.edge_count(); ++e) {
            auto [j, p] = src.edgeNames[src.forest.global(c, e)];
            auto [tc, tl] = dst.forest.locate(dst.levelEdges[levelTo(j)][p - 1]);
            if (comp < 0) comp = tc;
            assert(tc == comp);
            em[e] = tl;
        }
        m.alpha.push_back(comp);
        m.edgeMaps.push_back(std::move(em));
    }
    return m;
}

}  // namespace

ForestMor omega_face(const NFSimplex& a, int i) {
    OmegaImage src = omega_object(nf_face(a, i));
    OmegaImage dst = omega_object(a);
    return level_remap(src, dst, [i](int j) { return j < i ? j : j + 1; });
}

ForestMor omega_degeneracy(const NFSimplex& a, int j) {
    OmegaImage src = omega_object(nf_degeneracy(a, j));
    OmegaImage dst = omega_object(a);
    return level_remap(src, dst, [j](int j2) { return j2 <= j ? j2 : (j2 == j + 1 ? j : j2 - 1); });
}

FaceRef omega_face_ref(const OmegaImage& im, const NFSimplex& a, const std::vector<int>& s) {
    if (s.empty() || !std::is_sorted(s.begin(), s.end()) || s.front() < 0 ||
        s.back() > a.dim() || std::adjacent_find(s.begin(), s.end()) != s.end())
        throw std::invalid_argument("omega_face_ref: bad vertex subset");
    FaceRef f;
    for (int j : s)
        for (int p = 1; p <= a.sizes[j]; ++p) f.edges.push_back(im.levelEdges[j][p - 1]);
    for (std::size_t k = 1; k < s.size(); ++k) {
        PartialMap comp = chain_composite(a, s[k - 1], s[k]);
        for (int p = 1; p <= a.sizes[s[k]]; ++p) {
            std::vector<int> in;
            for (int b = 1; b <= a.sizes[s[k - 1]]; ++b)
                if (comp.at(b) == p) in.push_back(im.levelEdges[s[k - 1]][b - 1]);
            f.ops.push_back({std::move(in), im.levelEdges[s[k]][p - 1]});
        }
    }
    return normalize_face(std::move(f));
}

MarkedSubcomplex omega_shriek(const NFSimplex& a, const std::vector<std::vector<int>>& faces,
                              const std::vector<std::pair<int, int>>& markedEdges) {
    for (const PartialMap& m : a.chain)
        if (!m.surjective())
            throw OverNFNotNFo("omega_shriek: chain leaves the surjective range");
    OmegaImage im = omega_object(a);
    auto inSomeFace = [&](int p, int q) {
        for (const auto& s : faces)
            if (std::binary_search(s.begin(), s.end(), p) &&
                std::binary_search(s.begin(), s.end(), q))
                return true;
        return false;
    };
    std::vector<FaceRef> refs;
    for (const auto& s : faces) {
        FaceRef r = omega_face_ref(im, a, s);
        if (!r.edges.empty()) refs.push_back(std::move(r));
    }
    if (im.empty) return flat(empty_subcomplex(Forest{}));
    Subcomplex base = make_subcomplex(im.forest, std::move(refs));

    std::vector<std::pair<int, int>> pairs = markedEdges;
    for (int j : a.markedEdges)
        if (inSomeFace(j, j + 1)) pairs.push_back({j, j + 1});
    std::vector<FaceRef> marked;
    for (auto [p, q] : pairs) {
        if (p < 0 || q <= p || q > a.dim() || !inSomeFace(p, q))
            throw std::invalid_argument("omega_shriek: marked edge outside the faces");
        PartialMap comp = chain_composite(a, p, q);
        if (!comp.inert()) throw std::invalid_argument("omega_shriek: marked edge not inert");
        for (std::size_t k = 0; k < comp.map.size(); ++k) {
            int src = im.levelEdges[p][comp.defn[k] - 1];
            int dst = im.levelEdges[q][comp.map[k] - 1];
            marked.push_back(normalize_face({{src, dst}, {{{src}, dst}}}));
        }
    }
    return with_marks(std::move(base), std::move(marked));
}

// Simplices over a fixed forest ------------------------------------------------

namespace {

// size of the largest independent edge set, the per-level ceiling for
// assignments (each level embeds independently)
int max_independent(const Forest& f) {
    int total = 0;
    for (const Tree& t : f.components) {
        std::function<int(int)> rec = [&](int e) {
            if (t.top[e] < 0) return 1;
            int s = 0;
            for (int x : t.verts[t.top[e]].in) s += rec(x);
            return std::max(1, s);
        };
        total += rec(t.root);
    }
    return total;
}

// the region the fiber of point p lands on; empty optional when none exists
std::optional<std::vector<int>> region_of(const Forest& f, const std::vector<int>& inG, int outG) {
    auto [tc, tl] = f.locate(outG);
    std::vector<int> inL;
    for (int g : inG) {
        auto [c2, l2] = f.locate(g);
        if (c2 != tc) return std::nullopt;
        inL.push_back(l2);
    }
    std::sort(inL.begin(), inL.end());
    inL.erase(std::unique(inL.begin(), inL.end()), inL.end());
    if (static_cast<int>(inL.size()) != static_cast<int>(inG.size())) return std::nullopt;
    return op_region(f.components[tc], tl, inL);
}

// classification, elementary/obliviant flags, and rule-derived marks
void derive_tags(OmegaStarSimplex& s, const Forest& f, const std::vector<FaceRef>& normMarks) {
    const NFSimplex& a = s.base;
    s.edgeTypes.assign(a.dim(), 0);
    s.base.markedEdges.clear();
    for (int j = 0; j < a.dim(); ++j) {
        const PartialMap& m = a.chain[j];
        const int sj = a.sizes[j], sj1 = a.sizes[j + 1];
        bool allIdentity = true, tailIdentity = true;
        std::vector<int> fiber1;
        for (int p = 1; p <= sj1; ++p) {
            std::vector<int> fiber;
            for (int b = 1; b <= sj; ++b)
                if (m.at(b) == p) fiber.push_back(b);
            if (p == 1) fiber1 = fiber;
            bool ident =
                fiber.size() == 1 && s.zeta[j][fiber[0] - 1] == s.zeta[j + 1][p - 1];
            if (!ident) {
                allIdentity = false;
                if (p >= 2) tailIdentity = false;
            }
        }

        bool isForget = false;
        for (int x = 1; x <= sj && !isForget; ++x) isForget = (m == forget(sj, x));
        if (isForget) {
            if (allIdentity) s.edgeTypes[j] = 1;
        } else if (sj1 >= 1 && sj - sj1 + 1 >= 1 && m == mu(sj - sj1 + 1, sj1 - 1) &&
                   tailIdentity) {
            std::vector<int> in;
            for (int b : fiber1) in.push_back(s.zeta[j][b - 1]);
            auto reg = region_of(f, in, s.zeta[j + 1][0]);
            if (reg && reg->size() == 1) s.edgeTypes[j] = 3;
        }
        if (s.edgeTypes[j] == 0 && m.total() && m.inert() && allIdentity) s.edgeTypes[j] = 2;

        // marked when inert and every unary region is degenerate or marked
        if (m.inert()) {
            bool marked = true;
            for (std::size_t k = 0; k < m.map.size() && marked; ++k) {
                int src = s.zeta[j][m.defn[k] - 1];
                int dst = s.zeta[j + 1][m.map[k] - 1];
                if (src == dst) continue;
                FaceRef cell = normalize_face({{src, dst}, {{{src}, dst}}});
                marked = std::binary_search(normMarks.begin(), normMarks.end(), cell);
            }
            if (marked) s.base.markedEdges.push_back(j);
        }
    }
    s.elementary = std::none_of(s.edgeTypes.begin(), s.edgeTypes.end(),
                                [](int t) { return t == 0; });
    s.obliviant = std::all_of(s.edgeTypes.begin(), s.edgeTypes.end(),
                              [](int t) { return t == 1; });
}

}  // namespace

std::vector<OmegaStarSimplex> omega_star_simplices(const Forest& f,
                                                   const std::vector<FaceRef>& marks, int n) {
    if (n < 0) throw std::invalid_argument("omega_star_simplices: negative dimension");
    std::vector<FaceRef> normMarks;
    for (const FaceRef& m : marks) normMarks.push_back(normalize_face(m));
    std::sort(normMarks.begin(), normMarks.end());

    const int bound = max_independent(f);
    std::vector<OmegaStarSimplex> out;

    std::vector<int> sizes(n + 1);
    std::function<void(int)> bySizes = [&](int i) {
        if (i == n + 1) {
            // odometer over the surjective maps of each step
            std::vector<std::vector<PartialMap>> options;
            for (int k = 0; k < n; ++k) {
                options.push_back(all_partial_maps(sizes[k], sizes[k + 1], true));
                if (options.back().empty()) return;
            }
            std::vector<std::size_t> pick(n, 0);
            while (true) {
                NFSimplex a{sizes, {}, {}};
                for (int k = 0; k < n; ++k) a.chain.push_back(options[k][pick[k]]);
                OmegaImage im = omega_object(a);
                if (im.empty) {
                    OmegaStarSimplex s{std::move(a),
                                       std::vector<std::vector<int>>(n + 1), {}, false, false};
                    derive_tags(s, f, normMarks);
                    out.push_back(std::move(s));
                } else {
                    for (const ThinOperadMap& cm : dendrices(free_operad(f), im.forest)) {
                        ForestMor mor{im.forest, f, {}, {}};
                        bool consistent = true;
                        for (int c = 0; c < im.forest.component_count() && consistent; ++c) {
                            const Tree& t = im.forest.components[c];
                            std::vector<int> em(t.edge_count());
                            int comp = -1;
                            for (int e = 0; e < t.edge_count(); ++e) {
                                auto [tc, tl] = f.locate(cm.colourMap[im.forest.global(c, e)]);
                                if (comp < 0) comp = tc;
                                if (tc != comp) consistent = false;
                                em[e] = tl;
                            }
                            mor.alpha.push_back(comp);
                            mor.edgeMaps.push_back(std::move(em));
                        }
                        if (!consistent || !valid_forest_mor(mor)) continue;
                        OmegaStarSimplex s;
                        s.base = a;
                        s.zeta.assign(n + 1, {});
                        for (int i2 = 0; i2 <= n; ++i2)
                            for (int p = 1; p <= sizes[i2]; ++p)
                                s.zeta[i2].push_back(cm.colourMap[im.levelEdges[i2][p - 1]]);
                        derive_tags(s, f, normMarks);
                        out.push_back(std::move(s));
                    }
                }
                int k = n - 1;
                while (k >= 0 && ++pick[k] == options[k].size()) pick[k--] = 0;
                if (k < 0) break;
            }
            return;
        }
        int hi = i == 0 ? bound : sizes[i - 1];
        for (int v = hi; v >= 0; --v) {
            sizes[i] = v;
            bySizes(i + 1);
        }
    };
    bySizes(0);
    std::sort(out.begin(), out.end());
    return out;
}

bool omega_star_degenerate(const OmegaStarSimplex& s) {
    for (int j = 0; j < s.base.dim(); ++j)
        if (s.base.chain[j] == identity_pmap(s.base.sizes[j]) && s.zeta[j] == s.zeta[j + 1])
            return true;
    return false;
}

OmegaStarSimplex omega_star_face(const OmegaStarSimplex& s, int i, const Forest& f,
                                 const std::vector<FaceRef>& marks) {
    OmegaStarSimplex r;
    NFSimplex stripped = s.base;
    stripped.markedEdges.clear();
    r.base = nf_face(stripped, i);
    r.zeta = s.zeta;
    r.zeta.erase(r.zeta.begin() + i);
    std::vector<FaceRef> normMarks;
    for (const FaceRef& m : marks) normMarks.push_back(normalize_face(m));
    std::sort(normMarks.begin(), normMarks.end());
    derive_tags(r, f, normMarks);
    return r;
}

ForestMor omega_star_mor(const OmegaStarSimplex& s, const Forest& f) {
    OmegaImage im = omega_object(s.base);
    if (im.empty) return {Forest{}, f, {}, {}};
    ForestMor mor{im.forest, f, {}, {}};
    for (int c = 0; c < im.forest.component_count(); ++c) {
        const Tree& t = im.forest.components[c];
        std::vector<int> em(t.edge_count());
        int comp = -1;
        for (int e = 0; e < t.edge_count(); ++e) {
            auto [i, p] = im.edgeNames[im.forest.global(c, e)];
            auto [tc, tl] = f.locate(s.zeta[i][p - 1]);
            if (comp < 0) comp = tc;
            assert(tc == comp);
            em[e] = tl;
        }
        mor.alpha.push_back(comp);
        mor.edgeMaps.push_back(std::move(em));
    }
    return mor;
}

// Layered shuffles ------------------------------------------------------------

bool shuffle_layered(const Shuffle& s, const std::vector<int>& lambdaLeft,
                     const std::vector<int>& lambdaRight) {
    const Forest& F = s.forest;
    const int V = F.vertex_count();
    std::vector<int> label(V);
    std::map<std::pair<bool, int>, int> lid;
    for (int v = 0; v < V; ++v) {
        auto [left, srcV] = s.provenance[v];
        std::pair<bool, int> key{left, left ? lambdaLeft[srcV] : lambdaRight[srcV]};
        auto [it, fresh] = lid.insert({key, static_cast<int>(lid.size())});
        label[v] = it->second;
    }
    // layer levels must be constant on labels and step by one along edges
    std::vector<std::vector<std::pair<int, int>>> adj(lid.size());
    for (int c = 0; c < F.component_count(); ++c) {
        const Tree& t = F.components[c];
        for (int e = 0; e < t.edge_count(); ++e) {
            if (!t.is_inner_edge(e)) continue;
            int above = label[F.voffset(c) + t.top[e]];
            int below = label[F.voffset(c) + t.bottom(e)];
            adj[above].push_back({below, 1});
            adj[below].push_back({above, -1});
        }
    }
    const int L = static_cast<int>(lid.size());
    std::vector<int> pot(L), comp(L, -1);
    for (int start = 0, nc = 0; start < L; ++start) {
        if (comp[start] >= 0) continue;
        comp[start] = nc;
        pot[start] = 0;
        std::vector<int> queue{start};
        while (!queue.empty()) {
            int x = queue.back();
            queue.pop_back();
            for (auto [y, d] : adj[x]) {
                if (comp[y] < 0) {
                    comp[y] = nc;
                    pot[y] = pot[x] + d;
                    queue.push_back(y);
                } else if (pot[y] != pot[x] + d) {
                    return false;
                }
            }
        }
        ++nc;
    }
    // two labels sharing a layer would merge distinct factor layers
    std::vector<std::pair<int, int>> seen;
    for (int x = 0; x < L; ++x) seen.push_back({comp[x], pot[x]});
    std::sort(seen.begin(), seen.end());
    return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
}

std::vector<Shuffle> layered_shuffles(const NFSimplex& a, const NFSimplex& b) {
    OmegaImage ia = omega_object(a), ib = omega_object(b);
    if (ia.empty || ib.empty) throw EmptyForest("layered_shuffles: constant-<0> factor");
    std::vector<int> lamA, lamB;
    for (auto& [i, p] : ia.vertexNames) lamA.push_back(i);
    for (auto& [i, p] : ib.vertexNames) lamB.push_back(i);
    std::vector<Shuffle> out;
    for (Shuffle& s : shuffles(ia.forest, ib.forest))
        if (shuffle_layered(s, lamA, lamB)) out.push_back(std::move(s));
    return out;
}

TensorSubcomplex theta(const NFSimplex& a, const NFSimplex& b) {
    OmegaImage ia = omega_object(a), ib = omega_object(b);
    if (ia.empty || ib.empty) throw EmptyForest("theta: constant-<0> factor");
    TensorUniverse u{ia.forest, ib.forest};
    std::vector<FaceRef> faces;
    for (const Shuffle& s : layered_shuffles(a, b)) faces.push_back(shuffle_face(u, s));
    return make_tensor_subcomplex(std::move(u), std::move(faces));
}

}  // namespace forestcalc
