#include "forestcalc/anodyne.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <utility>

namespace forestcalc {

namespace {

using RefSet = std::set<FaceRef>;

constexpr int kSegalEdgeBound = 16;
constexpr int kSegalVertexBound = 10;
constexpr int kShuffleBound = 2000;
constexpr int kMaskBound = 20;

std::string ref_str(const FaceRef& f) {
    std::string s = "edges{";
    for (std::size_t i = 0; i < f.edges.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(f.edges[i]);
    }
    s += "} ops{";
    bool first = true;
    for (const auto& [ins, out] : f.ops) {
        if (!first) s += ' ';
        first = false;
        s += '(';
        for (std::size_t i = 0; i < ins.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(ins[i]);
        }
        s += ")->" + std::to_string(out);
    }
    s += '}';
    return s;
}

int op_with_output(const FaceRef& f, int e) {
    for (std::size_t i = 0; i < f.ops.size(); ++i)
        if (f.ops[i].second == e) return static_cast<int>(i);
    return -1;
}

int op_with_input(const FaceRef& f, int e) {
    for (std::size_t i = 0; i < f.ops.size(); ++i)
        if (std::binary_search(f.ops[i].first.begin(), f.ops[i].first.end(), e))
            return static_cast<int>(i);
    return -1;
}

void add_closure(RefSet& s, const FaceRef& f) {
    for (const FaceRef& x : face_closure(f)) s.insert(x);
}

RefSet closure_set(const std::vector<FaceRef>& faces) {
    RefSet s;
    for (const FaceRef& f : faces) add_closure(s, f);
    return s;
}

FaceRef unary_corolla_ref(int leaf, int out) {
    FaceRef r;
    r.edges = {leaf, out};
    r.ops = {{{leaf}, out}};
    return normalize_face(std::move(r));
}

std::vector<unsigned> masks_by_popcount(int n) {
    if (n > kMaskBound) throw SizeBoundExceeded("too many free inner edges in one pruning");
    std::vector<unsigned> ms(std::size_t{1} << n);
    std::iota(ms.begin(), ms.end(), 0u);
    std::stable_sort(ms.begin(), ms.end(), [](unsigned a, unsigned b) {
        int pa = std::popcount(a), pb = std::popcount(b);
        return pa != pb ? pa < pb : a < b;
    });
    return ms;
}

}  // namespace

FaceRef contract_face(const FaceRef& f, int e) {
    int ai = op_with_output(f, e);
    int bi = op_with_input(f, e);
    if (ai < 0 || bi < 0)
        throw std::invalid_argument("contract_face: edge " + std::to_string(e) +
                                    " is not inner in the cell");
    FaceRef r;
    for (int x : f.edges)
        if (x != e) r.edges.push_back(x);
    std::vector<int> ins;
    for (int x : f.ops[bi].first)
        if (x != e) ins.push_back(x);
    ins.insert(ins.end(), f.ops[ai].first.begin(), f.ops[ai].first.end());
    for (std::size_t i = 0; i < f.ops.size(); ++i)
        if (static_cast<int>(i) != ai && static_cast<int>(i) != bi) r.ops.push_back(f.ops[i]);
    r.ops.emplace_back(std::move(ins), f.ops[bi].second);
    return normalize_face(std::move(r));
}

FaceRef chop_root_face(const FaceRef& f, int r) {
    int ai = op_with_output(f, r);
    if (ai < 0) throw std::invalid_argument("chop_root_face: no operation outputs the edge");
    if (op_with_input(f, r) >= 0)
        throw std::invalid_argument("chop_root_face: edge is not a root of the cell");
    FaceRef out;
    for (int x : f.edges)
        if (x != r) out.edges.push_back(x);
    for (std::size_t i = 0; i < f.ops.size(); ++i)
        if (static_cast<int>(i) != ai) out.ops.push_back(f.ops[i]);
    if (out.edges.empty())
        throw std::invalid_argument("chop_root_face: chopping the cell's only component");
    return normalize_face(std::move(out));
}

FaceRef chop_leaf_face(const FaceRef& f, int op) {
    if (op < 0 || op >= static_cast<int>(f.ops.size()))
        throw std::invalid_argument("chop_leaf_face: no such operation");
    for (int x : f.ops[op].first)
        if (op_with_output(f, x) >= 0)
            throw std::invalid_argument("chop_leaf_face: operation input is not a cell leaf");
    FaceRef out;
    const auto& ins = f.ops[op].first;
    for (int x : f.edges)
        if (!std::binary_search(ins.begin(), ins.end(), x)) out.edges.push_back(x);
    for (std::size_t i = 0; i < f.ops.size(); ++i)
        if (static_cast<int>(i) != op) out.ops.push_back(f.ops[i]);
    return normalize_face(std::move(out));
}

// Verifier --------------------------------------------------------------------

VerifyReport verify_certificate(const Certificate& c) {
    RefSet endCl, cur;
    try {
        endCl = closure_set(c.end);
        cur = closure_set(c.start);
    } catch (const std::exception& ex) {
        return {false, -1, std::string("malformed boundary data: ") + ex.what()};
    }
    for (const FaceRef& f : cur)
        if (!endCl.count(f))
            return {false, -1, "start cell outside the end subcomplex: " + ref_str(f)};

    RefSet marks;
    for (const FaceRef& raw : c.startMarks) {
        FaceRef m = normalize_face(raw);
        if (!face_is_unary_corolla(m) || !cur.count(m))
            return {false, -1, "start mark is not a unary corolla of the start: " + ref_str(m)};
        marks.insert(std::move(m));
    }

    const Forest* amb = std::get_if<Forest>(&c.ambient);

    for (int si = 0; si < static_cast<int>(c.steps.size()); ++si) {
        const CertStep& s = c.steps[si];
        FaceRef cell = normalize_face(s.cell);
        auto fail = [&](const std::string& why) -> VerifyReport {
            return {false, si, "StepNotPushout: " + why};
        };

        std::vector<FaceRef> prescribed;  // what s.marks must list
        std::vector<FaceRef> needMarked;  // must be marked before the step
        RefSet cellCl, hornCl;
        bool markOnly = false;

        if (s.gen == "InnerHorn" || s.gen == "GeneralizedHorn") {
            if (cell.edges.empty()) return fail("empty cell");
            if (amb && !valid_face(*amb, cell))
                return fail("cell is not a face of the ambient forest: " + ref_str(cell));
            std::vector<int> sig = s.sigma;
            std::sort(sig.begin(), sig.end());
            if (sig.empty() || std::adjacent_find(sig.begin(), sig.end()) != sig.end())
                return fail("withheld contractions must be a nonempty set of distinct edges");
            if (s.gen == "InnerHorn" && sig.size() != 1)
                return fail("a plain inner horn withholds exactly one contraction");
            std::vector<FaceRef> omitted;
            for (int e : sig) {
                if (op_with_output(cell, e) < 0 || op_with_input(cell, e) < 0)
                    return fail("edge " + std::to_string(e) + " is not inner in the cell");
                omitted.push_back(contract_face(cell, e));
            }
            std::vector<FaceRef> domain;
            for (FaceRef& b : face_boundary_faces(cell))
                if (std::find(omitted.begin(), omitted.end(), b) == omitted.end())
                    domain.push_back(std::move(b));
            cellCl = closure_set({cell});
            hornCl = closure_set(domain);
        } else if (s.gen == "RootHorn" || s.gen == "LeafHorn") {
            if (cell.edges.empty()) return fail("empty cell");
            if (amb && !valid_face(*amb, cell))
                return fail("cell is not a face of the ambient forest: " + ref_str(cell));
            FaceRef corolla, omitted;
            if (s.gen == "RootHorn") {
                int ai = op_with_output(cell, s.special);
                if (ai < 0 || cell.ops[ai].first.size() != 1)
                    return fail("designated root operation is missing or not unary");
                if (op_with_input(cell, s.special) >= 0)
                    return fail("designated edge does not head its component");
                corolla = unary_corolla_ref(cell.ops[ai].first[0], s.special);
                omitted = chop_root_face(cell, s.special);
            } else {
                int ai = op_with_input(cell, s.special);
                if (ai < 0 || cell.ops[ai].first.size() != 1)
                    return fail("designated leaf operation is missing or not unary");
                if (op_with_output(cell, s.special) >= 0)
                    return fail("designated edge is not a leaf of the cell");
                corolla = unary_corolla_ref(s.special, cell.ops[ai].second);
                omitted = chop_leaf_face(cell, ai);
            }
            std::vector<FaceRef> domain;
            for (FaceRef& b : face_boundary_faces(cell))
                if (b != omitted) domain.push_back(std::move(b));
            cellCl = closure_set({cell});
            hornCl = closure_set(domain);
            prescribed = {corolla};
            if (cur.count(corolla)) needMarked = {corolla};
        } else if (s.gen == "M3") {
            if (cell.ops.size() != 2 || cell.edges.size() != 3)
                return fail("M3 needs a two-operation linear cell");
            int first = -1, second = -1;
            for (int i = 0; i < 2; ++i)
                if (cell.ops[i].first.size() == 1 &&
                    op_with_output(cell, cell.ops[i].first[0]) == 1 - i) {
                    first = 1 - i;
                    second = i;
                }
            if (first < 0 || cell.ops[first].first.size() != 1)
                return fail("M3 needs two chained unary operations");
            int a = cell.ops[first].first[0];
            int b = cell.ops[first].second;
            int cc = cell.ops[second].second;
            if (!cur.count(cell)) return fail("M3 source cell is not present");
            needMarked = {unary_corolla_ref(a, b), unary_corolla_ref(b, cc)};
            prescribed = {unary_corolla_ref(a, cc)};
            markOnly = true;
        } else if (s.gen == "M5") {
            const TensorUniverse* u = std::get_if<TensorUniverse>(&c.ambient);
            if (!u) return fail("M5 needs a tensor ambient");
            if (!is_simplex(u->left)) return fail("M5 needs a linear left factor");
            int k = u->right.component_count();
            if (k < 2) return fail("M5 needs at least two summands on the right");
            Subcomplex lf = full_subcomplex(u->left);
            TensorSubcomplex dom = tensor_subcomplex(boundary(u->left),
                                                     full_subcomplex(u->right), false);
            for (int ci = 0; ci < k; ++ci) {
                FaceRef comp;
                int off = u->right.offset(ci);
                const Tree& t = u->right.components[ci];
                for (int e = 0; e < t.edge_count(); ++e) comp.edges.push_back(off + e);
                for (const Vertex& v : t.verts) {
                    std::vector<int> ins;
                    for (int l : v.in) ins.push_back(off + l);
                    comp.ops.emplace_back(std::move(ins), off + v.out);
                }
                dom = join(dom, tensor_subcomplex(
                                    lf, make_subcomplex(u->right, {normalize_face(comp)}),
                                    false));
            }
            TensorSubcomplex full =
                tensor_subcomplex(lf, full_subcomplex(u->right), false);
            for (const FaceRef& x : dom.closure()) hornCl.insert(x);
            for (const FaceRef& x : full.closure()) cellCl.insert(x);
        } else if (s.gen == "M4") {
            return {false, si,
                    "generator M4 concerns the infinite marked interval and has no finite "
                    "cell image; certificates must avoid it"};
        } else {
            return {false, si, "UnknownGenerator: '" + s.gen + "'"};
        }

        if (!markOnly) {
            RefSet inter;
            for (const FaceRef& x : cellCl)
                if (cur.count(x)) inter.insert(x);
            if (inter != hornCl) {
                for (const FaceRef& x : inter)
                    if (!hornCl.count(x))
                        return fail("cell face already present outside the horn: " + ref_str(x));
                for (const FaceRef& x : hornCl)
                    if (!inter.count(x)) return fail("horn face missing: " + ref_str(x));
            }
        }

        std::vector<FaceRef> got;
        for (const FaceRef& m : s.marks) got.push_back(normalize_face(m));
        std::sort(got.begin(), got.end());
        got.erase(std::unique(got.begin(), got.end()), got.end());
        std::sort(prescribed.begin(), prescribed.end());
        if (got != prescribed)
            return fail("step marks do not match the generator's prescription");
        for (const FaceRef& m : needMarked)
            if (!marks.count(m))
                return fail("required marked corolla is unmarked: " + ref_str(m));

        cur.insert(cellCl.begin(), cellCl.end());
        marks.insert(prescribed.begin(), prescribed.end());
    }

    if (cur != endCl) {
        std::string why = "GapRemaining:";
        int shown = 0;
        for (const FaceRef& x : endCl)
            if (!cur.count(x) && shown < 3) {
                why += " missing " + ref_str(x);
                ++shown;
            }
        for (const FaceRef& x : cur)
            if (!endCl.count(x) && shown < 6) {
                why += " extra " + ref_str(x);
                ++shown;
            }
        return {false, -1, why};
    }
    RefSet endMarks;
    for (const FaceRef& raw : c.endMarks) {
        FaceRef m = normalize_face(raw);
        if (!face_is_unary_corolla(m) || !endCl.count(m))
            return {false, -1, "end mark is not a unary corolla of the end: " + ref_str(m)};
        endMarks.insert(std::move(m));
    }
    if (marks != endMarks) {
        std::string why = "GapRemaining: marking mismatch;";
        for (const FaceRef& x : endMarks)
            if (!marks.count(x)) why += " unmarked " + ref_str(x);
        for (const FaceRef& x : marks)
            if (!endMarks.count(x)) why += " overmarked " + ref_str(x);
        return {false, -1, why};
    }
    return {};
}

// Generalized horns -------------------------------------------------------------

Certificate certify_generalized_horn(const Tree& t, const std::vector<int>& inner) {
    if (inner.empty())
        throw std::invalid_argument("a generalized horn withholds at least one contraction");
    std::vector<int> A = inner;
    std::sort(A.begin(), A.end());
    if (std::adjacent_find(A.begin(), A.end()) != A.end())
        throw std::invalid_argument("duplicate inner edge");
    for (int e : A)
        if (e < 0 || e >= t.edge_count() || !t.is_inner_edge(e))
            throw NotInnerEdge("edge " + std::to_string(e) + " is not inner");

    Forest f = forest_of(t);
    Certificate c;
    c.ambient = f;
    c.start = inner_horn(f, A).maximal;
    c.end = {whole_face(f)};

    std::function<void(const FaceRef&, std::vector<int>)> gh =
        [&](const FaceRef& cell, std::vector<int> sig) {
            if (sig.size() == 1) {
                c.steps.push_back({"InnerHorn", cell, sig, -1, {}});
                return;
            }
            int e = sig.back();
            sig.pop_back();
            gh(contract_face(cell, e), sig);
            gh(cell, sig);
        };
    gh(whole_face(f), A);
    return c;
}

// Segal cores -------------------------------------------------------------------

Certificate certify_segal_core(const Forest& f) {
    if (f.edge_count() > kSegalEdgeBound || f.vertex_count() > kSegalVertexBound)
        throw SizeBoundExceeded("forest too large for the Segal-core filtration");

    Certificate c;
    c.ambient = f;
    c.start = segal_core(f).maximal;
    c.end = {whole_face(f)};

    FaceRef whole = whole_face(f);
    std::set<std::pair<std::vector<int>, int>> vertexOps(whole.ops.begin(), whole.ops.end());

    // cells all of whose operations are literal vertices, ordered by widest
    // component, then total weight, then bare-edge count
    struct Ext {
        int n, total, eta;
        FaceRef ref;
        bool operator<(const Ext& o) const {
            return std::tie(n, total, eta, ref) < std::tie(o.n, o.total, o.eta, o.ref);
        }
    };
    std::vector<Ext> ext;
    for (const FaceRef& r : face_closure(whole)) {
        bool external = true;
        for (const auto& op : r.ops)
            if (!vertexOps.count(op)) {
                external = false;
                break;
            }
        if (!external) continue;
        Forest b = materialize_face(r).first;
        int n = 0, eta = 0;
        for (const Tree& tc : b.components) {
            n = std::max(n, tc.vertex_count());
            if (tc.is_eta()) ++eta;
        }
        if (n < 2) continue;
        ext.push_back({n, b.vertex_count(), eta, r});
    }
    std::sort(ext.begin(), ext.end());

    RefSet cur = closure_set(c.start);
    for (const Ext& x : ext) {
        if (cur.count(x.ref)) continue;
        std::vector<int> sig;
        for (int e : x.ref.edges)
            if (op_with_output(x.ref, e) >= 0 && op_with_input(x.ref, e) >= 0)
                sig.push_back(e);
        c.steps.push_back(
            {sig.size() == 1 ? "InnerHorn" : "GeneralizedHorn", x.ref, sig, -1, {}});
        add_closure(cur, x.ref);
    }
    return c;
}

// Pushout products ----------------------------------------------------------------

namespace {

int shuffle_uid(const TensorUniverse& u, const Shuffle& R, int ge) {
    auto [a, b] = R.edgePairs[ge];
    return u.edge_id(a, b);
}

FaceRef pruning_ref(const TensorUniverse& u, const Shuffle& R, const std::vector<int>& P) {
    const Forest& rf = R.forest;
    FaceRef r;
    for (int comp = 0; comp < rf.component_count(); ++comp)
        r.edges.push_back(shuffle_uid(u, R, rf.global(comp, 0)));
    for (int gv : P) {
        auto [comp, lv] = rf.locate_vertex(gv);
        const Vertex& v = rf.components[comp].verts[lv];
        std::vector<int> ins;
        for (int le : v.in) {
            int uid = shuffle_uid(u, R, rf.global(comp, le));
            r.edges.push_back(uid);
            ins.push_back(uid);
        }
        r.ops.emplace_back(std::move(ins), shuffle_uid(u, R, rf.global(comp, v.out)));
    }
    return normalize_face(std::move(r));
}

// global edges of R inner to the pruning (both end vertices included)
std::vector<int> pruning_inner(const Forest& rf, const std::set<int>& pset) {
    std::vector<int> out;
    for (int comp = 0; comp < rf.component_count(); ++comp) {
        const Tree& t = rf.components[comp];
        int voff = rf.voffset(comp);
        for (int le = 0; le < t.edge_count(); ++le) {
            int tv = t.top[le];
            if (tv < 0) continue;
            int bv = t.bottom(le);
            if (bv < 0) continue;
            if (pset.count(voff + tv) && pset.count(voff + bv))
                out.push_back(rf.global(comp, le));
        }
    }
    return out;
}

std::vector<std::vector<int>> forest_downsets(const Forest& f) {
    std::vector<std::vector<int>> out{{}};
    for (int comp = 0; comp < f.component_count(); ++comp) {
        const Tree& t = f.components[comp];
        std::vector<std::vector<int>> list;
        if (t.is_eta()) {
            list = {{}};
        } else {
            std::function<std::vector<std::vector<int>>(int)> rec =
                [&](int v) -> std::vector<std::vector<int>> {
                std::vector<std::vector<int>> res{{}};
                std::vector<std::vector<int>> acc{{v}};
                for (int e : t.verts[v].in) {
                    if (t.top[e] < 0) continue;
                    auto sub = rec(t.top[e]);
                    std::vector<std::vector<int>> nxt;
                    for (const auto& a : acc)
                        for (const auto& s : sub) {
                            auto m = a;
                            m.insert(m.end(), s.begin(), s.end());
                            nxt.push_back(std::move(m));
                        }
                    acc = std::move(nxt);
                }
                res.insert(res.end(), acc.begin(), acc.end());
                return res;
            };
            list = rec(t.top[0]);
            for (auto& s : list)
                for (int& v : s) v += f.voffset(comp);
        }
        std::vector<std::vector<int>> nxt;
        for (const auto& a : out)
            for (const auto& s : list) {
                auto m = a;
                m.insert(m.end(), s.begin(), s.end());
                nxt.push_back(std::move(m));
            }
        out = std::move(nxt);
        if (out.size() > 200000) throw SizeBoundExceeded("too many prunings");
    }
    for (auto& s : out) std::sort(s.begin(), s.end());
    return out;
}

struct Tour {
    const TensorUniverse& u;
    RefSet& cur;
    std::vector<CertStep>& steps;
};

// one pruning's worth of flat horn steps; sigma is the set of special edges
void tour_flat(Tour& ctx, const Shuffle& R, const std::vector<int>& P,
               const std::set<int>& specialGe) {
    std::set<int> pset(P.begin(), P.end());
    std::vector<int> sigmaU, freeU;
    for (int ge : pruning_inner(R.forest, pset))
        (specialGe.count(ge) ? sigmaU : freeU).push_back(shuffle_uid(ctx.u, R, ge));
    if (sigmaU.empty()) return;
    std::sort(sigmaU.begin(), sigmaU.end());
    std::sort(freeU.begin(), freeU.end());
    FaceRef base = pruning_ref(ctx.u, R, P);
    for (unsigned mask : masks_by_popcount(static_cast<int>(freeU.size()))) {
        FaceRef cell = base;
        for (std::size_t j = 0; j < freeU.size(); ++j)
            if (!(mask >> j & 1u)) cell = contract_face(cell, freeU[j]);
        if (ctx.cur.count(cell)) continue;
        ctx.steps.push_back({sigmaU.size() == 1 ? "InnerHorn" : "GeneralizedHorn", cell,
                             sigmaU, -1, {}});
        add_closure(ctx.cur, cell);
    }
}

std::vector<int> shuffle_order(const TensorUniverse& u, const PercolationDag& dag) {
    std::vector<int> idx(dag.nodes.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<FaceRef> faces;
    faces.reserve(dag.nodes.size());
    for (const Shuffle& s : dag.nodes) faces.push_back(shuffle_face(u, s));
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return std::tie(dag.rank[a], faces[a]) < std::tie(dag.rank[b], faces[b]);
    });
    return idx;
}

std::vector<std::vector<int>> sorted_prunings(const TensorUniverse& u, const Shuffle& R,
                                              std::vector<std::vector<int>> sets) {
    std::vector<std::pair<FaceRef, std::vector<int>>> keyed;
    keyed.reserve(sets.size());
    for (auto& p : sets) keyed.emplace_back(pruning_ref(u, R, p), std::move(p));
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        if (a.second.size() != b.second.size()) return a.second.size() < b.second.size();
        return a.first < b.first;
    });
    std::vector<std::vector<int>> out;
    out.reserve(keyed.size());
    for (auto& [k, p] : keyed) out.push_back(std::move(p));
    return out;
}

Certificate pushout_inner(const Forest& f, int e, const Forest& g) {
    auto [ec, el] = f.locate(e);
    if (!f.components[ec].is_inner_edge(el))
        throw NotInnerEdge("designated edge is not inner in the first factor");
    TensorUniverse u{f, g};
    Certificate c;
    c.ambient = u;
    TensorSubcomplex a0 =
        join(tensor_subcomplex(inner_horn(f, {e}), full_subcomplex(g)),
             tensor_subcomplex(full_subcomplex(f), boundary(g)));
    c.start = a0.maximal;
    c.end = tensor_subcomplex(full_subcomplex(f), full_subcomplex(g)).maximal;

    int fv = f.voffset(ec) + f.components[ec].bottom(el);
    PercolationDag dag = percolation_order(f, g, PercDirection::left_minimal);
    if (static_cast<int>(dag.nodes.size()) > kShuffleBound)
        throw SizeBoundExceeded("too many shuffles");

    RefSet cur = closure_set(c.start);
    Tour ctx{u, cur, c.steps};
    for (int ri : shuffle_order(u, dag)) {
        const Shuffle& R = dag.nodes[ri];
        const Forest& rf = R.forest;
        std::set<int> specialGe;
        for (int comp = 0; comp < rf.component_count(); ++comp) {
            const Tree& t = rf.components[comp];
            for (int le = 0; le < t.edge_count(); ++le) {
                int ge = rf.global(comp, le);
                if (R.edgePairs[ge].first != e) continue;
                int bv = t.bottom(le);
                if (bv < 0) continue;
                if (R.provenance[rf.voffset(comp) + bv] == std::pair{true, fv})
                    specialGe.insert(ge);
            }
        }
        for (const auto& P : sorted_prunings(u, R, forest_downsets(rf)))
            tour_flat(ctx, R, P, specialGe);
    }
    return c;
}

Certificate pushout_root(const Forest& f, const Forest& g) {
    const Tree& S = f.components[0];
    if (S.is_eta() || S.verts[S.top[0]].in.size() != 1)
        throw std::invalid_argument("the root vertex of the first factor must be unary");
    int rootV = S.top[0];
    int x = S.verts[rootV].in[0];

    TensorUniverse u{f, g};
    Certificate c;
    c.ambient = u;
    FaceRef whole = whole_face(f);
    FaceRef rootChop = chop_root_face(whole, 0);
    std::vector<FaceRef> hornFaces;
    for (FaceRef& b : face_boundary_faces(whole))
        if (b != rootChop) hornFaces.push_back(std::move(b));
    TensorSubcomplex a0 =
        join(tensor_subcomplex(make_subcomplex(f, hornFaces), full_subcomplex(g)),
             tensor_subcomplex(full_subcomplex(f), boundary(g)));
    c.start = a0.maximal;
    c.end = tensor_subcomplex(full_subcomplex(f), full_subcomplex(g)).maximal;

    auto corolla = [&](int t) { return unary_corolla_ref(u.edge_id(x, t), u.edge_id(0, t)); };
    for (int t = 0; t < g.edge_count(); ++t) {
        if (a0.contains(corolla(t))) c.startMarks.push_back(corolla(t));
        c.endMarks.push_back(corolla(t));
    }

    PercolationDag dag = percolation_order(f, g, PercDirection::right_minimal);
    if (static_cast<int>(dag.nodes.size()) > kShuffleBound)
        throw SizeBoundExceeded("too many shuffles");

    RefSet cur = closure_set(c.start);
    Tour ctx{u, cur, c.steps};
    for (int ri : shuffle_order(u, dag)) {
        const Shuffle& R = dag.nodes[ri];
        const Tree& rt = R.forest.components[0];
        bool case2 = R.provenance[rt.top[0]] == std::pair{true, rootV};
        auto prunings = sorted_prunings(u, R, forest_downsets(R.forest));
        if (!case2) {
            std::set<int> specialGe;
            for (int le = 0; le < rt.edge_count(); ++le) {
                int tv = rt.top[le];
                if (tv >= 0 && R.provenance[tv] == std::pair{true, rootV})
                    specialGe.insert(le);
            }
            for (const auto& P : prunings) tour_flat(ctx, R, P, specialGe);
        } else {
            for (const auto& P : prunings) {
                std::set<int> pset(P.begin(), P.end());
                std::vector<int> innerU;
                for (int ge : pruning_inner(R.forest, pset))
                    innerU.push_back(shuffle_uid(u, R, ge));
                std::sort(innerU.begin(), innerU.end());
                FaceRef base = pruning_ref(u, R, P);
                for (unsigned mask : masks_by_popcount(static_cast<int>(innerU.size()))) {
                    FaceRef cell = base;
                    for (std::size_t j = 0; j < innerU.size(); ++j)
                        if (!(mask >> j & 1u)) cell = contract_face(cell, innerU[j]);
                    if (cur.count(cell)) continue;
                    c.steps.push_back({"RootHorn", cell, {}, u.edge_id(0, 0), {corolla(0)}});
                    add_closure(cur, cell);
                }
            }
        }
    }
    return c;
}

Certificate pushout_leaf(const Forest& f, int l, const Forest& g) {
    const Tree& S = f.components[0];
    if (l < 0 || l >= S.edge_count() || !S.is_leaf_edge(l) || S.bottom(l) < 0 ||
        S.verts[S.bottom(l)].in.size() != 1)
        throw std::invalid_argument("the designated edge must be the leaf of a unary vertex");
    int vl = S.bottom(l);
    int m = S.verts[vl].out;

    TensorUniverse u{f, g};
    Certificate c;
    c.ambient = u;
    FaceRef whole = whole_face(f);
    int chopIdx = op_with_input(whole, l);
    FaceRef leafChop = chop_leaf_face(whole, chopIdx);
    std::vector<FaceRef> hornFaces;
    for (FaceRef& b : face_boundary_faces(whole))
        if (b != leafChop) hornFaces.push_back(std::move(b));
    TensorSubcomplex a0 =
        join(tensor_subcomplex(make_subcomplex(f, hornFaces), full_subcomplex(g)),
             tensor_subcomplex(full_subcomplex(f), boundary(g)));
    c.start = a0.maximal;
    c.end = tensor_subcomplex(full_subcomplex(f), full_subcomplex(g)).maximal;

    auto corolla = [&](int t) { return unary_corolla_ref(u.edge_id(l, t), u.edge_id(m, t)); };
    for (int t = 0; t < g.edge_count(); ++t) {
        if (a0.contains(corolla(t))) c.startMarks.push_back(corolla(t));
        c.endMarks.push_back(corolla(t));
    }

    PercolationDag dag = percolation_order(f, g, PercDirection::left_minimal);
    if (static_cast<int>(dag.nodes.size()) > kShuffleBound)
        throw SizeBoundExceeded("too many shuffles");

    RefSet cur = closure_set(c.start);
    Tour ctx{u, cur, c.steps};
    for (int ri : shuffle_order(u, dag)) {
        const Shuffle& R = dag.nodes[ri];
        const Tree& rt = R.forest.components[0];
        std::vector<int> copies;
        for (int v = 0; v < rt.vertex_count(); ++v)
            if (R.provenance[v] == std::pair{true, vl}) copies.push_back(v);

        // keep only prunings that never cut between a copy and its output edge
        std::vector<std::vector<int>> lprunings;
        for (auto& P : forest_downsets(R.forest)) {
            std::set<int> pset(P.begin(), P.end());
            bool closed = true;
            for (int w : copies) {
                int oe = rt.verts[w].out;
                bool edgePresent = oe == 0 || (rt.bottom(oe) >= 0 && pset.count(rt.bottom(oe)));
                if (edgePresent && !pset.count(w)) {
                    closed = false;
                    break;
                }
            }
            if (closed) lprunings.push_back(std::move(P));
        }

        for (const auto& P : sorted_prunings(u, R, std::move(lprunings))) {
            std::set<int> pset(P.begin(), P.end());
            std::vector<int> leafCopies;
            for (int w : copies) {
                if (!pset.count(w)) continue;
                int ie = rt.verts[w].in[0];
                if (rt.top[ie] < 0 || !pset.count(rt.top[ie])) leafCopies.push_back(w);
            }
            if (leafCopies.empty()) {
                std::set<int> specialGe;
                for (int w : copies)
                    if (pset.count(w)) specialGe.insert(rt.verts[w].in[0]);
                tour_flat(ctx, R, P, specialGe);
                continue;
            }
            std::vector<int> innerU;
            for (int ge : pruning_inner(R.forest, pset))
                innerU.push_back(shuffle_uid(u, R, ge));
            std::sort(innerU.begin(), innerU.end());
            FaceRef base = pruning_ref(u, R, P);
            for (unsigned mask : masks_by_popcount(static_cast<int>(innerU.size()))) {
                FaceRef cell = base;
                for (std::size_t j = 0; j < innerU.size(); ++j)
                    if (!(mask >> j & 1u)) cell = contract_face(cell, innerU[j]);
                if (cur.count(cell)) continue;
                struct Unroll {
                    int leafUid, outUid, t;
                };
                std::vector<Unroll> L;
                for (int w : leafCopies) {
                    int ie = rt.verts[w].in[0];
                    int oe = rt.verts[w].out;
                    int iu = shuffle_uid(u, R, ie), ou = shuffle_uid(u, R, oe);
                    if (op_with_output(cell, ou) >= 0 &&
                        cell.ops[op_with_output(cell, ou)] ==
                            std::pair<std::vector<int>, int>{{iu}, ou})
                        L.push_back({iu, ou, R.edgePairs[ie].second});
                }
                if (L.empty())
                    throw std::logic_error("leaf pushout product: uncovered cell without "
                                           "a surviving corolla");
                std::function<void(const FaceRef&, std::vector<Unroll>)> lh =
                    [&](const FaceRef& cc, std::vector<Unroll> ls) {
                        if (cur.count(cc)) return;
                        if (ls.size() == 1) {
                            c.steps.push_back({"LeafHorn", cc, {}, ls[0].leafUid,
                                               {corolla(ls[0].t)}});
                            add_closure(cur, cc);
                            return;
                        }
                        Unroll w = ls.back();
                        ls.pop_back();
                        lh(chop_leaf_face(cc, op_with_input(cc, w.leafUid)), ls);
                        lh(cc, ls);
                    };
                lh(cell, L);
            }
        }
    }
    return c;
}

}  // namespace

Certificate certify_pushout_product(PPKind kind, const Forest& f, int special,
                                    const Forest& g) {
    if (g.component_count() != 1)
        throw HypothesisViolated("the second factor must be a single tree");
    if (!tensor_hypotheses_hold(f, g))
        throw HypothesisViolated("factors outside the proven territory");
    if (kind != PPKind::inner && f.component_count() != 1)
        throw HypothesisViolated("root and leaf variants need a single tree");
    switch (kind) {
        case PPKind::inner:
            return pushout_inner(f, special, g);
        case PPKind::root:
            return pushout_root(f, g);
        case PPKind::leaf:
            return pushout_leaf(f, special, g);
    }
    throw std::invalid_argument("unknown pushout-product kind");
}

// Pointed-category side ----------------------------------------------------------

NFSimplex nf_core(NFSimplex a) {
    bool again = true;
    while (again) {
        again = false;
        for (std::size_t i = 0; i < a.chain.size(); ++i) {
            if (a.chain[i] != identity_pmap(a.sizes[i])) continue;
            a.chain.erase(a.chain.begin() + static_cast<long>(i));
            a.sizes.erase(a.sizes.begin() + static_cast<long>(i) + 1);
            std::vector<int> nm;
            for (int e : a.markedEdges) {
                if (e < static_cast<int>(i)) nm.push_back(e);
                else if (e > static_cast<int>(i)) nm.push_back(e - 1);
            }
            a.markedEdges = std::move(nm);
            again = true;
            break;
        }
    }
    return a;
}

std::set<NFSimplex> nf_cells_closure(const NFSimplex& a) {
    std::set<NFSimplex> out;
    std::vector<NFSimplex> stack{nf_core(a)};
    while (!stack.empty()) {
        NFSimplex x = std::move(stack.back());
        stack.pop_back();
        if (!out.insert(x).second) continue;
        if (x.dim() == 0) continue;
        for (int i = 0; i <= x.dim(); ++i) stack.push_back(nf_core(nf_face(x, i)));
    }
    return out;
}

PComplex make_pcomplex(const std::vector<NFSimplex>& cells,
                       const std::vector<NFSimplex>& marked) {
    PComplex p;
    for (const NFSimplex& c : cells) {
        if (!valid_nf_simplex(c, true))
            throw std::invalid_argument("cell is not a surjective chain");
        NFSimplex bare = c;
        bare.markedEdges.clear();
        for (const NFSimplex& f : nf_cells_closure(bare)) p.cells.insert(f);
    }
    for (const NFSimplex& m : marked) {
        NFSimplex bare = m;
        bare.markedEdges.clear();
        bare = nf_core(std::move(bare));
        if (bare.dim() != 1 || !bare.chain[0].inert())
            throw std::invalid_argument("marks must be inert one-simplices");
        if (!p.cells.count(bare)) throw std::invalid_argument("mark outside the complex");
        p.marked.insert(std::move(bare));
    }
    return p;
}

namespace {

NFSimplex nf_vertex(int m) { return {{m}, {}, {}}; }

NFSimplex nf_edge(int a, int b, const PartialMap& f) { return {{a, b}, {f}, {}}; }

PartialMap spine_composite(const NFSimplex& a, int i, int j) {
    PartialMap f = identity_pmap(a.sizes[i]);
    for (int k = i; k < j; ++k) f = compose(a.chain[k], f);
    return f;
}

NFSimplex nf_join(const NFSimplex& a, const PartialMap& leg) {
    NFSimplex j = a;
    j.sizes.push_back(leg.n);
    j.chain.push_back(leg);
    return j;
}

bool legs_partition(const std::vector<PartialMap>& legs, int m) {
    std::vector<int> seen;
    for (const PartialMap& g : legs) {
        if (!valid_partial_map(g) || g.m != m || !g.inert()) return false;
        seen.insert(seen.end(), g.defn.begin(), g.defn.end());
    }
    std::sort(seen.begin(), seen.end());
    if (static_cast<int>(seen.size()) != m) return false;
    for (int k = 1; k <= m; ++k)
        if (seen[k - 1] != k) return false;
    return true;
}

}  // namespace

PReport p_anodyne_step_check(const PComplex& cur, const PStep& s) {
    auto err = [](std::string why) { return PReport{false, std::move(why)}; };
    auto present = [&](const NFSimplex& x) { return cur.cells.count(nf_core(x)) > 0; };
    const NFSimplex& a = s.cell;

    if (s.gen == "PA0") {
        if (a.dim() != 2 || !valid_nf_simplex(a, true) || nf_core(a) != a)
            return err("PA0 needs a nondegenerate surjective 2-simplex");
        if (!cur.cells.count(a)) return err("PA0 source simplex not present");
        if (!cur.marked.count(nf_edge(a.sizes[0], a.sizes[1], a.chain[0])))
            return err("PA0 needs edge 01 marked");
        if (!cur.marked.count(nf_edge(a.sizes[1], a.sizes[2], a.chain[1])))
            return err("PA0 needs edge 12 marked");
        return {};
    }
    if (s.gen == "PA1") {
        if (a.dim() != 3 || !valid_nf_simplex(a, true) || nf_core(a) != a)
            return err("PA1 needs a nondegenerate surjective 3-simplex");
        if (!cur.cells.count(a)) return err("PA1 source simplex not present");
        if (a.sizes[2] != a.sizes[0] ||
            spine_composite(a, 0, 2) != identity_pmap(a.sizes[0]))
            return err("PA1 needs the 02 composite to be an identity");
        if (a.sizes[3] != a.sizes[1] ||
            spine_composite(a, 1, 3) != identity_pmap(a.sizes[1]))
            return err("PA1 needs the 13 composite to be an identity");
        return {};
    }
    if (s.gen == "PB0") {
        if (a.dim() != 1 || !valid_nf_simplex(a, true)) return err("PB0 needs a one-simplex");
        if (!a.chain[0].inert()) return err("PB0 needs an inert edge");
        if (nf_core(a) != a) return err("PB0 edge is degenerate");
        if (!cur.cells.count(nf_vertex(a.sizes[0]))) return err("PB0 source vertex missing");
        if (cur.cells.count(a)) return err("PB0 edge already present");
        return {};
    }
    if (s.gen == "PB1") {
        if (a.dim() != 0) return err("PB1 names the apex by a vertex cell");
        int m = a.sizes[0];
        if (s.legs.empty()) return err("PB1 needs at least one leg");
        for (const PartialMap& g : s.legs)
            if (g == identity_pmap(m)) return err("PB1 leg must not be an identity");
        if (!legs_partition(s.legs, m)) return err("PB1 legs must partition the apex");
        for (const PartialMap& g : s.legs)
            if (!cur.cells.count(nf_vertex(g.n)))
                return err("PB1 leg target vertex missing");
        if (cur.cells.count(a)) return err("PB1 apex already present");
        for (const PartialMap& g : s.legs)
            if (cur.cells.count(nf_edge(m, g.n, g))) return err("PB1 leg edge already present");
        return {};
    }
    if (s.gen == "PC0") {
        int n = a.dim();
        if (n < 2 || !valid_nf_simplex(a, true) || nf_core(a) != a)
            return err("PC0 needs a nondegenerate simplex of dimension at least two");
        if (!cur.marked.count(nf_edge(a.sizes[0], a.sizes[1], a.chain[0])))
            return err("PC0 needs edge 01 marked");
        for (int i = 1; i <= n; ++i)
            if (!present(nf_face(a, i))) return err("PC0 horn face missing");
        if (cur.cells.count(a)) return err("PC0 simplex already present");
        if (cur.cells.count(nf_core(nf_face(a, 0))))
            return err("PC0 outer face already present");
        return {};
    }
    if (s.gen == "PC1") {
        int n = a.dim();
        if (n < 2 || !valid_nf_simplex(a, true) || nf_core(a) != a)
            return err("PC1 needs a nondegenerate simplex of dimension at least two");
        if (s.hornIndex <= 0 || s.hornIndex >= n) return err("PC1 horn index must be inner");
        for (int i = 0; i <= n; ++i) {
            if (i == s.hornIndex) continue;
            if (!present(nf_face(a, i))) return err("PC1 horn face missing");
        }
        if (cur.cells.count(a)) return err("PC1 simplex already present");
        NFSimplex di = nf_core(nf_face(a, s.hornIndex));
        if (di.dim() == n - 1 && cur.cells.count(di))
            return err("PC1 inner face already present");
        return {};
    }
    if (s.gen == "PC2") {
        int n = a.dim();
        if (n < 1 || !valid_nf_simplex(a, true) || nf_core(a) != a)
            return err("PC2 needs a nondegenerate simplex of positive dimension");
        int m = a.sizes[n];
        if (s.legs.empty()) return err("PC2 needs at least one leg");
        if (!legs_partition(s.legs, m)) return err("PC2 legs must partition the last vertex");
        bool hasId = false;
        for (const PartialMap& g : s.legs)
            if (g == identity_pmap(m)) hasId = true;
        for (int p = 0; p <= n; ++p)
            if (!present(nf_face(a, p))) return err("PC2 boundary face missing");
        for (const PartialMap& g : s.legs) {
            if (g == identity_pmap(m)) continue;
            NFSimplex j = nf_join(a, g);
            for (int p = 0; p <= n; ++p)
                if (!present(nf_face(j, p))) return err("PC2 joined boundary face missing");
            NFSimplex e = nf_edge(m, g.n, g);
            if (!cur.cells.count(e)) return err("PC2 leg edge missing");
            if (!cur.marked.count(e)) return err("PC2 leg edge unmarked");
            if (cur.cells.count(j)) return err("PC2 leg join already present");
        }
        if (!hasId && cur.cells.count(a)) return err("PC2 base simplex already present");
        return {};
    }
    return err("UnknownGenerator: '" + s.gen + "'");
}

PComplex p_apply(const PComplex& cur, const PStep& s) {
    PReport r = p_anodyne_step_check(cur, s);
    if (!r.ok) throw std::invalid_argument(r.reason);
    PComplex out = cur;
    const NFSimplex& a = s.cell;
    auto addCells = [&](const NFSimplex& x) {
        for (const NFSimplex& f : nf_cells_closure(x)) out.cells.insert(f);
    };
    auto mark = [&](const NFSimplex& e) {
        NFSimplex k = nf_core(e);
        if (k.dim() == 1) out.marked.insert(std::move(k));
    };
    if (s.gen == "PA0") {
        mark(nf_edge(a.sizes[0], a.sizes[2], spine_composite(a, 0, 2)));
    } else if (s.gen == "PA1") {
        mark(nf_edge(a.sizes[0], a.sizes[1], a.chain[0]));
        mark(nf_edge(a.sizes[1], a.sizes[2], a.chain[1]));
        mark(nf_edge(a.sizes[2], a.sizes[3], a.chain[2]));
        mark(nf_edge(a.sizes[0], a.sizes[3], spine_composite(a, 0, 3)));
    } else if (s.gen == "PB0") {
        addCells(a);
        mark(a);
    } else if (s.gen == "PB1") {
        addCells(a);
        for (const PartialMap& g : s.legs) {
            NFSimplex e = nf_edge(a.sizes[0], g.n, g);
            addCells(e);
            mark(e);
        }
    } else if (s.gen == "PC0" || s.gen == "PC1") {
        addCells(a);
    } else if (s.gen == "PC2") {
        addCells(a);
        for (const PartialMap& g : s.legs)
            if (g != identity_pmap(a.sizes[a.dim()])) addCells(nf_join(a, g));
    }
    return out;
}

std::vector<PStep> certify_cone(const PComplex& x) {
    std::vector<PStep> steps;
    for (const NFSimplex& c : x.cells) {
        if (c.dim() != 0 || c.sizes[0] == 0) continue;
        NFSimplex e = nf_edge(c.sizes[0], 0, PartialMap{c.sizes[0], 0, {}, {}});
        if (x.cells.count(e)) continue;
        steps.push_back({"PB0", e, -1, {}});
    }
    int maxDim = 0;
    for (const NFSimplex& c : x.cells) maxDim = std::max(maxDim, c.dim());
    for (int d = 1; d <= maxDim; ++d)
        for (const NFSimplex& c : x.cells) {
            if (c.dim() != d || c.sizes.back() == 0) continue;
            int m = c.sizes.back();
            PartialMap empty{m, 0, {}, {}};
            if (x.cells.count(nf_join(c, empty))) continue;
            steps.push_back({"PC2", c, -1, {identity_pmap(m), empty}});
        }
    return steps;
}

}  // namespace forestcalc
