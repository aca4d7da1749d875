#include "forestcalc/thin_operad.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>
#include <map>
#include <set>

namespace forestcalc {

bool ThinOperad::is_thin() const {
    for (size_t i = 0; i + 1 < ops.size(); ++i)
        if (ops[i] == ops[i + 1]) return false;
    for (const auto& op : ops)
        if (std::adjacent_find(op.in.begin(), op.in.end()) != op.in.end()) return false;
    return true;
}

bool ThinOperad::has_op(const TOp& op) const {
    return std::binary_search(ops.begin(), ops.end(), op);
}

ThinOperad make_operad(std::vector<std::string> colourNames, std::vector<TOp> ops) {
    ThinOperad p;
    p.colourNames = std::move(colourNames);
    for (int c = 0; c < p.colour_count(); ++c) ops.push_back({{c}, c});
    for (auto& op : ops) std::sort(op.in.begin(), op.in.end());
    std::sort(ops.begin(), ops.end());
    ops.erase(std::unique(ops.begin(), ops.end(),
                          [](const TOp& a, const TOp& b) {
                              // collapse only the identity duplicates we just added
                              return a == b && a.in.size() == 1 && a.in[0] == a.out;
                          }),
              ops.end());
    p.ops = std::move(ops);
    p.openFlag = std::none_of(p.ops.begin(), p.ops.end(),
                              [](const TOp& op) { return op.in.empty(); });
    return p;
}

ThinOperad free_operad(const Forest& f) {
    if (f.components.empty()) throw EmptyForest("free operad needs a component");
    ThinOperad p;
    for (int c = 0; c < f.component_count(); ++c)
        for (const auto& n : f.components[c].names) p.colourNames.push_back(n);

    std::set<TOp> ops;
    for (int c = 0; c < p.colour_count(); ++c) ops.insert({{c}, c});
    for (int c = 0; c < f.component_count(); ++c) {
        const Tree& t = f.components[c];
        const int off = f.offset(c);
        for (int r = 0; r < t.edge_count(); ++r) {
            if (t.top[r] < 0) continue;
            // walk the frontier tips outward; each tip stops or extends
            std::function<void(std::vector<int>, size_t, std::vector<int>)> grow =
                [&](std::vector<int> tips, size_t idx, std::vector<int> L) {
                    if (idx == tips.size()) {
                        for (int& l : L) l += off;
                        std::sort(L.begin(), L.end());
                        ops.insert({std::move(L), r + off});
                        return;
                    }
                    int x = tips[idx];
                    {
                        auto L2 = L;
                        L2.push_back(x);
                        grow(tips, idx + 1, std::move(L2));
                    }
                    if (t.top[x] >= 0) {
                        auto tips2 = tips;
                        for (int y : t.verts[t.top[x]].in) tips2.push_back(y);
                        grow(std::move(tips2), idx + 1, std::move(L));
                    }
                };
            grow(t.verts[t.top[r]].in, 0, {});
        }
    }
    p.ops.assign(ops.begin(), ops.end());
    p.openFlag = f.open();
    return p;
}

namespace {

// compose g after f at input colour c of g; empty result when c not an input
std::optional<TOp> plug(const TOp& g, const TOp& f, int c) {
    auto it = std::find(g.in.begin(), g.in.end(), c);
    if (it == g.in.end() || f.out != c) return std::nullopt;
    TOp h;
    h.out = g.out;
    h.in.reserve(g.in.size() - 1 + f.in.size());
    for (auto jt = g.in.begin(); jt != g.in.end(); ++jt)
        if (jt != it) h.in.push_back(*jt);
    for (int x : f.in) h.in.push_back(x);
    std::sort(h.in.begin(), h.in.end());
    return h;
}

}  // namespace

ThinOperad bv_tensor(const ThinOperad& p, const ThinOperad& q) {
    if (!p.is_thin() || !q.is_thin()) throw NotThin("tensor factors must be thin");
    ThinOperad r;
    const int nq = q.colour_count();
    auto pair_id = [nq](int a, int b) { return a * nq + b; };
    for (int a = 0; a < p.colour_count(); ++a)
        for (int b = 0; b < nq; ++b)
            r.colourNames.push_back("(" + p.colourNames[a] + "," + q.colourNames[b] + ")");

    std::set<TOp> ops;
    std::deque<TOp> work;
    auto insert = [&](TOp op) {
        if (std::adjacent_find(op.in.begin(), op.in.end()) != op.in.end())
            throw NotThin("repeated input in tensor saturation");
        if (ops.insert(op).second) work.push_back(std::move(op));
    };
    for (int c = 0; c < static_cast<int>(r.colourNames.size()); ++c) insert({{c}, c});
    for (const auto& op : p.ops)
        for (int b = 0; b < nq; ++b) {
            TOp g;
            g.out = pair_id(op.out, b);
            for (int a : op.in) g.in.push_back(pair_id(a, b));
            std::sort(g.in.begin(), g.in.end());
            insert(std::move(g));
        }
    for (const auto& op : q.ops)
        for (int a = 0; a < p.colour_count(); ++a) {
            TOp g;
            g.out = pair_id(a, op.out);
            for (int b : op.in) g.in.push_back(pair_id(a, b));
            std::sort(g.in.begin(), g.in.end());
            insert(std::move(g));
        }
    while (!work.empty()) {
        TOp op = std::move(work.front());
        work.pop_front();
        std::vector<TOp> batch;
        for (const auto& other : ops) {
            if (auto h = plug(op, other, other.out); h && !ops.count(*h)) batch.push_back(*h);
            if (auto h = plug(other, op, op.out); h && !ops.count(*h)) batch.push_back(*h);
        }
        for (auto& h : batch) insert(std::move(h));
    }
    r.ops.assign(ops.begin(), ops.end());
    r.openFlag = p.openFlag && q.openFlag;
    return r;
}

ThinOperad com_minus(int maxArity) {
    std::vector<TOp> ops;
    for (int n = 2; n <= maxArity; ++n) ops.push_back({std::vector<int>(n, 0), 0});
    return make_operad({"*"}, std::move(ops));
}

bool valid_operad_map(const ThinOperad& p, const ThinOperad& q, const ThinOperadMap& f) {
    if (static_cast<int>(f.colourMap.size()) != p.colour_count()) return false;
    for (int c : f.colourMap)
        if (c < 0 || c >= q.colour_count()) return false;
    for (const auto& op : p.ops) {
        TOp img;
        img.out = f.colourMap[op.out];
        for (int c : op.in) img.in.push_back(f.colourMap[c]);
        std::sort(img.in.begin(), img.in.end());
        if (!q.has_op(img)) return false;
    }
    return true;
}

bool is_mono(const ThinOperad& p, const ThinOperad& q, const ThinOperadMap& f) {
    assert(valid_operad_map(p, q, f));
    std::set<int> seen(f.colourMap.begin(), f.colourMap.end());
    if (static_cast<int>(seen.size()) != p.colour_count()) return false;
    // distinct operations may still collide when the source is not thin
    std::multiset<TOp> images;
    for (const auto& op : p.ops) {
        TOp img;
        img.out = f.colourMap[op.out];
        for (int c : op.in) img.in.push_back(f.colourMap[c]);
        std::sort(img.in.begin(), img.in.end());
        if (images.count(img)) return false;
        images.insert(std::move(img));
    }
    return true;
}

std::vector<ThinOperadMap> dendrices(const ThinOperad& p, const Forest& f) {
    if (f.components.empty()) throw EmptyForest("dendrices need a component");
    std::map<int, std::vector<const TOp*>> byOut;
    for (const auto& op : p.ops) byOut[op.out].push_back(&op);

    std::vector<ThinOperadMap> acc{{std::vector<int>(f.edge_count(), -1)}};
    for (int c = 0; c < f.component_count(); ++c) {
        const Tree& t = f.components[c];
        const int off = f.offset(c);
        // vertices in root-first order so outputs are coloured before inputs
        std::vector<int> order;
        {
            std::vector<int> stack{t.root};
            while (!stack.empty()) {
                int e = stack.back();
                stack.pop_back();
                if (t.top[e] < 0) continue;
                order.push_back(t.top[e]);
                for (int x : t.verts[t.top[e]].in) stack.push_back(x);
            }
        }
        std::vector<std::vector<int>> partial;  // local edge -> colour
        for (int col = 0; col < p.colour_count(); ++col) {
            std::vector<int> base(t.edge_count(), -1);
            base[t.root] = col;
            partial.push_back(std::move(base));
        }
        for (int v : order) {
            std::vector<std::vector<int>> next;
            const auto& in = t.verts[v].in;
            for (const auto& pa : partial) {
                int outCol = pa[t.verts[v].out];
                for (const TOp* op : byOut[outCol]) {
                    if (op->in.size() != in.size()) continue;
                    // every distinct arrangement of the input multiset
                    auto seq = op->in;
                    std::set<std::vector<int>> seen;
                    do {
                        if (!seen.insert(seq).second) continue;
                        auto pa2 = pa;
                        for (size_t k = 0; k < in.size(); ++k) pa2[in[k]] = seq[k];
                        next.push_back(std::move(pa2));
                    } while (std::next_permutation(seq.begin(), seq.end()));
                }
            }
            partial = std::move(next);
        }
        std::vector<ThinOperadMap> merged;
        for (const auto& a : acc)
            for (const auto& pa : partial) {
                auto m = a;
                for (int e = 0; e < t.edge_count(); ++e) m.colourMap[off + e] = pa[e];
                merged.push_back(std::move(m));
            }
        acc = std::move(merged);
    }
    return acc;
}

std::vector<Tree> maximal_subtrees(const ThinOperad& p) {
    if (!p.is_thin()) throw NotThin("subtree extraction needs a thin operad");
    std::vector<TOp> gens;
    {
        std::vector<TOp> nonId;
        for (const auto& op : p.ops)
            if (!p.is_identity(op)) nonId.push_back(op);
        std::set<TOp> composite;
        for (const auto& g : nonId)
            for (const auto& f : nonId)
                if (auto h = plug(g, f, f.out); h && p.has_op(*h)) composite.insert(*h);
        for (const auto& op : nonId)
            if (!composite.count(op)) gens.push_back(op);
    }
    std::set<int> inputColours;
    for (const auto& op : gens) inputColours.insert(op.in.begin(), op.in.end());
    std::map<int, std::vector<const TOp*>> genByOut;
    for (const auto& op : gens) genByOut[op.out].push_back(&op);

    // assemble a raw tree from a root colour and the chosen op per expanded edge
    std::set<int> onPath;
    std::function<std::vector<Tree>(int)> expand = [&](int colour) -> std::vector<Tree> {
        auto it = genByOut.find(colour);
        if (it == genByOut.end()) {
            Tree leaf = eta();
            leaf.names = {p.colourNames[colour]};
            return {leaf};
        }
        if (!onPath.insert(colour).second) throw NotThin("colour cycle in subtree extraction");
        std::vector<Tree> out;
        for (const TOp* op : it->second) {
            std::vector<std::vector<Tree>> subs;
            for (int c : op->in) subs.push_back(expand(c));
            std::vector<std::vector<int>> pick{{}};
            for (const auto& s : subs) {
                std::vector<std::vector<int>> next;
                for (const auto& a : pick)
                    for (int k = 0; k < static_cast<int>(s.size()); ++k) {
                        auto b = a;
                        b.push_back(k);
                        next.push_back(std::move(b));
                    }
                pick = std::move(next);
            }
            for (const auto& choice : pick) {
                Tree t;
                t.names = {p.colourNames[colour]};
                t.top = {-1};
                t.root = 0;
                Vertex root;
                root.out = 0;
                std::vector<Vertex> pending;
                for (size_t k = 0; k < subs.size(); ++k) {
                    const Tree& s = subs[k][choice[k]];
                    int shift = t.edge_count();
                    root.in.push_back(shift + s.root);
                    for (const auto& n : s.names) t.names.push_back(n);
                    for (int e = 0; e < s.edge_count(); ++e) t.top.push_back(-1);
                    for (const auto& v : s.verts) {
                        Vertex nv;
                        nv.out = v.out + shift;
                        for (int x : v.in) nv.in.push_back(x + shift);
                        pending.push_back(std::move(nv));
                    }
                }
                t.top[0] = 0;
                t.verts.push_back(std::move(root));
                for (auto& v : pending) {
                    t.top[v.out] = static_cast<int>(t.verts.size());
                    t.verts.push_back(std::move(v));
                }
                canonicalize(t);
                // a subobject needs pairwise distinct colours
                std::set<std::string> names(t.names.begin(), t.names.end());
                assert(static_cast<int>(names.size()) == t.edge_count());
                out.push_back(std::move(t));
            }
        }
        onPath.erase(colour);
        return out;
    };

    std::vector<Tree> result;
    for (int c = 0; c < p.colour_count(); ++c) {
        if (inputColours.count(c)) continue;
        if (genByOut.find(c) == genByOut.end()) continue;  // isolated colour
        for (auto& t : expand(c)) result.push_back(std::move(t));
    }
    return result;
}

}  // namespace forestcalc
