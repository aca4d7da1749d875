#include "forestcalc/finpointed.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace forestcalc {

ConditionFailed::ConditionFailed(int which_, const std::string& witness)
    : std::runtime_error("operator condition " + std::to_string(which_) + " failed: " + witness),
      which(which_) {}

bool PartialMap::surjective() const {
    std::vector<char> hit(n, 0);
    for (int v : map) hit[v - 1] = 1;
    return std::all_of(hit.begin(), hit.end(), [](char h) { return h != 0; });
}

bool PartialMap::inert() const {
    if (static_cast<int>(defn.size()) != n) return false;
    std::vector<char> hit(n, 0);
    for (int v : map) {
        if (hit[v - 1]) return false;
        hit[v - 1] = 1;
    }
    return true;
}

int PartialMap::at(int k) const {
    auto it = std::lower_bound(defn.begin(), defn.end(), k);
    if (it == defn.end() || *it != k) return 0;
    return map[it - defn.begin()];
}

bool valid_partial_map(const PartialMap& f) {
    if (f.m < 0 || f.n < 0) return false;
    if (f.map.size() != f.defn.size()) return false;
    int prev = 0;
    for (int k : f.defn) {
        if (k <= prev || k > f.m) return false;
        prev = k;
    }
    for (int v : f.map)
        if (v < 1 || v > f.n) return false;
    return true;
}

PartialMap identity_pmap(int n) {
    PartialMap f;
    f.m = f.n = n;
    f.defn.resize(n);
    std::iota(f.defn.begin(), f.defn.end(), 1);
    f.map = f.defn;
    return f;
}

PartialMap compose(const PartialMap& g, const PartialMap& f) {
    if (f.n != g.m)
        throw std::invalid_argument("compose: codomain " + std::to_string(f.n) +
                                    " does not match domain " + std::to_string(g.m));
    PartialMap h;
    h.m = f.m;
    h.n = g.n;
    for (std::size_t k = 0; k < f.defn.size(); ++k) {
        int v = g.at(f.map[k]);
        if (v == 0) continue;
        h.defn.push_back(f.defn[k]);
        h.map.push_back(v);
    }
    return h;
}

PartialMap rho(int n, int i) {
    if (i < 1 || i > n) throw std::invalid_argument("rho: point out of range");
    PartialMap f;
    f.m = n;
    f.n = 1;
    f.defn = {i};
    f.map = {1};
    return f;
}

PartialMap forget(int n, int i) {
    if (i < 1 || i > n) throw std::invalid_argument("forget: point out of range");
    PartialMap f;
    f.m = n;
    f.n = n - 1;
    for (int k = 1; k <= n; ++k) {
        if (k == i) continue;
        f.defn.push_back(k);
        f.map.push_back(k < i ? k : k - 1);
    }
    return f;
}

PartialMap permutation(const std::vector<int>& sigma) {
    int n = static_cast<int>(sigma.size());
    std::vector<char> hit(n, 0);
    for (int v : sigma) {
        if (v < 1 || v > n || hit[v - 1])
            throw std::invalid_argument("permutation: not a bijection");
        hit[v - 1] = 1;
    }
    PartialMap f = identity_pmap(n);
    f.map = sigma;
    return f;
}

PartialMap mu(int k, int l) {
    if (k < 0 || l < 0) throw std::invalid_argument("mu: negative arity");
    PartialMap f;
    f.m = k + l;
    f.n = 1 + l;
    f.defn.resize(f.m);
    std::iota(f.defn.begin(), f.defn.end(), 1);
    for (int p = 1; p <= k; ++p) f.map.push_back(1);
    for (int j = 1; j <= l; ++j) f.map.push_back(1 + j);
    return f;
}

std::pair<PartialMap, PartialMap> factor_inert_active(const PartialMap& f) {
    int d = static_cast<int>(f.defn.size());
    PartialMap in;
    in.m = f.m;
    in.n = d;
    in.defn = f.defn;
    in.map.resize(d);
    std::iota(in.map.begin(), in.map.end(), 1);
    PartialMap act;
    act.m = d;
    act.n = f.n;
    act.defn.resize(d);
    std::iota(act.defn.begin(), act.defn.end(), 1);
    act.map = f.map;
    return {in, act};
}

PartialMap smash(const PartialMap& f, const PartialMap& g) {
    PartialMap h;
    h.m = f.m * g.m;
    h.n = f.n * g.n;
    // (k,l) = (k-1)m_g + l ascends with k then l, so the result stays sorted.
    for (std::size_t a = 0; a < f.defn.size(); ++a)
        for (std::size_t b = 0; b < g.defn.size(); ++b) {
            h.defn.push_back((f.defn[a] - 1) * g.m + g.defn[b]);
            h.map.push_back((f.map[a] - 1) * g.n + g.map[b]);
        }
    return h;
}

std::vector<PartialMap> all_partial_maps(int m, int n, bool surjectiveOnly) {
    std::vector<PartialMap> out;
    std::vector<int> v(m, 0);  // 0 encodes "undefined"
    while (true) {
        PartialMap f;
        f.m = m;
        f.n = n;
        for (int k = 1; k <= m; ++k)
            if (v[k - 1] > 0) {
                f.defn.push_back(k);
                f.map.push_back(v[k - 1]);
            }
        if (!surjectiveOnly || f.surjective()) out.push_back(std::move(f));
        int pos = m - 1;
        while (pos >= 0 && v[pos] == n) v[pos--] = 0;
        if (pos < 0) break;
        ++v[pos];
    }
    return out;
}

PointedMap to_pointed(const PartialMap& f) {
    PointedMap p;
    p.m = f.m;
    p.n = f.n;
    p.map.assign(f.m, 0);
    for (std::size_t k = 0; k < f.defn.size(); ++k) p.map[f.defn[k] - 1] = f.map[k];
    return p;
}

PartialMap from_pointed(const PointedMap& p) {
    PartialMap f;
    f.m = p.m;
    f.n = p.n;
    for (int k = 1; k <= p.m; ++k)
        if (p.map[k - 1] != 0) {
            f.defn.push_back(k);
            f.map.push_back(p.map[k - 1]);
        }
    return f;
}

bool valid_nf_simplex(const NFSimplex& a, bool surjectiveOnly) {
    if (a.sizes.empty()) return false;
    if (a.chain.size() + 1 != a.sizes.size()) return false;
    for (std::size_t i = 0; i < a.chain.size(); ++i) {
        const PartialMap& f = a.chain[i];
        if (!valid_partial_map(f)) return false;
        if (f.m != a.sizes[i] || f.n != a.sizes[i + 1]) return false;
        if (surjectiveOnly && !f.surjective()) return false;
    }
    int prev = -1;
    for (int e : a.markedEdges) {
        if (e <= prev || e >= a.dim()) return false;
        prev = e;
        if (!a.chain[e].inert()) return false;
    }
    return true;
}

NFSimplex nf_face(const NFSimplex& a, int i) {
    int d = a.dim();
    if (d < 1 || i < 0 || i > d) throw std::invalid_argument("nf_face: index out of range");
    auto marked = [&](int e) {
        return std::binary_search(a.markedEdges.begin(), a.markedEdges.end(), e);
    };
    NFSimplex b;
    if (i == 0) {
        b.sizes.assign(a.sizes.begin() + 1, a.sizes.end());
        b.chain.assign(a.chain.begin() + 1, a.chain.end());
        for (int e = 1; e < d; ++e)
            if (marked(e)) b.markedEdges.push_back(e - 1);
    } else if (i == d) {
        b.sizes.assign(a.sizes.begin(), a.sizes.end() - 1);
        b.chain.assign(a.chain.begin(), a.chain.end() - 1);
        for (int e = 0; e + 1 < d; ++e)
            if (marked(e)) b.markedEdges.push_back(e);
    } else {
        b.sizes = a.sizes;
        b.sizes.erase(b.sizes.begin() + i);
        b.chain = a.chain;
        b.chain[i - 1] = compose(a.chain[i], a.chain[i - 1]);
        b.chain.erase(b.chain.begin() + i);
        for (int e = 0; e < i - 1; ++e)
            if (marked(e)) b.markedEdges.push_back(e);
        if (marked(i - 1) && marked(i)) b.markedEdges.push_back(i - 1);
        for (int e = i + 1; e < d; ++e)
            if (marked(e)) b.markedEdges.push_back(e - 1);
    }
    return b;
}

NFSimplex nf_degeneracy(const NFSimplex& a, int i) {
    int d = a.dim();
    if (i < 0 || i > d) throw std::invalid_argument("nf_degeneracy: index out of range");
    NFSimplex b;
    b.sizes = a.sizes;
    b.sizes.insert(b.sizes.begin() + i, a.sizes[i]);
    b.chain = a.chain;
    b.chain.insert(b.chain.begin() + i, identity_pmap(a.sizes[i]));
    for (int e : a.markedEdges) b.markedEdges.push_back(e < i ? e : e + 1);
    b.markedEdges.push_back(i);  // inserted identities count as marked
    std::sort(b.markedEdges.begin(), b.markedEdges.end());
    return b;
}

namespace {

bool tuple_before(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

std::string tuple_str(const ThinOperad& p, const std::vector<int>& tuple) {
    std::string s = "(";
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (i) s += ",";
        s += p.colourNames[tuple[i]];
    }
    return s + ")";
}

std::string pmap_str(const PartialMap& f) {
    std::ostringstream os;
    os << "<" << f.m << ">-><" << f.n << ">[";
    for (std::size_t k = 0; k < f.defn.size(); ++k) {
        if (k) os << " ";
        os << f.defn[k] << "->" << f.map[k];
    }
    os << "]";
    return os.str();
}

}  // namespace

int OperatorCategory::object_index(const std::vector<int>& tuple) const {
    auto it = std::lower_bound(objects.begin(), objects.end(), tuple, tuple_before);
    if (it == objects.end() || *it != tuple) return -1;
    return static_cast<int>(it - objects.begin());
}

const std::vector<PartialMap>& OperatorCategory::hom(int src, int dst) const {
    return homs.at(static_cast<std::size_t>(src) * objects.size() + dst);
}

bool OperatorCategory::has_mor(int src, int dst, const PartialMap& phi) const {
    const auto& h = hom(src, dst);
    return std::binary_search(h.begin(), h.end(), phi);
}

OperatorCategory category_of_operators(const ThinOperad& p, int maxArity) {
    if (maxArity < 0) throw std::invalid_argument("category_of_operators: negative maxArity");
    OperatorCategory c;
    c.operad = p;
    c.maxArity = maxArity;
    int colours = p.colour_count();
    c.objects.push_back({});
    for (int len = 1; len <= maxArity && colours > 0; ++len) {
        std::vector<int> t(len, 0);
        while (true) {
            c.objects.push_back(t);
            int pos = len - 1;
            while (pos >= 0 && t[pos] == colours - 1) t[pos--] = 0;
            if (pos < 0) break;
            ++t[pos];
        }
    }
    int nObj = static_cast<int>(c.objects.size());
    std::vector<std::vector<std::vector<PartialMap>>> pmaps(maxArity + 1);
    for (int m = 0; m <= maxArity; ++m) {
        pmaps[m].resize(maxArity + 1);
        for (int n = 0; n <= maxArity; ++n) pmaps[m][n] = all_partial_maps(m, n);
    }
    c.homs.resize(static_cast<std::size_t>(nObj) * nObj);
    for (int si = 0; si < nObj; ++si) {
        const auto& src = c.objects[si];
        int m = static_cast<int>(src.size());
        for (int di = 0; di < nObj; ++di) {
            const auto& dst = c.objects[di];
            int n = static_cast<int>(dst.size());
            std::vector<PartialMap> hs;
            for (const PartialMap& phi : pmaps[m][n]) {
                bool ok = true;
                for (int j = 1; j <= n && ok; ++j) {
                    TOp op;
                    op.out = dst[j - 1];
                    for (std::size_t k = 0; k < phi.defn.size(); ++k)
                        if (phi.map[k] == j) op.in.push_back(src[phi.defn[k] - 1]);
                    std::sort(op.in.begin(), op.in.end());
                    ok = p.has_op(op);
                }
                if (ok) hs.push_back(phi);
            }
            std::sort(hs.begin(), hs.end());
            c.homs[static_cast<std::size_t>(si) * nObj + di] = std::move(hs);
        }
    }
    return c;
}

OperatorReport check_operator_conditions(const OperatorCategory& c) {
    const ThinOperad& p = c.operad;
    int nObj = static_cast<int>(c.objects.size());
    int top = c.maxArity;
    OperatorReport rep;
    rep.objects = nObj;
    for (const auto& h : c.homs) rep.morphisms += static_cast<long long>(h.size());

    std::vector<std::vector<int>> byLen(top + 1);
    for (int i = 0; i < nObj; ++i) byLen[c.objects[i].size()].push_back(i);
    std::vector<std::vector<std::vector<PartialMap>>> pmaps(top + 1);
    for (int m = 0; m <= top; ++m) {
        pmaps[m].resize(top + 1);
        for (int n = 0; n <= top; ++n) pmaps[m][n] = all_partial_maps(m, n);
    }

    // 1: canonical lifts over inert maps exist, are unique, and composing
    // with them is a bijection of hom sets.
    for (int ci = 0; ci < nObj; ++ci) {
        const auto& src = c.objects[ci];
        int m = static_cast<int>(src.size());
        for (int n = 0; n <= m; ++n) {
            for (const PartialMap& phi : pmaps[m][n]) {
                if (!phi.inert()) continue;
                std::vector<int> target(n, -1);
                for (std::size_t k = 0; k < phi.defn.size(); ++k)
                    target[phi.map[k] - 1] = src[phi.defn[k] - 1];
                int di = c.object_index(target);
                const auto& h = c.hom(ci, di);
                auto range = std::equal_range(h.begin(), h.end(), phi);
                if (range.first == range.second)
                    throw ConditionFailed(1, "no lift of " + pmap_str(phi) + " at " +
                                                 tuple_str(p, src));
                if (range.second - range.first > 1)
                    throw ConditionFailed(1, "duplicate lift of " + pmap_str(phi) + " at " +
                                                 tuple_str(p, src));
                ++rep.liftsChecked;
                for (int k2 = 0; k2 <= top; ++k2) {
                    for (const PartialMap& psi : pmaps[n][k2]) {
                        PartialMap whole = compose(psi, phi);
                        for (int ei : byLen[k2]) {
                            bool viaLift = c.has_mor(di, ei, psi);
                            bool direct = c.has_mor(ci, ei, whole);
                            if (viaLift != direct)
                                throw ConditionFailed(
                                    1, "composition with the lift of " + pmap_str(phi) +
                                           " at " + tuple_str(p, src) + " is not a bijection at " +
                                           tuple_str(p, c.objects[ei]) + " over " + pmap_str(psi));
                        }
                    }
                }
            }
        }
    }

    // 2: a hom set over phi is the product of the hom sets over rho^j . phi.
    for (int m = 0; m <= top; ++m) {
        for (int n = 0; n <= top; ++n) {
            for (const PartialMap& phi : pmaps[m][n]) {
                std::vector<PartialMap> restricted;
                for (int j = 1; j <= n; ++j) restricted.push_back(compose(rho(n, j), phi));
                for (int ci : byLen[m]) {
                    for (int di : byLen[n]) {
                        const auto& dst = c.objects[di];
                        bool whole = c.has_mor(ci, di, phi);
                        bool product = true;
                        for (int j = 1; j <= n && product; ++j) {
                            int sj = c.object_index({dst[j - 1]});
                            product = c.has_mor(ci, sj, restricted[j - 1]);
                        }
                        ++rep.productsChecked;
                        if (whole != product)
                            throw ConditionFailed(
                                2, "hom " + tuple_str(p, c.objects[ci]) + " -> " +
                                       tuple_str(p, dst) + " over " + pmap_str(phi) +
                                       (whole ? " exists but a factor is missing"
                                              : " is missing though all factors exist"));
                    }
                }
            }
        }
    }

    // 3: the fibre over <n> is the n-th power of the fibre over <1>.
    for (int n = 0; n <= top; ++n) {
        long long expect = 1;
        for (int i = 0; i < n; ++i) expect *= p.colour_count();
        if (static_cast<long long>(byLen[n].size()) != expect)
            throw ConditionFailed(3, "fibre over <" + std::to_string(n) + "> has " +
                                         std::to_string(byLen[n].size()) + " objects, expected " +
                                         std::to_string(expect));
        PartialMap idn = identity_pmap(n);
        PartialMap id1 = identity_pmap(1);
        for (int ci : byLen[n]) {
            for (int di : byLen[n]) {
                bool whole = c.has_mor(ci, di, idn);
                bool product = true;
                for (int i = 0; i < n && product; ++i) {
                    int si = c.object_index({c.objects[ci][i]});
                    int ti = c.object_index({c.objects[di][i]});
                    product = c.has_mor(si, ti, id1);
                }
                if (whole != product)
                    throw ConditionFailed(3, "fibre hom " + tuple_str(p, c.objects[ci]) + " -> " +
                                                 tuple_str(p, c.objects[di]) +
                                                 " disagrees with the coordinatewise homs");
            }
        }
    }
    return rep;
}

}  // namespace forestcalc
