// Exterior powers of the canonical rank-n lattice as Dieudonne lattices.
//
// The rank-n base lattice has V a_0 = p a_{n-1}, V a_i = a_{i-1} and
// F = V^{n-1}. Its q-th exterior power carries V acting factorwise and F
// acting with one division by p per extra factor, so that VF = FV = p
// survives in every degree. Both actions are built by recursion on q from
// the printed one-step rules; the closed forms (factorwise V, shifted F)
// are kept out of the construction and used as independent test oracles.

#pragma once

#include <algorithm>
#include <vector>

#include "module.hpp"

namespace dieudonne {

inline std::vector<std::vector<int>> subsets_lex(int n, int q) {
    if (q < 0 || q > n)
        throw error("subsets_lex: require 0 <= q <= n");
    std::vector<std::vector<int>> out;
    std::vector<int> cur(q);
    for (int i = 0; i < q; ++i)
        cur[i] = i;
    while (true) {
        out.push_back(cur);
        int t = q - 1;
        while (t >= 0 && cur[t] == n - q + t)
            --t;
        if (t < 0)
            break;
        ++cur[t];
        for (int s = t + 1; s < q; ++s)
            cur[s] = cur[s - 1] + 1;
    }
    return out;
}

// Lexicographic position of a sorted q-subset of {0..n-1}.
inline long subset_rank(int n, const std::vector<int>& s) {
    int q = static_cast<int>(s.size());
    long r = 0;
    int prev = -1;
    for (int t = 0; t < q; ++t) {
        for (int v = prev + 1; v < s[t]; ++v)
            r += binomial(n - 1 - v, q - 1 - t).convert_to<long>();
        prev = s[t];
    }
    return r;
}

// Sign of the shuffle sorting the concatenation of two disjoint sorted
// index sets, i.e. (-1)^{#\{(a,b) in I x J : a > b\}}.
inline int shuffle_sign(const std::vector<int>& i, const std::vector<int>& j) {
    int inv = 0;
    for (int a : i)
        for (int b : j)
            if (a > b)
                ++inv;
    return (inv % 2 == 0) ? 1 : -1;
}

// Exterior-algebra element of fixed degree, coefficients over subsets_lex.
struct LambdaElem {
    int n = 0;
    int deg = 0;
    std::vector<Int> c;

    LambdaElem() = default;
    LambdaElem(int n_, int deg_)
        : n(n_), deg(deg_), c(binomial(n_, deg_).convert_to<size_t>()) {}
};

// Monomial with arbitrary (possibly unsorted, possibly repeating) indices.
inline LambdaElem monomial(int n, std::vector<int> idx) {
    for (int v : idx)
        if (v < 0 || v >= n)
            throw error("monomial: index out of range");
    int sign = 1;
    for (size_t i = 1; i < idx.size(); ++i)
        for (size_t j = i; j > 0 && idx[j] < idx[j - 1]; --j) {
            std::swap(idx[j], idx[j - 1]);
            sign = -sign;
        }
    LambdaElem e(n, static_cast<int>(idx.size()));
    for (size_t i = 1; i < idx.size(); ++i)
        if (idx[i] == idx[i - 1])
            return e;
    e.c[subset_rank(n, idx)] = sign;
    return e;
}

inline LambdaElem wedge(const LambdaElem& x, const LambdaElem& y) {
    if (x.n != y.n)
        throw error("wedge: mismatched ambient rank");
    if (x.deg + y.deg > x.n)
        throw error("wedge: degree overflow");
    auto sx = subsets_lex(x.n, x.deg);
    auto sy = subsets_lex(y.n, y.deg);
    LambdaElem out(x.n, x.deg + y.deg);
    for (size_t i = 0; i < sx.size(); ++i) {
        if (x.c[i] == 0)
            continue;
        for (size_t j = 0; j < sy.size(); ++j) {
            if (y.c[j] == 0)
                continue;
            std::vector<int> merged(sx[i]);
            merged.insert(merged.end(), sy[j].begin(), sy[j].end());
            std::sort(merged.begin(), merged.end());
            if (std::adjacent_find(merged.begin(), merged.end()) != merged.end())
                continue;
            out.c[subset_rank(x.n, merged)] +=
                x.c[i] * y.c[j] * shuffle_sign(sx[i], sy[j]);
        }
    }
    return out;
}

inline LambdaElem apply_matrix(const IntMatrix& m, const LambdaElem& x) {
    if (m.cols != static_cast<long>(x.c.size()))
        throw error("apply_matrix: dimension mismatch");
    LambdaElem out(x.n, x.deg);
    for (long j = 0; j < m.cols; ++j) {
        if (x.c[j] == 0)
            continue;
        for (long i = 0; i < m.rows; ++i)
            if (m.at(i, j) != 0)
                out.c[i] += m.at(i, j) * x.c[j];
    }
    return out;
}

struct LambdaLattice {
    int n = 0;
    int q = 0;
    long long p = 0;
    std::vector<std::vector<int>> basis;
    IntMatrix V;
    IntMatrix F;

    long rank() const { return V.rows; }
};

namespace detail {

// VF = FV = p checked by applying columns, linear in the nonzero count.
inline void check_lattice_relation(const IntMatrix& v, const IntMatrix& f, long long p) {
    long r = v.rows;
    for (long j = 0; j < r; ++j) {
        std::vector<Int> vf(r), fv(r);
        for (long k = 0; k < r; ++k) {
            if (f.at(k, j) != 0)
                for (long i = 0; i < r; ++i)
                    vf[i] += v.at(i, k) * f.at(k, j);
            if (v.at(k, j) != 0)
                for (long i = 0; i < r; ++i)
                    fv[i] += f.at(i, k) * v.at(k, j);
        }
        for (long i = 0; i < r; ++i) {
            Int want = (i == j) ? Int(p) : Int(0);
            if (vf[i] != want || fv[i] != want)
                throw error("lattice relation VF = FV = p fails");
        }
    }
}

}  // namespace detail

inline LambdaLattice build_lattice(int n, int q, long long p) {
    if (n < 1 || q < 0 || q > n)
        throw error("build_lattice: require n >= 1 and 0 <= q <= n");
    if (!is_prime_ll(p) || p == 2)
        throw error("build_lattice: p must be an odd prime");
    LambdaLattice l;
    l.n = n;
    l.q = q;
    l.p = p;
    l.basis = subsets_lex(n, q);
    if (q == 0) {
        l.V = IntMatrix::identity(1);
        l.F = IntMatrix::identity(1);
        l.F.at(0, 0) = p;
        return l;
    }
    if (q == 1) {
        IntMatrix v(n, n);
        v.at(n - 1, 0) = p;
        for (int j = 1; j < n; ++j)
            v.at(j - 1, j) = 1;
        l.V = v;
        l.F = v.pow(n - 1);
        detail::check_lattice_relation(l.V, l.F, p);
        return l;
    }

    LambdaLattice prev = build_lattice(n, q - 1, p);
    long r = binomial(n, q).convert_to<long>();
    IntMatrix v(r, r), f(r, r);
    for (long col = 0; col < r; ++col) {
        const std::vector<int>& I = l.basis[col];
        // V a_I = V(a_{i_1} ^ ... ^ a_{i_{q-1}}) ^ a_{i_q - 1}
        {
            std::vector<int> head(I.begin(), I.end() - 1);
            int tail = I.back() - 1;
            long hidx = subset_rank(n, head);
            for (long k = 0; k < prev.V.rows; ++k) {
                const Int& coef = prev.V.at(k, hidx);
                if (coef == 0)
                    continue;
                const std::vector<int>& H = prev.basis[k];
                if (std::binary_search(H.begin(), H.end(), tail))
                    continue;
                std::vector<int> merged(H);
                merged.insert(std::lower_bound(merged.begin(), merged.end(), tail), tail);
                v.at(subset_rank(n, merged), col) +=
                    coef * shuffle_sign(H, std::vector<int>{tail});
            }
        }
        // F a_I = a_{i_1 + 1} ^ F(a_{i_2} ^ ... ^ a_{i_q})
        {
            int head = I.front() + 1;
            std::vector<int> tail(I.begin() + 1, I.end());
            long tidx = subset_rank(n, tail);
            for (long k = 0; k < prev.F.rows; ++k) {
                const Int& coef = prev.F.at(k, tidx);
                if (coef == 0)
                    continue;
                const std::vector<int>& H = prev.basis[k];
                if (std::binary_search(H.begin(), H.end(), head))
                    continue;
                std::vector<int> merged(H);
                merged.insert(std::lower_bound(merged.begin(), merged.end(), head), head);
                f.at(subset_rank(n, merged), col) +=
                    coef * shuffle_sign(std::vector<int>{head}, H);
            }
        }
    }
    l.V = v;
    l.F = f;
    detail::check_lattice_relation(l.V, l.F, p);
    return l;
}

struct PairingMatrix {
    int n = 0;
    int q = 0;
    IntMatrix P;  // rows over q-subsets, columns over (n-q)-subsets
};

inline PairingMatrix pairing_matrix(int n, int q) {
    if (n < 1 || q < 0 || q > n)
        throw error("pairing_matrix: require n >= 1 and 0 <= q <= n");
    PairingMatrix pm;
    pm.n = n;
    pm.q = q;
    auto rows = subsets_lex(n, q);
    auto cols = subsets_lex(n, n - q);
    pm.P = IntMatrix(static_cast<long>(rows.size()), static_cast<long>(cols.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        std::vector<int> comp;
        comp.reserve(n - q);
        for (int v = 0; v < n; ++v)
            if (!std::binary_search(rows[i].begin(), rows[i].end(), v))
                comp.push_back(v);
        pm.P.at(static_cast<long>(i), subset_rank(n, comp)) = shuffle_sign(rows[i], comp);
    }
    return pm;
}

inline FinModule reduce_mod(const LambdaLattice& l, const PadicContext& ctx) {
    if (ctx.p != l.p)
        throw error("reduce_mod: context prime differs from lattice prime");
    std::vector<int> orders(l.rank(), ctx.nu);
    return make_module(ctx, orders, ModMatrix::reduce(l.V, ctx), ModMatrix::reduce(l.F, ctx));
}

}  // namespace dieudonne
