#pragma once

// Finite-length modules over the ring Z_p[V,F]/(VF - p), truncated at p^nu.
//
// A module is a finite abelian p-group with generator orders p^{e_i} and two
// commuting-with-each-other endomorphisms V and F whose composite is
// multiplication by p. Matrices are stored in the column convention: entry
// (i,j) is the coefficient of generator i in the image of generator j, and
// row i of any map matrix is kept reduced mod p^{e_i}, the order of its
// target generator.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <dieudonne/padic_linalg.hpp>

namespace dieudonne {

struct FinModule {
    PadicContext ctx;
    std::vector<int> orders;
    ModMatrix V;
    ModMatrix F;

    long rank() const { return static_cast<long>(orders.size()); }

    Int group_order() const {
        int s = 0;
        for (int e : orders)
            s += e;
        return pow_int(ctx.p, s);
    }
};

inline std::string orders_str(const std::vector<int>& orders) {
    std::string s = "[";
    for (size_t i = 0; i < orders.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(orders[i]);
    }
    return s + "]";
}

// Reduces row i of a map matrix mod p^{orders[i]}.
inline ModMatrix canonical_map(const std::vector<int>& orders, const ModMatrix& a) {
    ModMatrix m = a;
    for (long i = 0; i < m.rows; ++i) {
        Int pe = a.ctx.ppow(orders[i]);
        for (long j = 0; j < m.cols; ++j)
            m.at(i, j) = mod_floor(m.at(i, j), pe);
    }
    return m;
}

// Equality of maps into a target with the given generator orders: entries
// must agree mod p^{orders[i]} rowwise.
inline bool maps_equal(const std::vector<int>& orders, const ModMatrix& a, const ModMatrix& b) {
    if (a.rows != b.rows || a.cols != b.cols || a.ctx != b.ctx)
        return false;
    for (long i = 0; i < a.rows; ++i) {
        Int pe = a.ctx.ppow(orders[i]);
        for (long j = 0; j < a.cols; ++j)
            if (mod_floor(a.at(i, j) - b.at(i, j), pe) != 0)
                return false;
    }
    return true;
}

inline FinModule make_module(const PadicContext& ctx, const std::vector<int>& orders,
                             const ModMatrix& V, const ModMatrix& F) {
    const long g = static_cast<long>(orders.size());
    for (int e : orders)
        if (e < 1 || e > ctx.nu)
            throw error("make_module: generator order out of range [1, nu]");
    if (V.rows != g || V.cols != g || F.rows != g || F.cols != g)
        throw error("make_module: matrix shape does not match orders length");
    if (V.ctx != ctx || F.ctx != ctx)
        throw error("make_module: matrix context mismatch");

    FinModule m;
    m.ctx = ctx;
    m.orders = orders;
    m.V = canonical_map(orders, V);
    m.F = canonical_map(orders, F);

    auto check_defined = [&](const ModMatrix& a, const char* name) {
        for (long i = 0; i < g; ++i)
            for (long j = 0; j < g; ++j) {
                int need = orders[i] - orders[j];
                if (need > 0 && mod_floor(a.at(i, j), ctx.ppow(need)) != 0)
                    throw error(std::string("make_module: ill-defined map, ") + name +
                                " entry (" + std::to_string(i) + "," + std::to_string(j) +
                                ") violates the order congruence");
            }
    };
    check_defined(m.V, "V");
    check_defined(m.F, "F");

    ModMatrix p_id = ModMatrix::identity(ctx, g) * Int(ctx.p);
    if (!maps_equal(orders, m.V * m.F, p_id) || !maps_equal(orders, m.F * m.V, p_id))
        throw error("make_module: VF != p (the defining relation fails as a map)");
    return m;
}

inline ModMatrix order_rows(const FinModule& m) {
    ModMatrix r(m.ctx, m.rank(), m.rank());
    for (long i = 0; i < m.rank(); ++i)
        r.at(i, i) = m.ctx.ppow(m.orders[i]);
    return r;
}

// ---------------------------------------------------------------------------
// Standard modules.

// Unit: V = 1, F = p on one generator of order p^nu.
inline FinModule unit_module(const PadicContext& ctx) {
    ModMatrix V = ModMatrix::identity(ctx, 1);
    ModMatrix F = V * Int(ctx.p);
    return make_module(ctx, {ctx.nu}, V, F);
}

// Dualizing module: V = p, F = 1.
inline FinModule dualizing_module(const PadicContext& ctx) {
    ModMatrix F = ModMatrix::identity(ctx, 1);
    ModMatrix V = F * Int(ctx.p);
    return make_module(ctx, {ctx.nu}, V, F);
}

// Twisted dualizing module: V = -p, F = -1.
inline FinModule twisted_dualizing_module(const PadicContext& ctx) {
    ModMatrix F = ModMatrix::identity(ctx, 1) * Int(-1);
    ModMatrix V = F * Int(ctx.p);
    return make_module(ctx, {ctx.nu}, V, F);
}

// The rank-n cyclic module R/(V^{n-1} - F) on the basis a_0..a_{n-1} with
// V a_0 = p a_{n-1}, V a_i = a_{i-1} for i >= 1, and F = V^{n-1}.
inline FinModule base_module(const PadicContext& ctx, int n) {
    if (n < 1)
        throw error("base_module: n must be at least 1");
    ModMatrix V(ctx, n, n);
    V.at(n - 1, 0) = ctx.reduce(ctx.p);
    for (long j = 1; j < n; ++j)
        V.at(j - 1, j) = 1;
    ModMatrix F = V.pow(n - 1);
    return make_module(ctx, std::vector<int>(n, ctx.nu), V, F);
}

// R_{n,q} = R/(V^{n-q} - F^q) mod p^nu, on the basis V^0..V^{n-q-1},
// F^1..F^q (q = 0 and q = n collapse to a single cyclic family).
inline FinModule r_nq_module(const PadicContext& ctx, int n, int q) {
    if (n < 1 || q < 0 || q > n)
        throw error("r_nq_module: need n >= 1 and 0 <= q <= n");
    ModMatrix V(ctx, n, n), F(ctx, n, n);
    Int p = ctx.p;
    if (q == 0) {
        // R/(V^n - 1): V permutes the basis V^i cyclically, F = p V^{-1}.
        for (long i = 0; i < n; ++i) {
            V.at((i + 1) % n, i) = 1;
            F.at((i + n - 1) % n, i) = ctx.reduce(p);
        }
    } else if (q == n) {
        // R/(F^n - 1): F permutes the basis F^j cyclically, V = p F^{-1}.
        for (long j = 0; j < n; ++j) {
            F.at((j + 1) % n, j) = 1;
            V.at((j + n - 1) % n, j) = ctx.reduce(p);
        }
    } else {
        // Basis index i < n-q holds V^i, index n-q-1+j holds F^j for j >= 1.
        long nv = n - q;
        for (long i = 0; i < nv; ++i) {
            if (i + 1 < nv)
                V.at(i + 1, i) = 1;
            else
                V.at(n - 1, i) = 1;  // V * V^{n-q-1} = V^{n-q} = F^q
            if (i >= 1)
                F.at(i - 1, i) = ctx.reduce(p);
            else
                F.at(nv, i) = 1;  // F * 1 = F^1
        }
        for (long j = 1; j <= q; ++j) {
            long col = nv - 1 + j;
            if (j >= 2)
                V.at(col - 1, col) = ctx.reduce(p);
            else
                V.at(0, col) = ctx.reduce(p);  // V * F = p * F^0
            if (j < q)
                F.at(col + 1, col) = 1;
            else
                F.at(nv - 1, col) = ctx.reduce(p);  // F * F^q = p V^{n-q-1}
        }
    }
    return make_module(ctx, std::vector<int>(n, ctx.nu), V, F);
}

// ---------------------------------------------------------------------------
// Duals.
//
// The dual of (+) Z/p^{e_i} is presented on the same orders via the pairing
// <g_i^*, g_j> = delta_ij p^{nu - e_i}. Transposing then picks up the factor
// p^{e_a - e_j} on entry (a,j); when e_a < e_j the order congruence on the
// source matrix makes the division exact.

namespace detail {

inline ModMatrix dual_matrix(const FinModule& m, const ModMatrix& src, int sign) {
    const PadicContext& ctx = m.ctx;
    long g = m.rank();
    ModMatrix out(ctx, g, g);
    for (long a = 0; a < g; ++a)
        for (long j = 0; j < g; ++j) {
            Int v = src.at(j, a);
            int shift = m.orders[a] - m.orders[j];
            if (shift >= 0)
                v *= ctx.ppow(shift);
            else
                v /= ctx.ppow(-shift);  // exact by the order congruence
            out.at(a, j) = ctx.reduce(Int(sign) * v);
        }
    return out;
}

}  // namespace detail

inline FinModule dual(const FinModule& m) {
    return make_module(m.ctx, m.orders, detail::dual_matrix(m, m.F, 1),
                       detail::dual_matrix(m, m.V, 1));
}

inline FinModule twisted_dual(const FinModule& m) {
    return make_module(m.ctx, m.orders, detail::dual_matrix(m, m.F, -1),
                       detail::dual_matrix(m, m.V, -1));
}

inline FinModule direct_sum(const FinModule& m, const FinModule& n) {
    if (m.ctx != n.ctx)
        throw error("direct_sum: context mismatch");
    long g = m.rank(), h = n.rank();
    std::vector<int> orders = m.orders;
    orders.insert(orders.end(), n.orders.begin(), n.orders.end());
    ModMatrix V(m.ctx, g + h, g + h), F(m.ctx, g + h, g + h);
    for (long i = 0; i < g; ++i)
        for (long j = 0; j < g; ++j) {
            V.at(i, j) = m.V.at(i, j);
            F.at(i, j) = m.F.at(i, j);
        }
    for (long i = 0; i < h; ++i)
        for (long j = 0; j < h; ++j) {
            V.at(g + i, g + j) = n.V.at(i, j);
            F.at(g + i, g + j) = n.F.at(i, j);
        }
    return make_module(m.ctx, orders, V, F);
}

// ---------------------------------------------------------------------------
// Quotients of a module by a span of relation rows (given in module
// coordinates). The relation span must be V- and F-stable; make_module
// validation catches violations.

struct ModuleQuotient {
    FinModule mod;
    ModMatrix pi;    // rank(mod) x rank(m), column convention
    ModMatrix iota;  // rank(m) x rank(mod)
};

inline ModuleQuotient quotient_module(const FinModule& m, const ModMatrix& rels) {
    ModMatrix all = stack_rows(rels, order_rows(m));
    QuotientPresentation pres = quotient_by_rows(m.ctx, m.rank(), all);
    ModuleQuotient q;
    q.pi = pres.pi;
    q.iota = pres.iota;
    ModMatrix V = canonical_map(pres.orders, pres.pi * m.V * pres.iota);
    ModMatrix F = canonical_map(pres.orders, pres.pi * m.F * pres.iota);
    q.mod = make_module(m.ctx, pres.orders, V, F);
    return q;
}

// Invariant factor exponents of M / a(M), sorted descending.
inline std::vector<int> cokernel_orders(const FinModule& m, const ModMatrix& a) {
    ModMatrix rels = stack_rows(a.transpose(), order_rows(m));
    std::vector<int> v = quotient_by_rows(m.ctx, m.rank(), rels).orders;
    std::sort(v.rbegin(), v.rend());
    return v;
}

// Invariant factor exponents of ker(a) as a subgroup of M, sorted descending.
inline std::vector<int> kernel_orders(const FinModule& m, const ModMatrix& a) {
    const PadicContext& ctx = m.ctx;
    long g = m.rank();
    // Column i encodes sum_j a_{ij} x_j = 0 mod p^{e_i}, scaled up to p^nu.
    ModMatrix c(ctx, g, g);
    for (long j = 0; j < g; ++j)
        for (long i = 0; i < g; ++i)
            c.at(j, i) = ctx.reduce(a.at(i, j) * ctx.ppow(ctx.nu - m.orders[i]));
    ModMatrix k = kernel_mod(c);
    // Present span(k)/span(order rows) on k's generators.
    ModMatrix o = order_rows(m);
    ModMatrix syz = kernel_mod(stack_rows(k, o));
    ModMatrix rel(ctx, syz.rows, k.rows);
    for (long i = 0; i < syz.rows; ++i)
        for (long j = 0; j < k.rows; ++j)
            rel.at(i, j) = syz.at(i, j);
    std::vector<int> v = quotient_by_rows(ctx, k.rows, rel).orders;
    std::sort(v.rbegin(), v.rend());
    return v;
}

// ---------------------------------------------------------------------------
// Hom groups.

struct HomGroup {
    std::vector<int> orders;        // invariant factor exponents, descending
    std::vector<ModMatrix> basis;   // g_N x g_M representatives, same order

    Int group_order(long long p) const {
        int s = 0;
        for (int e : orders)
            s += e;
        return pow_int(p, s);
    }
};

inline HomGroup hom_group(const FinModule& m, const FinModule& n) {
    if (m.ctx != n.ctx)
        throw error("hom_group: context mismatch");
    const PadicContext& ctx = m.ctx;
    const long gm = m.rank(), gn = n.rank();
    const long G = gn * gm;
    auto idx = [&](long i, long j) { return i * gm + j; };
    auto dexp = [&](long i, long j) { return std::max(0, n.orders[i] - m.orders[j]); };

    // Unknowns y_{ij} with h_{ij} = p^{d_ij} y_{ij}; two commutation
    // constraints per target entry, each scaled into Z/p^nu.
    ModMatrix c(ctx, G, 2 * G);
    for (long i = 0; i < gn; ++i)
        for (long l = 0; l < gm; ++l) {
            Int scale = ctx.ppow(ctx.nu - n.orders[i]);
            long colV = idx(i, l), colF = G + idx(i, l);
            for (long j = 0; j < gm; ++j) {
                c.at(idx(i, j), colV) =
                    ctx.reduce(c.at(idx(i, j), colV) + ctx.ppow(dexp(i, j)) * m.V.at(j, l) * scale);
                c.at(idx(i, j), colF) =
                    ctx.reduce(c.at(idx(i, j), colF) + ctx.ppow(dexp(i, j)) * m.F.at(j, l) * scale);
            }
            for (long k = 0; k < gn; ++k) {
                c.at(idx(k, l), colV) =
                    ctx.reduce(c.at(idx(k, l), colV) - n.V.at(i, k) * ctx.ppow(dexp(k, l)) * scale);
                c.at(idx(k, l), colF) =
                    ctx.reduce(c.at(idx(k, l), colF) - n.F.at(i, k) * ctx.ppow(dexp(k, l)) * scale);
            }
        }

    ModMatrix k = kernel_mod(c);

    // Maps that are zero on every generator class.
    ModMatrix k0(ctx, G, G);
    for (long i = 0; i < gn; ++i)
        for (long j = 0; j < gm; ++j)
            k0.at(idx(i, j), idx(i, j)) = ctx.ppow(std::min(n.orders[i], m.orders[j]));

    ModMatrix syz = kernel_mod(stack_rows(k, k0));
    ModMatrix rel(ctx, syz.rows, k.rows);
    for (long i = 0; i < syz.rows; ++i)
        for (long j = 0; j < k.rows; ++j)
            rel.at(i, j) = syz.at(i, j);
    QuotientPresentation pres = quotient_by_rows(ctx, k.rows, rel);

    std::vector<std::pair<int, ModMatrix>> gens;
    for (long r = 0; r < pres.rank(); ++r) {
        // Lift generator r to coefficients on k's rows, then to a matrix.
        ModMatrix h(ctx, gn, gm);
        for (long i = 0; i < gn; ++i)
            for (long j = 0; j < gm; ++j) {
                Int y = 0;
                for (long s = 0; s < k.rows; ++s)
                    if (pres.iota.at(s, r) != 0)
                        y += pres.iota.at(s, r) * k.at(s, idx(i, j));
                h.at(i, j) = ctx.reduce(y * ctx.ppow(dexp(i, j)));
            }
        gens.push_back({pres.orders[r], canonical_map(n.orders, h)});
    }
    std::stable_sort(gens.begin(), gens.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    HomGroup out;
    for (auto& [e, h] : gens) {
        out.orders.push_back(e);
        out.basis.push_back(std::move(h));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Isomorphism testing: sound verdicts, explicit unknowns.

enum class IsoVerdict { yes, no, unknown };

struct IsoResult {
    IsoVerdict verdict = IsoVerdict::unknown;
    ModMatrix witness;   // on yes: invertible h with h V_M = V_N h, h F_M = F_N h
    std::string detail;  // on no: the distinguishing invariant
};

namespace detail {

inline bool is_hom(const FinModule& m, const FinModule& n, const ModMatrix& h) {
    for (long i = 0; i < n.rank(); ++i)
        for (long j = 0; j < m.rank(); ++j) {
            int need = n.orders[i] - m.orders[j];
            if (need > 0 && mod_floor(h.at(i, j), h.ctx.ppow(need)) != 0)
                return false;
        }
    return maps_equal(n.orders, h * m.V, n.V * h) && maps_equal(n.orders, h * m.F, n.F * h);
}

// Surjectivity onto N: columns of h together with N's order rows span the
// ambient, i.e. the Howell form has a unit pivot in every coordinate.
inline bool is_surjective(const FinModule& n, const ModMatrix& h) {
    HowellForm hf = howell_form(stack_rows(h.transpose(), order_rows(n)));
    if (static_cast<long>(hf.pivot_col.size()) != n.rank())
        return false;
    for (int v : hf.pivot_val)
        if (v != 0)
            return false;
    return true;
}

}  // namespace detail

inline IsoResult is_isomorphic(const FinModule& m, const FinModule& n, unsigned long long seed = 0,
                               long budget = 200) {
    if (m.ctx != n.ctx)
        throw error("is_isomorphic: context mismatch");
    const PadicContext& ctx = m.ctx;

    auto sorted = [](std::vector<int> v) {
        std::sort(v.rbegin(), v.rend());
        return v;
    };
    IsoResult res;
    if (sorted(m.orders) != sorted(n.orders)) {
        res.verdict = IsoVerdict::no;
        res.detail = "generator orders differ: " + orders_str(sorted(m.orders)) + " vs " +
                     orders_str(sorted(n.orders));
        return res;
    }
    long kmax = ctx.nu * std::max(m.rank(), n.rank());
    for (long k = 1; k <= kmax; ++k) {
        for (int which = 0; which < 2; ++which) {
            const ModMatrix& am = which ? m.F : m.V;
            const ModMatrix& an = which ? n.F : n.V;
            const char* nm = which ? "F" : "V";
            auto cm = cokernel_orders(m, am.pow(k)), cn = cokernel_orders(n, an.pow(k));
            if (cm != cn) {
                res.verdict = IsoVerdict::no;
                res.detail = std::string("coker(") + nm + "^" + std::to_string(k) +
                             ") invariants differ: " + orders_str(cm) + " vs " + orders_str(cn);
                return res;
            }
        }
    }
    for (int which = 0; which < 2; ++which) {
        auto km = kernel_orders(m, which ? m.F : m.V);
        auto kn = kernel_orders(n, which ? n.F : n.V);
        if (km != kn) {
            res.verdict = IsoVerdict::no;
            res.detail = std::string("ker(") + (which ? "F" : "V") +
                         ") invariants differ: " + orders_str(km) + " vs " + orders_str(kn);
            return res;
        }
    }

    auto accept = [&](const ModMatrix& h) {
        return detail::is_hom(m, n, h) && detail::is_surjective(n, h);
    };

    if (m.rank() == n.rank()) {
        ModMatrix id = ModMatrix::identity(ctx, m.rank());
        if (accept(id)) {
            res.verdict = IsoVerdict::yes;
            res.witness = canonical_map(n.orders, id);
            return res;
        }
    }
    HomGroup hg = hom_group(m, n);
    for (const ModMatrix& h : hg.basis)
        if (accept(h)) {
            res.verdict = IsoVerdict::yes;
            res.witness = h;
            return res;
        }

    std::mt19937_64 rng(seed);
    long long lim = 1;
    if (ctx.modulus < Int(1) << 62)
        lim = ctx.modulus.convert_to<long long>();
    else
        lim = (1LL << 62);
    std::uniform_int_distribution<long long> dist(0, lim - 1);
    for (long trial = 0; trial < budget && !hg.basis.empty(); ++trial) {
        ModMatrix h(ctx, n.rank(), m.rank());
        for (const ModMatrix& b : hg.basis)
            h = h + b * Int(dist(rng));
        if (accept(h)) {
            res.verdict = IsoVerdict::yes;
            res.witness = canonical_map(n.orders, h);
            return res;
        }
    }
    res.verdict = IsoVerdict::unknown;
    res.detail = "invariants agree but no invertible hom found within budget";
    return res;
}

}  // namespace dieudonne
