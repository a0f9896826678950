#pragma once

// The quadratic extension W = Z/p^nu[s]/(s^2 - qbar) for a nonresidue qbar,
// with conjugation sigma(a + b s) = a - b s, and module data whose F is
// sigma-semilinear and whose V is sigma^{-1}-semilinear (sigma has order 2,
// so the two twists coincide). Semilinear data is checked by expanding over
// Z/p^nu: each W-generator splits into the pair (g, s g), a multiplication
// by a + b s becomes [[a, b qbar], [b, a]], and a sigma-semilinear map picks
// up the conjugation block [[1, 0], [0, -1]] on the source side.

#include <dieudonne/module.hpp>

namespace dieudonne {

inline bool is_nonresidue(long long x, long long p) {
    x %= p;
    if (x < 0)
        x += p;
    if (x == 0)
        return false;
    for (long long r = 1; r < p; ++r)
        if (r * r % p == x)
            return false;
    return true;
}

inline long long least_nonresidue(long long p) {
    for (long long x = 2; x < p; ++x)
        if (is_nonresidue(x, p))
            return x;
    throw error("least_nonresidue: no nonresidue below p");
}

struct QuadraticContext {
    PadicContext base;
    long long nonresidue = 0;

    QuadraticContext() = default;
    QuadraticContext(const PadicContext& b, long long qbar) : base(b), nonresidue(qbar) {
        if (!is_nonresidue(qbar, b.p))
            throw error("QuadraticContext: qbar must be a quadratic nonresidue mod p");
    }
};

struct WElem {
    Int a;
    Int b;
};

inline WElem wreduce(const QuadraticContext& q, const WElem& x) {
    return {q.base.reduce(x.a), q.base.reduce(x.b)};
}

inline WElem wadd(const QuadraticContext& q, const WElem& x, const WElem& y) {
    return wreduce(q, {x.a + y.a, x.b + y.b});
}

inline WElem wmul(const QuadraticContext& q, const WElem& x, const WElem& y) {
    return wreduce(q, {x.a * y.a + Int(q.nonresidue) * x.b * y.b, x.a * y.b + x.b * y.a});
}

inline WElem wsigma(const WElem& x) { return {x.a, -x.b}; }

inline bool wequal(const QuadraticContext& q, const WElem& x, const WElem& y) {
    return q.base.reduce(x.a - y.a) == 0 && q.base.reduce(x.b - y.b) == 0;
}

struct SemilinearModule {
    QuadraticContext qctx;
    std::vector<int> orders;
    std::vector<WElem> V;  // row-major rank x rank, sigma^{-1}-semilinear
    std::vector<WElem> F;  // row-major rank x rank, sigma-semilinear

    long rank() const { return static_cast<long>(orders.size()); }
    const WElem& vat(long i, long j) const { return V[static_cast<size_t>(i) * rank() + j]; }
    const WElem& fat(long i, long j) const { return F[static_cast<size_t>(i) * rank() + j]; }
};

inline SemilinearModule base_change_quadratic(const FinModule& m, const QuadraticContext& qctx) {
    if (m.ctx != qctx.base)
        throw error("base_change_quadratic: context mismatch");
    SemilinearModule sm;
    sm.qctx = qctx;
    sm.orders = m.orders;
    long g = m.rank();
    sm.V.resize(static_cast<size_t>(g) * g);
    sm.F.resize(static_cast<size_t>(g) * g);
    for (long i = 0; i < g; ++i)
        for (long j = 0; j < g; ++j) {
            sm.V[static_cast<size_t>(i) * g + j] = {m.V.at(i, j), 0};
            sm.F[static_cast<size_t>(i) * g + j] = {m.F.at(i, j), 0};
        }
    return sm;
}

// Expansion over Z/p^nu: generator 2i is g_i, generator 2i+1 is s g_i. The
// result passes make_module exactly when the semilinear VF = FV = p holds.
inline FinModule expand_semilinear(const SemilinearModule& sm) {
    const PadicContext& ctx = sm.qctx.base;
    const Int qbar = sm.qctx.nonresidue;
    long g = sm.rank();
    std::vector<int> orders(2 * g);
    for (long i = 0; i < g; ++i)
        orders[2 * i] = orders[2 * i + 1] = sm.orders[i];
    ModMatrix V(ctx, 2 * g, 2 * g), F(ctx, 2 * g, 2 * g);
    auto put = [&](ModMatrix& dst, long i, long j, const WElem& w) {
        // mult(a + b s) composed with conjugation on the source pair
        dst.at(2 * i, 2 * j) = ctx.reduce(w.a);
        dst.at(2 * i, 2 * j + 1) = ctx.reduce(-w.b * qbar);
        dst.at(2 * i + 1, 2 * j) = ctx.reduce(w.b);
        dst.at(2 * i + 1, 2 * j + 1) = ctx.reduce(-w.a);
    };
    for (long i = 0; i < g; ++i)
        for (long j = 0; j < g; ++j) {
            put(V, i, j, sm.vat(i, j));
            put(F, i, j, sm.fat(i, j));
        }
    return make_module(ctx, orders, V, F);
}

// W-linear map given by one W-matrix, expanded over Z/p^nu (no conjugation).
inline ModMatrix expand_wlinear(const QuadraticContext& qctx, long rows, long cols,
                                const std::vector<WElem>& entries) {
    const PadicContext& ctx = qctx.base;
    const Int qbar = qctx.nonresidue;
    ModMatrix h(ctx, 2 * rows, 2 * cols);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) {
            const WElem& w = entries[static_cast<size_t>(i) * cols + j];
            h.at(2 * i, 2 * j) = ctx.reduce(w.a);
            h.at(2 * i, 2 * j + 1) = ctx.reduce(w.b * qbar);
            h.at(2 * i + 1, 2 * j) = ctx.reduce(w.b);
            h.at(2 * i + 1, 2 * j + 1) = ctx.reduce(w.a);
        }
    return h;
}

struct TwistReport {
    bool pass = false;
    std::string detail;
};

// After extending scalars to W, multiplication by s carries the twisted
// dualizing module onto the plain one: s conjugates the sign twist away
// because F and V conjugate coefficients while s maps to -s.
inline TwistReport verify_twist_untwist_iso(const QuadraticContext& qctx, int nu) {
    PadicContext ctx(qctx.base.p, nu);
    QuadraticContext qc(ctx, qctx.nonresidue);

    FinModule plain = expand_semilinear(base_change_quadratic(dualizing_module(ctx), qc));
    FinModule twisted = expand_semilinear(base_change_quadratic(twisted_dualizing_module(ctx), qc));

    ModMatrix phi = expand_wlinear(qc, 1, 1, {WElem{0, 1}});  // x -> s x

    TwistReport rep;
    if (!maps_equal(plain.orders, phi * twisted.F, plain.F * phi)) {
        rep.detail = "multiplication by s does not intertwine F";
        return rep;
    }
    if (!maps_equal(plain.orders, phi * twisted.V, plain.V * phi)) {
        rep.detail = "multiplication by s does not intertwine V";
        return rep;
    }
    if (!detail::is_surjective(plain, phi)) {
        rep.detail = "multiplication by s is not invertible";
        return rep;
    }
    rep.pass = true;
    rep.detail = "twisted and plain dualizing modules agree after the quadratic extension";
    return rep;
}

}  // namespace dieudonne
