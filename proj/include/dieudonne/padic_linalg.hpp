#pragma once

// Exact linear algebra over Z and Z/p^nu for an odd prime p.
//
// Everything is integer arithmetic on boost::multiprecision::cpp_int; no
// floating point anywhere. Matrices are dense row-major. Code that models
// module maps stores them in the column convention (entry (i,j) is the
// coefficient of generator i in the image of generator j); the span and
// solve routines in this header act on row spans, which is the transpose
// view of the same arrays.
//
// Over the local ring Z/p^nu a Gauss-style elimination with p-valuation
// pivoting puts any row span into Howell form: pivots are powers of p on a
// strictly increasing set of columns, entries above a pivot p^v are reduced
// mod p^v, and annihilator multiples of pivot rows are kept in the span.
// The resulting generating set is canonical for the span, and every span
// element whose leading coordinates vanish lies in the span of the trailing
// rows, which is what makes membership tests by pivot reduction complete.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace dieudonne {

using Int = boost::multiprecision::cpp_int;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Int mod_floor(const Int& x, const Int& m) {
    Int r = x % m;
    if (r < 0)
        r += m;
    return r;
}

inline Int pow_int(Int base, long long e) {
    Int r = 1;
    while (e > 0) {
        if (e & 1)
            r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

// p-adic valuation; x must be nonzero.
inline int val_p(Int x, long long p) {
    if (x == 0)
        throw error("val_p: valuation of zero");
    if (x < 0)
        x = -x;
    int v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

// Extended gcd: returns g = gcd(a, b) >= 0 with u*a + v*b = g.
inline Int ext_gcd(Int a, Int b, Int& u, Int& v) {
    Int u0 = 1, v0 = 0, u1 = 0, v1 = 1;
    while (b != 0) {
        Int q = a / b;
        Int t = a - q * b;
        a = b;
        b = t;
        t = u0 - q * u1;
        u0 = u1;
        u1 = t;
        t = v0 - q * v1;
        v0 = v1;
        v1 = t;
    }
    if (a < 0) {
        a = -a;
        u0 = -u0;
        v0 = -v0;
    }
    u = u0;
    v = v0;
    return a;
}

inline Int inv_mod(const Int& a, const Int& m) {
    Int u, v;
    Int g = ext_gcd(mod_floor(a, m), m, u, v);
    if (g != 1)
        throw error("inv_mod: element is not a unit");
    return mod_floor(u, m);
}

inline bool is_prime_ll(long long n) {
    if (n < 2)
        return false;
    for (long long d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

inline Int binomial(long long n, long long k) {
    if (k < 0 || k > n)
        return 0;
    if (k > n - k)
        k = n - k;
    Int r = 1;
    for (long long i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

// Coefficient ring Z/p^nu with p an odd prime. Equality ignores the cached
// modulus, which is determined by p and nu.
struct PadicContext {
    long long p = 0;
    int nu = 0;
    Int modulus = 0;

    PadicContext() = default;
    PadicContext(long long p_, int nu_) : p(p_), nu(nu_) {
        if (p_ == 2)
            throw error(
                "p = 2 is not supported: at p = 2 the circle product of an element "
                "with itself must vanish, which needs a modified exterior algebra, "
                "and the twisted duality construction degenerates; use an odd prime");
        if (p_ < 3 || !is_prime_ll(p_))
            throw error("p must be an odd prime");
        if (nu_ < 1)
            throw error("nu must be at least 1");
        modulus = pow_int(p_, nu_);
    }

    bool operator==(const PadicContext& o) const { return p == o.p && nu == o.nu; }
    bool operator!=(const PadicContext& o) const { return !(*this == o); }

    Int reduce(const Int& x) const { return mod_floor(x, modulus); }
    Int ppow(int e) const { return pow_int(p, e); }
};

struct IntMatrix {
    long rows = 0;
    long cols = 0;
    std::vector<Int> a;

    IntMatrix() = default;
    IntMatrix(long r, long c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    Int& at(long i, long j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Int& at(long i, long j) const { return a[static_cast<size_t>(i) * cols + j]; }

    bool operator==(const IntMatrix& o) const {
        return rows == o.rows && cols == o.cols && a == o.a;
    }
    bool operator!=(const IntMatrix& o) const { return !(*this == o); }

    static IntMatrix identity(long n) {
        IntMatrix m(n, n);
        for (long i = 0; i < n; ++i)
            m.at(i, i) = 1;
        return m;
    }

    bool is_zero() const {
        for (const Int& x : a)
            if (x != 0)
                return false;
        return true;
    }

    IntMatrix transpose() const {
        IntMatrix m(cols, rows);
        for (long i = 0; i < rows; ++i)
            for (long j = 0; j < cols; ++j)
                m.at(j, i) = at(i, j);
        return m;
    }

    IntMatrix operator*(const IntMatrix& o) const {
        if (cols != o.rows)
            throw error("IntMatrix: dimension mismatch in product");
        IntMatrix m(rows, o.cols);
        for (long i = 0; i < rows; ++i)
            for (long k = 0; k < cols; ++k) {
                const Int& x = at(i, k);
                if (x == 0)
                    continue;
                for (long j = 0; j < o.cols; ++j)
                    if (o.at(k, j) != 0)
                        m.at(i, j) += x * o.at(k, j);
            }
        return m;
    }

    IntMatrix operator+(const IntMatrix& o) const {
        if (rows != o.rows || cols != o.cols)
            throw error("IntMatrix: dimension mismatch in sum");
        IntMatrix m(rows, cols);
        for (size_t i = 0; i < a.size(); ++i)
            m.a[i] = a[i] + o.a[i];
        return m;
    }

    IntMatrix operator-(const IntMatrix& o) const {
        if (rows != o.rows || cols != o.cols)
            throw error("IntMatrix: dimension mismatch in difference");
        IntMatrix m(rows, cols);
        for (size_t i = 0; i < a.size(); ++i)
            m.a[i] = a[i] - o.a[i];
        return m;
    }

    IntMatrix operator*(const Int& s) const {
        IntMatrix m(rows, cols);
        for (size_t i = 0; i < a.size(); ++i)
            m.a[i] = a[i] * s;
        return m;
    }

    IntMatrix operator-() const { return *this * Int(-1); }

    IntMatrix pow(long long e) const {
        if (rows != cols)
            throw error("IntMatrix: power of a non-square matrix");
        IntMatrix r = identity(rows);
        IntMatrix b = *this;
        while (e > 0) {
            if (e & 1)
                r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }
};

struct ModMatrix {
    PadicContext ctx;
    long rows = 0;
    long cols = 0;
    std::vector<Int> a;

    ModMatrix() = default;
    ModMatrix(const PadicContext& c, long r, long cl)
        : ctx(c), rows(r), cols(cl), a(static_cast<size_t>(r) * cl) {}

    Int& at(long i, long j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Int& at(long i, long j) const { return a[static_cast<size_t>(i) * cols + j]; }

    bool operator==(const ModMatrix& o) const {
        return ctx == o.ctx && rows == o.rows && cols == o.cols && a == o.a;
    }
    bool operator!=(const ModMatrix& o) const { return !(*this == o); }

    static ModMatrix identity(const PadicContext& c, long n) {
        ModMatrix m(c, n, n);
        for (long i = 0; i < n; ++i)
            m.at(i, i) = 1;
        return m;
    }

    static ModMatrix reduce(const IntMatrix& x, const PadicContext& c) {
        ModMatrix m(c, x.rows, x.cols);
        for (size_t i = 0; i < x.a.size(); ++i)
            m.a[i] = c.reduce(x.a[i]);
        return m;
    }

    IntMatrix lift() const {
        IntMatrix m(rows, cols);
        m.a = a;
        return m;
    }

    bool is_zero() const {
        for (const Int& x : a)
            if (x != 0)
                return false;
        return true;
    }

    ModMatrix transpose() const {
        ModMatrix m(ctx, cols, rows);
        for (long i = 0; i < rows; ++i)
            for (long j = 0; j < cols; ++j)
                m.at(j, i) = at(i, j);
        return m;
    }

    ModMatrix operator*(const ModMatrix& o) const {
        if (ctx != o.ctx)
            throw error("ModMatrix: mixed coefficient rings");
        if (cols != o.rows)
            throw error("ModMatrix: dimension mismatch in product");
        ModMatrix m(ctx, rows, o.cols);
        for (long i = 0; i < rows; ++i)
            for (long k = 0; k < cols; ++k) {
                const Int& x = at(i, k);
                if (x == 0)
                    continue;
                for (long j = 0; j < o.cols; ++j)
                    if (o.at(k, j) != 0)
                        m.at(i, j) += x * o.at(k, j);
            }
        for (Int& x : m.a)
            x = ctx.reduce(x);
        return m;
    }

    ModMatrix operator+(const ModMatrix& o) const {
        if (ctx != o.ctx || rows != o.rows || cols != o.cols)
            throw error("ModMatrix: dimension mismatch in sum");
        ModMatrix m(ctx, rows, cols);
        for (size_t i = 0; i < a.size(); ++i)
            m.a[i] = ctx.reduce(a[i] + o.a[i]);
        return m;
    }

    ModMatrix operator-(const ModMatrix& o) const {
        if (ctx != o.ctx || rows != o.rows || cols != o.cols)
            throw error("ModMatrix: dimension mismatch in difference");
        ModMatrix m(ctx, rows, cols);
        for (size_t i = 0; i < a.size(); ++i)
            m.a[i] = ctx.reduce(a[i] - o.a[i]);
        return m;
    }

    ModMatrix operator*(const Int& s) const {
        ModMatrix m(ctx, rows, cols);
        for (size_t i = 0; i < a.size(); ++i)
            m.a[i] = ctx.reduce(a[i] * s);
        return m;
    }

    ModMatrix operator-() const { return *this * Int(-1); }

    ModMatrix pow(long long e) const {
        if (rows != cols)
            throw error("ModMatrix: power of a non-square matrix");
        ModMatrix r = identity(ctx, rows);
        ModMatrix b = *this;
        while (e > 0) {
            if (e & 1)
                r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }
};

inline ModMatrix stack_rows(const ModMatrix& a, const ModMatrix& b) {
    if (a.ctx != b.ctx || a.cols != b.cols)
        throw error("stack_rows: incompatible shapes");
    ModMatrix m(a.ctx, a.rows + b.rows, a.cols);
    std::copy(a.a.begin(), a.a.end(), m.a.begin());
    std::copy(b.a.begin(), b.a.end(), m.a.begin() + a.a.size());
    return m;
}

inline ModMatrix hcat(const ModMatrix& a, const ModMatrix& b) {
    if (a.ctx != b.ctx || a.rows != b.rows)
        throw error("hcat: incompatible shapes");
    ModMatrix m(a.ctx, a.rows, a.cols + b.cols);
    for (long i = 0; i < a.rows; ++i) {
        for (long j = 0; j < a.cols; ++j)
            m.at(i, j) = a.at(i, j);
        for (long j = 0; j < b.cols; ++j)
            m.at(i, a.cols + j) = b.at(i, j);
    }
    return m;
}

// Howell form of the row span of a. h is the canonical generating set (no
// zero rows, pivot columns strictly increasing, pivots p^v, entries above a
// pivot reduced mod p^v). t records the row operations: t * a = h exactly
// over Z/p^nu. t gains rows relative to a when annihilator rows enter.
struct HowellForm {
    ModMatrix h;
    ModMatrix t;
    std::vector<long> pivot_col;
    std::vector<int> pivot_val;
};

inline HowellForm howell_form(const ModMatrix& a) {
    const PadicContext ctx = a.ctx;
    const Int& m = ctx.modulus;
    std::vector<std::vector<Int>> rows(a.rows, std::vector<Int>(a.cols));
    std::vector<std::vector<Int>> trans(a.rows, std::vector<Int>(a.rows));
    for (long i = 0; i < a.rows; ++i) {
        for (long j = 0; j < a.cols; ++j)
            rows[i][j] = ctx.reduce(a.at(i, j));
        trans[i][i] = 1;
    }

    auto axpy = [&](std::vector<Int>& dst, const Int& c, const std::vector<Int>& src) {
        for (size_t k = 0; k < dst.size(); ++k)
            if (src[k] != 0)
                dst[k] = mod_floor(dst[k] - c * src[k], m);
    };
    auto scale = [&](std::vector<Int>& row, const Int& c) {
        for (Int& x : row)
            x = mod_floor(x * c, m);
    };

    std::vector<long> pcol;
    std::vector<int> pval;
    size_t r = 0;
    for (long j = 0; j < a.cols; ++j) {
        size_t best = rows.size();
        int bestv = ctx.nu;
        for (size_t i = r; i < rows.size(); ++i) {
            if (rows[i][j] == 0)
                continue;
            int v = val_p(rows[i][j], ctx.p);
            if (v < bestv) {
                bestv = v;
                best = i;
            }
        }
        if (best == rows.size())
            continue;
        std::swap(rows[r], rows[best]);
        std::swap(trans[r], trans[best]);
        Int pv = ctx.ppow(bestv);
        Int u = rows[r][j] / pv;
        Int uinv = inv_mod(u, m);
        scale(rows[r], uinv);
        scale(trans[r], uinv);
        for (size_t i = r + 1; i < rows.size(); ++i) {
            if (rows[i][j] == 0)
                continue;
            Int c = rows[i][j] / pv;
            axpy(rows[i], c, rows[r]);
            axpy(trans[i], c, trans[r]);
        }
        if (bestv > 0) {
            Int ann = ctx.ppow(ctx.nu - bestv);
            std::vector<Int> nr = rows[r], nt = trans[r];
            scale(nr, ann);
            scale(nt, ann);
            rows.push_back(std::move(nr));
            trans.push_back(std::move(nt));
        }
        pcol.push_back(j);
        pval.push_back(bestv);
        ++r;
    }

    for (size_t k = 0; k < pcol.size(); ++k) {
        Int pv = ctx.ppow(pval[k]);
        for (size_t i = 0; i < k; ++i) {
            Int e = rows[i][pcol[k]];
            Int c = (e - mod_floor(e, pv)) / pv;
            if (c != 0) {
                axpy(rows[i], c, rows[k]);
                axpy(trans[i], c, trans[k]);
            }
        }
    }

    HowellForm out;
    out.h = ModMatrix(ctx, static_cast<long>(r), a.cols);
    out.t = ModMatrix(ctx, static_cast<long>(r), a.rows);
    for (size_t i = 0; i < r; ++i) {
        for (long j = 0; j < a.cols; ++j)
            out.h.at(static_cast<long>(i), j) = rows[i][j];
        for (long j = 0; j < a.rows; ++j)
            out.t.at(static_cast<long>(i), j) = trans[i][j];
    }
    out.pivot_col = std::move(pcol);
    out.pivot_val = std::move(pval);
    return out;
}

// Reduces x against the pivots of hf whose column lies in [0, limit),
// accumulating the combination used. Returns false when some pivot cannot
// clear its coordinate, in which case x holds the partial residue.
inline bool reduce_row_against(const HowellForm& hf, std::vector<Int>& x, long limit,
                               std::vector<Int>* comb) {
    const PadicContext& ctx = hf.h.ctx;
    const Int& m = ctx.modulus;
    bool ok = true;
    for (size_t k = 0; k < hf.pivot_col.size(); ++k) {
        long j = hf.pivot_col[k];
        if (j >= limit)
            break;
        Int e = x[j];
        if (e == 0)
            continue;
        Int pv = ctx.ppow(hf.pivot_val[k]);
        if (e % pv != 0) {
            ok = false;
            continue;
        }
        Int c = e / pv;
        for (long jj = 0; jj < hf.h.cols; ++jj)
            if (hf.h.at(static_cast<long>(k), jj) != 0)
                x[jj] = mod_floor(x[jj] - c * hf.h.at(static_cast<long>(k), jj), m);
        if (comb)
            (*comb)[k] = mod_floor((*comb)[k] + c, m);
    }
    return ok;
}

inline bool span_contains(const HowellForm& hf, const ModMatrix& rows) {
    if (rows.cols != hf.h.cols || rows.ctx != hf.h.ctx)
        throw error("span_contains: incompatible shapes");
    for (long i = 0; i < rows.rows; ++i) {
        std::vector<Int> x(rows.cols);
        for (long j = 0; j < rows.cols; ++j)
            x[j] = rows.ctx.reduce(rows.at(i, j));
        if (!reduce_row_against(hf, x, rows.cols, nullptr))
            return false;
        for (const Int& e : x)
            if (e != 0)
                return false;
    }
    return true;
}

inline bool spans_equal(const ModMatrix& a, const ModMatrix& b) {
    if (a.ctx != b.ctx || a.cols != b.cols)
        throw error("spans_equal: incompatible shapes");
    return howell_form(a).h == howell_form(b).h;
}

// Kernel of x -> x * a on row vectors: rows generating {x : x * a = 0}.
inline ModMatrix kernel_mod(const ModMatrix& a) {
    ModMatrix aug = hcat(a, ModMatrix::identity(a.ctx, a.rows));
    HowellForm hf = howell_form(aug);
    std::vector<long> keep;
    for (size_t k = 0; k < hf.pivot_col.size(); ++k)
        if (hf.pivot_col[k] >= a.cols)
            keep.push_back(static_cast<long>(k));
    ModMatrix ker(a.ctx, static_cast<long>(keep.size()), a.rows);
    for (size_t i = 0; i < keep.size(); ++i)
        for (long j = 0; j < a.rows; ++j)
            ker.at(static_cast<long>(i), j) = hf.h.at(keep[i], a.cols + j);
    return ker;
}

// Solves x * a = b row by row. x.row(i) * a = b.row(i) for all i, with the
// full solution set x + span(kernel).
struct SolveModResult {
    ModMatrix x;
    ModMatrix kernel;
};

inline std::optional<SolveModResult> solve_mod(const ModMatrix& a, const ModMatrix& b) {
    if (a.ctx != b.ctx || a.cols != b.cols)
        throw error("solve_mod: incompatible shapes");
    ModMatrix aug = hcat(a, ModMatrix::identity(a.ctx, a.rows));
    HowellForm hf = howell_form(aug);

    SolveModResult res;
    res.x = ModMatrix(a.ctx, b.rows, a.rows);
    for (long i = 0; i < b.rows; ++i) {
        std::vector<Int> x(aug.cols);
        for (long j = 0; j < b.cols; ++j)
            x[j] = b.ctx.reduce(b.at(i, j));
        if (!reduce_row_against(hf, x, a.cols, nullptr))
            return std::nullopt;
        for (long j = 0; j < a.cols; ++j)
            if (x[j] != 0)
                return std::nullopt;
        // (b.row(i) | 0) - comb = (0 | res_t), so comb's tail is -res_t.
        for (long j = 0; j < a.rows; ++j)
            res.x.at(i, j) = a.ctx.reduce(-x[a.cols + j]);
    }

    std::vector<long> keep;
    for (size_t k = 0; k < hf.pivot_col.size(); ++k)
        if (hf.pivot_col[k] >= a.cols)
            keep.push_back(static_cast<long>(k));
    res.kernel = ModMatrix(a.ctx, static_cast<long>(keep.size()), a.rows);
    for (size_t i = 0; i < keep.size(); ++i)
        for (long j = 0; j < a.rows; ++j)
            res.kernel.at(static_cast<long>(i), j) = hf.h.at(keep[i], a.cols + j);
    return res;
}

// Diagonalization over Z/p^nu: row and column operations bring a to
// diag(p^exps[0], ..., p^exps[c-1]) (rows beyond the diagonal zero), with the
// column operations recorded in w and its exact inverse winv. Columns that
// never meet a pivot get exps = nu. Only w and winv are returned; row
// operations act on the span side and are not needed by callers.
struct DiagonalForm {
    std::vector<int> exps;
    ModMatrix w;
    ModMatrix winv;
};

inline DiagonalForm diagonal_form(const ModMatrix& a0) {
    const PadicContext ctx = a0.ctx;
    const Int& m = ctx.modulus;
    const long R = a0.rows, C = a0.cols;
    ModMatrix b = ModMatrix::reduce(a0.lift(), ctx);
    ModMatrix w = ModMatrix::identity(ctx, C);
    ModMatrix winv = ModMatrix::identity(ctx, C);
    DiagonalForm out;
    out.exps.assign(C, ctx.nu);

    long t = 0;
    while (t < R && t < C) {
        long bi = -1, bj = -1;
        int bestv = ctx.nu;
        for (long i = t; i < R; ++i)
            for (long j = t; j < C; ++j) {
                if (b.at(i, j) == 0)
                    continue;
                int v = val_p(b.at(i, j), ctx.p);
                if (v < bestv) {
                    bestv = v;
                    bi = i;
                    bj = j;
                }
            }
        if (bi < 0)
            break;
        if (bi != t)
            for (long j = 0; j < C; ++j)
                std::swap(b.at(t, j), b.at(bi, j));
        if (bj != t) {
            for (long i = 0; i < R; ++i)
                std::swap(b.at(i, t), b.at(i, bj));
            for (long i = 0; i < C; ++i)
                std::swap(w.at(i, t), w.at(i, bj));
            for (long j = 0; j < C; ++j)
                std::swap(winv.at(t, j), winv.at(bj, j));
        }
        Int pv = ctx.ppow(bestv);
        Int uinv = inv_mod(b.at(t, t) / pv, m);
        for (long j = t; j < C; ++j)
            b.at(t, j) = mod_floor(b.at(t, j) * uinv, m);
        for (long i = t + 1; i < R; ++i) {
            if (b.at(i, t) == 0)
                continue;
            Int c = b.at(i, t) / pv;
            for (long j = t; j < C; ++j)
                if (b.at(t, j) != 0)
                    b.at(i, j) = mod_floor(b.at(i, j) - c * b.at(t, j), m);
        }
        for (long j = t + 1; j < C; ++j) {
            if (b.at(t, j) == 0)
                continue;
            Int c = b.at(t, j) / pv;
            for (long i = t; i < R; ++i)
                if (b.at(i, t) != 0)
                    b.at(i, j) = mod_floor(b.at(i, j) - c * b.at(i, t), m);
            for (long i = 0; i < C; ++i)
                if (w.at(i, t) != 0)
                    w.at(i, j) = mod_floor(w.at(i, j) - c * w.at(i, t), m);
            for (long jj = 0; jj < C; ++jj)
                if (winv.at(j, jj) != 0)
                    winv.at(t, jj) = mod_floor(winv.at(t, jj) + c * winv.at(j, jj), m);
        }
        out.exps[t] = bestv;
        ++t;
    }
    out.w = std::move(w);
    out.winv = std::move(winv);
    return out;
}

// Presentation of (Z/p^nu)^D / rowspan(rels). The caller supplies every
// relation, including order rows p^{e_i} * unit_i when ambient coordinate i
// has order below nu. pi and iota are column-convention maps with
// pi * iota = id; class coordinate r is taken mod p^orders[r].
struct QuotientPresentation {
    std::vector<int> orders;
    ModMatrix pi;
    ModMatrix iota;

    long rank() const { return static_cast<long>(orders.size()); }

    Int total_order(long long p) const {
        int s = 0;
        for (int e : orders)
            s += e;
        return pow_int(p, s);
    }
};

inline QuotientPresentation quotient_by_rows(const PadicContext& ctx, long D,
                                             const ModMatrix& rels) {
    if (rels.cols != D)
        throw error("quotient_by_rows: relation width differs from ambient rank");
    DiagonalForm df = diagonal_form(rels);
    std::vector<long> kept;
    for (long j = 0; j < D; ++j)
        if (df.exps[j] > 0)
            kept.push_back(j);
    QuotientPresentation q;
    long g = static_cast<long>(kept.size());
    q.pi = ModMatrix(ctx, g, D);
    q.iota = ModMatrix(ctx, D, g);
    for (long r = 0; r < g; ++r) {
        int e = df.exps[kept[r]];
        q.orders.push_back(e);
        Int pe = ctx.ppow(e);
        for (long i = 0; i < D; ++i) {
            q.pi.at(r, i) = mod_floor(df.w.at(i, kept[r]), pe);
            q.iota.at(i, r) = df.winv.at(kept[r], i);
        }
    }
    return q;
}

// Characteristic polynomial det(lambda I - a), coefficients ascending,
// monic. Berkowitz' division-free scheme; the Krylov products skip zero
// entries, so generalized permutation matrices cost O(n^3) overall.
inline std::vector<Int> charpoly_exact(const IntMatrix& a) {
    if (a.rows != a.cols)
        throw error("charpoly_exact: matrix not square");
    const long n = a.rows;
    std::vector<Int> pcur{1};
    for (long r = 1; r <= n; ++r) {
        std::vector<Int> tcol(r + 1);
        tcol[0] = 1;
        tcol[1] = -a.at(r - 1, r - 1);
        std::vector<Int> u(r - 1);
        for (long i = 0; i < r - 1; ++i)
            u[i] = a.at(i, r - 1);
        for (long k = 2; k <= r; ++k) {
            Int dot = 0;
            for (long i = 0; i < r - 1; ++i)
                if (u[i] != 0 && a.at(r - 1, i) != 0)
                    dot += a.at(r - 1, i) * u[i];
            tcol[k] = -dot;
            if (k == r)
                break;
            std::vector<Int> nu(r - 1);
            for (long i = 0; i < r - 1; ++i)
                for (long j = 0; j < r - 1; ++j)
                    if (u[j] != 0 && a.at(i, j) != 0)
                        nu[i] += a.at(i, j) * u[j];
            u.swap(nu);
        }
        std::vector<Int> pnext(r + 1);
        for (long i = 0; i <= r; ++i) {
            Int s = 0;
            long klo = std::max<long>(0, i - r);
            long khi = std::min<long>(i, r - 1);
            for (long k = klo; k <= khi; ++k)
                if (tcol[i - k] != 0 && pcur[k] != 0)
                    s += tcol[i - k] * pcur[k];
            pnext[i] = s;
        }
        pcur.swap(pnext);
    }
    std::reverse(pcur.begin(), pcur.end());
    return pcur;
}

// Exact rational with small numerator and denominator, always normalized:
// den >= 1 and gcd(|num|, den) = 1.
struct Rat {
    long long num = 0;
    long long den = 1;

    static Rat make(long long n, long long d) {
        if (d == 0)
            throw error("Rat: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        long long g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        return Rat{n, d};
    }

    bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Rat& o) const { return !(*this == o); }
    bool operator<(const Rat& o) const { return num * o.den < o.num * den; }

    std::string str() const {
        if (den == 1)
            return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

struct NewtonSlope {
    Rat slope;
    long long multiplicity = 0;

    bool operator==(const NewtonSlope& o) const {
        return slope == o.slope && multiplicity == o.multiplicity;
    }
};

// Slopes of the Newton polygon of a monic polynomial at p, listed as root
// valuations in weakly increasing order; multiplicities sum to the degree.
// Coefficients ascending. A zero constant term would put an infinite slope
// in the output, so it is rejected.
inline std::vector<NewtonSlope> newton_slopes(const std::vector<Int>& coeffs, long long p) {
    if (coeffs.empty() || coeffs.back() != 1)
        throw error("newton_slopes: polynomial must be monic");
    if (!is_prime_ll(p))
        throw error("newton_slopes: p must be prime");
    if (coeffs[0] == 0)
        throw error("newton_slopes: zero constant term has an infinite slope");

    std::vector<std::pair<long long, long long>> pts;
    for (size_t i = 0; i < coeffs.size(); ++i)
        if (coeffs[i] != 0)
            pts.push_back({static_cast<long long>(i), val_p(coeffs[i], p)});

    std::vector<std::pair<long long, long long>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            // pop b when slope(b -> pt) <= slope(a -> b)
            if ((pt.second - b.second) * (b.first - a.first) <=
                (b.second - a.second) * (pt.first - b.first))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(pt);
    }

    std::vector<NewtonSlope> out;
    for (size_t k = 1; k < hull.size(); ++k) {
        long long dx = hull[k].first - hull[k - 1].first;
        long long dy = hull[k - 1].second - hull[k].second;
        out.push_back({Rat::make(dy, dx), dx});
    }
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace dieudonne
