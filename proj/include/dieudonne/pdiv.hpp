// p-divisible-group invariants of Dieudonne lattices: height, dimension,
// smoothness, Serre duals, and the Newton-slope isogeny decomposition.
//
// Slopes are slopes of F. A slope a/b in lowest terms with multiplicity m
// contributes m/b copies of the simple lattice of rank b whose parameters
// are (n0, q0) = (b, b - a), so that slope = (n0 - q0)/n0. Decomposition
// statements hold over the algebraic closure and the renderers say so.

#pragma once

#include <numeric>

#include "lambda.hpp"

namespace dieudonne {

struct Lattice {
    long long p = 0;
    IntMatrix V;
    IntMatrix F;

    long rank() const { return V.rows; }
};

inline Lattice make_lattice(long long p, const IntMatrix& v, const IntMatrix& f) {
    if (!is_prime_ll(p) || p == 2)
        throw error("make_lattice: p must be an odd prime");
    if (v.rows != v.cols || f.rows != f.cols || v.rows != f.rows)
        throw error("make_lattice: V and F must be square of equal rank");
    detail::check_lattice_relation(v, f, p);
    return Lattice{p, v, f};
}

inline Lattice as_lattice(const LambdaLattice& l) { return Lattice{l.p, l.V, l.F}; }

inline FinModule reduce_mod(const Lattice& l, const PadicContext& ctx) {
    if (ctx.p != l.p)
        throw error("reduce_mod: context prime differs from lattice prime");
    std::vector<int> orders(l.rank(), ctx.nu);
    return make_module(ctx, orders, ModMatrix::reduce(l.V, ctx), ModMatrix::reduce(l.F, ctx));
}

struct PdivInvariants {
    long height = 0;
    long dimension = 0;
    bool smooth = false;
};

inline PdivInvariants invariants(const Lattice& l) {
    PdivInvariants out;
    out.height = l.rank();
    PadicContext fp(l.p, 1);
    ModMatrix vbar = ModMatrix::reduce(l.V, fp);
    HowellForm hf = howell_form(vbar);
    out.dimension = out.height - hf.h.rows;
    out.smooth = vbar.pow(l.rank()).is_zero();
    return out;
}

inline Lattice serre_dual(const Lattice& l, bool twisted = false) {
    Lattice d;
    d.p = l.p;
    d.V = l.F.transpose();
    d.F = l.V.transpose();
    if (twisted) {
        d.V = -d.V;
        d.F = -d.F;
    }
    return d;
}

struct IsogenyComponent {
    long long n0 = 0;
    long long q0 = 0;
    long long multiplicity = 0;
    Rat hasse;  // q0 / n0
};

struct IsogenyType {
    std::vector<NewtonSlope> slopes;
    std::vector<IsogenyComponent> components;
};

inline IsogenyType isogeny_type(const Lattice& l) {
    IsogenyType out;
    std::vector<Int> cp = charpoly_exact(l.F);
    out.slopes = newton_slopes(cp, l.p);
    long long height = 0;
    for (const NewtonSlope& s : out.slopes) {
        long long b = s.slope.den;
        long long a = s.slope.num;
        if (a < 0 || a > b)
            throw error("isogeny_type: slope outside [0,1], not a lattice of this family");
        if (s.multiplicity % b != 0)
            throw error("isogeny_type: non-integral decomposition");
        IsogenyComponent c;
        c.n0 = b;
        c.q0 = b - a;
        c.multiplicity = s.multiplicity / b;
        c.hasse = Rat::make(c.q0, c.n0);
        height += c.multiplicity * c.n0;
        out.components.push_back(c);
    }
    if (height != l.rank())
        throw error("isogeny_type: component ranks do not add up to the height");
    return out;
}

struct ManinVerdict {
    bool symmetric = false;
    bool supersingular = false;
    bool algebraicizable_possible = false;
};

inline ManinVerdict manin_check(const IsogenyType& t) {
    ManinVerdict v;
    v.symmetric = true;
    v.supersingular = !t.slopes.empty();
    Rat half = Rat::make(1, 2);
    for (const NewtonSlope& s : t.slopes) {
        if (!(s.slope == half))
            v.supersingular = false;
        Rat mirror = Rat::make(s.slope.den - s.slope.num, s.slope.den);
        bool found = false;
        for (const NewtonSlope& o : t.slopes)
            if (o.slope == mirror && o.multiplicity == s.multiplicity)
                found = true;
        if (!found)
            v.symmetric = false;
    }
    v.algebraicizable_possible = v.symmetric;
    return v;
}

}  // namespace dieudonne
