#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>
#include <vector>

#include <dieudonne/padic_linalg.hpp>

using namespace dieudonne;

namespace {

ModMatrix from_rows(const PadicContext& ctx, const std::vector<std::vector<long long>>& rows,
                    long cols) {
    ModMatrix m(ctx, static_cast<long>(rows.size()), cols);
    for (long i = 0; i < m.rows; ++i)
        for (long j = 0; j < cols; ++j)
            m.at(i, j) = ctx.reduce(rows[i][j]);
    return m;
}

// Brute force row span of m as a sorted set of coordinate vectors. Only
// usable for tiny moduli and dimensions.
std::set<std::vector<long long>> brute_span(const ModMatrix& m) {
    long long mod = m.ctx.modulus.convert_to<long long>();
    std::set<std::vector<long long>> span;
    std::vector<long long> coeff(m.rows, 0);
    while (true) {
        std::vector<long long> v(m.cols, 0);
        for (long i = 0; i < m.rows; ++i)
            for (long j = 0; j < m.cols; ++j)
                v[j] = (v[j] + coeff[i] * m.at(i, j).convert_to<long long>()) % mod;
        span.insert(v);
        long k = 0;
        while (k < m.rows && ++coeff[k] == mod)
            coeff[k++] = 0;
        if (k == m.rows)
            break;
    }
    return span;
}

ModMatrix random_mod_matrix(std::mt19937& rng, const PadicContext& ctx, long r, long c) {
    std::uniform_int_distribution<long long> d(0, ctx.modulus.convert_to<long long>() - 1);
    ModMatrix m(ctx, r, c);
    for (Int& x : m.a)
        x = d(rng);
    return m;
}

using Poly = std::vector<Int>;  // ascending coefficients

Poly poly_mul(const Poly& f, const Poly& g) {
    Poly h(f.size() + g.size() - 1);
    for (size_t i = 0; i < f.size(); ++i)
        for (size_t j = 0; j < g.size(); ++j)
            h[i + j] += f[i] * g[j];
    return h;
}

Poly poly_add(Poly f, const Poly& g) {
    if (f.size() < g.size())
        f.resize(g.size());
    for (size_t i = 0; i < g.size(); ++i)
        f[i] += g[i];
    return f;
}

// Cofactor-expansion characteristic polynomial, the independent oracle for
// charpoly_exact on small sizes.
Poly poly_det(const std::vector<std::vector<Poly>>& m) {
    size_t n = m.size();
    if (n == 1)
        return m[0][0];
    Poly det{0};
    for (size_t k = 0; k < n; ++k) {
        std::vector<std::vector<Poly>> minor;
        for (size_t i = 1; i < n; ++i) {
            std::vector<Poly> row;
            for (size_t j = 0; j < n; ++j)
                if (j != k)
                    row.push_back(m[i][j]);
            minor.push_back(row);
        }
        Poly term = poly_mul(m[0][k], poly_det(minor));
        if (k % 2 == 1)
            for (Int& c : term)
                c = -c;
        det = poly_add(det, term);
    }
    return det;
}

Poly charpoly_naive(const IntMatrix& a) {
    std::vector<std::vector<Poly>> m(a.rows, std::vector<Poly>(a.rows));
    for (long i = 0; i < a.rows; ++i)
        for (long j = 0; j < a.rows; ++j)
            m[i][j] = (i == j) ? Poly{-a.at(i, j), 1} : Poly{-a.at(i, j)};
    Poly d = poly_det(m);
    d.resize(a.rows + 1);
    return d;
}

}  // namespace

TEST_CASE("howell form of the identity is the identity") {
    PadicContext ctx(3, 2);
    ModMatrix id = ModMatrix::identity(ctx, 2);
    HowellForm hf = howell_form(id);
    REQUIRE(hf.h == id);
    REQUIRE(hf.t == id);
}

TEST_CASE("howell form keeps a non-unit pivot and drops the dead annihilator") {
    PadicContext ctx(3, 2);
    ModMatrix a = from_rows(ctx, {{3}}, 1);
    HowellForm hf = howell_form(a);
    REQUIRE(hf.h == a);
    REQUIRE(hf.pivot_val == std::vector<int>{1});
    REQUIRE(hf.t * a == hf.h);
}

TEST_CASE("howell form separates the unit and torsion parts of a singular matrix") {
    PadicContext ctx(3, 2);
    ModMatrix a = from_rows(ctx, {{2, 1}, {1, 2}}, 2);
    HowellForm hf = howell_form(a);
    REQUIRE(hf.h == from_rows(ctx, {{1, 2}, {0, 3}}, 2));
}

TEST_CASE("howell form is a canonical invariant of the row span") {
    // Exhaustive over all 2x2 matrices mod 9: matrices with equal brute force
    // spans must produce identical howell forms, and each form must generate
    // exactly its source span.
    PadicContext ctx(3, 2);
    std::map<std::set<std::vector<long long>>, ModMatrix> seen;
    long checked = 0;
    for (long long e0 = 0; e0 < 9; ++e0)
        for (long long e1 = 0; e1 < 9; ++e1)
            for (long long e2 = 0; e2 < 9; ++e2)
                for (long long e3 = 0; e3 < 9; ++e3) {
                    ModMatrix a = from_rows(ctx, {{e0, e1}, {e2, e3}}, 2);
                    HowellForm hf = howell_form(a);
                    REQUIRE(hf.t * a == hf.h);
                    auto span = brute_span(a);
                    auto it = seen.find(span);
                    if (it == seen.end()) {
                        REQUIRE(brute_span(hf.h) == span);
                        seen.emplace(std::move(span), hf.h);
                    } else {
                        if (!(hf.h == it->second))
                            FAIL("same span, different howell forms");
                    }
                    ++checked;
                }
    REQUIRE(checked == 9 * 9 * 9 * 9);
    // Idempotence on every distinct form.
    for (const auto& [span, h] : seen)
        REQUIRE(howell_form(h).h == h);
}

TEST_CASE("howell transform is exact on random rectangular matrices") {
    std::mt19937 rng(991);
    for (auto [p, nu] : {std::pair<long long, int>{3, 2}, {5, 2}, {7, 1}, {3, 4}}) {
        PadicContext ctx(p, nu);
        for (int trial = 0; trial < 40; ++trial) {
            long r = 1 + trial % 4, c = 1 + (trial / 2) % 4;
            ModMatrix a = random_mod_matrix(rng, ctx, r, c);
            HowellForm hf = howell_form(a);
            REQUIRE(hf.t * a == hf.h);
            REQUIRE(howell_form(hf.h).h == hf.h);
            REQUIRE(spans_equal(a, hf.h));
        }
    }
}

TEST_CASE("kernel_mod finds every row annihilating the matrix") {
    PadicContext ctx(3, 2);
    SECTION("kernel of a torsion pivot") {
        ModMatrix a = from_rows(ctx, {{3}}, 1);
        ModMatrix k = kernel_mod(a);
        REQUIRE(spans_equal(k, from_rows(ctx, {{3}}, 1)));
    }
    SECTION("kernel of a unit matrix is trivial") {
        ModMatrix k = kernel_mod(ModMatrix::identity(ctx, 3));
        REQUIRE(k.rows == 0);
    }
    SECTION("exhaustive comparison against brute force membership") {
        std::mt19937 rng(4213);
        for (int trial = 0; trial < 120; ++trial) {
            ModMatrix a = random_mod_matrix(rng, ctx, 2, 2);
            ModMatrix k = kernel_mod(a);
            for (long i = 0; i < k.rows; ++i) {
                ModMatrix row(ctx, 1, 2);
                row.at(0, 0) = k.at(i, 0);
                row.at(0, 1) = k.at(i, 1);
                REQUIRE((row * a).is_zero());
            }
            HowellForm khf = howell_form(k);
            for (long long x0 = 0; x0 < 9; ++x0)
                for (long long x1 = 0; x1 < 9; ++x1) {
                    ModMatrix x = from_rows(ctx, {{x0, x1}}, 2);
                    bool annihilates = (x * a).is_zero();
                    REQUIRE(span_contains(khf, x) == annihilates);
                }
        }
    }
}

TEST_CASE("solve_mod returns an exact particular solution plus the full kernel") {
    PadicContext ctx(5, 2);
    std::mt19937 rng(77);
    int solvable = 0;
    for (int trial = 0; trial < 200; ++trial) {
        long r = 1 + trial % 3, c = 1 + (trial / 3) % 3;
        ModMatrix a = random_mod_matrix(rng, ctx, r, c);
        ModMatrix x0 = random_mod_matrix(rng, ctx, 2, r);
        ModMatrix b = x0 * a;
        auto sol = solve_mod(a, b);
        REQUIRE(sol.has_value());
        REQUIRE(sol->x * a == b);
        REQUIRE((sol->kernel * a).is_zero());
        // x0 - x must be explained by the kernel.
        REQUIRE(span_contains(howell_form(sol->kernel), x0 - sol->x));
        ++solvable;
    }
    REQUIRE(solvable == 200);
}

TEST_CASE("solve_mod reports unsolvable systems") {
    PadicContext ctx(3, 2);
    ModMatrix a = from_rows(ctx, {{3}}, 1);
    ModMatrix b = from_rows(ctx, {{1}}, 1);
    REQUIRE(!solve_mod(a, b).has_value());
}

TEST_CASE("quotient_by_rows presents cokernels with exact projections and lifts") {
    PadicContext ctx(3, 2);
    SECTION("pinned example") {
        ModMatrix rels = from_rows(ctx, {{3, 0}, {0, 1}}, 2);
        QuotientPresentation q = quotient_by_rows(ctx, 2, rels);
        REQUIRE(q.orders == std::vector<int>{1});
        REQUIRE(q.total_order(3) == 3);
    }
    SECTION("orders account for the span index and maps compose to identity") {
        std::mt19937 rng(5150);
        for (auto [p, nu] : {std::pair<long long, int>{3, 2}, {5, 1}, {3, 3}}) {
            PadicContext c2(p, nu);
            for (int trial = 0; trial < 60; ++trial) {
                long D = 1 + trial % 4;
                ModMatrix rels = random_mod_matrix(rng, c2, trial % 5, D);
                QuotientPresentation q = quotient_by_rows(c2, D, rels);
                // |span| * |quotient| = |ambient|
                HowellForm hf = howell_form(rels);
                int span_exp = 0;
                for (int v : hf.pivot_val)
                    span_exp += c2.nu - v;
                int quot_exp = 0;
                for (int e : q.orders)
                    quot_exp += e;
                REQUIRE(span_exp + quot_exp == c2.nu * D);
                // pi kills every relation.
                ModMatrix images = rels * q.pi.transpose();
                for (long i = 0; i < images.rows; ++i)
                    for (long r = 0; r < q.rank(); ++r)
                        REQUIRE(mod_floor(images.at(i, r), c2.ppow(q.orders[r])) == 0);
                // pi o iota = id in quotient coordinates.
                ModMatrix pi_iota = q.pi * q.iota;
                for (long r = 0; r < q.rank(); ++r)
                    for (long s = 0; s < q.rank(); ++s)
                        REQUIRE(mod_floor(pi_iota.at(r, s) - (r == s ? 1 : 0),
                                          c2.ppow(q.orders[r])) == 0);
            }
        }
    }
}

TEST_CASE("charpoly_exact matches pinned examples") {
    IntMatrix a(2, 2);
    a.at(0, 1) = 1;
    a.at(1, 0) = 3;
    REQUIRE(charpoly_exact(a) == std::vector<Int>{-3, 0, 1});

    REQUIRE(charpoly_exact(IntMatrix::identity(3)) == std::vector<Int>{-1, 3, -3, 1});

    IntMatrix z(1, 1);
    z.at(0, 0) = 7;
    REQUIRE(charpoly_exact(z) == std::vector<Int>{-7, 1});
}

TEST_CASE("charpoly_exact agrees with cofactor expansion up to size 4") {
    std::mt19937 rng(31337);
    std::uniform_int_distribution<long long> d(-9, 9);
    for (long n = 1; n <= 4; ++n)
        for (int trial = 0; trial < 30; ++trial) {
            IntMatrix a(n, n);
            for (Int& x : a.a)
                x = d(rng);
            REQUIRE(charpoly_exact(a) == charpoly_naive(a));
        }
}

TEST_CASE("charpoly_exact satisfies Cayley-Hamilton up to size 10") {
    std::mt19937 rng(271828);
    std::uniform_int_distribution<long long> d(-6, 6);
    for (long n : {1L, 2L, 3L, 5L, 8L, 10L}) {
        IntMatrix a(n, n);
        for (Int& x : a.a)
            x = d(rng);
        std::vector<Int> cp = charpoly_exact(a);
        IntMatrix acc(n, n);
        IntMatrix power = IntMatrix::identity(n);
        for (size_t i = 0; i < cp.size(); ++i) {
            acc = acc + power * cp[i];
            if (i + 1 < cp.size())
                power = power * a;
        }
        REQUIRE(acc.is_zero());
    }
}

TEST_CASE("newton_slopes matches pinned polygons") {
    SECTION("lambda^2 - 3 at p = 3 is pure of slope 1/2") {
        auto s = newton_slopes({-3, 0, 1}, 3);
        REQUIRE(s.size() == 1);
        REQUIRE(s[0].slope == Rat::make(1, 2));
        REQUIRE(s[0].multiplicity == 2);
    }
    SECTION("split polynomial with distinct valuations") {
        // (x - 1)(x - 3)(x - 9) = x^3 - 13 x^2 + 39 x - 27
        auto s = newton_slopes({-27, 39, -13, 1}, 3);
        REQUIRE(s.size() == 3);
        REQUIRE(s[0].slope == Rat::make(0, 1));
        REQUIRE(s[1].slope == Rat::make(1, 1));
        REQUIRE(s[2].slope == Rat::make(2, 1));
    }
    SECTION("unit roots give a single slope zero segment") {
        auto s = newton_slopes({1, -2, 1}, 3);
        REQUIRE(s.size() == 1);
        REQUIRE(s[0].slope == Rat::make(0, 1));
        REQUIRE(s[0].multiplicity == 2);
    }
}

TEST_CASE("newton_slopes rejects bad input") {
    REQUIRE_THROWS_AS(newton_slopes({1, 2}, 3), error);           // not monic
    REQUIRE_THROWS_AS(newton_slopes({0, 0, 1}, 3), error);        // zero constant term
    REQUIRE_THROWS_AS(newton_slopes({-3, 0, 1}, 4), error);       // p not prime
}

TEST_CASE("newton polygon of a product merges the factor polygons") {
    std::mt19937 rng(60902);
    std::uniform_int_distribution<long long> ud(1, 40);
    std::uniform_int_distribution<int> vd(0, 3);
    std::uniform_int_distribution<int> degd(1, 4);
    auto random_monic = [&](long long p) {
        Poly f(degd(rng) + 1);
        f.back() = 1;
        for (size_t i = 0; i + 1 < f.size(); ++i) {
            long long u = ud(rng);
            if (u % p == 0)
                ++u;
            f[i] = Int(u) * pow_int(p, vd(rng));
        }
        return f;
    };
    for (long long p : {3, 5}) {
        for (int trial = 0; trial < 60; ++trial) {
            Poly f = random_monic(p), g = random_monic(p);
            auto sf = newton_slopes(f, p);
            auto sg = newton_slopes(g, p);
            auto sfg = newton_slopes(poly_mul(f, g), p);
            std::vector<std::pair<Rat, long long>> merged;
            for (const auto& s : sf)
                merged.push_back({s.slope, s.multiplicity});
            for (const auto& s : sg)
                merged.push_back({s.slope, s.multiplicity});
            std::sort(merged.begin(), merged.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            // Coalesce equal slopes.
            std::vector<std::pair<Rat, long long>> want;
            for (const auto& s : merged) {
                if (!want.empty() && want.back().first == s.first)
                    want.back().second += s.second;
                else
                    want.push_back(s);
            }
            std::vector<std::pair<Rat, long long>> got;
            for (const auto& s : sfg)
                got.push_back({s.slope, s.multiplicity});
            REQUIRE(got == want);
            long long total = 0;
            for (const auto& s : sfg)
                total += s.multiplicity;
            REQUIRE(total == static_cast<long long>(poly_mul(f, g).size() - 1));
        }
    }
}

TEST_CASE("context construction enforces odd prime powers") {
    REQUIRE_THROWS_WITH(PadicContext(2, 1), Catch::Matchers::ContainsSubstring("odd prime"));
    REQUIRE_THROWS_AS(PadicContext(9, 1), error);
    REQUIRE_THROWS_AS(PadicContext(3, 0), error);
    PadicContext ctx(7, 3);
    REQUIRE(ctx.modulus == 343);
}

TEST_CASE("small arithmetic helpers") {
    REQUIRE(binomial(10, 5) == 252);
    REQUIRE(binomial(8, 0) == 1);
    REQUIRE(binomial(4, 7) == 0);
    REQUIRE(val_p(Int(45), 3) == 2);
    REQUIRE(val_p(Int(-27), 3) == 3);
    REQUIRE_THROWS_AS(val_p(Int(0), 3), error);
    REQUIRE(inv_mod(2, 9) == 5);
    REQUIRE_THROWS_AS(inv_mod(3, 9), error);
    REQUIRE(Rat::make(2, 4) == Rat::make(1, 2));
    REQUIRE(Rat::make(1, -2).str() == "-1/2");
    REQUIRE(Rat::make(3, 1).str() == "3");
    REQUIRE(Rat::make(0, 5) == Rat::make(0, 1));
    REQUIRE(Rat::make(1, 3) < Rat::make(1, 2));
}
