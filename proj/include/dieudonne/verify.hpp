#pragma once

// Property suites behind the verify front end. Each suite re-checks the
// algebraic identities its module is built on, over a caller-chosen
// parameter range, and reports failures as single machine-readable lines
// (key=value tokens). A fixture file, when given, is identity-checked
// leniently so a deliberately corrupted module names what it violates
// instead of being rejected at the schema gate.

#include <numeric>
#include <string>
#include <vector>

#include "dieudonne/boxprod.hpp"
#include "dieudonne/lambda.hpp"
#include "dieudonne/module_io.hpp"
#include "dieudonne/pdiv.hpp"
#include "dieudonne/quadratic.hpp"
#include "dieudonne/report.hpp"

namespace dieudonne {

struct VerifyOptions {
    std::string suite = "all";
    long long p = 3;
    int nu = 1;
    int n_max = 4;
    unsigned long long seed = 0;
    std::string fixture;  // optional module file to identity-check
};

struct VerifyResult {
    long checks = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

namespace detail {

struct Recorder {
    VerifyResult* out;
    std::string suite;

    void check(bool pass, const std::string& name, const std::string& params,
               const std::string& why = "") {
        ++out->checks;
        if (pass)
            return;
        std::string line = "suite=" + suite + " check=" + name;
        if (!params.empty())
            line += " " + params;
        if (!why.empty())
            line += " detail=\"" + why + "\"";
        out->failures.push_back(line);
    }
};

inline std::string nq_params(long long p, int n, int q) {
    return "p=" + std::to_string(p) + " n=" + std::to_string(n) + " q=" + std::to_string(q);
}

inline bool is_signed_permutation(const IntMatrix& m) {
    if (m.rows != m.cols)
        return false;
    std::vector<int> col_hits(static_cast<size_t>(m.cols), 0);
    for (long i = 0; i < m.rows; ++i) {
        int row_hits = 0;
        for (long j = 0; j < m.cols; ++j) {
            const Int& x = m.at(i, j);
            if (x == 0)
                continue;
            if (x != 1 && x != -1)
                return false;
            ++row_hits;
            ++col_hits[static_cast<size_t>(j)];
        }
        if (row_hits != 1)
            return false;
    }
    for (int c : col_hits)
        if (c != 1)
            return false;
    return true;
}

inline void lambda_suite(long long p, int n_max, Recorder r) {
    for (int n = 1; n <= n_max; ++n)
        for (int q = 0; q <= n; ++q) {
            std::string at = nq_params(p, n, q);
            LambdaLattice l = build_lattice(n, q, p);
            long rk = l.rank();
            r.check(Int(rk) == binomial(n, q), "rank", at);

            IntMatrix pid = IntMatrix::identity(rk) * Int(p);
            r.check(l.V * l.F == pid && l.F * l.V == pid, "vf_fv_p", at);
            if (q >= 1 && q <= n - 1)
                r.check(l.V.pow(n - q) == l.F.pow(q), "power_identity", at);
            r.check(l.V.pow(n) == IntMatrix::identity(rk) * pow_int(p, q), "vn_pq", at);
            if (q == n) {
                Int sign = (n % 2 == 1) ? 1 : -1;
                r.check(l.V.at(0, 0) == sign * p && l.F.at(0, 0) == sign, "top_sign", at);
            }
            if (q >= 1)
                r.check(Int(invariants(as_lattice(l)).dimension) == binomial(n - 1, q - 1),
                        "coker_dim", at);

            IntMatrix pm = pairing_matrix(n, q).P;
            LambdaLattice lc = build_lattice(n, n - q, p);
            Int sign = (n % 2 == 1) ? 1 : -1;
            r.check(l.V.transpose() * pm == (pm * lc.F) * sign, "pairing", at);
            r.check(is_signed_permutation(pm), "pairing_unimodular", at);
        }
}

inline void duality_suite(long long p, int nu, int n_max, unsigned long long seed, Recorder r) {
    PadicContext ctx(p, nu);
    for (int n = 1; n <= n_max; ++n) {
        for (int q = 0; q <= n; ++q) {
            std::string at = nq_params(p, n, q) + " nu=" + std::to_string(nu);
            FinModule mq = reduce_mod(build_lattice(n, q, p), ctx);
            FinModule mc = reduce_mod(build_lattice(n, n - q, p), ctx);
            FinModule target = (n % 2 == 1) ? dual(mc) : twisted_dual(mc);
            ModMatrix h = ModMatrix::reduce(pairing_matrix(n, q).P.transpose(), ctx);
            r.check(detail::is_hom(mq, target, h) && detail::is_surjective(target, h),
                    "pairing_realizes_duality", at);
        }
        FinModule top = reduce_mod(build_lattice(n, n, p), ctx);
        FinModule expect = (n % 2 == 1) ? dualizing_module(ctx) : twisted_dualizing_module(ctx);
        r.check(is_isomorphic(top, expect, seed).verdict == IsoVerdict::yes, "top_power",
                "p=" + std::to_string(p) + " n=" + std::to_string(n) +
                    " nu=" + std::to_string(nu));
    }
}

inline void isogeny_suite(long long p, int n_max, Recorder r) {
    for (int n = 1; n <= n_max; ++n)
        for (int q = 1; q <= n; ++q) {
            std::string at = nq_params(p, n, q);
            IsogenyType iso = isogeny_type(as_lattice(build_lattice(n, q, p)));
            Rat want = Rat::make(n - q, n);
            bool pure = !iso.slopes.empty();
            long long mult_height = 0;
            for (const NewtonSlope& s : iso.slopes)
                pure = pure && (s.slope == want);
            r.check(pure, "pure_slope", at);

            long long g = std::gcd(static_cast<long long>(n), static_cast<long long>(q));
            bool comp_ok = iso.components.size() == 1;
            if (comp_ok) {
                const IsogenyComponent& c = iso.components.front();
                comp_ok = c.n0 == n / g && c.q0 == q / g &&
                          Int(c.multiplicity) * Int(n / g) == binomial(n, q);
            }
            r.check(comp_ok, "component", at);
            for (const IsogenyComponent& c : iso.components)
                mult_height += c.multiplicity * c.n0;
            r.check(Int(mult_height) == binomial(n, q), "height_sum", at);

            ManinVerdict v = manin_check(iso);
            bool middle = (2 * q == n);
            r.check(v.symmetric == middle && v.supersingular == middle &&
                        v.algebraicizable_possible == middle,
                    "manin", at);
        }
}

inline void boxtimes_suite(long long p, int nu, int n_max, unsigned long long seed, Recorder r) {
    PadicContext ctx(p, nu);
    int fbound = 2 * nu + 2;
    std::string base = "p=" + std::to_string(p) + " nu=" + std::to_string(nu);

    FinModule unit = unit_module(ctx);
    std::vector<std::pair<std::string, FinModule>> corpus = {
        {"unit", unit},
        {"dualizing", dualizing_module(ctx)},
        {"twisted_dualizing", twisted_dualizing_module(ctx)},
        {"base2", base_module(ctx, 2)},
        {"r21", r_nq_module(ctx, 2, 1)},
    };
    for (const auto& [name, m] : corpus) {
        TruncatedProduct t = boxtimes_trunc(unit, m, fbound);
        bool ok = t.stabilized && is_isomorphic(t.result(), m, seed).verdict == IsoVerdict::yes;
        r.check(ok, "unit_law", base + " module=" + name);
    }

    for (int n = 2; n <= std::min(3, n_max); ++n) {
        FinModule m = base_module(ctx, n);
        TruncatedProduct t = boxtimes_trunc(m, m, fbound);
        FinModule sq = signed_symmetric_quotient(t);
        std::vector<int> got = sq.orders;
        std::vector<int> want = reduce_mod(build_lattice(n, 2, p), ctx).orders;
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        r.check(got == want, "signed_square_lambda2", base + " n=" + std::to_string(n),
                got == want ? "" : "invariant factors " + orders_str(got) + " vs " +
                                       orders_str(want));
    }

    ModMatrix z(ctx, 1, 1);
    FinModule alpha = make_module(ctx, {1}, z, z);
    for (int k = 0; k <= 4; ++k) {
        TruncatedProduct t = boxtimes_trunc(alpha, alpha, k);
        bool ok = !t.stabilized && t.group_order() == pow_int(p, k + 1);
        r.check(ok, "alpha_growth", base + " fbound=" + std::to_string(k));
    }
}

inline void quadratic_suite(long long p, int nu, Recorder r) {
    long long qbar = 0;
    for (long long x = 2; x < p; ++x)
        if (is_nonresidue(x, p)) {
            qbar = x;
            break;
        }
    QuadraticContext qctx(PadicContext(p, 1), qbar);
    for (int v = 1; v <= nu; ++v) {
        TwistReport rep = verify_twist_untwist_iso(qctx, v);
        r.check(rep.pass, "twist_untwist",
                "p=" + std::to_string(p) + " nu=" + std::to_string(v), rep.detail);
    }
}

inline void fixture_check(const std::string& path, Recorder r) {
    RawModule raw = raw_module_from_json(parse_json(read_text_file(path)));
    std::vector<std::string> bad = module_identity_violations(raw);
    if (bad.empty()) {
        r.check(true, "fixture_identities", "file=" + path);
        return;
    }
    for (const std::string& b : bad)
        r.check(false, "fixture_identities", "file=" + path, b);
}

}  // namespace detail

inline VerifyResult run_verify(const VerifyOptions& opt) {
    static const std::vector<std::string> known = {"all",      "lambda",  "duality",
                                                   "boxtimes", "isogeny", "quadratic"};
    if (std::find(known.begin(), known.end(), opt.suite) == known.end())
        throw error("verify: unknown suite '" + opt.suite + "'");
    if (opt.n_max < 1)
        throw error("verify: --n-max must be at least 1");
    PadicContext probe(opt.p, opt.nu);  // validates p and nu up front

    VerifyResult out;
    bool all = opt.suite == "all";
    if (all || opt.suite == "lambda")
        detail::lambda_suite(opt.p, opt.n_max, {&out, "lambda"});
    if (all || opt.suite == "duality")
        detail::duality_suite(opt.p, opt.nu, opt.n_max, opt.seed, {&out, "duality"});
    if (all || opt.suite == "boxtimes")
        detail::boxtimes_suite(opt.p, opt.nu, opt.n_max, opt.seed, {&out, "boxtimes"});
    if (all || opt.suite == "isogeny")
        detail::isogeny_suite(opt.p, opt.n_max, {&out, "isogeny"});
    if (all || opt.suite == "quadratic")
        detail::quadratic_suite(opt.p, opt.nu, {&out, "quadratic"});
    if (!opt.fixture.empty())
        detail::fixture_check(opt.fixture, {&out, "fixture"});
    return out;
}

}  // namespace dieudonne
