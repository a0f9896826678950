// Command line front end.
//
// Subcommands:
//   report          invariant table for the exterior-power tower at (p, nu, n)
//   verify          property suites with machine-readable failures on stderr
//   module dump     write a standard module as JSON
//   module load     validate a module file and echo its canonical form
//   module boxtimes truncated box product of two module files
//
// Exit codes: 0 success, 1 property failure (verify), 2 bad flags, bad
// schema, or failed validation.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dieudonne/boxprod.hpp"
#include "dieudonne/module_io.hpp"
#include "dieudonne/report.hpp"
#include "dieudonne/verify.hpp"

namespace {

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty())
        std::cout << text;
    else
        dieudonne::write_text_file(out_path, text);
}

int cmd_report(long long p, int nu, int n, int q, const std::string& format,
               const std::string& out_path) {
    std::vector<dieudonne::ReportRow> rows = dieudonne::report_rows(p, nu, n, q);
    std::string text;
    if (format == "text")
        text = dieudonne::render_report_text(rows);
    else if (format == "json")
        text = dieudonne::render_report_json(rows);
    else
        text = dieudonne::render_report_csv(rows);
    emit(out_path, text);
    return 0;
}

int cmd_verify(const dieudonne::VerifyOptions& opt) {
    dieudonne::VerifyResult res = dieudonne::run_verify(opt);
    for (const std::string& f : res.failures)
        std::cerr << "FAIL " << f << "\n";
    if (!res.ok()) {
        std::cout << "fail: " << res.failures.size() << " of " << res.checks
                  << " checks failed (suite " << opt.suite << ")\n";
        return 1;
    }
    std::cout << "pass: " << res.checks << " checks (suite " << opt.suite << ")\n";
    return 0;
}

dieudonne::FinModule standard_module_by_kind(const dieudonne::PadicContext& ctx,
                                             const std::string& kind, int n, int q) {
    if (kind == "unit")
        return dieudonne::unit_module(ctx);
    if (kind == "dualizing")
        return dieudonne::dualizing_module(ctx);
    if (kind == "twisted_dualizing")
        return dieudonne::twisted_dualizing_module(ctx);
    if (kind == "base")
        return dieudonne::base_module(ctx, n);
    if (kind == "r")
        return dieudonne::r_nq_module(ctx, n, q);
    throw dieudonne::error("module dump: unknown kind '" + kind + "'");
}

int cmd_module_boxtimes(const std::string& path_a, const std::string& path_b, int fbound,
                        const std::string& out_path) {
    dieudonne::FinModule a = dieudonne::load_module_file(path_a);
    dieudonne::FinModule b = dieudonne::load_module_file(path_b);
    dieudonne::TruncatedProduct t = dieudonne::boxtimes_trunc(a, b, fbound);

    dieudonne::ojson doc;
    doc["status"] = t.stabilized ? "stabilized" : "truncated";
    doc["fbound"] = fbound;
    doc["orders"] = t.orders;
    if (t.stabilized)
        doc["module"] = dieudonne::module_to_json(t.result());
    emit(out_path, doc.dump() + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact Dieudonne module calculator for exterior powers of the "
                 "rank-n Morava module and their p-divisible groups"};
    app.require_subcommand(1);

    // report
    auto* report = app.add_subcommand("report", "Invariant table for (p, nu, n), one row per q");
    long long rep_p = 0;
    int rep_nu = 0, rep_n = 0, rep_q = -1;
    std::string rep_format = "text", rep_out;
    report->add_option("--p", rep_p, "odd prime")->required();
    report->add_option("--nu", rep_nu, "coefficient length, >= 1")->required();
    report->add_option("--n", rep_n, "rank of the base module, >= 1")->required();
    report->add_option("--q", rep_q, "exterior degree; all of 0..n when omitted");
    report->add_option("--format", rep_format, "text, json, or csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    report->add_option("--out", rep_out, "write to file instead of stdout");

    // verify
    auto* verify = app.add_subcommand("verify", "Run property suites; failures go to stderr");
    dieudonne::VerifyOptions vopt;
    verify->add_option("--suite", vopt.suite, "all, lambda, duality, boxtimes, isogeny, quadratic")
        ->check(CLI::IsMember({"all", "lambda", "duality", "boxtimes", "isogeny", "quadratic"}));
    verify->add_option("--p", vopt.p, "odd prime (default 3)");
    verify->add_option("--nu", vopt.nu, "coefficient length (default 1)");
    verify->add_option("--n-max", vopt.n_max, "largest rank to sweep (default 4)");
    verify->add_option("--seed", vopt.seed, "seed for randomized isomorphism search");
    verify->add_option("--fixture", vopt.fixture,
                       "module file to identity-check; violations are failures");

    // module dump/load/boxtimes
    auto* module = app.add_subcommand("module", "Serialize, validate, and combine module files");
    module->require_subcommand(1);

    auto* dump = module->add_subcommand("dump", "Write a standard module as JSON");
    std::string dump_kind, dump_out;
    long long dump_p = 0;
    int dump_nu = 0, dump_n = 0, dump_q = 0;
    dump->add_option("--kind", dump_kind, "unit, dualizing, twisted_dualizing, base, or r")
        ->required()
        ->check(CLI::IsMember({"unit", "dualizing", "twisted_dualizing", "base", "r"}));
    dump->add_option("--p", dump_p, "odd prime")->required();
    dump->add_option("--nu", dump_nu, "coefficient length")->required();
    dump->add_option("--n", dump_n, "rank parameter for kinds base and r");
    dump->add_option("--q", dump_q, "degree parameter for kind r");
    dump->add_option("--out", dump_out, "write to file instead of stdout");

    auto* load = module->add_subcommand("load", "Validate a module file, echo canonical JSON");
    std::string load_a, load_out;
    load->add_option("--module-a", load_a, "module file")->required();
    load->add_option("--out", load_out, "write to file instead of stdout");

    auto* boxtimes = module->add_subcommand("boxtimes", "Truncated box product of two files");
    std::string box_a, box_b, box_out;
    int box_fbound = 0;
    boxtimes->add_option("--module-a", box_a, "left factor file")->required();
    boxtimes->add_option("--module-b", box_b, "right factor file")->required();
    boxtimes->add_option("--fbound", box_fbound, "truncation level, >= 0")->required();
    boxtimes->add_option("--out", box_out, "write to file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (report->parsed())
            return cmd_report(rep_p, rep_nu, rep_n, rep_q, rep_format, rep_out);
        if (verify->parsed())
            return cmd_verify(vopt);
        if (dump->parsed()) {
            dieudonne::PadicContext ctx(dump_p, dump_nu);
            dieudonne::FinModule m = standard_module_by_kind(ctx, dump_kind, dump_n, dump_q);
            emit(dump_out, dieudonne::module_to_string(m) + "\n");
            return 0;
        }
        if (load->parsed()) {
            dieudonne::FinModule m = dieudonne::load_module_file(load_a);
            emit(load_out, dieudonne::module_to_string(m) + "\n");
            return 0;
        }
        if (boxtimes->parsed())
            return cmd_module_boxtimes(box_a, box_b, box_fbound, box_out);
    } catch (const dieudonne::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "error: no subcommand\n";
    return 2;
}
