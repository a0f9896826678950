#pragma once

// Parameter-grid reports: for each (p, nu, n, q) the invariants of the
// p-divisible group attached to the q-th exterior power lattice, rendered as
// text, JSON, or CSV. All rendering is integer and string work, so identical
// inputs give byte-identical output.

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "dieudonne/lambda.hpp"
#include "dieudonne/module_io.hpp"
#include "dieudonne/pdiv.hpp"

namespace dieudonne {

struct ReportRow {
    long long p = 0;
    int nu = 0;
    int n = 0;
    int q = 0;
    long height = 0;
    long dimension = 0;
    Rat slope;  // common F-slope (n-q)/n; the lattices here are isotypic
    std::vector<IsogenyComponent> components;
    int dual_partner = 0;  // n - q; meaningless when q = 0
    bool twisted = false;  // duality kind: twisted when n is even
    ManinVerdict manin;
};

inline ReportRow report_row(long long p, int nu, int n, int q) {
    PadicContext ctx(p, nu);  // validates p odd prime, nu >= 1
    if (n < 1 || q < 0 || q > n)
        throw error("report: require n >= 1 and 0 <= q <= n");
    Lattice l = as_lattice(build_lattice(n, q, p));
    PdivInvariants inv = invariants(l);
    IsogenyType iso = isogeny_type(l);
    for (const NewtonSlope& s : iso.slopes)
        if (s.slope != iso.slopes.front().slope)
            throw error("report: exterior power lattice is not isotypic");

    ReportRow row;
    row.p = p;
    row.nu = nu;
    row.n = n;
    row.q = q;
    row.height = inv.height;
    row.dimension = inv.dimension;
    row.slope = iso.slopes.empty() ? Rat{0, 1} : iso.slopes.front().slope;
    row.components = iso.components;
    row.dual_partner = n - q;
    row.twisted = (n % 2 == 0);
    row.manin = manin_check(iso);
    return row;
}

inline std::vector<ReportRow> report_rows(long long p, int nu, int n, int q /* -1 = all */) {
    std::vector<ReportRow> rows;
    if (q >= 0) {
        rows.push_back(report_row(p, nu, n, q));
    } else {
        for (int qi = 0; qi <= n; ++qi)
            rows.push_back(report_row(p, nu, n, qi));
    }
    return rows;
}

namespace detail {

inline std::string components_str(const std::vector<IsogenyComponent>& cs) {
    std::string s;
    for (size_t i = 0; i < cs.size(); ++i) {
        if (i)
            s += " + ";
        s += "R_{" + std::to_string(cs[i].n0) + "," + std::to_string(cs[i].q0) + "}^" +
             std::to_string(cs[i].multiplicity);
    }
    return s;
}

inline const char* bool_str(bool b) { return b ? "true" : "false"; }

inline std::vector<std::string> report_cells(const ReportRow& r) {
    bool na = (r.q == 0);
    return {std::to_string(r.p),
            std::to_string(r.nu),
            std::to_string(r.n),
            std::to_string(r.q),
            std::to_string(r.height),
            std::to_string(r.dimension),
            r.slope.str(),
            components_str(r.components),
            na ? "n/a" : std::to_string(r.dual_partner),
            na ? "n/a" : (r.twisted ? "twisted" : "plain"),
            bool_str(r.manin.symmetric),
            bool_str(r.manin.supersingular),
            bool_str(r.manin.algebraicizable_possible)};
}

}  // namespace detail

inline const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> cols = {
        "p",
        "nu",
        "n",
        "q",
        "height",
        "dimension",
        "slope",
        "components",
        "dual_partner",
        "duality_kind",
        "manin_symmetric",
        "supersingular",
        "algebraicizable_possible"};
    return cols;
}

inline std::string render_report_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream out;
    const auto& cols = report_columns();
    for (size_t i = 0; i < cols.size(); ++i)
        out << (i ? "," : "") << cols[i];
    out << "\n";
    for (const ReportRow& r : rows) {
        auto cells = detail::report_cells(r);
        for (size_t i = 0; i < cells.size(); ++i)
            out << (i ? "," : "") << cells[i];
        out << "\n";
    }
    return out.str();
}

inline std::string render_report_text(const std::vector<ReportRow>& rows) {
    const auto& cols = report_columns();
    std::vector<std::vector<std::string>> table;
    table.push_back(cols);
    bool any_q0 = false;
    for (const ReportRow& r : rows) {
        table.push_back(detail::report_cells(r));
        any_q0 = any_q0 || (r.q == 0);
    }
    std::vector<size_t> width(cols.size(), 0);
    for (const auto& row : table)
        for (size_t i = 0; i < row.size(); ++i)
            width[i] = std::max(width[i], row[i].size());

    std::ostringstream out;
    for (size_t ri = 0; ri < table.size(); ++ri) {
        for (size_t i = 0; i < table[ri].size(); ++i) {
            if (i)
                out << "  ";
            out << table[ri][i];
            if (i + 1 < table[ri].size())
                out << std::string(width[i] - table[ri][i].size(), ' ');
        }
        out << "\n";
    }
    out << "\n";
    out << "components are isogeny factors over the algebraic closure\n";
    if (any_q0)
        out << "q = 0: Serre duality breaks down, so the duality fields are n/a\n";
    return out.str();
}

inline std::string render_report_json(const std::vector<ReportRow>& rows) {
    ojson doc;
    ojson jrows = ojson::array();
    bool any_q0 = false;
    for (const ReportRow& r : rows) {
        any_q0 = any_q0 || (r.q == 0);
        ojson jr;
        jr["p"] = r.p;
        jr["nu"] = r.nu;
        jr["n"] = r.n;
        jr["q"] = r.q;
        jr["height"] = r.height;
        jr["dimension"] = r.dimension;
        jr["slope"] = r.slope.str();
        ojson comps = ojson::array();
        for (const IsogenyComponent& c : r.components)
            comps.push_back(ojson::array({c.n0, c.q0, c.multiplicity}));
        jr["components"] = std::move(comps);
        if (r.q == 0) {
            jr["dual_partner"] = nullptr;
            jr["duality_kind"] = nullptr;
        } else {
            jr["dual_partner"] = r.dual_partner;
            jr["duality_kind"] = r.twisted ? "twisted" : "plain";
        }
        jr["manin_symmetric"] = r.manin.symmetric;
        jr["supersingular"] = r.manin.supersingular;
        jr["algebraicizable_possible"] = r.manin.algebraicizable_possible;
        jrows.push_back(std::move(jr));
    }
    doc["rows"] = std::move(jrows);
    ojson notes = ojson::array();
    notes.push_back("components are isogeny factors over the algebraic closure");
    if (any_q0)
        notes.push_back("q = 0: Serre duality breaks down, so the duality fields are null");
    doc["notes"] = std::move(notes);
    return doc.dump(2) + "\n";
}

}  // namespace dieudonne
