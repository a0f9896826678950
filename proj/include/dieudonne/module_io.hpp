#pragma once

// JSON serialization for finite modules.
//
// Schema: {"p", "nu", "orders", "V", "F"} with V and F as row-major nested
// integer arrays in the column convention (entry (i,j) is the coefficient of
// generator i in the image of generator j) and entries in [0, p^nu).
//
// Loading is strict by default: schema first, then full module validation
// through make_module, so a bad file always fails with the violated
// invariant named. The lenient path skips the module axioms and instead
// reports every violated identity; the verify front end uses it to check
// fixtures that are allowed to be broken on purpose.

#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "dieudonne/module.hpp"
#include "json.hpp"

namespace dieudonne {

// Insertion-ordered so dumps keep the schema field order p, nu, orders, V, F.
using ojson = nlohmann::ordered_json;

namespace detail {

inline long long to_ll(const Int& x, const char* what) {
    if (x > std::numeric_limits<long long>::max())
        throw error(std::string("module file: ") + what + " exceeds the 64-bit range");
    return x.convert_to<long long>();
}

inline ojson matrix_to_json(const ModMatrix& a) {
    ojson rows = ojson::array();
    for (long i = 0; i < a.rows; ++i) {
        ojson row = ojson::array();
        for (long j = 0; j < a.cols; ++j)
            row.push_back(to_ll(a.at(i, j), "matrix entry"));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline const ojson& field(const ojson& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end())
        throw error(std::string("module file: missing field '") + name + "'");
    return *it;
}

inline long long int_field(const ojson& j, const char* name) {
    const ojson& f = field(j, name);
    if (!f.is_number_integer())
        throw error(std::string("module file: field '") + name + "' must be an integer");
    return f.get<long long>();
}

inline ModMatrix matrix_field(const ojson& j, const char* name, const PadicContext& ctx,
                              long rank) {
    const ojson& f = field(j, name);
    if (!f.is_array() || static_cast<long>(f.size()) != rank)
        throw error(std::string("module file: field '") + name + "' must be an array of " +
                    std::to_string(rank) + " rows");
    ModMatrix m(ctx, rank, rank);
    for (long i = 0; i < rank; ++i) {
        const ojson& row = f[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<long>(row.size()) != rank)
            throw error(std::string("module file: '") + name + "' row " + std::to_string(i) +
                        " must have " + std::to_string(rank) + " entries");
        for (long c = 0; c < rank; ++c) {
            const ojson& e = row[static_cast<size_t>(c)];
            if (!e.is_number_integer())
                throw error(std::string("module file: '") + name + "' entry (" +
                            std::to_string(i) + "," + std::to_string(c) +
                            ") must be an integer");
            Int v = e.get<long long>();
            if (v < 0 || v >= ctx.modulus)
                throw error(std::string("module file: '") + name + "' entry (" +
                            std::to_string(i) + "," + std::to_string(c) +
                            ") out of range [0, p^nu)");
            m.at(i, c) = v;
        }
    }
    return m;
}

}  // namespace detail

inline ojson module_to_json(const FinModule& m) {
    ojson j;
    j["p"] = m.ctx.p;
    j["nu"] = m.ctx.nu;
    j["orders"] = m.orders;
    j["V"] = detail::matrix_to_json(m.V);
    j["F"] = detail::matrix_to_json(m.F);
    return j;
}

inline std::string module_to_string(const FinModule& m) { return module_to_json(m).dump(); }

// Schema-validated pieces before the module axioms are imposed.
struct RawModule {
    PadicContext ctx;
    std::vector<int> orders;
    ModMatrix V;
    ModMatrix F;
};

inline RawModule raw_module_from_json(const ojson& j) {
    if (!j.is_object())
        throw error("module file: top level must be a JSON object");
    long long p = detail::int_field(j, "p");
    long long nu = detail::int_field(j, "nu");
    if (nu < 1 || nu > 64)
        throw error("module file: field 'nu' out of range [1, 64]");
    PadicContext ctx(p, static_cast<int>(nu));

    const ojson& of = detail::field(j, "orders");
    if (!of.is_array())
        throw error("module file: field 'orders' must be an array");
    std::vector<int> orders;
    orders.reserve(of.size());
    for (size_t i = 0; i < of.size(); ++i) {
        if (!of[i].is_number_integer())
            throw error("module file: 'orders' entry " + std::to_string(i) +
                        " must be an integer");
        long long e = of[i].get<long long>();
        if (e < 1 || e > nu)
            throw error("module file: 'orders' entry " + std::to_string(i) +
                        " out of range [1, nu]");
        orders.push_back(static_cast<int>(e));
    }
    long rank = static_cast<long>(orders.size());
    RawModule raw{ctx, std::move(orders), detail::matrix_field(j, "V", ctx, rank),
                  detail::matrix_field(j, "F", ctx, rank)};
    return raw;
}

inline FinModule module_from_json(const ojson& j) {
    RawModule raw = raw_module_from_json(j);
    return make_module(raw.ctx, raw.orders, raw.V, raw.F);
}

inline ojson parse_json(const std::string& text) {
    ojson j = ojson::parse(text, nullptr, false);
    if (j.is_discarded())
        throw error("module file: not valid JSON");
    return j;
}

inline FinModule module_from_string(const std::string& text) {
    return module_from_json(parse_json(text));
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw error("cannot write file: " + path);
    out << text;
    if (!out)
        throw error("write failed: " + path);
}

inline FinModule load_module_file(const std::string& path) {
    return module_from_string(read_text_file(path));
}

inline void save_module_file(const std::string& path, const FinModule& m) {
    write_text_file(path, module_to_string(m) + "\n");
}

// Checks the module axioms on a schema-valid file without rejecting it,
// returning one line per violated identity. Empty means the file would pass
// make_module.
inline std::vector<std::string> module_identity_violations(const RawModule& raw) {
    std::vector<std::string> out;
    long r = static_cast<long>(raw.orders.size());
    auto check_map = [&](const ModMatrix& a, const char* name) {
        for (long i = 0; i < r; ++i)
            for (long j = 0; j < r; ++j) {
                int need = raw.orders[i] - raw.orders[j];
                if (need > 0 && a.at(i, j) % raw.ctx.ppow(need) != 0)
                    out.push_back(std::string(name) + " entry (" + std::to_string(i) + "," +
                                  std::to_string(j) + ") not divisible by p^" +
                                  std::to_string(need) +
                                  " (map ill-defined on generator orders)");
            }
    };
    check_map(raw.V, "V");
    check_map(raw.F, "F");

    ModMatrix vf = raw.V * raw.F;
    ModMatrix fv = raw.F * raw.V;
    ModMatrix pid = ModMatrix::identity(raw.ctx, r);
    for (long i = 0; i < r; ++i)
        pid.at(i, i) = raw.ctx.reduce(Int(raw.ctx.p));
    if (!maps_equal(raw.orders, vf, pid))
        out.push_back("V*F = p*id fails");
    if (!maps_equal(raw.orders, fv, pid))
        out.push_back("F*V = p*id fails");
    return out;
}

}  // namespace dieudonne
