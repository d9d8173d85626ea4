#pragma once

// JSON forms of the library types. Series are lists of [exponent, "coeff"]
// pairs, matrices are row-major grids of series; see README for the schemas.

#include <nlohmann/json.hpp>

#include "moduli.hpp"

namespace formal::io {

using json = nlohmann::json;

constexpr int kSchemaVersion = 1;

[[noreturn]] inline void parse_fail(const std::string& what) { fail(Errc::Parse, what); }

inline Scalar scalar_from(const json& j) {
    if (j.is_string()) return Scalar::parse(j.get<std::string>());
    if (j.is_number_integer()) return Scalar(j.get<long>());
    parse_fail("expected a coefficient string, got " + j.dump());
}

inline json to_json(const Scalar& s) { return s.str(); }

inline json to_json(const Laurent& s) {
    json out = json::array();
    if (!s.is_zero())
        for (int k = s.order(); k <= s.top(); ++k) {
            Scalar c = s.coeff(k);
            if (!c.is_zero()) out.push_back(json::array({k, c.str()}));
        }
    return out;
}

inline Laurent series_from(const json& j, int prec = kExact) {
    if (!j.is_array()) parse_fail("series must be a list of [exponent, coefficient] pairs");
    std::map<int, Scalar> terms;
    for (auto& t : j) {
        if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer()) parse_fail("bad series term " + t.dump());
        terms[t[0].get<int>()] += scalar_from(t[1]);
    }
    if (terms.empty()) return Laurent::zero(prec);
    int lo = terms.begin()->first, hi = terms.rbegin()->first;
    std::vector<Scalar> c(hi - lo + 1);
    for (auto& [k, v] : terms) c[k - lo] = v;
    return Laurent(lo, c, prec);
}

inline json to_json(const LMat& m) {
    json out = json::array();
    for (int i = 0; i < m.n; ++i) {
        json row = json::array();
        for (int j = 0; j < m.n; ++j) row.push_back(to_json(m(i, j)));
        out.push_back(row);
    }
    return out;
}

inline LMat matrix_from(const json& j, int prec = kExact) {
    if (!j.is_array() || j.empty()) parse_fail("matrix must be a non-empty list of rows");
    int n = static_cast<int>(j.size());
    LMat m(n);
    for (int a = 0; a < n; ++a) {
        if (!j[a].is_array() || static_cast<int>(j[a].size()) != n) parse_fail("matrix must be square");
        for (int b = 0; b < n; ++b) m(a, b) = series_from(j[a][b], prec);
    }
    return m;
}

inline json to_json(const KMat& m) {
    json out = json::array();
    for (int i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j).str());
        out.push_back(row);
    }
    return out;
}

inline KMat kmat_from(const json& j) {
    if (!j.is_array() || j.empty()) parse_fail("constant matrix must be a non-empty list of rows");
    int r = static_cast<int>(j.size()), c = static_cast<int>(j[0].size());
    KMat m(r, c);
    for (int a = 0; a < r; ++a) {
        if (!j[a].is_array() || static_cast<int>(j[a].size()) != c) parse_fail("ragged constant matrix");
        for (int b = 0; b < c; ++b) m(a, b) = scalar_from(j[a][b]);
    }
    return m;
}

inline Field field_from(const std::string& s) {
    if (s == "Q") return Field::Q;
    if (s == "Q(i)" || s == "QI") return Field::QI;
    if (s.rfind("Q(zeta", 0) == 0) fail(Errc::NonsplitField, "cyclotomic fields other than Q(i) are not supported");
    parse_fail("unknown field " + s);
}

// "dt/t", "dt", "dt/t^k", or {order, coeffs}: f = sum_i coeffs[i] t^{order+i}.
inline OneForm one_form_from(const json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "dt/t") return OneForm();
        if (s == "dt") return OneForm::dt_over_tl(0);
        if (s.rfind("dt/t^", 0) == 0) {
            try {
                return OneForm::dt_over_tl(std::stoi(s.substr(5)));
            } catch (const std::logic_error&) {
                parse_fail("bad one-form " + s);
            }
        }
        parse_fail("bad one-form " + s);
    }
    if (!j.is_object() || !j.contains("order") || !j.contains("coeffs")) parse_fail("one-form needs order and coeffs");
    std::vector<Scalar> c;
    for (auto& x : j["coeffs"]) c.push_back(scalar_from(x));
    return OneForm(Laurent(j["order"].get<int>(), c));
}

inline json to_json(const OneForm& nu) {
    const Laurent& f = nu.coefficient();
    json c = json::array();
    for (int k = f.order(); k <= f.top(); ++k) c.push_back(f.coeff(k).str());
    return {{"order", f.order()}, {"coeffs", c}};
}

struct ConnectionFile {
    Connection conn;
    Field field = Field::Q;
};

// {n, field, nu, matrix, precision?}; matrix is the dt coefficient, or the
// t d/dt matrix when "form": "tau". Without "precision" the series are exact.
inline ConnectionFile connection_from(const json& j) {
    if (!j.is_object() || !j.contains("matrix")) parse_fail("connection file needs a matrix");
    ConnectionFile f;
    if (j.contains("field")) f.field = field_from(j["field"].get<std::string>());
    int prec = j.contains("precision") ? j["precision"].get<int>() : kExact;
    LMat m = matrix_from(j["matrix"], prec);
    if (j.contains("n") && j["n"].get<int>() != m.n) parse_fail("n does not match the matrix size");
    std::string form = j.value("form", "dt");
    if (form == "tau")
        m = m.shift(-1);
    else if (form != "dt")
        parse_fail("form must be dt or tau");
    f.conn = Connection{m, j.contains("nu") ? one_form_from(j["nu"]) : OneForm()};
    return f;
}

inline json to_json(const Connection& c, Field field) {
    return {{"n", c.n()}, {"field", field_name(field)}, {"nu", to_json(c.nu)}, {"matrix", to_json(c.A)}};
}

inline json to_json(const FormalType& A) {
    json c = json::array();
    for (auto& b : A.a) {
        json row = json::array();
        for (auto& x : b) row.push_back(x.str());
        c.push_back(row);
    }
    return {{"e", A.T.e}, {"m", A.T.m}, {"r", A.r}, {"coeffs", c}};
}

inline FormalType formal_type_from(const json& j) {
    for (auto* k : {"e", "m", "r", "coeffs"})
        if (!j.contains(k)) parse_fail(std::string("formal type needs ") + k);
    FormalType A{Torus{j["e"].get<int>(), j["m"].get<int>()}, j["r"].get<int>(), {}};
    for (auto& row : j["coeffs"]) {
        std::vector<Scalar> b;
        for (auto& x : row) b.push_back(scalar_from(x));
        A.a.push_back(b);
    }
    return A;
}

inline json to_json(const ToralElement& x) {
    json b = json::array();
    for (auto& s : x.blocks) b.push_back(to_json(s));
    return {{"e", x.T.e}, {"m", x.T.m}, {"blocks", b}};
}

inline json to_json(const WeylElement& w) { return {{"perm", w.perm}, {"galois", w.galois}, {"translation", w.translation}}; }

inline json to_json(const Parahoric& P) { return {{"e", P.e}, {"levels", P.level}}; }

inline json to_json(const Stratum& s) { return {{"chain", to_json(s.P)}, {"r", s.r}, {"beta", to_json(s.beta)}, {"nu", to_json(s.nu)}}; }

inline Point point_from(const json& j) {
    if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "infinity")) return std::nullopt;
    return scalar_from(j);
}

// {n, field?, entries: [{point, part | formal_type, framing?}]}
inline GlobalConfig config_from(const json& j) {
    if (!j.is_object() || !j.contains("entries")) parse_fail("configuration needs entries");
    GlobalConfig cfg;
    for (auto& e : j["entries"]) {
        if (!e.contains("point")) parse_fail("entry needs a point");
        ConfigEntry en;
        en.point = point_from(e["point"]);
        if (e.contains("part")) en.part = matrix_from(e["part"]);
        if (e.contains("formal_type")) en.type = formal_type_from(e["formal_type"]);
        if (e.contains("framing")) en.framing = kmat_from(e["framing"]);
        if (!en.part && !en.type) parse_fail("entry needs a part or a formal_type");
        int n = en.part ? en.part->n : en.type->T.n();
        if (cfg.n && n != cfg.n) parse_fail("entries have different sizes");
        cfg.n = n;
        cfg.entries.push_back(en);
    }
    if (j.contains("n") && j["n"].get<int>() != cfg.n) parse_fail("n does not match the entries");
    if (!cfg.n) parse_fail("configuration has no entries");
    return cfg;
}

inline json to_json(const GlobalMatrix& G) {
    json poles = json::array(), poly = json::array();
    for (auto& p : G.poles) poles.push_back({{"point", p.x.str()}, {"order", p.k}, {"coeff", to_json(p.R)}});
    for (size_t j = 0; j < G.poly.size(); ++j) poly.push_back({{"degree", j}, {"coeff", to_json(G.poly[j])}});
    return {{"n", G.n}, {"poles", poles}, {"polynomial", poly}};
}

inline json to_json(const OrbitDimensions& d) {
    return {{"truncation", d.ell},       {"dim_P_mod_P_r1", d.dim_P_mod}, {"dim_T_mod_T_r1", d.dim_T_mod},
            {"dim_P1_mod_P_r1", d.dim_P1_mod}, {"dim_stab_P1", d.dim_stab1}, {"dim_O", d.dim_O},
            {"dim_O1", d.dim_O1},        {"dim_G_trunc", d.dim_G_trunc}, {"dim_P_trunc", d.dim_P_trunc},
            {"dim_P1_trunc", d.dim_P1_trunc}, {"dim_M", d.dim_M},     {"dim_M_tilde", d.dim_M_tilde},
            {"dim_T_flat", d.dim_T_flat}};
}

} // namespace formal::io
