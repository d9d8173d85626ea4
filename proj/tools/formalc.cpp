// formalc: command-line driver for the formal connection library.
//
//   formalc slope FILE            slope of a connection (.conn.json)
//   formalc analyze FILE          fundamental stratum, characteristic polynomial, regularity
//   formalc diagonalize FILE      formal type and gauge
//   formalc isomorphic A B        formal isomorphism test with Weyl witness
//   formalc moduli CONFIG         global assembly, moment map, orbit dimensions
//
// Exit codes: 0 ok, 2 parse/usage, 3 insufficient precision, 4 residue or
// other constraint violation, 5 non-regular or unsupported input.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>

#include "formal/serialize.hpp"

namespace {

using namespace formal;
using io::json;

enum Exit { kOk = 0, kParse = 2, kPrecision = 3, kConstraint = 4, kUnsupported = 5 };

int exit_code(Errc c) {
    switch (c) {
    case Errc::Parse: return kParse;
    case Errc::InsufficientPrecision: return kPrecision;
    case Errc::ResidueNonzero:
    case Errc::DuplicatePoints:
    case Errc::ShapeMismatch:
    case Errc::GcdViolation:
    case Errc::EmptyComposition:
    case Errc::NotInFiltration:
    case Errc::SingularGauge:
    case Errc::ZeroLeading: return kConstraint;
    case Errc::NotRegular:
    case Errc::UnsupportedDepth:
    case Errc::NonsplitField:
    case Errc::Irreducible:
    case Errc::NotSplit: return kUnsupported;
    }
    return kUnsupported;
}

struct Session {
    std::string field;  // empty: use the file's
    int prec = 0;       // 0: use the file's
    std::string nu;     // empty: use the file's
    int digits = 8;
    bool json = false;
};

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::Parse, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(Errc::Parse, path + ": " + e.what());
    }
}

Field session_field(const Session& s, Field file_field) { return s.field.empty() ? file_field : io::field_from(s.field); }

io::ConnectionFile load_connection(const std::string& path, const Session& s) {
    io::ConnectionFile f;
    try {
        f = io::connection_from(read_json(path));
    } catch (const json::exception& e) {
        fail(Errc::Parse, path + ": " + e.what());
    }
    f.field = session_field(s, f.field);
    if (!s.nu.empty()) f.conn.nu = io::one_form_from(json(s.nu));
    if (s.prec) f.conn.A = f.conn.A.truncated(s.prec);
    return f;
}

// The same matrix with every inexact entry known (as zero) up to t^N.
LMat pad(const LMat& m, int N) {
    LMat out = m;
    for (auto& s : out.a)
        if (!s.exact()) s = s.is_zero() ? Laurent::zero(N) : Laurent(s.order(), s.coeffs(), N);
    return out;
}

using Job = std::function<json(const std::vector<io::ConnectionFile>&)>;

// Smallest absolute precision at which the job goes through on the
// zero-padded inputs. A lower bound: nonzero unknown terms can raise it.
std::optional<int> required_precision(std::vector<io::ConnectionFile> in, const Job& job) {
    int p = kExact;
    for (auto& f : in) p = std::min(p, f.conn.A.prec());
    if (p >= kExact) return std::nullopt;
    for (int N = p + 1; N <= p + 64; ++N) {
        auto padded = in;
        for (auto& f : padded) f.conn.A = pad(f.conn.A, N);
        try {
            job(padded);
            return N;
        } catch (const Error& e) {
            if (e.code() != Errc::InsufficientPrecision) return std::nullopt;
        }
    }
    return std::nullopt;
}

int report_error(const Error& e, const Session& s, std::optional<int> need = std::nullopt) {
    std::cerr << "error: " << e.what() << "\n";
    if (need)
        std::cerr << "hint: the dt-coefficient matrix must be known to absolute precision at least " << *need
                  << " (the point where the given terms, padded with zeros, suffice)\n";
    if (s.json) {
        json err = {{"code", errc_name(e.code())}, {"message", e.what()}};
        if (need) err["required_precision"] = *need;
        std::cout << json{{"schema_version", io::kSchemaVersion}, {"error", err}}.dump(2) << "\n";
    }
    return exit_code(e.code());
}

void emit(json doc, const Session& s, const std::function<void(const json&)>& text) {
    doc["schema_version"] = io::kSchemaVersion;
    if (s.json)
        std::cout << doc.dump(2) << "\n";
    else
        text(doc);
}

int run_on_connections(const std::vector<std::string>& paths, const Session& s, const Job& job,
                       const std::function<void(const json&)>& text) {
    std::vector<io::ConnectionFile> in;
    try {
        for (auto& p : paths) in.push_back(load_connection(p, s));
    } catch (const Error& e) {
        return report_error(e, s);
    }
    try {
        emit(job(in), s, text);
        return kOk;
    } catch (const Error& e) {
        if (e.code() == Errc::InsufficientPrecision) return report_error(e, s, required_precision(in, job));
        return report_error(e, s);
    }
}

// ---------------------------------------------------------------------------
// subcommands

json slope_doc(const io::ConnectionFile& f) {
    auto res = slope(f.conn);
    return {{"command", "slope"},
            {"slope", res.slope.get_str()},
            {"regular_singular", res.regular_singular},
            {"stratum", io::to_json(res.stratum)},
            {"trace", res.trace}};
}

json analyze_doc(const io::ConnectionFile& f) {
    auto res = slope(f.conn);
    const Stratum& S = res.stratum;
    int n = f.conn.n();
    Poly phi = stratum_char_poly(S);
    auto fac = factor_roots(phi, f.field);
    json roots = json::array();
    for (auto& [x, m] : fac.roots) roots.push_back({{"value", x.str()}, {"multiplicity", m}});
    json doc = {{"command", "analyze"},
                {"slope", res.slope.get_str()},
                {"chain", io::to_json(S.P)},
                {"e", S.P.e},
                {"r", S.r},
                {"phi", poly_str(phi)},
                {"phi_roots", roots},
                {"phi_splits", fac.split()},
                {"fundamental", S.r == 0 || is_fundamental(S)},
                {"pure", S.r > 0 && S.P.e == n},
                {"trace", res.trace}};
    if (!fac.split()) {
        doc["regular"] = false;
        doc["reason"] = "characteristic polynomial does not split over " + std::string(field_name(f.field));
        return doc;
    }
    auto reg = is_regular(S, f.field);
    doc["regular"] = reg.regular;
    if (!reg.regular) {
        doc["reason"] = reg.reason;
        return doc;
    }
    doc["torus"] = {{"e", reg.e}, {"m", reg.m}};
    json blocks = json::array();
    for (auto& x : reg.eigen) blocks.push_back({{"size", reg.e}, {"eigenvalue", x.str()}});
    doc["blocks"] = blocks;
    return doc;
}

json diagonalize_doc(const io::ConnectionFile& f, int digits) {
    auto d = diagonalize(f.conn, f.field, digits);
    bool identity = d.gauge.same_to_precision(LMat::identity(f.conn.n()));
    return {{"command", "diagonalize"},
            {"slope", d.slope.slope.get_str()},
            {"digits", d.digits},
            {"formal_type", io::to_json(d.type)},
            {"formal_type_text", formal_type_str(d.type)},
            {"gauge", io::to_json(d.gauge)},
            {"gauge_is_identity", identity}};
}

json isomorphic_doc(const io::ConnectionFile& a, const io::ConnectionFile& b, int digits) {
    if (a.conn.n() != b.conn.n()) return {{"command", "isomorphic"}, {"isomorphic", false}, {"reason", "different ranks"}};
    if (a.field != b.field) fail(Errc::ShapeMismatch, "the two files use different fields; pass --field");
    auto sa = slope(a.conn).slope, sb = slope(b.conn).slope;
    json doc = {{"command", "isomorphic"}, {"slopes", {sa.get_str(), sb.get_str()}}};
    if (sa != sb) {
        doc["isomorphic"] = false;
        doc["reason"] = "different slopes";
        return doc;
    }
    auto da = diagonalize(a.conn, a.field, digits), db = diagonalize(b.conn, b.field, digits);
    doc["formal_types"] = {io::to_json(da.type), io::to_json(db.type)};
    auto m = orbit_equivalent(da.type, db.type, a.field);
    doc["isomorphic"] = m.w.has_value();
    if (m.w) doc["witness"] = io::to_json(*m.w);
    if (!m.w) doc["reason"] = "formal types lie in different Weyl orbits";
    if (!m.warning.empty()) doc["warning"] = m.warning;
    return doc;
}

int cmd_moduli(const std::string& path, const Session& s) {
    try {
        json j = read_json(path);
        GlobalConfig cfg;
        try {
            cfg = io::config_from(j);
        } catch (const json::exception& e) {
            fail(Errc::Parse, path + ": " + e.what());
        }
        Field field = session_field(s, j.contains("field") ? io::field_from(j["field"].get<std::string>()) : Field::Q);
        json entries = json::array();
        for (auto& en : cfg.entries) {
            json item = {{"point", point_str(en.point)}};
            if (en.type) {
                auto v = validate(*en.type);
                if (!v.ok) fail(Errc::NotRegular, "formal type at " + point_str(en.point) + ": " + v.reason);
                item["formal_type"] = io::to_json(*en.type);
                if (en.type->r > 0) {
                    item["dimensions"] = io::to_json(orbit_dimensions(*en.type, en.type->r + 1));
                } else {
                    std::vector<Scalar> eig;
                    for (int i = 0; i < en.type->T.m; ++i) eig.push_back(en.type->coeff(i, 0));
                    item["regular_singular_orbit_dimension"] = regular_singular_orbit_dimension(eig);
                }
            }
            LMat part = entry_part(en);
            item["pole_order"] = polar_order(part);
            item["residue"] = io::to_json(residue_of(part));
            entries.push_back(item);
        }
        KMat mu = moment_map(cfg);
        auto G = assemble_global(cfg);
        json doc = {{"command", "moduli"},
                    {"field", field_name(field)},
                    {"entries", entries},
                    {"global", io::to_json(G)},
                    {"moment_map", io::to_json(mu)},
                    {"moment_map_zero", mu.is_zero()}};
        emit(doc, s, [&](const json& d) {
            std::cout << "global connection on P^1 with " << d["global"]["poles"].size() << " polar terms and "
                      << d["global"]["polynomial"].size() << " polynomial terms\n";
            for (auto& e : d["entries"]) {
                std::cout << "  point " << e["point"].get<std::string>() << ": pole order " << e["pole_order"];
                if (e.contains("dimensions")) std::cout << ", dim O = " << e["dimensions"]["dim_O"] << ", dim O1 = " << e["dimensions"]["dim_O1"];
                if (e.contains("regular_singular_orbit_dimension")) std::cout << ", dim O = " << e["regular_singular_orbit_dimension"];
                std::cout << "\n";
            }
            std::cout << "moment map: " << (d["moment_map_zero"].get<bool>() ? "0" : d["moment_map"].dump()) << "\n";
        });
        return kOk;
    } catch (const Error& e) {
        return report_error(e, s);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Formal connections: slopes, strata, formal types and moduli"};
    app.fallthrough();
    app.require_subcommand(1);
    Session s;
    app.add_option("--field", s.field, "coefficient field: Q or Q(i) (default: as in the file)");
    app.add_option("--prec", s.prec, "truncate the input matrix to absolute precision N")->check(CLI::Range(8, 1 << 20));
    app.add_option("--nu", s.nu, "one-form for strata: dt/t, dt or dt/t^k (default: as in the file, else dt/t)");
    app.add_option("--digits", s.digits, "filtration degree through which diagonalize normalizes")->check(CLI::Range(0, 1000));
    app.add_flag("--json", s.json, "print the full JSON document");

    std::string file, file_b;
    auto* sl = app.add_subcommand("slope", "slope of a connection");
    sl->add_option("file", file, ".conn.json file")->required();
    auto* an = app.add_subcommand("analyze", "fundamental stratum and regularity");
    an->add_option("file", file, ".conn.json file")->required();
    auto* dg = app.add_subcommand("diagonalize", "formal type and gauge");
    dg->add_option("file", file, ".conn.json file")->required();
    auto* iso = app.add_subcommand("isomorphic", "formal isomorphism test");
    iso->add_option("a", file, "first .conn.json file")->required();
    iso->add_option("b", file_b, "second .conn.json file")->required();
    auto* mo = app.add_subcommand("moduli", "global assembly from principal parts or framed formal types");
    mo->add_option("config", file, "configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kParse;
    }

    if (*sl)
        return run_on_connections({file}, s, [](const auto& in) { return slope_doc(in[0]); },
                                  [](const json& d) { std::cout << d["slope"].get<std::string>() << "\n"; });
    if (*an)
        return run_on_connections({file}, s, [](const auto& in) { return analyze_doc(in[0]); }, [](const json& d) {
            std::cout << "slope " << d["slope"].get<std::string>() << ", e = " << d["e"] << ", r = " << d["r"] << "\n"
                      << "phi = " << d["phi"].get<std::string>() << "\n"
                      << "fundamental: " << d["fundamental"] << ", pure: " << d["pure"] << ", regular: " << d["regular"] << "\n";
            if (d.contains("reason")) std::cout << "reason: " << d["reason"].get<std::string>() << "\n";
            if (d.contains("blocks"))
                for (auto& b : d["blocks"]) std::cout << "block of size " << b["size"] << ", eigenvalue " << b["eigenvalue"].get<std::string>() << "\n";
            for (auto& t : d["trace"]) std::cout << "trace: " << t.get<std::string>() << "\n";
        });
    if (*dg)
        return run_on_connections({file}, s, [&](const auto& in) { return diagonalize_doc(in[0], s.digits); }, [](const json& d) {
            std::cout << d["formal_type_text"].get<std::string>() << "\n"
                      << "gauge: " << (d["gauge_is_identity"].get<bool>() ? "identity" : "see --json") << "\n";
        });
    if (*iso)
        return run_on_connections({file, file_b}, s, [&](const auto& in) { return isomorphic_doc(in[0], in[1], s.digits); },
                                  [](const json& d) {
                                      std::cout << (d["isomorphic"].get<bool>() ? "yes" : "no");
                                      if (d.contains("witness")) std::cout << " " << d["witness"].dump();
                                      if (d.contains("reason")) std::cout << " (" << d["reason"].get<std::string>() << ")";
                                      std::cout << "\n";
                                      if (d.contains("warning")) std::cout << "warning: " << d["warning"].get<std::string>() << "\n";
                                  });
    return cmd_moduli(file, s);
}
