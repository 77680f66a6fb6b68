#include "harmonic/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "harmonic/cache.hpp"
#include "harmonic/density.hpp"
#include "harmonic/padic.hpp"
#include "harmonic/primes.hpp"
#include "harmonic/rational.hpp"
#include "harmonic/selftest.hpp"
#include "harmonic/sets.hpp"

namespace harmonic::cli {

namespace {

enum class Format { plain, csv, json };

Format parse_format(const std::string& s) {
    if (s == "plain") return Format::plain;
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw std::invalid_argument("unknown format: " + s);
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// One output row; cells keep column order so csv and json carry the same data.
using Row = std::vector<std::pair<std::string, nlohmann::json>>;

std::string csv_cell(const nlohmann::json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
}

void emit_rows(Format format, const std::vector<std::string>& columns,
               const std::vector<Row>& rows, std::ostream& out) {
    if (format == Format::csv) {
        for (std::size_t i = 0; i < columns.size(); ++i)
            out << (i ? "," : "") << columns[i];
        out << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? "," : "") << csv_cell(row[i].second);
            out << "\n";
        }
    } else { // json
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& row : rows) {
            nlohmann::json obj = nlohmann::json::object();
            for (const auto& [key, value] : row) obj[key] = value;
            arr.push_back(std::move(obj));
        }
        out << arr.dump(2) << "\n";
    }
}

struct RunConfig {
    Format format = Format::plain;
    std::string cache_dir;
    unsigned jobs = 1;

    EngineOptions engine() const {
        EngineOptions opts;
        opts.jobs = jobs;
        return opts;
    }
};

std::string default_cache_dir() {
    if (const char* env = std::getenv("HARMONIC_CACHE_DIR"); env && *env) return env;
    return ".harmonic-cache";
}

int cmd_harmonic(const RunConfig& cfg, std::uint64_t n, std::ostream& out) {
    ReducedFraction h = harmonic_number(n);
    if (cfg.format == Format::plain) {
        out << h.str() << "\n";
        return 0;
    }
    Row row{{"n", n},
            {"numerator", h.numerator().get_str()},
            {"denominator", h.denominator().get_str()}};
    emit_rows(cfg.format, {"n", "numerator", "denominator"}, {row}, out);
    return 0;
}

int cmd_valuation(const RunConfig& cfg, std::uint64_t n, std::uint64_t p, unsigned precision,
                  std::ostream& out) {
    EngineOptions opts = cfg.engine();
    if (precision) opts.initial_precision = precision;
    ValuationResult r = harmonic_valuation(n, p, opts);
    if (cfg.format == Format::plain) {
        out << r.value << "\n";
        return 0;
    }
    Row row{{"n", n},
            {"p", p},
            {"valuation", r.value},
            {"certainty",
             r.certainty == Certainty::padic_certified ? "padic-certified" : "exact-oracle"},
            {"precision", r.precision}};
    emit_rows(cfg.format, {"n", "p", "valuation", "certainty", "precision"}, {row}, out);
    return 0;
}

int cmd_jp(const RunConfig& cfg, std::uint64_t p, std::uint64_t bound, std::ostream& out) {
    JpCache cache(cfg.cache_dir, cfg.engine());
    JpTable table = cache.ensure(p, bound);
    if (cfg.format == Format::plain) {
        for (const auto& m : table.members)
            if (m.n <= bound) out << m.n << "\n";
        return 0;
    }
    std::vector<Row> rows;
    for (const auto& m : table.members) {
        if (m.n > bound) break;
        rows.push_back({{"p", p}, {"search_bound", bound}, {"n", m.n},
                        {"engine", to_string(m.engine)}});
    }
    emit_rows(cfg.format, {"p", "search_bound", "n", "engine"}, rows, out);
    return 0;
}

int cmd_ipk(const RunConfig& cfg, std::uint64_t p, unsigned k, std::uint64_t x,
            const std::string& method, std::ostream& out, std::ostream& err) {
    std::vector<std::uint64_t> members;
    if (method == "lemma" || method == "both") {
        JpCache cache(cfg.cache_dir, cfg.engine());
        const std::uint64_t quotient = ilog(p, x) < k ? 0 : x / ipow(p, k);
        JpTable table = cache.ensure(p, std::max<std::uint64_t>(1, quotient));
        members = enumerate_ipk_lemma(p, k, x, table);
    }
    if (method == "direct" || method == "both") {
        auto direct = enumerate_ipk_direct(p, k, x, cfg.engine());
        if (method == "both" && direct != members) {
            auto dump_diff = [&](const char* label, const std::vector<std::uint64_t>& a,
                                 const std::vector<std::uint64_t>& b) {
                std::vector<std::uint64_t> d;
                std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                                    std::back_inserter(d));
                err << label;
                for (auto v : d) err << " " << v;
                err << "\n";
            };
            dump_diff("only-in-lemma:", members, direct);
            dump_diff("only-in-direct:", direct, members);
            return 1;
        }
        if (method == "direct") members = std::move(direct);
    }
    if (cfg.format == Format::plain) {
        for (auto n : members) out << n << "\n";
        if (method == "both") out << "methods agree\n";
        return 0;
    }
    std::vector<Row> rows;
    for (auto n : members)
        rows.push_back({{"p", p}, {"k", k}, {"x", x}, {"method", method}, {"n", n}});
    emit_rows(cfg.format, {"p", "k", "x", "method", "n"}, rows, out);
    return 0;
}

int cmd_im(const RunConfig& cfg, std::uint64_t m, std::uint64_t x, std::ostream& out) {
    JpCache cache(cfg.cache_dir, cfg.engine());
    JpTables tables;
    for (const auto& pp : factorize(m)) {
        const std::uint64_t quotient = ilog(pp.p, x) < pp.exp ? 0 : x / ipow(pp.p, pp.exp);
        tables.emplace(pp.p, cache.ensure(pp.p, std::max<std::uint64_t>(1, quotient)));
    }
    auto members = enumerate_im(m, x, tables);
    if (cfg.format == Format::plain) {
        for (auto n : members) out << n << "\n";
        return 0;
    }
    std::vector<Row> rows;
    for (auto n : members) rows.push_back({{"m", m}, {"x", x}, {"n", n}});
    emit_rows(cfg.format, {"m", "x", "n"}, rows, out);
    return 0;
}

Row report_row(const SetCountReport& r) {
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json();
    };
    return {{"m", r.m},
            {"x", r.x},
            {"count", r.count},
            {"bound_thm1", r.bound_thm1},
            {"bound_lemma22", opt(r.bound_lemma22)},
            {"bound_eq11", opt(r.bound_eq11)},
            {"bound_sanna", opt(r.bound_sanna)},
            {"pass", r.pass}};
}

const std::vector<std::string> kReportColumns = {
    "m", "x", "count", "bound_thm1", "bound_lemma22", "bound_eq11", "bound_sanna", "pass"};

std::string report_csv_line(const SetCountReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? fixed(*v, 6) : std::string(); };
    std::ostringstream os;
    os << r.m << "," << r.x << "," << r.count << "," << fixed(r.bound_thm1, 6) << ","
       << opt(r.bound_lemma22) << "," << opt(r.bound_eq11) << "," << opt(r.bound_sanna) << ","
       << (r.pass ? "true" : "false");
    return os.str();
}

int cmd_bounds(const RunConfig& cfg, std::uint64_t m, std::uint64_t x, std::ostream& out) {
    JpCache cache(cfg.cache_dir, cfg.engine());
    JpTables tables;
    for (const auto& pp : factorize(m)) {
        std::uint64_t need = ilog(pp.p, x) < pp.exp ? 0 : x / ipow(pp.p, pp.exp);
        if (is_prime(m)) need = std::max(need, x); // J_m(x) is also checked
        tables.emplace(pp.p, cache.ensure(pp.p, std::max<std::uint64_t>(1, need)));
    }
    const auto members = enumerate_im(m, x, tables);
    std::optional<std::uint64_t> jp_count;
    if (is_prime(m)) jp_count = tables.at(m).count_upto(x);
    SetCountReport r = verify_bounds(m, x, members.size(), jp_count);

    if (cfg.format == Format::plain) {
        out << "I_" << m << "(" << x << ") = " << r.count << "\n";
        out << "thm1  4*m^(1/3)*x^(2/3+1/(25 ln q)) = " << fixed(r.bound_thm1, 6)
            << (r.count <= r.bound_thm1 ? "  ok" : "  VIOLATED") << "\n";
        if (r.bound_lemma22)
            out << "lemma22 prime-power bound = " << fixed(*r.bound_lemma22, 6)
                << (r.count <= *r.bound_lemma22 ? "  ok" : "  VIOLATED") << "\n";
        if (r.jp_count) {
            out << "J_" << m << "(" << x << ") = " << *r.jp_count << "\n";
            out << "eq11  3*x^(2/3+1/(25 ln p)) = " << fixed(*r.bound_eq11, 6)
                << (*r.jp_count <= *r.bound_eq11 ? "  ok" : "  VIOLATED") << "\n";
            out << "sanna 129*p^(2/3)*x^0.765 = " << fixed(*r.bound_sanna, 6)
                << (*r.jp_count <= *r.bound_sanna ? "  ok" : "  VIOLATED") << "\n";
        }
        out << (r.pass ? "pass" : "FAIL") << "\n";
    } else if (cfg.format == Format::csv) {
        std::ostringstream os;
        for (std::size_t i = 0; i < kReportColumns.size(); ++i)
            os << (i ? "," : "") << kReportColumns[i];
        out << os.str() << "\n" << report_csv_line(r) << "\n";
    } else {
        emit_rows(Format::json, kReportColumns, {report_row(r)}, out);
    }
    return r.pass ? 0 : 1;
}

int cmd_density(const RunConfig& cfg, std::uint64_t x, Theta theta,
                const std::vector<std::string>& checkpoints, bool per_x, std::ostream& out) {
    JpCache cache(cfg.cache_dir, cfg.engine());
    JpTables tables = ensure_density_tables(x, theta, cache);
    DensityOptions opts;
    opts.jobs = cfg.jobs;
    opts.per_x_exponent = per_x;
    for (const auto& c : checkpoints) opts.extra_checkpoints.push_back(parse_extent(c));
    auto rows = density_scan(x, theta, tables, opts);

    // With exponents fixed at the final x, interior checkpoints are counted
    // against larger prime powers than their own union bound uses; only the
    // final row is a like-for-like comparison.
    bool bound_ok = true;
    for (const auto& row : rows)
        if (!per_x || row.x == x) bound_ok = bound_ok && row.exceptions <= row.union_bound;

    if (cfg.format == Format::plain) {
        for (const auto& row : rows)
            out << "x=" << row.x << " theta=" << row.theta.str() << " T=" << row.exceptions
                << " ratio=" << fixed(row.ratio, 8) << " union_bound=" << row.union_bound
                << "\n";
    } else if (cfg.format == Format::csv) {
        out << "x,theta,exceptions,ratio,union_bound\n";
        for (const auto& row : rows)
            out << row.x << "," << row.theta.str() << "," << row.exceptions << ","
                << fixed(row.ratio, 8) << "," << row.union_bound << "\n";
    } else {
        std::vector<Row> jrows;
        for (const auto& row : rows)
            jrows.push_back({{"x", row.x},
                             {"theta", row.theta.str()},
                             {"exceptions", row.exceptions},
                             {"ratio", row.ratio},
                             {"union_bound", row.union_bound}});
        emit_rows(Format::json, {"x", "theta", "exceptions", "ratio", "union_bound"}, jrows,
                  out);
    }
    return bound_ok ? 0 : 1;
}

int cmd_selftest(const RunConfig& cfg, const std::string& report_path,
                 const std::vector<int>& only, std::ostream& out) {
    std::set<int> which(only.begin(), only.end());
    auto results = run_acceptance(out, cfg.jobs, which);
    std::ostringstream summary;
    bool all_pass = true;
    for (const auto& r : results) {
        summary << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.name;
        if (!r.detail.empty()) summary << " — " << r.detail;
        summary << "\n";
        all_pass = all_pass && r.pass;
    }
    summary << (all_pass ? "all criteria passed" : "SOME CRITERIA FAILED") << "\n";
    out << summary.str();
    if (!report_path.empty()) {
        std::ofstream f(report_path, std::ios::trunc);
        if (!f) throw CacheError("cannot write report file: " + report_path);
        f << summary.str();
    }
    return all_pass ? 0 : 1;
}

} // namespace

std::uint64_t parse_extent(const std::string& text) {
    std::string mantissa;
    long frac_digits = -1;
    long exponent = 0;
    std::size_t i = 0;
    for (; i < text.size() && text[i] != 'e' && text[i] != 'E'; ++i) {
        const char c = text[i];
        if (c == '.') {
            if (frac_digits >= 0) throw std::invalid_argument("bad number: " + text);
            frac_digits = 0;
        } else if (c >= '0' && c <= '9') {
            mantissa += c;
            if (frac_digits >= 0) ++frac_digits;
        } else {
            throw std::invalid_argument("bad number: " + text);
        }
    }
    if (mantissa.empty()) throw std::invalid_argument("bad number: " + text);
    if (i < text.size()) {
        std::string exp_part = text.substr(i + 1);
        if (!exp_part.empty() && exp_part[0] == '+') exp_part.erase(0, 1);
        if (exp_part.empty() ||
            exp_part.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("bad exponent: " + text);
        exponent = std::stol(exp_part);
    }
    if (frac_digits > 0) exponent -= frac_digits;
    mpz_class value(mantissa, 10);
    if (exponent < 0) throw std::invalid_argument("not an integer: " + text);
    for (long e = 0; e < exponent; ++e) value *= 10;
    if (!value.fits_ulong_p() || value < 1)
        throw std::invalid_argument("out of range: " + text);
    return value.get_ui();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"harmonic denominators: p-adic valuations, J_p/I_m sets, density tables"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string format = "plain";
    cfg.cache_dir = default_cache_dir();
    app.add_option("--format", format, "output format: plain, csv or json")
        ->check(CLI::IsMember({"plain", "csv", "json"}));
    app.add_option("--cache-dir", cfg.cache_dir, "J table cache directory");
    app.add_option("-j,--jobs", cfg.jobs, "worker threads for scans")->check(CLI::Range(1u, 256u));

    std::uint64_t n = 1, p = 2, m = 2;
    unsigned k = 1, precision = 0;
    std::string x_text = "100", bound_text = "100", method = "lemma", theta_text = "1/4";
    std::string report_path;
    std::vector<std::string> checkpoint_texts;
    std::vector<int> only;
    bool per_x = false;

    auto* c_harmonic = app.add_subcommand("harmonic", "H_n in lowest terms")->fallthrough();
    c_harmonic->add_option("n", n, "index")->required();

    auto* c_val = app.add_subcommand("valuation", "nu_p(H_n)")->fallthrough();
    c_val->add_option("n", n, "index")->required();
    c_val->add_option("p", p, "prime")->required();
    c_val->add_option("--precision", precision, "initial p-adic digits");

    auto* c_jp = app.add_subcommand("jp", "members of J_p up to a bound")->fallthrough();
    c_jp->add_option("p", p, "prime")->required();
    c_jp->add_option("--bound", bound_text, "search bound")->required();

    auto* c_ipk = app.add_subcommand("ipk", "members of I_{p^k} up to x")->fallthrough();
    c_ipk->add_option("p", p, "prime")->required();
    c_ipk->add_option("k", k, "exponent")->required();
    c_ipk->add_option("--x", x_text, "upper limit")->required();
    c_ipk->add_option("--method", method, "lemma, direct or both")
        ->check(CLI::IsMember({"lemma", "direct", "both"}));

    auto* c_im = app.add_subcommand("im", "members of I_m up to x")->fallthrough();
    c_im->add_option("m", m, "modulus (>= 2)")->required();
    c_im->add_option("--x", x_text, "upper limit")->required();

    auto* c_bounds = app.add_subcommand("bounds", "counting-bound report for I_m(x)")->fallthrough();
    c_bounds->add_option("m", m, "modulus (>= 2)")->required();
    c_bounds->add_option("--x", x_text, "upper limit")->required();

    auto* c_density = app.add_subcommand("density", "exception counts T(x) at checkpoints")->fallthrough();
    c_density->add_option("--x", x_text, "scan limit")->required();
    c_density->add_option("--theta", theta_text, "threshold exponent, 1/b with b in [2,6]");
    c_density->add_option("--checkpoint", checkpoint_texts, "extra checkpoints");
    c_density->add_flag("--per-x-exponent", per_x,
                        "fix prime-power exponents at the final x");

    auto* c_selftest = app.add_subcommand("selftest", "run the acceptance suite")->fallthrough();
    c_selftest->add_option("--report", report_path, "write a summary file");
    c_selftest->add_option("--only", only, "criteria ids to run")->check(CLI::Range(1, 8));

    std::vector<const char*> argv;
    argv.push_back("harmonic");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        cfg.format = parse_format(format);
        if (app.got_subcommand(c_harmonic)) return cmd_harmonic(cfg, n, out);
        if (app.got_subcommand(c_val)) return cmd_valuation(cfg, n, p, precision, out);
        if (app.got_subcommand(c_jp)) return cmd_jp(cfg, p, parse_extent(bound_text), out);
        if (app.got_subcommand(c_ipk))
            return cmd_ipk(cfg, p, k, parse_extent(x_text), method, out, err);
        if (app.got_subcommand(c_im)) return cmd_im(cfg, m, parse_extent(x_text), out);
        if (app.got_subcommand(c_bounds)) return cmd_bounds(cfg, m, parse_extent(x_text), out);
        if (app.got_subcommand(c_density))
            return cmd_density(cfg, parse_extent(x_text), parse_theta(theta_text),
                               checkpoint_texts, per_x, out);
        if (app.got_subcommand(c_selftest)) return cmd_selftest(cfg, report_path, only, out);
        err << "no subcommand\n";
        return 2;
    } catch (const CoverageError& e) {
        err << "coverage error: " << e.what() << "\n";
        return 3;
    } catch (const CacheError& e) {
        err << "cache error: " << e.what() << "\n";
        return 3;
    } catch (const InsufficientPrecision& e) {
        err << "precision error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::overflow_error& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace harmonic::cli
