#include "cyclo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cyclo/atlas.hpp"
#include "cyclo/cache.hpp"
#include "cyclo/cyclotomic.hpp"
#include "cyclo/forge.hpp"
#include "cyclo/primes.hpp"

#ifndef CYCLO_DATA_DIR
#define CYCLO_DATA_DIR "data"
#endif

namespace cyclo::cli {

using ojson = nlohmann::ordered_json;

std::uint64_t parse_count(const std::string& text)
{
    auto digits = [&](const std::string& s) {
        if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
            throw std::invalid_argument("malformed number '" + text + "'");
        }
        std::size_t pos = 0;
        const auto v = std::stoull(s, &pos);
        return static_cast<std::uint64_t>(v);
    };
    auto pow10 = [&](std::uint64_t mant, std::uint64_t base, std::uint64_t e) {
        std::uint64_t v = mant;
        for (std::uint64_t i = 0; i < e; ++i) {
            if (__builtin_mul_overflow(v, base, &v)) {
                throw std::invalid_argument("number '" + text + "' does not fit in 64 bits");
            }
        }
        return v;
    };
    try {
        if (auto e = text.find_first_of("eE"); e != std::string::npos) {
            return pow10(digits(text.substr(0, e)), 10, digits(text.substr(e + 1)));
        }
        if (auto c = text.find('^'); c != std::string::npos) {
            return pow10(1, digits(text.substr(0, c)), digits(text.substr(c + 1)));
        }
        return digits(text);
    } catch (const std::out_of_range&) {
        throw std::invalid_argument("number '" + text + "' does not fit in 64 bits");
    }
}

std::string default_table_path()
{
    const std::filesystem::path bundled = std::filesystem::path(CYCLO_DATA_DIR) / "table1.csv";
    if (std::filesystem::exists(bundled)) {
        return bundled.string();
    }
    return "data/table1.csv";
}

namespace {

struct Globals {
    std::string format = "csv";
    unsigned threads = 1;
    std::string cache;
    bool json() const { return format == "json"; }
};

class CommandFailed : public std::runtime_error {
public:
    CommandFailed(int code, const std::string& msg) : std::runtime_error(msg), code(code) {}
    int code;
};

std::string bool01(bool b) { return b ? "1" : "0"; }

ojson opt_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

void emit_height_csv_header(std::ostream& out)
{
    out << "n,degree,A,Amax,Amin,k_first,sign_at_k,span,coeff_set_size,optimal,ratio,exponent\n";
}

void emit_height_csv(std::ostream& out, const HeightReport& r)
{
    out << r.n << ',' << r.degree << ',' << r.A << ',' << r.Amax << ',' << r.Amin << ',' << r.k_first << ','
        << (r.sign_at_k < 0 ? '-' : '+') << ',' << r.span << ',' << r.coeff_set_size << ','
        << (r.optimal ? bool01(*r.optimal) : "") << ',' << format_fixed3(r.ratio) << ','
        << (r.exponent ? format_fixed3(*r.exponent) : "") << '\n';
}

constexpr const char* kDefaultCacheFile = "cyclo-cache.jsonl";

HeightReport cached_report(const Globals& g, std::uint64_t n, std::uint64_t budget)
{
    if (g.cache.empty()) {
        return height_report(n, budget);
    }
    HeightCache cache(g.cache);
    if (auto hit = cache.lookup(n)) {
        return hit->to_report();
    }
    auto rep = height_report(n, budget);
    cache.store(CacheEntry::from_report(rep));
    return rep;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Cyclotomic heights, prime gaps and ternary witnesses"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", g.threads, "Worker threads for scan/atlas/gset/rset/gaps")
        ->check(CLI::Range(1u, 1024u));
    auto* cache_opt = app.add_option("--cache", g.cache, "JSON-lines height cache (bare flag: " +
                                                             std::string(kDefaultCacheFile) + " in the working directory)")
                          ->expected(0, 1);

    std::function<int()> action;

    // coeffs
    auto* coeffs = app.add_subcommand("coeffs", "Dump coefficients of Phi_n as index,value");
    std::string c_n, c_lo, c_hi, c_budget = "1e8";
    bool c_full = false;
    coeffs->add_option("n", c_n)->required();
    coeffs->add_option("--lo", c_lo, "First index");
    coeffs->add_option("--hi", c_hi, "Last index (inclusive)");
    coeffs->add_flag("--full", c_full, "Whole range 0..phi(n)");
    coeffs->add_option("--budget", c_budget, "Coefficient memory budget");
    coeffs->callback([&] {
        action = [&] {
            const auto n = parse_count(c_n);
            const auto budget = parse_count(c_budget);
            std::optional<Window> w;
            if (c_full || !c_lo.empty() || !c_hi.empty()) {
                const auto deg = n == 0 ? 0 : RadicalPoly(n, budget).degree();
                w = Window{c_lo.empty() ? 0 : parse_count(c_lo), c_hi.empty() ? deg : parse_count(c_hi)};
            }
            const auto seq = coefficients(n, w, budget);
            if (g.json()) {
                ojson j;
                j["n"] = seq.n;
                j["degree"] = seq.degree;
                j["lo"] = seq.lo;
                j["hi"] = seq.hi;
                j["coeffs"] = seq.coeffs;
                out << j.dump() << '\n';
            } else {
                out << "index,value\n";
                write_csv(out, seq);
            }
            return kOk;
        };
    });

    // height
    auto* height = app.add_subcommand("height", "Height report for Phi_n");
    std::string h_n, h_budget = "1e8";
    height->add_option("n", h_n)->required();
    height->add_option("--budget", h_budget, "Coefficient memory budget");
    height->callback([&] {
        action = [&] {
            const auto rep = cached_report(g, parse_count(h_n), parse_count(h_budget));
            if (g.json()) {
                out << to_json(rep) << '\n';
            } else {
                emit_height_csv_header(out);
                emit_height_csv(out, rep);
            }
            return kOk;
        };
    });

    // scan
    auto* scan = app.add_subcommand("scan", "Height reports of all ternary n in [--min, --max]");
    std::string s_min = "1", s_max;
    scan->add_option("--min", s_min, "Smallest n");
    scan->add_option("--max", s_max, "Largest n")->required();
    scan->callback([&] {
        action = [&] {
            const auto lo = parse_count(s_min), hi = parse_count(s_max);
            std::map<std::uint64_t, CacheEntry> known;
            std::optional<HeightCache> cache;
            if (!g.cache.empty()) {
                cache.emplace(g.cache);
                known = cache->load();
            }
            if (!g.json()) {
                out << "n,p,q,r,A,Amax,Amin,k_first,sign_at_k,span,coeff_set_size,optimal\n";
            }
            // Cached n are still enumerated; the engine recomputes and the entry must agree.
            scan_ternary(lo, hi, g.threads, [&](const PrimeTriple& t, const HeightReport& rep) {
                if (cache) {
                    const auto entry = CacheEntry::from_report(rep);
                    if (auto it = known.find(rep.n); it == known.end()) {
                        cache->append(entry);
                    } else if (!(it->second == entry)) {
                        throw CommandFailed(kMismatch, "cache entry for n=" + std::to_string(rep.n) +
                                                           " disagrees with recomputation");
                    }
                }
                if (g.json()) {
                    out << to_json(rep) << '\n';
                } else {
                    out << rep.n << ',' << t.p << ',' << t.q << ',' << t.r << ',' << rep.A << ',' << rep.Amax << ','
                        << rep.Amin << ',' << rep.k_first << ',' << (rep.sign_at_k < 0 ? '-' : '+') << ','
                        << rep.span << ',' << rep.coeff_set_size << ',' << bool01(rep.optimal.value_or(false))
                        << '\n';
                }
                return true;
            });
            return kOk;
        };
    });

    // atlas
    auto* atlas = app.add_subcommand("atlas", "Minimal ternary n per height");
    std::string a_hmax = "12", a_budget = "100000", a_verify;
    atlas->add_option("--h-max", a_hmax, "Largest height to resolve");
    atlas->add_option("--n-budget", a_budget, "Largest ternary n scanned");
    atlas->add_option("--verify", a_verify, "Verify a table CSV instead of searching");
    auto emit_verification = [&](const std::vector<TableRow>& rows, std::uint64_t bound) {
        const auto v = verify_table(rows, bound, g.threads);
        auto minimality = [](RowCheck::Minimality m) {
            switch (m) {
            case RowCheck::Minimality::confirmed:
                return "confirmed";
            case RowCheck::Minimality::refuted:
                return "refuted";
            default:
                return "unchecked";
            }
        };
        if (g.json()) {
            ojson j;
            j["ok"] = v.ok();
            j["two_thirds_rule"] = v.two_thirds_rule;
            j["minimality_bound"] = bound;
            auto arr = ojson::array();
            for (const auto& r : v.rows) {
                ojson row;
                row["h"] = r.h;
                row["values_ok"] = r.values_ok;
                row["minimality"] = minimality(r.minimality);
                row["mismatches"] = r.mismatches;
                arr.push_back(row);
            }
            j["rows"] = arr;
            out << j.dump() << '\n';
        } else {
            out << "height,values,minimality,detail\n";
            for (const auto& r : v.rows) {
                std::string detail;
                for (const auto& m : r.mismatches) {
                    detail += (detail.empty() ? "" : "; ") + m;
                }
                if (r.smaller_n) {
                    detail += (detail.empty() ? "" : "; ") + std::string("smaller n=") + std::to_string(*r.smaller_n);
                }
                out << r.h << ',' << (r.values_ok ? "ok" : "MISMATCH") << ',' << minimality(r.minimality) << ','
                    << detail << '\n';
            }
            out << "# h <= 2p/3 (equality only at h=2): " << (v.two_thirds_rule ? "ok" : "FAILED") << '\n';
        }
        return v.ok() ? kOk : kMismatch;
    };
    atlas->callback([&] {
        action = [&] {
            const auto budget = parse_count(a_budget);
            if (!a_verify.empty()) {
                return emit_verification(read_table_csv(a_verify), budget);
            }
            const auto rows = minimal_height_table(parse_count(a_hmax), budget, g.threads);
            if (g.json()) {
                auto arr = ojson::array();
                for (const auto& r : rows) {
                    ojson j;
                    j["height"] = r.h;
                    j["resolved"] = r.resolved;
                    if (r.resolved) {
                        j["p"] = r.p;
                        j["q"] = r.q;
                        j["r"] = r.r;
                        j["k"] = r.k;
                        j["sign"] = r.sign < 0 ? "-" : "+";
                        j["diff"] = r.diff;
                        j["diff_optimal"] = r.diff_optimal;
                        j["ratio"] = r.ratio;
                        j["exponent"] = opt_json(r.exponent);
                    }
                    arr.push_back(j);
                }
                out << arr.dump() << '\n';
            } else {
                write_table_csv(out, rows);
            }
            return kOk;
        };
    });

    // verify-table1
    auto* vt = app.add_subcommand("verify-table1", "Recompute every row of the bundled height table");
    std::string vt_path = default_table_path(), vt_bound = "51911";
    vt->add_option("--csv", vt_path, "Table CSV");
    vt->add_option("--minimality-bound", vt_bound, "Check minimality of rows with n <= bound");
    vt->callback([&] { action = [&] { return emit_verification(read_table_csv(vt_path), parse_count(vt_bound)); }; });

    // rset
    auto* rset = app.add_subcommand("rset", "Heights <= --max without an (p, m) witness");
    std::string r_max;
    bool r_pm = false;
    rset->add_option("--max", r_max, "Upper bound")->required();
    rset->add_flag("--pm", r_pm, "Use the plus/minus variant set");
    rset->callback([&] {
        action = [&] {
            const auto x = parse_count(r_max);
            const auto miss = r_nonmembers(x, r_pm ? RSet::plus_minus : RSet::central, g.threads);
            if (g.json()) {
                ojson j;
                j["max"] = x;
                j["set"] = r_pm ? "plus_minus" : "central";
                j["nonmembers"] = miss;
                out << j.dump() << '\n';
            } else {
                for (auto h : miss) {
                    out << h << '\n';
                }
            }
            return kOk;
        };
    });

    // gaps
    auto* gaps = app.add_subcommand("gaps", "Prime gaps up to --max against the square-root inequalities");
    std::string gp_max;
    double gp_c = 1.0;
    bool gp_exceptions = false;
    gaps->add_option("--max", gp_max, "Bound x on p_n")->required();
    gaps->add_option("--C", gp_c, "Scale C in d >= C sqrt(p) for hb_sum")->check(CLI::NonNegativeNumber);
    gaps->add_flag("--exceptions-only", gp_exceptions, "CSV: only gaps failing d < sqrt(p)+1");
    gaps->callback([&] {
        action = [&] {
            const auto x = parse_count(gp_max);
            if (x < 3) {
                throw std::invalid_argument("gaps needs --max >= 3");
            }
            if (g.json()) {
                const auto s = gap_summary(x, gp_c, g.threads);
                ojson j;
                j["x"] = s.x;
                j["e_sum"] = s.e_sum;
                j["hb_sum"] = s.hb_sum;
                j["yu_sum"] = s.yu_sum;
                j["exception_count"] = s.exceptions.size();
                auto ex = ojson::array();
                for (const auto& r : s.exceptions) {
                    ex.push_back(r.p);
                }
                j["exceptions"] = ex;
                auto av = ojson::array();
                for (const auto& r : s.andrica_violations) {
                    av.push_back(r.p);
                }
                j["andrica_violations"] = av;
                j["N_bound"] = s.e_sum / 2;  // E(x)/2, the bound on non-members below x/2
                out << j.dump() << '\n';
            } else {
                out << "p,p_next,d,sqrt_gap_ok,andrica_ok\n";
                for_each_gap(x, [&](const GapRecord& r) {
                    const bool ok = sqrt_gap_ok(r.p, r.d);
                    if (gp_exceptions && ok) {
                        return;
                    }
                    out << r.p << ',' << r.p_next << ',' << r.d << ',' << bool01(ok) << ','
                        << bool01(andrica_ok(r.p, r.p_next)) << '\n';
                });
            }
            return kOk;
        };
    });

    // witness
    auto* wit = app.add_subcommand("witness", "Ternary n with A(n) = h for odd h");
    std::string w_h, w_pcap = "1e7", w_rcap = "0", w_budget = "2e7", w_p;
    bool w_linnik = false;
    double w_eps = 0.5;
    wit->set_help_flag("--help", "Print this help message and exit");
    wit->add_option("--h", w_h, "Odd target height >= 3")->required();
    wit->add_option("--p-cap", w_pcap, "Largest p tried");
    wit->add_option("--r-cap", w_rcap, "Largest r tried (0 = candidate cap only)");
    wit->add_option("--verify-budget", w_budget, "Half-coefficient budget for direct verification");
    wit->add_option("--p", w_p, "Use this p instead of searching");
    wit->add_flag("--linnik", w_linnik, "Use the (4m, 32m) / auxiliary-prime construction");
    wit->add_option("--epsilon", w_eps, "Exponent slack for the auxiliary prime check");
    wit->callback([&] {
        action = [&] {
            const auto h = parse_count(w_h);
            const auto budget = parse_count(w_budget);
            std::string json;
            TernaryWitness w;
            if (w_linnik) {
                auto lw = linnik_witness(h, w_eps);
                lw.witness = verify_witness(lw.witness, budget);
                w = lw.witness;
                json = to_json(lw);
            } else {
                std::optional<std::uint64_t> forced;
                if (!w_p.empty()) {
                    forced = parse_count(w_p);
                }
                w = verify_witness(with_wilms(h, parse_count(w_pcap), parse_count(w_rcap), forced), budget);
                json = to_json(w);
            }
            if (g.json()) {
                out << json << '\n';
            } else {
                out << "h,p,q,r1,r,verified,height\n";
                auto o = [](const auto& v) { return v ? std::to_string(*v) : std::string(); };
                out << w.h << ',' << o(w.p) << ',' << o(w.q) << ',' << w.r1 << ',' << o(w.r) << ','
                    << to_string(w.verified) << ',' << o(w.height) << '\n';
            }
            return w.verified == Verification::unresolved ? kMismatch : kOk;
        };
    });

    // gset
    auto* gset = app.add_subcommand("gset", "m <= --max with a prime p in (4m, 32m) making 1+2mp prime");
    std::string gs_max;
    gset->add_option("--max", gs_max, "Largest m")->required();
    gset->callback([&] {
        action = [&] {
            const auto scan = g_scan(parse_count(gs_max), g.threads);
            if (g.json()) {
                ojson j;
                j["max"] = scan.records.size();
                j["density"] = scan.density;
                auto arr = ojson::array();
                for (const auto& r : scan.records) {
                    arr.push_back({{"m", r.m}, {"p", r.p ? ojson(*r.p) : ojson(nullptr)}});
                }
                j["records"] = arr;
                out << j.dump() << '\n';
            } else {
                out << "m,p\n";
                for (const auto& r : scan.records) {
                    out << r.m << ',' << (r.p ? std::to_string(*r.p) : "") << '\n';
                }
            }
            return kOk;
        };
    });

    // constants
    auto* consts = app.add_subcommand("constants", "Euler products C1, C2 and c'");
    std::string k_cutoff = "1e7";
    consts->add_option("--cutoff", k_cutoff, "Largest prime in the truncated products");
    consts->callback([&] {
        action = [&] {
            out << to_json(constants(parse_count(k_cutoff))) << '\n';
            return kOk;
        };
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
        if (cache_opt->count() > 0 && g.cache.empty()) {
            g.cache = kDefaultCacheFile;
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : kPrecondition;
    }

    try {
        return action ? action() : kOk;
    } catch (const CommandFailed& e) {
        err << "error: " << e.what() << '\n';
        return e.code;
    } catch (const BudgetError& e) {
        err << "budget error: " << e.what() << '\n';
        return kBudget;
    } catch (const OverflowError& e) {
        err << "overflow: " << e.what() << '\n';
        return kOverflow;
    } catch (const WitnessContradiction& e) {
        err << "witness contradiction: " << e.what() << '\n';
        return kMismatch;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kPrecondition;
    } catch (const std::out_of_range& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kPrecondition;
    } catch (const std::logic_error& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace cyclo::cli
