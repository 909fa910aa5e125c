#include "cyclo/atlas.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include "cyclo/parallel.hpp"

namespace cyclo {

std::uint64_t RWitness::reconstruct() const
{
    switch (variant) {
    case RVariant::central:
        return (p + 1) / 2 + m;
    case RVariant::plus:
        return (p - 1) / 2 + m;
    case RVariant::minus:
        return (p - 1) / 2 - m;
    }
    return 0;
}

const char* to_string(RVariant v)
{
    switch (v) {
    case RVariant::central:
        return "central";
    case RVariant::plus:
        return "plus";
    case RVariant::minus:
        return "minus";
    }
    return "?";
}

std::optional<RWitness> r_membership(std::uint64_t h, RVariant variant, const PrimalityTest& is_p)
{
    if (h == 0) {
        throw std::invalid_argument("r_membership: h must be >= 1");
    }
    for (std::uint64_t m = 0;; ++m) {
        const std::uint64_t need = 4 * m * m + 2 * m + 3;
        std::uint64_t p = 0;
        switch (variant) {
        case RVariant::central:
            if (2 * h < 1 + 2 * m + need) {
                return std::nullopt;
            }
            p = 2 * h - 1 - 2 * m;
            break;
        case RVariant::plus:
            if (2 * h + 1 < 2 * m + need) {
                return std::nullopt;
            }
            p = 2 * h + 1 - 2 * m;
            break;
        case RVariant::minus:
            p = 2 * h + 1 + 2 * m;
            if (p < need) {
                return std::nullopt;
            }
            break;
        }
        if (is_p(p)) {
            return RWitness{h, p, m, variant};
        }
    }
}

std::optional<RWitness> r_membership(std::uint64_t h, RVariant variant)
{
    return r_membership(h, variant, [](std::uint64_t n) { return is_prime(n); });
}

std::optional<RWitness> r_membership(std::uint64_t h, RSet set, const PrimalityTest& is_p)
{
    if (set == RSet::central) {
        return r_membership(h, RVariant::central, is_p);
    }
    auto plus = r_membership(h, RVariant::plus, is_p);
    auto minus = r_membership(h, RVariant::minus, is_p);
    if (plus && (!minus || plus->m <= minus->m)) {
        return plus;
    }
    return minus;
}

std::uint64_t r_prime_bound(std::uint64_t x) { return 2 * x + 3 + 2 * isqrt(x / 2 + 1); }

std::vector<std::uint64_t> r_nonmembers(std::uint64_t x, RSet set, unsigned threads)
{
    if (x == 0) {
        throw std::invalid_argument("r_nonmembers: x must be >= 1");
    }
    const PrimeTable table(r_prime_bound(x));
    const PrimalityTest is_p = [&table](std::uint64_t n) { return table(n); };
    constexpr std::uint64_t kChunk = 1 << 14;
    const std::size_t chunks = static_cast<std::size_t>((x + kChunk - 1) / kChunk);
    std::vector<std::vector<std::uint64_t>> found(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        const std::uint64_t lo = 1 + c * kChunk;
        const std::uint64_t hi = std::min(x, lo + kChunk - 1);
        for (std::uint64_t h = lo; h <= hi; ++h) {
            if (!r_membership(h, set, is_p)) {
                found[c].push_back(h);
            }
        }
    });
    std::vector<std::uint64_t> out;
    for (const auto& f : found) {
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

CoverageReport interval_coverage(const GapRecord& g, const PrimalityTest& is_p)
{
    if (g.p < 11) {
        throw std::invalid_argument("interval_coverage requires p >= 11 (got " + std::to_string(g.p) + ")");
    }
    if (g.p_next <= g.p || g.d != g.p_next - g.p) {
        throw std::invalid_argument("malformed gap record");
    }
    CoverageReport rep;
    rep.gap = g;
    const std::uint64_t s = isqrt(g.p);
    // sqrt(p) is irrational, so floor((sqrt(p)-1)/2) = floor((s-1)/2).
    rep.m_n = (s - 1) / 2;
    rep.lo = (g.p + 1) / 2;
    rep.covered_hi = rep.lo + rep.m_n;
    rep.interval_hi = (g.p_next - 1) / 2;
    if (!sqrt_gap_ok(g.p, g.d)) {
        // floor((d + 1 - sqrt(p)) / 2) = floor((d + 1 - ceil(sqrt(p))) / 2) for irrational sqrt(p).
        rep.exception_bound = (g.d + 1 - (s + 1)) / 2;
    }
    for (std::uint64_t h = rep.lo; h <= rep.interval_hi; ++h) {
        if (!r_membership(h, RVariant::central, is_p)) {
            rep.uncovered.push_back(h);
        }
    }
    return rep;
}

TernaryStream::TernaryStream(std::uint64_t lo, std::uint64_t hi) : lo_(lo), hi_(hi)
{
    if (hi < 105) {
        return;
    }
    primes_ = primes_up_to(hi / 15);
    primes_.erase(primes_.begin());  // drop 2
    const std::size_t np = primes_.size();
    for (std::size_t pi = 0; pi + 2 < np; ++pi) {
        const std::uint64_t p = primes_[pi];
        if (p * primes_[pi + 1] * primes_[pi + 2] > hi) {
            break;
        }
        for (std::size_t qi = pi + 1; qi + 1 < np; ++qi) {
            const std::uint64_t pq = p * primes_[qi];
            if (pq * primes_[qi + 1] > hi) {
                break;
            }
            const std::uint64_t r_min = (lo + pq - 1) / pq;
            auto it = std::lower_bound(primes_.begin() + static_cast<std::ptrdiff_t>(qi + 1), primes_.end(), r_min);
            if (it == primes_.end() || pq * *it > hi) {
                continue;
            }
            heap_.push_back({pq * *it, static_cast<std::uint32_t>(pi), static_cast<std::uint32_t>(qi),
                             static_cast<std::uint32_t>(it - primes_.begin())});
        }
    }
    std::make_heap(heap_.begin(), heap_.end(), std::greater<>{});
}

std::optional<PrimeTriple> TernaryStream::next()
{
    if (heap_.empty()) {
        return std::nullopt;
    }
    std::pop_heap(heap_.begin(), heap_.end(), std::greater<>{});
    Entry e = heap_.back();
    heap_.pop_back();
    PrimeTriple t{primes_[e.pi], primes_[e.qi], primes_[e.ri]};
    if (e.ri + 1 < primes_.size()) {
        const std::uint64_t n = t.p * t.q * primes_[e.ri + 1];
        if (n <= hi_) {
            heap_.push_back({n, e.pi, e.qi, e.ri + 1});
            std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
        }
    }
    return t;
}

void scan_ternary(std::uint64_t lo, std::uint64_t hi, unsigned threads,
                  const std::function<bool(const PrimeTriple&, const HeightReport&)>& visit,
                  std::uint64_t budget)
{
    TernaryStream stream(lo, hi);
    const std::size_t batch = std::max<std::size_t>(64, 16 * std::size_t{threads});
    std::vector<PrimeTriple> triples;
    std::vector<HeightReport> reports;
    for (;;) {
        triples.clear();
        while (triples.size() < batch) {
            auto t = stream.next();
            if (!t) {
                break;
            }
            triples.push_back(*t);
        }
        if (triples.empty()) {
            return;
        }
        reports.assign(triples.size(), HeightReport{});
        parallel_for(triples.size(), threads,
                     [&](std::size_t i) { reports[i] = height_report(triples[i].product(), budget); });
        for (std::size_t i = 0; i < triples.size(); ++i) {
            if (!visit(triples[i], reports[i])) {
                return;
            }
        }
    }
}

TableRow row_from_report(const PrimeTriple& t, const HeightReport& rep)
{
    TableRow row;
    row.h = static_cast<std::uint64_t>(rep.A);
    row.resolved = true;
    row.p = t.p;
    row.q = t.q;
    row.r = t.r;
    row.k = rep.k_first;
    row.sign = rep.sign_at_k;
    row.diff = rep.span;
    row.diff_optimal = rep.span == static_cast<std::int64_t>(t.p);
    row.ratio = rep.ratio;
    row.exponent = rep.exponent;
    return row;
}

std::vector<TableRow> minimal_height_table(std::uint64_t h_max, std::uint64_t n_budget, unsigned threads)
{
    if (h_max == 0) {
        throw std::invalid_argument("minimal_height_table: h_max must be >= 1");
    }
    std::vector<TableRow> rows(h_max);
    for (std::uint64_t h = 1; h <= h_max; ++h) {
        rows[h - 1].h = h;
    }
    std::uint64_t remaining = h_max;
    scan_ternary(1, n_budget, threads, [&](const PrimeTriple& t, const HeightReport& rep) {
        const auto a = static_cast<std::uint64_t>(rep.A);
        if (a >= 1 && a <= h_max && !rows[a - 1].resolved) {
            rows[a - 1] = row_from_report(t, rep);
            --remaining;
        }
        return remaining > 0;
    });
    return rows;
}

std::string format_fixed3(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string truncate_fixed3(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    std::string s = buf;
    return s.substr(0, s.find('.') + 4);
}

bool matches_3_decimals(double table_value, double computed)
{
    const std::string t = format_fixed3(table_value);
    return t == format_fixed3(computed) || t == truncate_fixed3(computed);
}

bool TableVerification::ok() const
{
    return two_thirds_rule && std::all_of(rows.begin(), rows.end(), [](const RowCheck& r) {
               return r.values_ok && r.minimality != RowCheck::Minimality::refuted;
           });
}

TableVerification verify_table(const std::vector<TableRow>& rows, std::uint64_t minimality_bound, unsigned threads)
{
    TableVerification out;
    out.rows.resize(rows.size());
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        const TableRow& want = rows[i];
        RowCheck& chk = out.rows[i];
        chk.h = want.h;
        auto note = [&](const std::string& field, const std::string& expected, const std::string& got) {
            if (expected != got) {
                chk.values_ok = false;
                chk.mismatches.push_back(field + ": table " + expected + ", computed " + got);
            }
        };
        HeightReport rep;
        try {
            const auto t = PrimeTriple::make(want.p, want.q, want.r);
            rep = height_report(t.product());
        } catch (const std::exception& e) {
            chk.values_ok = false;
            chk.mismatches.push_back(e.what());
            return;
        }
        note("height", std::to_string(want.h), std::to_string(rep.A));
        note("k", std::to_string(want.k), std::to_string(rep.k_first));
        note("sign", want.sign < 0 ? "-" : "+", rep.sign_at_k < 0 ? "-" : "+");
        note("diff", std::to_string(want.diff), std::to_string(rep.span));
        note("diff_bold", want.diff_optimal ? "1" : "0", rep.span == static_cast<std::int64_t>(want.p) ? "1" : "0");
        // The published columns mix rounding and truncation to 3 decimals; either is accepted.
        if (!matches_3_decimals(want.ratio, rep.ratio)) {
            note("ratio", format_fixed3(want.ratio), format_fixed3(rep.ratio));
        }
        if (want.exponent.has_value() != rep.exponent.has_value() ||
            (want.exponent && !matches_3_decimals(*want.exponent, *rep.exponent))) {
            note("exponent", want.exponent ? format_fixed3(*want.exponent) : "",
                 rep.exponent ? format_fixed3(*rep.exponent) : "");
        }
    });

    std::uint64_t scan_to = 0;
    std::map<std::uint64_t, std::optional<std::uint64_t>> first_seen;
    for (const auto& row : rows) {
        if (row.n() <= minimality_bound) {
            scan_to = std::max(scan_to, row.n());
            first_seen[row.h] = std::nullopt;
        }
    }
    if (scan_to > 0) {
        std::size_t open = first_seen.size();
        scan_ternary(1, scan_to, threads, [&](const PrimeTriple& t, const HeightReport& rep) {
            auto it = first_seen.find(static_cast<std::uint64_t>(rep.A));
            if (it != first_seen.end() && !it->second) {
                it->second = t.product();
                --open;
            }
            return open > 0;
        });
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].n() > minimality_bound) {
                continue;
            }
            const auto& first = first_seen[rows[i].h];
            if (first && *first == rows[i].n()) {
                out.rows[i].minimality = RowCheck::Minimality::confirmed;
            } else {
                out.rows[i].minimality = RowCheck::Minimality::refuted;
                out.rows[i].smaller_n = first;
            }
        }
    }

    out.two_thirds_rule = !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const TableRow& r) {
        return 3 * r.h <= 2 * r.p && ((3 * r.h == 2 * r.p) == (r.h == 2));
    });
    return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) {
            field.pop_back();
        }
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

}  // namespace

std::vector<TableRow> read_table_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("table csv: missing header");
    }
    const auto header = split_csv(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        col[header[i]] = i;
    }
    for (const char* name : {"height", "p", "q", "r", "k", "sign", "diff", "ratio", "exponent"}) {
        if (!col.count(name)) {
            throw std::runtime_error(std::string("table csv: missing column ") + name);
        }
    }
    std::vector<TableRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") {
            continue;
        }
        auto f = split_csv(line);
        f.resize(header.size());
        auto get = [&](const char* name) -> const std::string& { return f[col.at(name)]; };
        try {
            TableRow row;
            row.h = std::stoull(get("height"));
            row.p = std::stoull(get("p"));
            row.q = std::stoull(get("q"));
            row.r = std::stoull(get("r"));
            row.resolved = true;
            row.k = std::stoull(get("k"));
            const auto& s = get("sign");
            if (s != "+" && s != "-") {
                throw std::invalid_argument("sign must be + or -");
            }
            row.sign = s == "-" ? -1 : 1;
            row.diff = std::stoll(get("diff"));
            row.ratio = std::stod(get("ratio"));
            if (!get("exponent").empty()) {
                row.exponent = std::stod(get("exponent"));
            }
            row.diff_optimal = col.count("diff_bold") ? f[col["diff_bold"]] == "1"
                                                      : row.diff == static_cast<std::int64_t>(row.p);
            rows.push_back(row);
        } catch (const std::exception& e) {
            throw std::runtime_error("table csv line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

std::vector<TableRow> read_table_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return read_table_csv(in);
}

void write_table_csv(std::ostream& os, const std::vector<TableRow>& rows, bool with_bold)
{
    os << "height,p,q,r,k,sign,diff,ratio,exponent" << (with_bold ? ",diff_bold" : "") << '\n';
    for (const auto& r : rows) {
        if (!r.resolved) {
            os << r.h << ",,,,,,,," << (with_bold ? "," : "") << '\n';
            continue;
        }
        os << r.h << ',' << r.p << ',' << r.q << ',' << r.r << ',' << r.k << ',' << (r.sign < 0 ? '-' : '+')
           << ',' << r.diff << ',' << format_fixed3(r.ratio) << ','
           << (r.exponent ? format_fixed3(*r.exponent) : "");
        if (with_bold) {
            os << ',' << (r.diff_optimal ? 1 : 0);
        }
        os << '\n';
    }
}

}  // namespace cyclo
