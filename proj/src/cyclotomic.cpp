#include "cyclo/cyclotomic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "cyclo/primes.hpp"

namespace cyclo {

namespace {

[[noreturn]] void report_overflow(std::uint64_t m, std::uint64_t d)
{
    throw OverflowError("coefficient overflow computing Phi_" + std::to_string(m) + " (pass d=" +
                        std::to_string(d) + ")");
}

// Division by (1 - x^d): c[i] += c[i-d], ascending. Blocks of length d have no
// internal dependency, so the inner loop vectorizes; overflow is OR-accumulated.
}  // namespace

namespace detail {

void divide_pass(std::span<std::int64_t> seq, std::size_t d, std::uint64_t m)
{
    std::int64_t* c = seq.data();
    const std::size_t len = seq.size();
    std::uint64_t flag = 0;
    for (std::size_t b = d; b < len; b += d) {
        const std::size_t e = std::min(b + d, len) - b;
        std::int64_t* __restrict dst = c + b;
        const std::int64_t* __restrict src = c + b - d;
        for (std::size_t i = 0; i < e; ++i) {
            const auto x = static_cast<std::uint64_t>(dst[i]);
            const auto y = static_cast<std::uint64_t>(src[i]);
            const std::uint64_t s = x + y;
            flag |= (x ^ s) & (y ^ s);
            dst[i] = static_cast<std::int64_t>(s);
        }
    }
    // checked once per pass: a wrapped value never escapes since we throw
    if (flag >> 63) {
        report_overflow(m, d);
    }
}

// Multiplication by (1 - x^d): c[i] -= c[i-d], descending.
void multiply_pass(std::span<std::int64_t> seq, std::size_t d, std::uint64_t m)
{
    std::int64_t* c = seq.data();
    const std::size_t len = seq.size();
    std::uint64_t flag = 0;
    std::size_t hi = len;
    while (hi > d) {
        const std::size_t lo = std::max(d, hi - std::min(hi, d));
        std::int64_t* __restrict dst = c + lo;
        const std::int64_t* __restrict src = c + lo - d;
        for (std::size_t i = 0; i < hi - lo; ++i) {
            const auto x = static_cast<std::uint64_t>(dst[i]);
            const auto y = static_cast<std::uint64_t>(src[i]);
            const std::uint64_t s = x - y;
            flag |= (x ^ y) & (x ^ s);
            dst[i] = static_cast<std::int64_t>(s);
        }
        hi = lo;
    }
    if (flag >> 63) {
        report_overflow(m, d);
    }
}

}  // namespace detail

namespace {

// Unchecked variants, only used when |c| < 2^62 is known so no sum can overflow.
void divide_fast(std::span<std::int64_t> seq, std::size_t d)
{
    std::int64_t* c = seq.data();
    const std::size_t len = seq.size();
    for (std::size_t b = d; b < len; b += d) {
        const std::size_t e = std::min(b + d, len) - b;
        std::int64_t* __restrict dst = c + b;
        const std::int64_t* __restrict src = c + b - d;
        for (std::size_t i = 0; i < e; ++i) {
            dst[i] += src[i];
        }
    }
}

void multiply_fast(std::span<std::int64_t> seq, std::size_t d)
{
    std::int64_t* c = seq.data();
    std::size_t hi = seq.size();
    while (hi > d) {
        const std::size_t lo = std::max(d, hi - std::min(hi, d));
        std::int64_t* __restrict dst = c + lo;
        const std::int64_t* __restrict src = c + lo - d;
        for (std::size_t i = 0; i < hi - lo; ++i) {
            dst[i] -= src[i];
        }
        hi = lo;
    }
}

std::uint64_t max_abs(std::span<const std::int64_t> c)
{
    std::uint64_t m = 0;
    for (auto v : c) {
        const auto u = static_cast<std::uint64_t>(v);
        m = std::max(m, v < 0 ? ~u + 1 : u);
    }
    return m;
}

struct Sweep {
    std::int64_t amax = 0;
    std::int64_t amin = 0;
    std::uint64_t k_first = 0;  // in Phi_n indexing
    int sign = 1;
    std::vector<std::int64_t> values;  // sorted distinct
};

Sweep sweep(const RadicalPoly& poly)
{
    // value(k) for k <= last is stored()[k], negated at odd k when the core was even
    const auto st = poly.stored();
    const std::size_t len = st.size();
    const bool neg = poly.negate_odd_indices();
    std::int64_t emin = st[0], emax = st[0];
    std::int64_t omin = std::numeric_limits<std::int64_t>::max();
    std::int64_t omax = std::numeric_limits<std::int64_t>::min();
    std::size_t k = 0;
    for (; k + 1 < len; k += 2) {
        emin = std::min(emin, st[k]);
        emax = std::max(emax, st[k]);
        omin = std::min(omin, st[k + 1]);
        omax = std::max(omax, st[k + 1]);
    }
    if (k < len) {
        emin = std::min(emin, st[k]);
        emax = std::max(emax, st[k]);
    }
    if (len > 1 && neg) {
        std::swap(omin, omax);
        omin = -omin;
        omax = -omax;
    }
    Sweep s;
    s.amin = len > 1 ? std::min(emin, omin) : emin;
    s.amax = len > 1 ? std::max(emax, omax) : emax;
    if (poly.stretch() > 1) {
        s.amax = std::max<std::int64_t>(s.amax, 0);
        s.amin = std::min<std::int64_t>(s.amin, 0);
    }
    // zero padding from the stretch never attains the height, so the first hit is in st
    const std::int64_t height = std::max(s.amax, -s.amin);
    std::size_t best_k = 0;
    while (st[best_k] != height && st[best_k] != -height) {
        ++best_k;
    }
    s.k_first = best_k * poly.stretch();
    s.sign = poly.value(best_k) < 0 ? -1 : 1;

    std::vector<char> seen(static_cast<std::size_t>(s.amax - s.amin + 1), 0);
    for (std::size_t i = 0; i < len; ++i) {
        const std::int64_t v = (neg && (i & 1)) ? -st[i] : st[i];
        seen[static_cast<std::size_t>(v - s.amin)] = 1;
    }
    if (poly.stretch() > 1) {
        seen[static_cast<std::size_t>(-s.amin)] = 1;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (seen[i]) {
            s.values.push_back(static_cast<std::int64_t>(i) + s.amin);
        }
    }
    return s;
}

}  // namespace

RadicalReduction reduce_to_radical(std::uint64_t n)
{
    if (n == 0) {
        throw std::invalid_argument("reduce_to_radical: n must be positive");
    }
    const auto f = factorize(n);
    const std::uint64_t rad = radical(f);
    RadicalReduction red;
    red.stretch = n / rad;
    red.negate_odd_indices = rad % 2 == 0;
    red.core = red.negate_odd_indices ? rad / 2 : rad;
    return red;
}

std::vector<std::int64_t> squarefree_half(std::uint64_t m, std::span<const std::uint64_t> primes,
                                          std::uint64_t budget)
{
    std::uint64_t phi = 1;
    for (auto p : primes) {
        phi = checked_mul(phi, p - 1);
    }
    const std::uint64_t half = phi / 2;
    if (half + 1 > budget) {
        throw BudgetError("Phi_" + std::to_string(m) + " needs " + std::to_string(half + 1) +
                          " coefficients, budget is " + std::to_string(budget));
    }

    struct Divisor {
        std::uint64_t d;
        bool multiply;  // mu(m/d) = +1
    };
    std::vector<Divisor> divisors;
    const std::size_t k = primes.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        std::uint64_t d = 1;
        bool overflowed = false;
        for (std::size_t i = 0; i < k; ++i) {
            if (mask >> i & 1) {
                if (__builtin_mul_overflow(d, primes[i], &d)) {
                    overflowed = true;
                }
            }
        }
        if (overflowed || d > half) {
            continue;
        }
        const auto chosen = static_cast<std::size_t>(__builtin_popcountll(mask));
        divisors.push_back({d, (k - chosen) % 2 == 0});
    }
    std::sort(divisors.begin(), divisors.end(), [](const auto& a, const auto& b) { return a.d < b.d; });

    std::vector<std::int64_t> c(half + 1, 0);
    std::size_t first = 0;
    if (divisors.size() >= 2) {
        // the passes for d = 1 and d = smallest prime fused into a closed form:
        // (1 - x^p)/(1 - x) is p ones, (1 - x)/(1 - x^p) repeats 1, -1, 0, ... with period p
        const std::size_t p = divisors[1].d;
        if (divisors[1].multiply) {
            std::fill_n(c.begin(), std::min(p, c.size()), 1);
        } else {
            for (std::size_t i = 0; i < c.size(); i += p) {
                c[i] = 1;
                if (i + 1 < c.size()) {
                    c[i + 1] = -1;
                }
            }
        }
        first = 2;
    } else {
        c[0] = 1;
    }
    // |c| <= bound throughout; each pass at most doubles it
    constexpr std::uint64_t kSafe = std::uint64_t{1} << 62;
    std::uint64_t bound = 1;
    for (std::size_t i = first; i < divisors.size(); ++i) {
        const auto [d, multiply] = divisors[i];
        if (bound >= kSafe) {
            bound = max_abs(c);
        }
        if (bound < kSafe) {
            multiply ? multiply_fast(c, d) : divide_fast(c, d);
            bound *= 2;
        } else if (multiply) {
            detail::multiply_pass(c, d, m);
        } else {
            detail::divide_pass(c, d, m);
        }
    }
    return c;
}

RadicalPoly::RadicalPoly(std::uint64_t n, std::uint64_t budget) : n_(n)
{
    if (n == 0) {
        throw std::invalid_argument("Phi_0 is undefined (n must be >= 1)");
    }
    const auto f = factorize(n);
    rad_ = radical(f);
    stretch_ = n / rad_;
    if (rad_ == 1) {
        stored_ = {-1, 1};
        mirrored_ = false;
        rad_degree_ = 1;
        return;
    }
    if (rad_ == 2) {
        stored_ = {1, 1};
        mirrored_ = false;
        rad_degree_ = 1;
        return;
    }
    negate_ = rad_ % 2 == 0;
    std::vector<std::uint64_t> primes;
    std::uint64_t core = 1;
    for (const auto& pe : f) {
        if (pe.prime != 2) {
            primes.push_back(pe.prime);
            core *= pe.prime;
        }
    }
    stored_ = squarefree_half(core, primes, budget);
    rad_degree_ = 2 * (stored_.size() - 1);
}

std::int64_t RadicalPoly::value(std::uint64_t k) const
{
    if (k > rad_degree_) {
        return 0;
    }
    const std::uint64_t idx = mirrored_ ? std::min(k, rad_degree_ - k) : k;
    const std::int64_t v = stored_[idx];
    return negate_ && (k & 1) ? -v : v;
}

std::int64_t RadicalPoly::coefficient(std::uint64_t j) const
{
    if (j % stretch_ != 0) {
        return 0;
    }
    return value(j / stretch_);
}

std::int64_t CoeffSeq::at(std::uint64_t k) const
{
    if (k > degree) {
        return 0;
    }
    if (k < lo || k > hi) {
        throw std::out_of_range("index " + std::to_string(k) + " outside window [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]");
    }
    return coeffs[k - lo];
}

CoeffSeq coefficients(std::uint64_t n, std::optional<Window> window, std::uint64_t budget)
{
    RadicalPoly poly(n, budget);
    CoeffSeq seq;
    seq.n = n;
    seq.degree = poly.degree();
    const Window w = window.value_or(Window{0, n == 1 ? 1 : seq.degree / 2});
    if (w.lo > w.hi || w.hi > seq.degree) {
        throw std::invalid_argument("window [" + std::to_string(w.lo) + ", " + std::to_string(w.hi) +
                                    "] is not inside [0, " + std::to_string(seq.degree) + "]");
    }
    if (w.hi - w.lo + 1 > budget) {
        throw BudgetError("window of " + std::to_string(w.hi - w.lo + 1) + " coefficients exceeds budget " +
                          std::to_string(budget));
    }
    seq.lo = w.lo;
    seq.hi = w.hi;
    seq.coeffs.reserve(w.hi - w.lo + 1);
    for (std::uint64_t j = w.lo; j <= w.hi; ++j) {
        seq.coeffs.push_back(poly.coefficient(j));
    }
    return seq;
}

bool is_ternary(const Factorization& f)
{
    return f.size() == 3 && f[0].prime > 2 &&
           std::all_of(f.begin(), f.end(), [](const PrimePower& pe) { return pe.exponent == 1; });
}

HeightReport height_report(std::uint64_t n, std::uint64_t budget)
{
    if (n < 2) {
        throw std::invalid_argument("height_report requires n >= 2");
    }
    RadicalPoly poly(n, budget);
    const Sweep s = sweep(poly);

    HeightReport r;
    r.n = n;
    r.factorization = factorize(n);
    r.degree = poly.degree();
    r.Amax = s.amax;
    r.Amin = s.amin;
    r.A = std::max(s.amax, -s.amin);
    r.k_first = s.k_first;
    r.sign_at_k = s.sign;
    r.span = s.amax - s.amin;
    r.coeff_set_size = s.values.size();
    if (is_ternary(r.factorization)) {
        r.optimal = r.coeff_set_size == r.factorization[0].prime + 1;
    }
    r.ratio = static_cast<double>(r.k_first) / static_cast<double>(r.degree);
    if (r.A > 1) {
        r.exponent = std::log(static_cast<double>(n)) / std::log(static_cast<double>(r.A));
    }
    return r;
}

std::vector<std::int64_t> coefficient_set(std::uint64_t n, std::uint64_t budget)
{
    RadicalPoly poly(n, budget);
    return sweep(poly).values;
}

PrimeTriple PrimeTriple::make(std::uint64_t p, std::uint64_t q, std::uint64_t r)
{
    if (!(2 < p && p < q && q < r)) {
        throw std::invalid_argument("prime triple must satisfy 2 < p < q < r");
    }
    for (auto x : {p, q, r}) {
        if (!is_prime(x)) {
            throw std::invalid_argument(std::to_string(x) + " is not prime");
        }
    }
    return {p, q, r};
}

std::uint64_t PrimeTriple::product() const { return checked_mul(checked_mul(p, q), r); }

KaplanClass kaplan_class(const PrimeTriple& t)
{
    const std::uint64_t pq = t.p * t.q;
    if (t.r <= pq) {
        throw std::invalid_argument("Kaplan periodicity needs r > pq (r=" + std::to_string(t.r) +
                                    ", pq=" + std::to_string(pq) + ")");
    }
    const std::uint64_t c = t.r % pq;
    if (pq - c < c) {
        return {pq - c, true};
    }
    return {c, false};
}

void write_csv(std::ostream& os, const CoeffSeq& seq)
{
    for (std::size_t i = 0; i < seq.coeffs.size(); ++i) {
        os << seq.lo + i << ',' << seq.coeffs[i] << '\n';
    }
}

std::string to_json(const HeightReport& r)
{
    nlohmann::ordered_json j;
    j["n"] = r.n;
    auto f = nlohmann::ordered_json::array();
    for (const auto& pe : r.factorization) {
        f.push_back({pe.prime, pe.exponent});
    }
    j["factorization"] = f;
    j["degree"] = r.degree;
    j["A"] = r.A;
    j["Amax"] = r.Amax;
    j["Amin"] = r.Amin;
    j["k_first"] = r.k_first;
    j["sign_at_k"] = r.sign_at_k;
    j["span"] = r.span;
    j["coeff_set_size"] = r.coeff_set_size;
    j["optimal"] = r.optimal ? nlohmann::ordered_json(*r.optimal) : nlohmann::ordered_json(nullptr);
    j["ratio"] = r.ratio;
    j["exponent"] = r.exponent ? nlohmann::ordered_json(*r.exponent) : nlohmann::ordered_json(nullptr);
    return j.dump();
}

HeightReport height_report_from_json(const std::string& line)
{
    const auto j = nlohmann::json::parse(line);
    HeightReport r;
    r.n = j.at("n").get<std::uint64_t>();
    for (const auto& pe : j.at("factorization")) {
        r.factorization.push_back({pe.at(0).get<std::uint64_t>(), pe.at(1).get<unsigned>()});
    }
    r.degree = j.at("degree").get<std::uint64_t>();
    r.A = j.at("A").get<std::int64_t>();
    r.Amax = j.at("Amax").get<std::int64_t>();
    r.Amin = j.at("Amin").get<std::int64_t>();
    r.k_first = j.at("k_first").get<std::uint64_t>();
    r.sign_at_k = j.at("sign_at_k").get<int>();
    r.span = j.at("span").get<std::int64_t>();
    r.coeff_set_size = j.at("coeff_set_size").get<std::uint64_t>();
    if (!j.at("optimal").is_null()) {
        r.optimal = j.at("optimal").get<bool>();
    }
    r.ratio = j.at("ratio").get<double>();
    if (!j.at("exponent").is_null()) {
        r.exponent = j.at("exponent").get<double>();
    }
    return r;
}

}  // namespace cyclo
