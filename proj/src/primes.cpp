#include "cyclo/primes.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "cyclo/arith.hpp"

namespace cyclo {

bool is_prime(std::uint64_t n)
{
    if (n < 2) {
        return false;
    }
    for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) {
            return n == p;
        }
    }
    if (n < 41 * 41) {
        return true;
    }
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // Jim Sinclair's base set, deterministic below 2^64.
    for (std::uint64_t a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
        a %= n;
        if (a == 0) {
            continue;
        }
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) {
            continue;
        }
        bool composite = true;
        for (unsigned r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) {
            return false;
        }
    }
    return true;
}

std::uint64_t next_prime(std::uint64_t n)
{
    do {
        if (n == UINT64_MAX) {
            throw OverflowError("no prime above " + std::to_string(n) + " fits in 64 bits");
        }
        ++n;
    } while (!is_prime(n));
    return n;
}

std::vector<std::uint64_t> simple_sieve(std::uint64_t limit)
{
    std::vector<std::uint64_t> out;
    if (limit < 2) {
        return out;
    }
    std::vector<bool> composite(limit + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) {
            continue;
        }
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= limit; j += i) {
            composite[j] = true;
        }
    }
    return out;
}

void for_each_prime(std::uint64_t lo, std::uint64_t hi, const std::function<void(std::uint64_t)>& fn)
{
    if (hi < 2 || lo > hi) {
        return;
    }
    if (lo <= 2) {
        fn(2);
    }
    std::uint64_t start = std::max<std::uint64_t>(lo, 3);
    if ((start & 1) == 0) {
        ++start;
    }
    if (start > hi) {
        return;
    }
    const auto base = simple_sieve(isqrt(hi));
    constexpr std::uint64_t kSegment = 1 << 18;  // odd numbers per segment
    std::vector<char> composite(kSegment);
    for (std::uint64_t low = start; low <= hi;) {
        const std::uint64_t count = std::min(kSegment, (hi - low) / 2 + 1);
        const std::uint64_t top = low + 2 * (count - 1);
        std::fill(composite.begin(), composite.begin() + static_cast<std::ptrdiff_t>(count), 0);
        for (std::size_t i = 1; i < base.size(); ++i) {
            const std::uint64_t p = base[i];
            if (p * p > top) {
                break;
            }
            std::uint64_t m = std::max(p * p, (low + p - 1) / p * p);
            if ((m & 1) == 0) {
                m += p;
            }
            for (std::uint64_t j = (m - low) / 2; j < count; j += p) {
                composite[j] = 1;
            }
        }
        for (std::uint64_t j = 0; j < count; ++j) {
            if (!composite[j]) {
                fn(low + 2 * j);
            }
        }
        if (top >= hi || top + 2 < top) {
            break;
        }
        low = top + 2;
    }
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit)
{
    std::vector<std::uint64_t> out;
    if (limit >= 100) {
        const double l = static_cast<double>(limit);
        out.reserve(static_cast<std::size_t>(1.26 * l / std::log(l)));
    }
    for_each_prime(2, limit, [&](std::uint64_t p) { out.push_back(p); });
    return out;
}

PrimeTable::PrimeTable(std::uint64_t limit) : limit_(limit), odd_(limit / 2 + 1, true)
{
    odd_[0] = false;  // 1
    for (std::uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= limit; ++i) {
        if (!odd_[i]) {
            continue;
        }
        const std::uint64_t p = 2 * i + 1;
        for (std::uint64_t j = p * p / 2; j < odd_.size(); j += p) {
            odd_[j] = false;
        }
    }
}

bool sqrt_gap_ok(std::uint64_t p, std::uint64_t d)
{
    if (d == 0) {
        return true;
    }
    const auto t = static_cast<unsigned __int128>(d - 1);
    return t * t < p;
}

bool andrica_ok(std::uint64_t p, std::uint64_t p_next)
{
    if (p_next <= p) {
        throw std::invalid_argument("andrica_ok requires p < p_next");
    }
    const auto t = static_cast<unsigned __int128>(p_next - p - 1);
    return t * t < static_cast<unsigned __int128>(p) * 4;
}

bool gap_at_least_scaled_sqrt(std::uint64_t p, std::uint64_t d, double c)
{
    if (c <= 0) {
        return true;
    }
    if (c == 1.0) {
        return static_cast<unsigned __int128>(d) * d >= p;
    }
    const long double lhs = static_cast<long double>(d) * static_cast<long double>(d);
    const long double cc = static_cast<long double>(c);
    return lhs >= cc * cc * static_cast<long double>(p);
}

namespace {

struct Chunk {
    std::optional<std::uint64_t> first;
    std::uint64_t last = 0;
    GapSummary acc;
};

void accumulate(GapSummary& s, const GapRecord& g)
{
    ++s.gap_count;
    s.d_total += g.d;
    s.yu_sum += g.d * g.d;
    if (!sqrt_gap_ok(g.p, g.d)) {
        s.exceptions.push_back(g);
    }
    if (gap_at_least_scaled_sqrt(g.p, g.d, s.c)) {
        s.hb_sum += g.d;
    }
    if (!andrica_ok(g.p, g.p_next)) {
        s.andrica_violations.push_back(g);
    }
}

void merge_into(GapSummary& dst, const GapSummary& src)
{
    dst.gap_count += src.gap_count;
    dst.d_total += src.d_total;
    dst.yu_sum += src.yu_sum;
    dst.hb_sum += src.hb_sum;
    dst.exceptions.insert(dst.exceptions.end(), src.exceptions.begin(), src.exceptions.end());
    dst.andrica_violations.insert(dst.andrica_violations.end(), src.andrica_violations.begin(),
                                  src.andrica_violations.end());
}

}  // namespace

GapSummary gap_summary(std::uint64_t x, double c, unsigned threads)
{
    if (x < 2) {
        throw std::invalid_argument("gap_summary requires x >= 2");
    }
    threads = std::max(1u, threads);
    const std::uint64_t span = x - 1;  // numbers 2..x
    const std::uint64_t parts = std::min<std::uint64_t>(threads, std::max<std::uint64_t>(1, span / 1'000'000));

    std::vector<Chunk> chunks(parts);
    auto work = [&](std::uint64_t i) {
        const std::uint64_t lo = 2 + span * i / parts;
        const std::uint64_t hi = 2 + span * (i + 1) / parts - 1;
        Chunk& ch = chunks[i];
        ch.acc.c = c;
        for_each_prime(lo, hi, [&](std::uint64_t p) {
            if (ch.first) {
                accumulate(ch.acc, {ch.last, p, p - ch.last});
            } else {
                ch.first = p;
            }
            ch.last = p;
        });
    };
    if (parts == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::uint64_t i = 0; i < parts; ++i) {
            pool.emplace_back(work, i);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    GapSummary out;
    out.x = x;
    out.c = c;
    std::optional<std::uint64_t> last;
    for (const auto& ch : chunks) {
        if (!ch.first) {
            continue;
        }
        if (last) {
            accumulate(out, {*last, *ch.first, *ch.first - *last});
        }
        merge_into(out, ch.acc);
        last = ch.last;
    }
    const std::uint64_t tail = next_prime(*last);
    accumulate(out, {*last, tail, tail - *last});

    std::sort(out.exceptions.begin(), out.exceptions.end(), [](auto& a, auto& b) { return a.p < b.p; });
    std::sort(out.andrica_violations.begin(), out.andrica_violations.end(),
              [](auto& a, auto& b) { return a.p < b.p; });
    long double e = 0;
    for (const auto& g : out.exceptions) {
        e += static_cast<long double>(g.d) - std::sqrt(static_cast<long double>(g.p)) + 1;
    }
    out.e_sum = static_cast<double>(e);
    return out;
}

void for_each_gap(std::uint64_t x, const std::function<void(const GapRecord&)>& fn)
{
    std::optional<std::uint64_t> last;
    for_each_prime(2, x, [&](std::uint64_t p) {
        if (last) {
            fn({*last, p, p - *last});
        }
        last = p;
    });
    if (last) {
        const std::uint64_t tail = next_prime(*last);
        fn({*last, tail, tail - *last});
    }
}

ProgressionResult smallest_prime_in_class(std::uint64_t a, std::uint64_t d, std::uint64_t floor,
                                          std::uint64_t max_candidates, std::uint64_t value_cap)
{
    if (d == 0) {
        throw std::invalid_argument("progression modulus must be positive");
    }
    if (gcd(a % d, d) != 1) {
        throw std::invalid_argument("gcd(" + std::to_string(a) + ", " + std::to_string(d) + ") != 1");
    }
    ProgressionResult res;
    const unsigned __int128 start = static_cast<unsigned __int128>(floor) + 1;
    const std::uint64_t offset = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a % d) + d - static_cast<std::uint64_t>(start % d)) % d);
    unsigned __int128 c = start + offset;
    for (; res.candidates_scanned < max_candidates; ++res.candidates_scanned, c += d) {
        if (c > UINT64_MAX || (value_cap && c > value_cap)) {
            break;
        }
        if (is_prime(static_cast<std::uint64_t>(c))) {
            ++res.candidates_scanned;
            res.prime = static_cast<std::uint64_t>(c);
            break;
        }
    }
    return res;
}

}  // namespace cyclo
