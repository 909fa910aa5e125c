#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace cyclo {

/// Deterministic for every 64-bit input (strong-pseudoprime test, 7-base set).
bool is_prime(std::uint64_t n);

/// Smallest prime > n; throws OverflowError past 2^64.
std::uint64_t next_prime(std::uint64_t n);

/// Plain sieve of Eratosthenes, primes <= limit.
std::vector<std::uint64_t> simple_sieve(std::uint64_t limit);

/// Calls `fn(p)` for every prime p in [lo, hi], ascending, using a segmented sieve
/// with O(sqrt(hi) + segment) memory.
void for_each_prime(std::uint64_t lo, std::uint64_t hi, const std::function<void(std::uint64_t)>& fn);

/// Primes <= limit via the segmented sieve.
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

/// Bit table answering primality below a bound, falling back to is_prime above it.
class PrimeTable {
public:
    explicit PrimeTable(std::uint64_t limit);

    bool operator()(std::uint64_t n) const
    {
        if (n <= limit_) {
            return n == 2 || ((n & 1) && odd_[n >> 1]);
        }
        return is_prime(n);
    }
    std::uint64_t limit() const { return limit_; }

private:
    std::uint64_t limit_;
    std::vector<bool> odd_;  // odd_[i] <=> 2i+1 prime
};

struct GapRecord {
    std::uint64_t p = 0;
    std::uint64_t p_next = 0;
    std::uint64_t d = 0;

    friend bool operator==(const GapRecord&, const GapRecord&) = default;
};

/// d < sqrt(p) + 1, decided as (d-1)^2 < p.
bool sqrt_gap_ok(std::uint64_t p, std::uint64_t d);

/// sqrt(p_next) - sqrt(p) < 1, decided as (p_next - p - 1)^2 < 4p.
bool andrica_ok(std::uint64_t p, std::uint64_t p_next);

/// d >= c*sqrt(p).
bool gap_at_least_scaled_sqrt(std::uint64_t p, std::uint64_t d, double c);

struct GapSummary {
    std::uint64_t x = 0;
    double c = 1.0;
    std::uint64_t gap_count = 0;
    std::uint64_t d_total = 0;       // telescopes to (first prime > x) - 2
    std::vector<GapRecord> exceptions;  // !sqrt_gap_ok
    double e_sum = 0.0;
    std::uint64_t hb_sum = 0;
    std::uint64_t yu_sum = 0;
    std::vector<GapRecord> andrica_violations;
};

/// One pass over all gaps (p_n, p_{n+1}) with p_n <= x. The range is split into
/// `threads` independently sieved chunks; boundary gaps are stitched in order.
GapSummary gap_summary(std::uint64_t x, double c = 1.0, unsigned threads = 1);

/// Calls fn for every gap with p <= x, ascending.
void for_each_gap(std::uint64_t x, const std::function<void(const GapRecord&)>& fn);

/// Default candidate cap for progression searches.
inline constexpr std::uint64_t kDefaultProgressionCandidates = 1'000'000;

struct ProgressionResult {
    std::optional<std::uint64_t> prime;  // empty when the cap was exhausted
    std::uint64_t candidates_scanned = 0;
};

/// Least prime > floor congruent to a mod d, scanning at most `max_candidates` terms
/// and never beyond `value_cap` (0 = unbounded). Throws std::invalid_argument if gcd(a,d) != 1.
ProgressionResult smallest_prime_in_class(std::uint64_t a, std::uint64_t d, std::uint64_t floor,
                                          std::uint64_t max_candidates = kDefaultProgressionCandidates,
                                          std::uint64_t value_cap = 0);

}  // namespace cyclo
