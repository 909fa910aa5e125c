#pragma once

// Explicit ternary witnesses of a prescribed odd height h: with p >= 2h-1 and
// q = 1 + (h-1)p both prime, M(p;q) = h, and any prime r > q with
// r (p+q)/2 = 1 (mod pq) gives A(pqr) = h.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "cyclo/cyclotomic.hpp"
#include "cyclo/primes.hpp"

namespace cyclo {

/// A directly computed height contradicting the construction.
class WitnessContradiction : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// min{(q-1)/p + 1, (p+1)/2}; requires 2 < p < q prime with q = 1 (mod p).
std::uint64_t m_pq(std::uint64_t p, std::uint64_t q);

enum class Verification { unresolved, congruence_only, direct };
const char* to_string(Verification v);

struct TernaryWitness {
    std::uint64_t h = 0;
    std::optional<std::uint64_t> p;
    std::optional<std::uint64_t> q;
    std::uint64_t pq = 0;
    std::uint64_t r1 = 0;
    std::optional<std::uint64_t> r;
    Verification verified = Verification::unresolved;
    std::optional<std::int64_t> height;  // set when verified == direct
    std::optional<std::int64_t> amax;
    std::optional<std::int64_t> amin;
    std::string note;

    bool complete() const { return p && q && r; }
};

inline constexpr std::uint64_t kDefaultVerifyBudget = 20'000'000;

/// Smallest prime p >= 2h-1 (<= p_cap) with q prime, then the smallest prime r > q
/// (<= r_cap, 0 = unbounded) in the residue class of r1. `forced_p` skips the p search.
TernaryWitness with_wilms(std::uint64_t h, std::uint64_t p_cap, std::uint64_t r_cap = 0,
                          std::optional<std::uint64_t> forced_p = std::nullopt);

/// Re-checks q = 1 (mod p), M(p;q) = h and r (p+q)/2 = 1 (mod pq); computes A(pqr) directly
/// when phi(pqr)/2 <= coeff_budget. Throws WitnessContradiction if the direct height differs
/// from h, std::invalid_argument if the witness is structurally broken.
TernaryWitness verify_witness(TernaryWitness w, std::uint64_t coeff_budget = kDefaultVerifyBudget);

std::string to_json(const TernaryWitness& w);

struct GRecord {
    std::uint64_t m = 0;
    std::optional<std::uint64_t> p;  // least prime in (4m, 32m) with 1 + 2mp prime
};

struct GScan {
    std::vector<GRecord> records;
    double density = 0.0;
};

GScan g_scan(std::uint64_t max_m, unsigned threads = 1);

/// #{p prime in [x/2, x) : 1 + 2mp prime}.
std::uint64_t pi_m(std::uint64_t m, double x);

using HighPrecision = boost::multiprecision::cpp_bin_float_50;

struct ConstantsReport {
    std::uint64_t cutoff = 0;
    HighPrecision C1_truncated;
    HighPrecision C2_truncated;
    /// Truncated products times the integral estimate of the prime tail.
    HighPrecision C1;
    HighPrecision C2;
    HighPrecision c_prime;  // (log 2)^2 / (1024 C1 C2^2)
    /// Rigorous bounds on |C - C_truncated|; the corrected values lie in the same interval.
    HighPrecision tail_bound_C1;
    HighPrecision tail_bound_C2;
    HighPrecision tail_bound;
};

/// Euler products over odd primes <= cutoff (cutoff >= 1000).
ConstantsReport constants(std::uint64_t cutoff);
HighPrecision c_prime_from(const HighPrecision& c1, const HighPrecision& c2);
std::string to_json(const ConstantsReport& r);

struct LinnikWitness {
    TernaryWitness witness;
    bool r1_even = false;
    std::optional<std::uint64_t> s;  // auxiliary prime, odd r1 only
    double epsilon = 0.0;
    bool s_within_delta = true;  // s < (pq)^epsilon
    std::optional<double> exponent;  // log(pqr) / log(h)
};

/// Construction with p in (4m, 32m), m = (h-1)/2: r = p_0(r1, pq) for even r1, otherwise
/// r = p_0(r1 + pq, s pq) with s the least prime not dividing r1 + pq.
LinnikWitness linnik_witness(std::uint64_t h, double epsilon,
                             std::uint64_t max_candidates = kDefaultProgressionCandidates);

std::string to_json(const LinnikWitness& w);

}  // namespace cyclo
