#pragma once

// Exact coefficients and heights of cyclotomic polynomials.
//
// Phi_n is reduced to its odd squarefree core m: Phi_n(x) = Phi_rad(n)(x^{n/rad(n)}) and
// Phi_{2m}(x) = Phi_m(-x) for odd m > 1. For the core we evaluate
//
//     Phi_m(x) = prod_{d | m} (1 - x^d)^{mu(m/d)}
//
// as a power series truncated at phi(m)/2, one stride pass per divisor, and
// recover the upper half from palindromy.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cyclo/arith.hpp"

namespace cyclo {

/// Maximum number of 64-bit half-coefficients a single computation may allocate.
inline constexpr std::uint64_t kDefaultCoeffBudget = 100'000'000;

struct Window {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;  // inclusive
};

/// Coefficients a_n(lo), ..., a_n(hi).
struct CoeffSeq {
    std::uint64_t n = 0;
    std::uint64_t degree = 0;
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    std::vector<std::int64_t> coeffs;

    /// a_n(k) for k inside the window; zero past the degree.
    std::int64_t at(std::uint64_t k) const;
};

struct RadicalReduction {
    std::uint64_t core = 1;      // odd part of rad(n)
    std::uint64_t stretch = 1;   // n / rad(n)
    bool negate_odd_indices = false;
};

/// Phi_n(x) = (+-)Phi_core((-1)^neg x^stretch); a_n(k*stretch) = (-1)^{k*neg} a_core(k),
/// zero at indices not divisible by stretch. For n a power of two the core is 1 and
/// Phi_n(x) = 1 + x^{n/2}; this case is handled directly and not via Phi_1.
RadicalReduction reduce_to_radical(std::uint64_t n);

/// Coefficients of Phi_rad(n) over [0, phi(rad)/2], with the reductions applied and
/// palindromy available through value(). Index k refers to Phi_rad(n), not Phi_n.
class RadicalPoly {
public:
    RadicalPoly(std::uint64_t n, std::uint64_t budget = kDefaultCoeffBudget);

    std::uint64_t n() const { return n_; }
    std::uint64_t rad() const { return rad_; }
    std::uint64_t stretch() const { return stretch_; }
    std::uint64_t rad_degree() const { return rad_degree_; }
    std::uint64_t degree() const { return rad_degree_ * stretch_; }

    /// a_rad(k), 0 <= k.
    std::int64_t value(std::uint64_t k) const;
    /// a_n(j).
    std::int64_t coefficient(std::uint64_t j) const;

    /// Stored half (or full, for n with rad(n) <= 2) of the core sequence, before sign twisting.
    std::span<const std::int64_t> stored() const { return stored_; }
    bool negate_odd_indices() const { return negate_; }
    bool mirrored() const { return mirrored_; }

private:
    std::uint64_t n_;
    std::uint64_t rad_;
    std::uint64_t stretch_;
    std::uint64_t rad_degree_;
    bool negate_ = false;
    bool mirrored_ = true;
    std::vector<std::int64_t> stored_;
};

/// Half-range coefficients of Phi_m for odd squarefree m > 1, indices 0..phi(m)/2.
/// `primes` are the prime factors of m.
std::vector<std::int64_t> squarefree_half(std::uint64_t m, std::span<const std::uint64_t> primes,
                                          std::uint64_t budget = kDefaultCoeffBudget);

/// Without a window the half range [0, phi(n)/2] is returned (full range for n = 1).
CoeffSeq coefficients(std::uint64_t n, std::optional<Window> window = std::nullopt,
                      std::uint64_t budget = kDefaultCoeffBudget);

struct HeightReport {
    std::uint64_t n = 0;
    Factorization factorization;
    std::uint64_t degree = 0;
    std::int64_t A = 0;
    std::int64_t Amax = 0;
    std::int64_t Amin = 0;
    std::uint64_t k_first = 0;
    int sign_at_k = 1;
    std::int64_t span = 0;
    std::uint64_t coeff_set_size = 0;
    std::optional<bool> optimal;  // only for ternary n
    double ratio = 0.0;
    std::optional<double> exponent;  // only for A > 1
};

HeightReport height_report(std::uint64_t n, std::uint64_t budget = kDefaultCoeffBudget);

/// n = pqr with 2 < p < q < r primes.
bool is_ternary(const Factorization& f);

struct PrimeTriple {
    std::uint64_t p, q, r;

    /// Throws std::invalid_argument unless 2 < p < q < r, all prime.
    static PrimeTriple make(std::uint64_t p, std::uint64_t q, std::uint64_t r);
    std::uint64_t product() const;
};

struct KaplanClass {
    std::uint64_t residue;
    bool reflected;

    friend bool operator==(const KaplanClass&, const KaplanClass&) = default;
};

/// Canonical class of r modulo pq; the coefficient set of Phi_pqr depends only on it
/// (negated when `reflected`). Requires r > pq.
KaplanClass kaplan_class(const PrimeTriple& t);

/// Sorted distinct coefficient values of Phi_n.
std::vector<std::int64_t> coefficient_set(std::uint64_t n, std::uint64_t budget = kDefaultCoeffBudget);

void write_csv(std::ostream& os, const CoeffSeq& seq);

namespace detail {
/// c[i] += c[i-d], ascending (division by 1 - x^d). Throws OverflowError.
void divide_pass(std::span<std::int64_t> c, std::size_t d, std::uint64_t tag = 0);
/// c[i] -= c[i-d], descending (multiplication by 1 - x^d). Throws OverflowError.
void multiply_pass(std::span<std::int64_t> c, std::size_t d, std::uint64_t tag = 0);
}  // namespace detail

std::string to_json(const HeightReport& r);
HeightReport height_report_from_json(const std::string& line);

}  // namespace cyclo
