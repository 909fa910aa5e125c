#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cyclo {

/// Raised when an exact 64-bit computation would wrap.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// Raised when a request exceeds the configured memory budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PrimePower {
    std::uint64_t prime;
    unsigned exponent;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

using Factorization = std::vector<PrimePower>;

/// Trial division; fine for the n this toolkit handles (n < 2^63, small factors or n <= ~1e14).
Factorization factorize(std::uint64_t n);

std::uint64_t totient(const Factorization& f);
std::uint64_t totient(std::uint64_t n);
std::uint64_t radical(const Factorization& f);

/// Moebius function of a squarefree-or-not n.
int mobius(std::uint64_t n);

/// Largest s with s*s <= n.
std::uint64_t isqrt(std::uint64_t n);

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

/// Inverse of a modulo m; throws std::invalid_argument when gcd(a, m) != 1.
std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m);

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b);

std::string to_string(const Factorization& f);

}  // namespace cyclo
