#include "cyclo/arith.hpp"

#include <cmath>
#include <sstream>

namespace cyclo {

Factorization factorize(std::uint64_t n)
{
    if (n == 0) {
        throw std::invalid_argument("factorize: n must be positive");
    }
    Factorization f;
    auto pull = [&](std::uint64_t p) {
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) {
            f.push_back({p, e});
        }
    };
    pull(2);
    pull(3);
    for (std::uint64_t p = 5; p <= n / p; p += 6) {
        pull(p);
        pull(p + 2);
    }
    if (n > 1) {
        f.push_back({n, 1});
    }
    return f;
}

std::uint64_t totient(const Factorization& f)
{
    std::uint64_t t = 1;
    for (const auto& [p, e] : f) {
        t = checked_mul(t, p - 1);
        for (unsigned i = 1; i < e; ++i) {
            t = checked_mul(t, p);
        }
    }
    return t;
}

std::uint64_t totient(std::uint64_t n) { return totient(factorize(n)); }

std::uint64_t radical(const Factorization& f)
{
    std::uint64_t r = 1;
    for (const auto& pe : f) {
        r *= pe.prime;
    }
    return r;
}

int mobius(std::uint64_t n)
{
    int mu = 1;
    for (const auto& pe : factorize(n)) {
        if (pe.exponent > 1) {
            return 0;
        }
        mu = -mu;
    }
    return mu;
}

std::uint64_t isqrt(std::uint64_t n)
{
    auto s = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
    while (s > 0 && (s > n / s || s * s > n)) {
        --s;
    }
    while ((s + 1) <= n / (s + 1)) {
        ++s;
    }
    return s;
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b)
{
    while (b) {
        a %= b;
        std::swap(a, b);
    }
    return a;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m)
{
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) {
            result = mulmod(result, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m)
{
    if (m == 0) {
        throw std::invalid_argument("inverse_mod: zero modulus");
    }
    __int128 old_r = static_cast<__int128>(a % m), r = m;
    __int128 old_s = 1, s = 0;
    while (r != 0) {
        __int128 q = old_r / r;
        old_r -= q * r;
        std::swap(old_r, r);
        old_s -= q * s;
        std::swap(old_s, s);
    }
    if (old_r != 1) {
        throw std::invalid_argument("inverse_mod: " + std::to_string(a) + " is not invertible mod " +
                                    std::to_string(m));
    }
    old_s %= static_cast<__int128>(m);
    if (old_s < 0) {
        old_s += m;
    }
    return static_cast<std::uint64_t>(old_s);
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t out;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw OverflowError("64-bit overflow in " + std::to_string(a) + " * " + std::to_string(b));
    }
    return out;
}

std::string to_string(const Factorization& f)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) {
            os << '*';
        }
        os << f[i].prime;
        if (f[i].exponent > 1) {
            os << '^' << f[i].exponent;
        }
    }
    return os.str();
}

}  // namespace cyclo
