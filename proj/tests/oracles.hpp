#pragma once

// Slow reference implementations for the tests. Nothing here calls into the
// library's cyclotomic code.

#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracle {

using Poly = std::vector<__int128>;

inline Poly mul(const Poly& a, const Poly& b)
{
    Poly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            c[i + j] += a[i] * b[j];
        }
    }
    return c;
}

// a / b for monic b; throws when the remainder is nonzero
inline Poly exact_div(Poly a, const Poly& b)
{
    if (b.back() != 1) {
        throw std::logic_error("divisor not monic");
    }
    const std::size_t db = b.size() - 1;
    Poly q(a.size() - db, 0);
    for (std::size_t i = a.size(); i-- > db;) {
        const __int128 c = a[i];
        q[i - db] = c;
        for (std::size_t j = 0; j <= db; ++j) {
            a[i - db + j] -= c * b[j];
        }
    }
    for (std::size_t i = 0; i < db; ++i) {
        if (a[i] != 0) {
            throw std::logic_error("inexact division");
        }
    }
    return q;
}

// Phi_n by x^n - 1 divided by every Phi_d, d | n, d < n.
class DivisionTable {
public:
    const Poly& phi(std::uint64_t n)
    {
        auto it = memo_.find(n);
        if (it != memo_.end()) {
            return it->second;
        }
        Poly num(n + 1, 0);
        num[0] = -1;
        num[n] = 1;
        for (std::uint64_t d = 1; d < n; ++d) {
            if (n % d == 0) {
                num = exact_div(num, phi(d));
            }
        }
        return memo_[n] = num;
    }

private:
    std::map<std::uint64_t, Poly> memo_;
};

inline std::vector<std::uint64_t> phi_sieve(std::uint64_t limit)
{
    std::vector<std::uint64_t> phi(limit + 1);
    std::iota(phi.begin(), phi.end(), 0);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (phi[i] == i) {
            for (std::uint64_t j = i; j <= limit; j += i) {
                phi[j] -= phi[j] / i;
            }
        }
    }
    return phi;
}

inline bool trial_prime(std::uint64_t n)
{
    if (n < 2) {
        return false;
    }
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            return false;
        }
    }
    return true;
}

inline int trial_mobius(std::uint64_t n)
{
    int mu = 1;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            n /= d;
            if (n % d == 0) {
                return 0;
            }
            mu = -mu;
        }
    }
    return n > 1 ? -mu : mu;
}

// All coefficients of Phi_n from prod_{d|n} (1 - x^d)^{mu(n/d)} as a series of
// full length phi(n)+1, no radical reduction, no mirroring. n > 1.
inline std::vector<std::int64_t> series_phi(std::uint64_t n)
{
    std::uint64_t deg = n;
    std::uint64_t rest = n;
    for (std::uint64_t d = 2; d * d <= rest; ++d) {
        if (rest % d == 0) {
            deg -= deg / d;
            while (rest % d == 0) {
                rest /= d;
            }
        }
    }
    if (rest > 1) {
        deg -= deg / rest;
    }
    std::vector<__int128> c(deg + 1, 0);
    c[0] = 1;
    std::vector<std::pair<std::uint64_t, int>> facs;
    for (std::uint64_t d = 1; d <= n; ++d) {
        if (n % d == 0) {
            const int mu = trial_mobius(n / d);
            if (mu != 0) {
                facs.emplace_back(d, mu);
            }
        }
    }
    for (auto [d, mu] : facs) {
        if (d > deg) {
            continue;
        }
        if (mu == 1) {
            for (std::size_t i = deg; i >= d; --i) {
                c[i] -= c[i - d];
            }
        } else {
            for (std::size_t i = d; i <= deg; ++i) {
                c[i] += c[i - d];
            }
        }
    }
    return std::vector<std::int64_t>(c.begin(), c.end());
}

inline std::int64_t height_of(const std::vector<std::int64_t>& c)
{
    std::int64_t a = 0;
    for (auto v : c) {
        a = std::max(a, v < 0 ? -v : v);
    }
    return a;
}

}  // namespace oracle
