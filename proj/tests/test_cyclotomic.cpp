#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>
#include <sstream>

#include "cyclo/cyclotomic.hpp"
#include "cyclo/primes.hpp"
#include "oracles.hpp"

using namespace cyclo;

namespace {

std::vector<std::int64_t> full(std::uint64_t n)
{
    const auto deg = totient(n);
    return coefficients(n, Window{0, deg}).coeffs;
}

}  // namespace

TEST_CASE("small polynomials")
{
    CHECK(full(1) == std::vector<std::int64_t>{-1, 1});
    CHECK(full(2) == std::vector<std::int64_t>{1, 1});
    CHECK(full(4) == std::vector<std::int64_t>{1, 0, 1});
    CHECK(full(6) == std::vector<std::int64_t>{1, -1, 1});
    CHECK(full(7) == std::vector<std::int64_t>(7, 1));
    CHECK(full(9) == std::vector<std::int64_t>{1, 0, 0, 1, 0, 0, 1});
    CHECK(coefficients(7).degree == 6);
}

TEST_CASE("a_105(7) and a_385(119)")
{
    CHECK(coefficients(105, Window{7, 7}).coeffs.at(0) == -2);
    CHECK(coefficients(385, Window{119, 119}).coeffs.at(0) == -3);
    // the upper half comes from the mirror
    CHECK(coefficients(105, Window{48 - 7, 48 - 7}).coeffs.at(0) == -2);
}

TEST_CASE("default window is the half range")
{
    const auto s = coefficients(105);
    CHECK(s.lo == 0);
    CHECK(s.hi == 24);
    CHECK(s.degree == 48);
    CHECK(s.at(7) == -2);
    CHECK(s.at(1000) == 0);
    CHECK_THROWS_AS(s.at(30), std::out_of_range);
}

TEST_CASE("window errors")
{
    CHECK_THROWS_AS(coefficients(0), std::invalid_argument);
    CHECK_THROWS_AS(coefficients(105, Window{10, 49}), std::invalid_argument);
    CHECK_THROWS_AS(coefficients(105, Window{10, 9}), std::invalid_argument);
    CHECK_THROWS_AS(height_report(1), std::invalid_argument);
}

TEST_CASE("budget is enforced")
{
    CHECK_THROWS_AS(coefficients(105, std::nullopt, 10), BudgetError);
    CHECK_THROWS_AS(height_report(79ULL * 233 * 239, 1000), BudgetError);
    CHECK_NOTHROW(coefficients(105, std::nullopt, 25));
}

TEST_CASE("stride passes detect overflow instead of wrapping")
{
    const auto big = std::numeric_limits<std::int64_t>::max();
    const auto small = std::numeric_limits<std::int64_t>::min();
    std::vector<std::int64_t> c{big, 1, 0};
    CHECK_THROWS_AS(detail::divide_pass(c, 1), OverflowError);

    std::vector<std::int64_t> d{1, small};
    CHECK_THROWS_AS(detail::multiply_pass(d, 1), OverflowError);

    // no false alarm right at the edge
    std::vector<std::int64_t> e{big - 1, 1};
    detail::divide_pass(e, 1);
    CHECK(e[1] == big);
}

TEST_CASE("coefficients agree with long division for n <= 300")
{
    oracle::DivisionTable table;
    for (std::uint64_t n = 1; n <= 300; ++n) {
        const auto& ref = table.phi(n);
        const auto got = full(n);
        REQUIRE_MESSAGE(oracle::Poly(got.begin(), got.end()) == ref, "n=" << n);
    }
}

TEST_CASE("product over divisors is x^n - 1 for n <= 200")
{
    for (std::uint64_t n = 1; n <= 200; ++n) {
        oracle::Poly prod{1};
        for (std::uint64_t d = 1; d <= n; ++d) {
            if (n % d == 0) {
                const auto c = full(d);
                prod = oracle::mul(prod, oracle::Poly(c.begin(), c.end()));
            }
        }
        oracle::Poly expect(n + 1, 0);
        expect[0] = -1;
        expect[n] = 1;
        REQUIRE_MESSAGE(prod == expect, "n=" << n);
    }
}

TEST_CASE("degree, value at 1 and palindromy up to 10^4")
{
    const auto phi = oracle::phi_sieve(10000);
    for (std::uint64_t n = 2; n <= 10000; ++n) {
        const auto c = full(n);
        REQUIRE(c.size() == phi[n] + 1);

        std::int64_t at1 = 0;
        for (auto v : c) {
            at1 += v;
        }
        // prime power p^k -> p, otherwise 1
        std::uint64_t p = 2;
        while (n % p) {
            ++p;
        }
        std::uint64_t m = n;
        while (m % p == 0) {
            m /= p;
        }
        const std::int64_t expect = m == 1 ? static_cast<std::int64_t>(p) : 1;
        REQUIRE_MESSAGE(at1 == expect, "n=" << n);

        REQUIRE_MESSAGE(std::equal(c.begin(), c.end(), c.rbegin()), "n=" << n);
    }
}

TEST_CASE("height reports")
{
    SUBCASE("105")
    {
        const auto r = height_report(105);
        CHECK(r.A == 2);
        CHECK(r.Amax == 1);
        CHECK(r.Amin == -2);
        CHECK(r.k_first == 7);
        CHECK(r.sign_at_k == -1);
        CHECK(r.span == 3);
        CHECK(r.coeff_set_size == 4);
        CHECK(r.optimal == true);
        CHECK(r.degree == 48);
        CHECK(r.ratio == doctest::Approx(7.0 / 48));
        REQUIRE(r.exponent);
        CHECK(*r.exponent == doctest::Approx(std::log(105.0) / std::log(2.0)));
    }
    SUBCASE("17*47*53")
    {
        const auto r = height_report(17 * 47 * 53);
        CHECK(r.A == 9);
        CHECK(r.k_first == 14538);
        CHECK(r.sign_at_k == -1);
        CHECK(r.span == 17);
        CHECK(r.optimal == true);
    }
    SUBCASE("231")
    {
        const auto r = height_report(231);
        CHECK(r.A == 1);
        CHECK(r.k_first == 0);
        CHECK(r.sign_at_k == 1);
        CHECK_FALSE(r.exponent.has_value());
    }
    SUBCASE("two odd primes")
    {
        for (std::uint64_t n : {15ULL, 35ULL, 3ULL * 101, 2ULL * 3 * 5, 4ULL * 9 * 5}) {
            CHECK(height_report(n).A == 1);
        }
        CHECK_FALSE(height_report(15).optimal.has_value());
    }
    SUBCASE("prime powers and Amin <= 0 < Amax")
    {
        CHECK(height_report(8).Amin == 0);
        CHECK(height_report(7).Amin == 1);
        for (std::uint64_t n = 2; n <= 3000; ++n) {
            const auto r = height_report(n);
            const auto f = factorize(n);
            REQUIRE(r.A == std::max(r.Amax, -r.Amin));
            if (f.size() > 1) {
                REQUIRE(r.Amin <= 0);
                REQUIRE(r.Amax > 0);
            }
        }
    }
}

TEST_CASE("height report agrees with the series oracle")
{
    for (std::uint64_t n = 2; n <= 1500; ++n) {
        const auto c = oracle::series_phi(n);
        const auto r = height_report(n);
        const auto a = oracle::height_of(c);
        REQUIRE(r.A == a);
        const auto it = std::find_if(c.begin(), c.end(), [&](auto v) { return v == a || v == -a; });
        REQUIRE(r.k_first == static_cast<std::uint64_t>(it - c.begin()));
        REQUIRE(r.sign_at_k == (*it < 0 ? -1 : 1));
        REQUIRE(r.Amax == *std::max_element(c.begin(), c.end()));
        REQUIRE(r.Amin == *std::min_element(c.begin(), c.end()));
        auto sorted = c;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        REQUIRE(r.coeff_set_size == sorted.size());
        REQUIRE(coefficient_set(n) == sorted);
    }
}

TEST_CASE("radical reduction")
{
    const auto a = reduce_to_radical(9 * 25 * 49);
    CHECK(a.core == 105);
    CHECK(a.stretch == 105);
    CHECK_FALSE(a.negate_odd_indices);
    CHECK(height_report(9 * 25 * 49).A == 2);

    const auto b = reduce_to_radical(7);
    CHECK(b.core == 7);
    CHECK(b.stretch == 1);
    CHECK_FALSE(b.negate_odd_indices);

    const auto c = reduce_to_radical(30);
    CHECK(c.core == 15);
    CHECK(c.stretch == 1);
    CHECK(c.negate_odd_indices);
    CHECK(height_report(30).A == 1);
    CHECK(height_report(15).A == 1);

    // index mapping against the oracle
    const std::uint64_t n = 2 * 2 * 3 * 3 * 5 * 7;
    const auto red = reduce_to_radical(n);
    const auto big = oracle::series_phi(n);
    const auto core = full(red.core);
    for (std::size_t j = 0; j < big.size(); ++j) {
        std::int64_t expect = 0;
        if (j % red.stretch == 0) {
            const auto k = j / red.stretch;
            expect = k < core.size() ? core[k] : 0;
            if (red.negate_odd_indices && (k & 1)) {
                expect = -expect;
            }
        }
        REQUIRE(big[j] == expect);
    }
    CHECK(height_report(n).A == oracle::height_of(big));
    CHECK_THROWS_AS(reduce_to_radical(0), std::invalid_argument);
}

TEST_CASE("exponent inflation keeps the height")
{
    std::mt19937_64 rng(20240611);
    const std::vector<std::uint64_t> small{3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43};
    int done = 0;
    while (done < 25) {
        std::uniform_int_distribution<std::size_t> pick(0, small.size() - 1);
        std::uint64_t p = small[pick(rng)], q = small[pick(rng)], r = small[pick(rng)];
        if (p == q || q == r || p == r) {
            continue;
        }
        std::uint64_t n = p * q * r;
        std::uniform_int_distribution<int> coin(0, 2);
        for (auto x : {p, q, r}) {
            for (int e = coin(rng); e > 0 && n * x <= 2'000'000; --e) {
                n *= x;
            }
        }
        const auto c = oracle::series_phi(n);
        CHECK_MESSAGE(oracle::height_of(c) == height_report(p * q * r).A, "n=" << n);
        CHECK(height_report(n).A == height_report(p * q * r).A);
        ++done;
    }
}

TEST_CASE("ternary structure")
{
    CHECK(is_ternary(factorize(105)));
    CHECK_FALSE(is_ternary(factorize(30)));
    CHECK_FALSE(is_ternary(factorize(9 * 5 * 7)));
    CHECK_FALSE(is_ternary(factorize(3 * 5 * 7 * 11)));
    CHECK(PrimeTriple::make(3, 5, 7).product() == 105);
    CHECK_THROWS_AS(PrimeTriple::make(5, 3, 7), std::invalid_argument);
    CHECK_THROWS_AS(PrimeTriple::make(3, 9, 11), std::invalid_argument);
    CHECK_THROWS_AS(PrimeTriple::make(2, 3, 5), std::invalid_argument);

    // jump-one and consecutive values on a small range; the full range runs in test_properties
    for (std::uint64_t p = 3; p < 30; p = next_prime(p)) {
        for (std::uint64_t q = next_prime(p); p * q < 2000; q = next_prime(q)) {
            for (std::uint64_t r = next_prime(q); p * q * r <= 100000; r = next_prime(r)) {
                const auto c = full(p * q * r);
                const auto jump = std::adjacent_find(c.begin(), c.end(),
                                                     [](auto a, auto b) { return std::abs(a - b) > 1; });
                REQUIRE(jump == c.end());
                const auto rep = height_report(p * q * r);
                REQUIRE(rep.coeff_set_size == static_cast<std::uint64_t>(rep.span + 1));
                REQUIRE(rep.A <= static_cast<std::int64_t>(p - 1));
                REQUIRE(rep.coeff_set_size <= p + 1);
                REQUIRE(*rep.optimal == (rep.coeff_set_size == p + 1));
            }
        }
    }
}

TEST_CASE("kaplan classes")
{
    const auto a = kaplan_class(PrimeTriple::make(3, 5, 17));
    const auto b = kaplan_class(PrimeTriple::make(3, 5, 47));
    const auto c = kaplan_class(PrimeTriple::make(3, 5, 43));
    CHECK(a.residue == 2);
    CHECK_FALSE(a.reflected);
    CHECK(a == b);
    CHECK(c.residue == 2);
    CHECK(c.reflected);
    CHECK(coefficient_set(3 * 5 * 17) == coefficient_set(3 * 5 * 47));

    auto neg = coefficient_set(3 * 5 * 43);
    for (auto& v : neg) {
        v = -v;
    }
    std::sort(neg.begin(), neg.end());
    CHECK(coefficient_set(3 * 5 * 17) == neg);

    CHECK_THROWS_AS(kaplan_class(PrimeTriple::make(3, 5, 7)), std::invalid_argument);
}

TEST_CASE("kaplan periodicity on random instances")
{
    std::mt19937_64 rng(7);
    const auto primes = primes_up_to(100);
    int done = 0;
    while (done < 20) {
        std::uniform_int_distribution<std::size_t> pick(1, primes.size() - 1);
        std::uint64_t p = primes[pick(rng)], q = primes[pick(rng)];
        if (p >= q || p * q > 200) {
            continue;
        }
        const std::uint64_t pq = p * q;
        const std::uint64_t rmax = 10'000'000 / pq;
        std::uniform_int_distribution<std::uint64_t> pr(pq + 1, rmax);
        const std::uint64_t r = next_prime(pr(rng));
        if (r > rmax) {
            continue;
        }
        auto s = smallest_prime_in_class(r % pq, pq, r).prime;
        auto t = smallest_prime_in_class(pq - r % pq, pq, pq).prime;
        if (!s || *s > rmax || !t || *t > rmax) {
            continue;
        }
        const auto base = coefficient_set(pq * r);
        CHECK(coefficient_set(pq * *s) == base);
        auto neg = coefficient_set(pq * *t);
        for (auto& v : neg) {
            v = -v;
        }
        std::sort(neg.begin(), neg.end());
        CHECK(neg == base);
        CHECK(kaplan_class(PrimeTriple::make(p, q, r)) == kaplan_class(PrimeTriple::make(p, q, *s)));
        ++done;
    }
}

TEST_CASE("csv and json output")
{
    std::ostringstream os;
    write_csv(os, coefficients(6, Window{0, 2}));
    CHECK(os.str() == "0,1\n1,-1\n2,1\n");

    const auto r = height_report(105);
    const auto js = to_json(r);
    CHECK(js.rfind("{\"n\":105,\"factorization\":[[3,1],[5,1],[7,1]],\"degree\":48,\"A\":2", 0) == 0);
    CHECK(to_json(height_report_from_json(js)) == js);
    const auto one = to_json(height_report(231));
    CHECK(one.find("\"exponent\":null") != std::string::npos);
    CHECK(to_json(height_report_from_json(one)) == one);
}
