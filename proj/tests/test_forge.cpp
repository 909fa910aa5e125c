#include <doctest.h>

#include <cmath>

#include "cyclo/forge.hpp"
#include "oracles.hpp"

using namespace cyclo;

namespace {

// plain long double Euler products over 2 < p <= cutoff
std::pair<long double, long double> truncated_products(std::uint64_t cutoff)
{
    long double c1 = 1, c2 = 1;
    for (auto p : simple_sieve(cutoff)) {
        if (p == 2) {
            continue;
        }
        const long double x = static_cast<long double>(p);
        c1 *= 1 + 2 / (x * (x - 2)) + 1 / (x * (x - 2) * (x - 2));
        c2 *= 1 - 1 / ((x - 1) * (x - 1));
    }
    return {c1, c2};
}

}  // namespace

TEST_CASE("M(p;q)")
{
    CHECK(m_pq(5, 11) == 3);
    CHECK(m_pq(131, 8123) == 63);
    CHECK(m_pq(3, 7) == 2);
    CHECK_THROWS_AS(m_pq(5, 13), std::invalid_argument);
    CHECK_THROWS_AS(m_pq(11, 5), std::invalid_argument);
}

TEST_CASE("with_wilms and direct verification for h = 3, 5, 7, 9")
{
    struct Expect {
        std::uint64_t h, p, q;
    };
    for (auto e : {Expect{3, 5, 11}, Expect{5, 13, 53}, Expect{7, 13, 79}, Expect{9, 17, 137}}) {
        auto w = with_wilms(e.h, 10000);
        REQUIRE(w.complete());
        CHECK(w.verified == Verification::congruence_only);
        CHECK(*w.p == e.p);
        CHECK(*w.q == e.q);
        CHECK(*w.q == 1 + (e.h - 1) * *w.p);
        CHECK(*w.p >= 2 * e.h - 1);
        CHECK(m_pq(*w.p, *w.q) == e.h);
        // inverse re-checked without inverse_mod
        CHECK(static_cast<unsigned __int128>(w.r1) * ((*w.p + *w.q) / 2) % w.pq == 1);
        CHECK(*w.r % w.pq == w.r1);
        CHECK(*w.r > *w.q);
        CHECK(oracle::trial_prime(*w.r));
        // r is the first prime in its class past q
        for (std::uint64_t c = w.r1; c < *w.r; c += w.pq) {
            if (c > *w.q) {
                CHECK_FALSE(oracle::trial_prime(c));
            }
        }

        w = verify_witness(w);
        CHECK(w.verified == Verification::direct);
        REQUIRE(w.height);
        CHECK(*w.height == static_cast<std::int64_t>(e.h));
    }

    const auto w3 = with_wilms(3, 100);
    CHECK(w3.r1 == 7);
    CHECK(w3.r == 227);
    CHECK(height_report(5 * 11 * 227).A == 3);
    CHECK(inverse_mod(33, 689) == with_wilms(5, 100).r1);
}

TEST_CASE("the h = 63 witness passes the congruence checks")
{
    auto w = with_wilms(63, 1000, 0, 131);
    REQUIRE(w.complete());
    CHECK(*w.q == 8123);
    CHECK(*w.r == 25497973);
    CHECK(w.pq == 1064113);
    CHECK(25497973ULL * 4127 % 1064113 == 1);
    w = verify_witness(w);
    CHECK(w.verified == Verification::congruence_only);
    CHECK_FALSE(w.height.has_value());

    TernaryWitness hand;
    hand.h = 63;
    hand.p = 131;
    hand.q = 8123;
    hand.r = 25497973;
    CHECK(verify_witness(hand).verified == Verification::congruence_only);
}

TEST_CASE("verify_witness rejects broken witnesses")
{
    TernaryWitness w;
    w.h = 3;
    w.p = 5;
    w.q = 11;
    w.r = 229;  // prime, wrong class
    CHECK_THROWS_AS(verify_witness(w), std::invalid_argument);
    w.r = 227;
    w.h = 5;  // M(5;11) = 3
    CHECK_THROWS_AS(verify_witness(w), std::invalid_argument);
    w.h = 3;
    w.q = 13;
    CHECK_THROWS_AS(verify_witness(w), std::invalid_argument);
    w.q = 11;
    CHECK(verify_witness(w).verified == Verification::direct);
    // the budget decides between direct and congruence-only
    CHECK(verify_witness(w, 100).verified == Verification::congruence_only);
}

TEST_CASE("caps give unresolved witnesses")
{
    const auto a = with_wilms(3, 4);
    CHECK_FALSE(a.complete());
    CHECK(a.verified == Verification::unresolved);
    CHECK_FALSE(a.p.has_value());

    const auto b = with_wilms(3, 100, 100);  // r = 227 lies past the cap
    CHECK(b.p == 5u);
    CHECK_FALSE(b.r.has_value());
    CHECK(b.verified == Verification::unresolved);
    CHECK(verify_witness(b).verified == Verification::unresolved);

    CHECK_THROWS_AS(with_wilms(4, 100), std::invalid_argument);
    CHECK_THROWS_AS(with_wilms(1, 100), std::invalid_argument);
}

TEST_CASE("A+ and A- both reach the witness height")
{
    for (std::uint64_t h : {3ULL, 5ULL, 7ULL}) {
        const auto w = with_wilms(h, 1000);
        REQUIRE(w.complete());
        const std::uint64_t pq = w.pq;
        bool plus = false, minus = false;
        for (std::uint64_t a : {w.r1, pq - w.r1}) {
            std::uint64_t floor = *w.q;
            for (int i = 0; i < 4; ++i) {
                const auto r = smallest_prime_in_class(a, pq, floor).prime;
                REQUIRE(r);
                const auto rep = height_report(pq * *r);
                plus |= rep.Amax == static_cast<std::int64_t>(h);
                minus |= rep.Amin == -static_cast<std::int64_t>(h);
                CHECK(rep.A == static_cast<std::int64_t>(h));
                floor = *r;
            }
        }
        CHECK(plus);
        CHECK(minus);
    }
}

TEST_CASE("G set records")
{
    const auto g = g_scan(300);
    REQUIRE(g.records.size() == 300);
    CHECK(g.records[0].m == 1);
    CHECK(g.records[0].p == 5u);
    CHECK(g.records[1].p == 13u);
    for (const auto& r : g.records) {
        std::optional<std::uint64_t> expect;
        for (std::uint64_t p = 4 * r.m + 1; p < 32 * r.m; ++p) {
            if (oracle::trial_prime(p) && oracle::trial_prime(1 + 2 * r.m * p)) {
                expect = p;
                break;
            }
        }
        REQUIRE(r.p == expect);
    }

    const auto big = g_scan(3000, 2);
    for (std::size_t i = 0; i < g.records.size(); ++i) {
        CHECK(big.records[i].p == g.records[i].p);
    }
    CHECK(g_scan(3000, 1).density == big.density);
}

TEST_CASE("pi_m")
{
    CHECK(pi_m(1, 12) == 1);
    CHECK(pi_m(1, 4) == 2);
    for (std::uint64_t m = 1; m <= 20; ++m) {
        for (double x = 4; x <= 300; x += 0.5) {
            std::uint64_t c = 0;
            for (std::uint64_t p = 2; static_cast<double>(p) < x; ++p) {
                if (static_cast<double>(p) >= x / 2 && oracle::trial_prime(p) && oracle::trial_prime(1 + 2 * m * p)) {
                    ++c;
                }
            }
            REQUIRE(pi_m(m, x) == c);
        }
    }
    CHECK_THROWS_AS(pi_m(0, 10), std::invalid_argument);
    CHECK_THROWS_AS(pi_m(1, 3), std::invalid_argument);
}

TEST_CASE("Euler product constants")
{
    const auto lo = constants(1'000'000);
    const auto hi = constants(10'000'000);

    const auto [o1, o2] = truncated_products(10'000'000);
    CHECK(std::fabs(static_cast<double>(hi.C2_truncated) - static_cast<double>(o2)) < 1e-13);
    CHECK(std::fabs(static_cast<double>(hi.C1_truncated) - static_cast<double>(o1)) < 1e-12);

    // tail-corrected values are stable across cutoffs
    CHECK(abs(hi.C2 - lo.C2) < HighPrecision("1e-9"));
    CHECK(abs(hi.C1 - lo.C1) < HighPrecision("1e-8"));
    CHECK(abs(hi.C2 - HighPrecision("0.66016181584686957392781211")) < HighPrecision("1e-10"));

    // truncations differ by less than the tail bound of the smaller cutoff
    CHECK(abs(hi.C2_truncated - lo.C2_truncated) < lo.tail_bound_C2);
    CHECK(abs(hi.C1_truncated - lo.C1_truncated) < lo.tail_bound_C1);
    CHECK(hi.tail_bound_C1 < HighPrecision("1e-6"));
    CHECK(hi.tail_bound == std::max(hi.tail_bound_C1, hi.tail_bound_C2));

    const HighPrecision ln2 = log(HighPrecision(2));
    CHECK(hi.c_prime == ln2 * ln2 / (1024 * hi.C1 * hi.C2 * hi.C2));
    CHECK(hi.c_prime == c_prime_from(hi.C1, hi.C2));
    CHECK(hi.c_prime > HighPrecision("3.9e-4"));
    CHECK(hi.c_prime < HighPrecision("4.2e-4"));

    CHECK_THROWS_AS(constants(999), std::invalid_argument);
}

TEST_CASE("G density beats c'")
{
    const auto g = g_scan(10000);
    CHECK(g.density > static_cast<double>(constants(100000).c_prime));
    CHECK(g.density > 0.9);
}

TEST_CASE("linnik construction")
{
    const auto a = linnik_witness(3, 0.5);
    REQUIRE(a.witness.complete());
    CHECK(*a.witness.p == 5);
    CHECK(*a.witness.q == 11);
    CHECK(*a.witness.r == 227);
    CHECK_FALSE(a.r1_even);
    CHECK(a.s == 3u);
    REQUIRE(a.exponent);
    CHECK(*a.exponent == doctest::Approx(std::log(5.0 * 11 * 227) / std::log(3.0)));
    CHECK(*a.exponent == doctest::Approx(8.59).epsilon(1e-3));
    CHECK(verify_witness(a.witness).verified == Verification::direct);

    const auto b = linnik_witness(63, 0.5);
    REQUIRE(b.witness.complete());
    CHECK(*b.witness.p == 131);
    CHECK(*b.witness.q == 8123);
    CHECK(*b.witness.r == 25497973);
    CHECK(b.r1_even);
    CHECK_FALSE(b.s.has_value());
    CHECK(*b.exponent == doctest::Approx(std::log(131.0 * 8123 * 25497973) / std::log(63.0)));
    CHECK(*b.exponent == doctest::Approx(7.4658).epsilon(1e-4));
    CHECK(b.witness.verified == Verification::congruence_only);

    for (std::uint64_t h = 3; h < 40; h += 2) {
        const auto w = linnik_witness(h, 0.5);
        REQUIRE(w.witness.complete());
        const std::uint64_t m = (h - 1) / 2;
        CHECK(*w.witness.p > 4 * m);
        CHECK(*w.witness.p < 32 * m);
        CHECK(is_prime(1 + 2 * m * *w.witness.p));
        CHECK(*w.witness.r % w.witness.pq == w.witness.r1);
        if (!w.r1_even) {
            REQUIRE(w.s);
            CHECK((w.witness.r1 + w.witness.pq) % *w.s != 0);
            CHECK(*w.witness.r % (*w.s * w.witness.pq) == (w.witness.r1 + w.witness.pq) % (*w.s * w.witness.pq));
        }
    }
}
