#include "cyclo/forge.hpp"

#include <cmath>

#include <boost/math/special_functions/expint.hpp>
#include <json.hpp>

#include "cyclo/parallel.hpp"

namespace cyclo {

std::uint64_t m_pq(std::uint64_t p, std::uint64_t q)
{
    if (!(2 < p && p < q)) {
        throw std::invalid_argument("M(p;q) needs 2 < p < q");
    }
    if (q % p != 1) {
        throw std::invalid_argument("M(p;q) formula needs q = 1 (mod p); got q mod p = " + std::to_string(q % p));
    }
    return std::min((q - 1) / p + 1, (p + 1) / 2);
}

const char* to_string(Verification v)
{
    switch (v) {
    case Verification::unresolved:
        return "unresolved";
    case Verification::congruence_only:
        return "congruence-only";
    case Verification::direct:
        return "direct";
    }
    return "?";
}

namespace {

void require_odd_height(std::uint64_t h)
{
    if (h < 3 || h % 2 == 0) {
        throw std::invalid_argument("target height must be odd and >= 3 (got " + std::to_string(h) + ")");
    }
}

std::uint64_t residue_r1(std::uint64_t p, std::uint64_t q)
{
    const std::uint64_t pq = checked_mul(p, q);
    return inverse_mod(((p + q) / 2) % pq, pq);
}

}  // namespace

TernaryWitness with_wilms(std::uint64_t h, std::uint64_t p_cap, std::uint64_t r_cap,
                          std::optional<std::uint64_t> forced_p)
{
    require_odd_height(h);
    TernaryWitness w;
    w.h = h;
    if (forced_p) {
        const std::uint64_t p = *forced_p;
        if (p < 2 * h - 1 || !is_prime(p)) {
            throw std::invalid_argument("forced p must be a prime >= 2h-1");
        }
        const std::uint64_t q = 1 + checked_mul(h - 1, p);
        if (!is_prime(q)) {
            throw std::invalid_argument("q = 1 + (h-1)p = " + std::to_string(q) + " is not prime");
        }
        w.p = p;
        w.q = q;
    } else {
        for (std::uint64_t p = is_prime(2 * h - 1) ? 2 * h - 1 : next_prime(2 * h - 1); p <= p_cap;
             p = next_prime(p)) {
            const std::uint64_t q = 1 + checked_mul(h - 1, p);
            if (is_prime(q)) {
                w.p = p;
                w.q = q;
                break;
            }
        }
        if (!w.p) {
            w.note = "no prime p in [2h-1, " + std::to_string(p_cap) + "] with 1+(h-1)p prime";
            return w;
        }
    }
    w.pq = checked_mul(*w.p, *w.q);
    w.r1 = residue_r1(*w.p, *w.q);
    const auto found = smallest_prime_in_class(w.r1, w.pq, *w.q, kDefaultProgressionCandidates, r_cap);
    if (!found.prime) {
        w.note = "no prime r > q in class " + std::to_string(w.r1) + " mod " + std::to_string(w.pq) +
                 " within the cap";
        return w;
    }
    w.r = found.prime;
    w.verified = Verification::congruence_only;
    return w;
}

TernaryWitness verify_witness(TernaryWitness w, std::uint64_t coeff_budget)
{
    if (!w.complete()) {
        return w;
    }
    const std::uint64_t p = *w.p, q = *w.q, r = *w.r;
    for (auto x : {p, q, r}) {
        if (!is_prime(x)) {
            throw std::invalid_argument("witness component " + std::to_string(x) + " is not prime");
        }
    }
    if (!(p < q && q < r)) {
        throw std::invalid_argument("witness must satisfy p < q < r");
    }
    if (q % p != 1) {
        throw std::invalid_argument("witness has q != 1 (mod p)");
    }
    if (m_pq(p, q) != w.h) {
        throw std::invalid_argument("M(p;q) = " + std::to_string(m_pq(p, q)) + " differs from h = " +
                                    std::to_string(w.h));
    }
    const std::uint64_t pq = checked_mul(p, q);
    if (mulmod(r % pq, (p + q) / 2, pq) != 1 % pq) {
        throw std::invalid_argument("r (p+q)/2 != 1 (mod pq)");
    }
    w.pq = pq;
    w.r1 = r % pq;

    const auto half = static_cast<unsigned __int128>(p - 1) * (q - 1) * (r - 1) / 2;
    if (half <= coeff_budget) {
        const auto rep = height_report(PrimeTriple::make(p, q, r).product(), coeff_budget + 1);
        if (rep.A != static_cast<std::int64_t>(w.h)) {
            throw WitnessContradiction("A(" + std::to_string(p) + "*" + std::to_string(q) + "*" + std::to_string(r) +
                                       ") = " + std::to_string(rep.A) + ", expected " + std::to_string(w.h));
        }
        w.height = rep.A;
        w.amax = rep.Amax;
        w.amin = rep.Amin;
        w.verified = Verification::direct;
    } else {
        w.verified = Verification::congruence_only;
    }
    return w;
}

std::string to_json(const TernaryWitness& w)
{
    auto opt = [](const auto& o) { return o ? nlohmann::ordered_json(*o) : nlohmann::ordered_json(nullptr); };
    nlohmann::ordered_json j;
    j["h"] = w.h;
    j["p"] = opt(w.p);
    j["q"] = opt(w.q);
    j["pq"] = w.pq;
    j["r1"] = w.r1;
    j["r"] = opt(w.r);
    j["verified"] = to_string(w.verified);
    j["height"] = opt(w.height);
    j["Amax"] = opt(w.amax);
    j["Amin"] = opt(w.amin);
    j["note"] = w.note;
    return j.dump();
}

GScan g_scan(std::uint64_t max_m, unsigned threads)
{
    if (max_m == 0) {
        throw std::invalid_argument("g_scan needs M >= 1");
    }
    const auto primes = primes_up_to(32 * max_m);
    GScan out;
    out.records.resize(max_m);
    parallel_for(max_m, threads, [&](std::size_t i) {
        const std::uint64_t m = i + 1;
        GRecord& rec = out.records[i];
        rec.m = m;
        auto it = std::upper_bound(primes.begin(), primes.end(), 4 * m);
        for (; it != primes.end() && *it < 32 * m; ++it) {
            if (is_prime(1 + 2 * m * *it)) {
                rec.p = *it;
                break;
            }
        }
    });
    std::uint64_t hits = 0;
    for (const auto& r : out.records) {
        hits += r.p.has_value();
    }
    out.density = static_cast<double>(hits) / static_cast<double>(max_m);
    return out;
}

std::uint64_t pi_m(std::uint64_t m, double x)
{
    if (m == 0 || !(x >= 4)) {
        throw std::invalid_argument("pi_m needs m >= 1 and x >= 4");
    }
    const auto lo = static_cast<std::uint64_t>(std::ceil(x / 2));
    const auto hi = static_cast<std::uint64_t>(std::ceil(x)) - 1;  // p < x
    std::uint64_t count = 0;
    for_each_prime(lo, hi, [&](std::uint64_t p) {
        if (is_prime(1 + checked_mul(2 * m, p))) {
            ++count;
        }
    });
    return count;
}

HighPrecision c_prime_from(const HighPrecision& c1, const HighPrecision& c2)
{
    const HighPrecision log2 = boost::multiprecision::log(HighPrecision(2));
    return log2 * log2 / (1024 * c1 * c2 * c2);
}

ConstantsReport constants(std::uint64_t cutoff)
{
    if (cutoff < 1000) {
        throw std::invalid_argument("constants needs cutoff >= 1000");
    }
    using boost::multiprecision::exp;
    ConstantsReport out;
    out.cutoff = cutoff;
    HighPrecision p1 = 1, p2 = 1;
    for_each_prime(3, cutoff, [&](std::uint64_t prime) {
        const HighPrecision p = prime;
        const HighPrecision pm2 = p - 2;
        p1 *= 1 + 2 / (p * pm2) + 1 / (p * pm2 * pm2);
        const HighPrecision pm1 = p - 1;
        p2 *= 1 - 1 / (pm1 * pm1);
    });
    out.C1_truncated = p1;
    out.C2_truncated = p2;

    // Sum over primes t > X of 1/t^2 ~ integral of dt / (t^2 log t) = E1(log X).
    const HighPrecision X = cutoff;
    const HighPrecision e1 = boost::math::expint(1, boost::multiprecision::log(X));
    out.C1 = p1 * exp(2 * e1);
    out.C2 = p2 * exp(-e1);
    out.c_prime = c_prime_from(out.C1, out.C2);

    // |log factor| <= 2.001/(p-2)^2 (C1) and <= 1.000002/(p-1)^2 (C2) for p > 1000;
    // sums over all integers k >= X-1 are at most 1/(X-2).
    const HighPrecision b1 = HighPrecision("2.001") / (X - 2);
    const HighPrecision b2 = HighPrecision("1.000002") / (X - 1);
    out.tail_bound_C1 = p1 * (exp(b1) - 1);
    out.tail_bound_C2 = p2 * (1 - exp(-b2));
    out.tail_bound = std::max(out.tail_bound_C1, out.tail_bound_C2);
    return out;
}

std::string to_json(const ConstantsReport& r)
{
    auto str = [](const HighPrecision& v) { return v.str(30, std::ios_base::fixed); };
    auto sci = [](const HighPrecision& v) { return v.str(6, std::ios_base::scientific); };
    nlohmann::ordered_json j;
    j["cutoff"] = r.cutoff;
    j["C1"] = str(r.C1);
    j["C2"] = str(r.C2);
    j["c_prime"] = str(r.c_prime);
    j["C1_truncated"] = str(r.C1_truncated);
    j["C2_truncated"] = str(r.C2_truncated);
    j["tail_bound"] = sci(r.tail_bound);
    j["tail_bound_C1"] = sci(r.tail_bound_C1);
    j["tail_bound_C2"] = sci(r.tail_bound_C2);
    return j.dump();
}

LinnikWitness linnik_witness(std::uint64_t h, double epsilon, std::uint64_t max_candidates)
{
    require_odd_height(h);
    LinnikWitness out;
    out.epsilon = epsilon;
    TernaryWitness& w = out.witness;
    w.h = h;
    const std::uint64_t m = (h - 1) / 2;
    for (std::uint64_t p = next_prime(4 * m); p < 32 * m; p = next_prime(p)) {
        const std::uint64_t q = 1 + checked_mul(2 * m, p);
        if (is_prime(q)) {
            w.p = p;
            w.q = q;
            break;
        }
    }
    if (!w.p) {
        w.note = "m = " + std::to_string(m) + " is not in G (no prime p in (4m, 32m) with 1+2mp prime)";
        return out;
    }
    const std::uint64_t p = *w.p, q = *w.q;
    w.pq = checked_mul(p, q);
    w.r1 = residue_r1(p, q);
    out.r1_even = w.r1 % 2 == 0;
    ProgressionResult found;
    if (out.r1_even) {
        found = smallest_prime_in_class(w.r1, w.pq, 1, max_candidates);
    } else {
        const std::uint64_t shifted = w.r1 + w.pq;
        std::uint64_t s = 3;
        while (shifted % s == 0) {
            s = next_prime(s);
        }
        out.s = s;
        out.s_within_delta = std::log(static_cast<double>(s)) < epsilon * std::log(static_cast<double>(w.pq));
        found = smallest_prime_in_class(shifted, checked_mul(s, w.pq), 1, max_candidates);
    }
    if (!found.prime) {
        w.note = "progression search exhausted its candidate cap";
        return out;
    }
    if (*found.prime <= q) {
        throw std::logic_error("constructed r does not exceed q");
    }
    w.r = found.prime;
    w.verified = Verification::congruence_only;
    out.exponent = (std::log(static_cast<double>(w.pq)) + std::log(static_cast<double>(*w.r))) /
                   std::log(static_cast<double>(h));
    return out;
}

std::string to_json(const LinnikWitness& w)
{
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(to_json(w.witness));
    j["r1_even"] = w.r1_even;
    j["s"] = w.s ? nlohmann::ordered_json(*w.s) : nlohmann::ordered_json(nullptr);
    j["epsilon"] = w.epsilon;
    j["s_within_delta"] = w.s_within_delta;
    j["exponent"] = w.exponent ? nlohmann::ordered_json(*w.exponent) : nlohmann::ordered_json(nullptr);
    return j.dump();
}

}  // namespace cyclo
