#include "cyclo/cache.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include <json.hpp>

namespace cyclo {

CacheEntry CacheEntry::from_report(const HeightReport& r)
{
    CacheEntry e;
    e.n = r.n;
    if (is_ternary(r.factorization)) {
        e.triple = PrimeTriple{r.factorization[0].prime, r.factorization[1].prime, r.factorization[2].prime};
    }
    e.A = r.A;
    e.Amax = r.Amax;
    e.Amin = r.Amin;
    e.k_first = r.k_first;
    e.sign_at_k = r.sign_at_k;
    e.span = r.span;
    e.coeff_set_size = r.coeff_set_size;
    e.optimal = r.optimal;
    return e;
}

HeightReport CacheEntry::to_report() const
{
    HeightReport r;
    r.n = n;
    r.factorization = factorize(n);
    r.degree = totient(r.factorization);
    r.A = A;
    r.Amax = Amax;
    r.Amin = Amin;
    r.k_first = k_first;
    r.sign_at_k = sign_at_k;
    r.span = span;
    r.coeff_set_size = coeff_set_size;
    r.optimal = optimal;
    r.ratio = static_cast<double>(k_first) / static_cast<double>(r.degree);
    if (A > 1) {
        r.exponent = std::log(static_cast<double>(n)) / std::log(static_cast<double>(A));
    }
    return r;
}

std::string CacheEntry::to_json() const
{
    nlohmann::ordered_json j;
    j["n"] = n;
    if (triple) {
        j["p"] = triple->p;
        j["q"] = triple->q;
        j["r"] = triple->r;
    }
    j["A"] = A;
    j["Amax"] = Amax;
    j["Amin"] = Amin;
    j["k_first"] = k_first;
    j["sign_at_k"] = sign_at_k;
    j["span"] = span;
    j["coeff_set_size"] = coeff_set_size;
    j["optimal"] = optimal ? nlohmann::ordered_json(*optimal) : nlohmann::ordered_json(nullptr);
    j["engine_version"] = engine_version;
    return j.dump();
}

CacheEntry CacheEntry::from_json(const std::string& line)
{
    const auto j = nlohmann::json::parse(line);
    CacheEntry e;
    e.n = j.at("n").get<std::uint64_t>();
    if (j.contains("p")) {
        e.triple = PrimeTriple{j.at("p").get<std::uint64_t>(), j.at("q").get<std::uint64_t>(),
                               j.at("r").get<std::uint64_t>()};
    }
    e.A = j.at("A").get<std::int64_t>();
    e.Amax = j.at("Amax").get<std::int64_t>();
    e.Amin = j.at("Amin").get<std::int64_t>();
    e.k_first = j.at("k_first").get<std::uint64_t>();
    e.sign_at_k = j.at("sign_at_k").get<int>();
    e.span = j.at("span").get<std::int64_t>();
    e.coeff_set_size = j.at("coeff_set_size").get<std::uint64_t>();
    if (!j.at("optimal").is_null()) {
        e.optimal = j.at("optimal").get<bool>();
    }
    e.engine_version = j.at("engine_version").get<std::string>();
    return e;
}

bool operator==(const CacheEntry& a, const CacheEntry& b)
{
    auto same_triple = [](const std::optional<PrimeTriple>& x, const std::optional<PrimeTriple>& y) {
        return x.has_value() == y.has_value() && (!x || (x->p == y->p && x->q == y->q && x->r == y->r));
    };
    return a.n == b.n && same_triple(a.triple, b.triple) && a.A == b.A && a.Amax == b.Amax && a.Amin == b.Amin &&
           a.k_first == b.k_first && a.sign_at_k == b.sign_at_k && a.span == b.span && a.coeff_set_size == b.coeff_set_size &&
           a.optimal == b.optimal && a.engine_version == b.engine_version;
}

std::map<std::uint64_t, CacheEntry> HeightCache::load() const
{
    std::map<std::uint64_t, CacheEntry> out;
    std::ifstream in(path_);
    if (!in) {
        return out;
    }
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            auto e = CacheEntry::from_json(line);
            if (e.engine_version == kEngineVersion) {
                out.emplace(e.n, std::move(e));
            }
        } catch (const std::exception& ex) {
            std::cerr << "warning: " << path_ << ":" << lineno << ": skipping corrupt cache line (" << ex.what()
                      << ")\n";
        }
    }
    return out;
}

std::optional<CacheEntry> HeightCache::lookup(std::uint64_t n) const
{
    auto all = load();
    if (auto it = all.find(n); it != all.end()) {
        return it->second;
    }
    return std::nullopt;
}

void HeightCache::store(const CacheEntry& e)
{
    if (auto existing = lookup(e.n)) {
        if (!(*existing == e)) {
            throw std::runtime_error("cache entry for n=" + std::to_string(e.n) + " differs from recomputation");
        }
        return;
    }
    append(e);
}

void HeightCache::append(const CacheEntry& e)
{
    std::ofstream out(path_, std::ios::app);
    if (!out) {
        throw std::runtime_error("cannot write cache file " + path_);
    }
    out << e.to_json() << '\n';
    if (!out.flush()) {
        throw std::runtime_error("failed writing cache file " + path_);
    }
}

}  // namespace cyclo
