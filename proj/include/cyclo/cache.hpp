#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "cyclo/cyclotomic.hpp"

namespace cyclo {

inline constexpr const char* kEngineVersion = "cyclo-1";

struct CacheEntry {
    std::uint64_t n = 0;
    std::optional<PrimeTriple> triple;
    std::int64_t A = 0;
    std::int64_t Amax = 0;
    std::int64_t Amin = 0;
    std::uint64_t k_first = 0;
    int sign_at_k = 1;
    std::int64_t span = 0;
    std::uint64_t coeff_set_size = 0;
    std::optional<bool> optimal;
    std::string engine_version = kEngineVersion;

    static CacheEntry from_report(const HeightReport& r);
    /// Rebuilds the full report; derived fields come from n and the stored values.
    HeightReport to_report() const;
    std::string to_json() const;
    static CacheEntry from_json(const std::string& line);

    friend bool operator==(const CacheEntry&, const CacheEntry&);
};

/// Append-only JSON-lines store keyed by n.
class HeightCache {
public:
    explicit HeightCache(std::string path) : path_(std::move(path)) {}

    /// Corrupt lines are skipped with a warning on stderr; a missing file is an empty cache.
    /// Entries from another engine version are ignored.
    std::optional<CacheEntry> lookup(std::uint64_t n) const;

    /// Throws std::runtime_error when the file cannot be written, or when an entry for n
    /// already exists with different contents.
    void store(const CacheEntry& e);

    /// All valid entries of the current engine version, keyed by n (first occurrence wins).
    std::map<std::uint64_t, CacheEntry> load() const;
    /// Appends without the duplicate check; the caller knows n is absent.
    void append(const CacheEntry& e);

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

}  // namespace cyclo
