#pragma once

// Height sets built from (p, m) pairs with 4m^2 + 2m + 3 <= p:
//   central: h = (p+1)/2 + m
//   plus:    h = (p-1)/2 + m
//   minus:   h = (p-1)/2 - m
// plus the prime-gap interval lemmas and the minimal-height table search.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cyclo/cyclotomic.hpp"
#include "cyclo/primes.hpp"

namespace cyclo {

enum class RVariant { central, plus, minus };

/// Which set membership is tested against: the central set, or the union of plus and minus.
enum class RSet { central, plus_minus };

struct RWitness {
    std::uint64_t h = 0;
    std::uint64_t p = 0;
    std::uint64_t m = 0;
    RVariant variant = RVariant::central;

    /// Height encoded by (p, m, variant).
    std::uint64_t reconstruct() const;
    bool admissible() const { return 4 * m * m + 2 * m + 3 <= p; }
};

const char* to_string(RVariant v);

using PrimalityTest = std::function<bool(std::uint64_t)>;

/// Witness with the smallest m, or none.
std::optional<RWitness> r_membership(std::uint64_t h, RVariant variant, const PrimalityTest& is_p);
std::optional<RWitness> r_membership(std::uint64_t h, RVariant variant);
/// For plus_minus the plus witness wins ties on m.
std::optional<RWitness> r_membership(std::uint64_t h, RSet set, const PrimalityTest& is_p);

/// Largest prime any witness for h <= x can use.
std::uint64_t r_prime_bound(std::uint64_t x);

/// Every h in [1, x] without a witness, ascending.
std::vector<std::uint64_t> r_nonmembers(std::uint64_t x, RSet set, unsigned threads = 1);

struct CoverageReport {
    GapRecord gap;
    std::uint64_t m_n = 0;          // floor((sqrt(p) - 1) / 2)
    std::uint64_t lo = 0;           // (p+1)/2
    std::uint64_t covered_hi = 0;   // (p+1)/2 + m_n
    std::uint64_t interval_hi = 0;  // (p_next-1)/2
    std::uint64_t exception_bound = 0;
    std::vector<std::uint64_t> uncovered;  // integers of [lo, interval_hi] outside the central set
};

/// Requires p >= 11.
CoverageReport interval_coverage(const GapRecord& g, const PrimalityTest& is_p);

/// Ternary n = pqr in [lo, hi], ascending, via a priority-queue merge of (p, q) streams.
class TernaryStream {
public:
    TernaryStream(std::uint64_t lo, std::uint64_t hi);
    std::optional<PrimeTriple> next();

private:
    struct Entry {
        std::uint64_t n;
        std::uint32_t pi, qi, ri;
        bool operator>(const Entry& o) const { return n > o.n; }
    };
    std::vector<std::uint64_t> primes_;
    std::vector<Entry> heap_;
    std::uint64_t lo_, hi_;
};

/// Height reports for ternary n in [lo, hi], delivered to `visit` in ascending n.
/// Reports are computed in parallel batches; `visit` runs on the calling thread.
/// Returning false from `visit` stops the scan.
void scan_ternary(std::uint64_t lo, std::uint64_t hi, unsigned threads,
                  const std::function<bool(const PrimeTriple&, const HeightReport&)>& visit,
                  std::uint64_t budget = kDefaultCoeffBudget);

struct TableRow {
    std::uint64_t h = 0;
    bool resolved = false;
    std::uint64_t p = 0, q = 0, r = 0;
    std::uint64_t k = 0;
    int sign = 1;
    std::int64_t diff = 0;
    bool diff_optimal = false;
    double ratio = 0.0;
    std::optional<double> exponent;

    std::uint64_t n() const { return p * q * r; }
};

TableRow row_from_report(const PrimeTriple& t, const HeightReport& rep);

/// First ternary n <= n_budget attaining each height 1..h_max; missing heights come back unresolved.
std::vector<TableRow> minimal_height_table(std::uint64_t h_max, std::uint64_t n_budget, unsigned threads = 1);

struct RowCheck {
    std::uint64_t h = 0;
    bool values_ok = true;
    std::vector<std::string> mismatches;
    enum class Minimality { unchecked, confirmed, refuted } minimality = Minimality::unchecked;
    std::optional<std::uint64_t> smaller_n;  // set when refuted
};

struct TableVerification {
    std::vector<RowCheck> rows;
    bool two_thirds_rule = false;  // 3h <= 2p for all rows, equality only at h = 2
    bool ok() const;
};

/// Recomputes every row; rows with n <= minimality_bound are also checked for minimality.
TableVerification verify_table(const std::vector<TableRow>& rows, std::uint64_t minimality_bound = 0,
                               unsigned threads = 1);

std::vector<TableRow> read_table_csv(std::istream& in);
std::vector<TableRow> read_table_csv(const std::string& path);
/// Columns height,p,q,r,k,sign,diff,ratio,exponent; `with_bold` appends diff_bold.
void write_table_csv(std::ostream& os, const std::vector<TableRow>& rows, bool with_bold = false);

std::string format_fixed3(double v);
/// v truncated (not rounded) to 3 decimals.
std::string truncate_fixed3(double v);
/// True when table_value is v rounded or truncated to 3 decimals.
bool matches_3_decimals(double table_value, double v);

}  // namespace cyclo
