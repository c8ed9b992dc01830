#pragma once

// Verification reports, the append-only campaign ledger and CSV export.

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace liebm {

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct Reference {
    std::string label;
    double value = 0.0;
    std::string provenance;  // "closed-form", "quadrature", "monte-carlo", ...
};

struct VerificationReport {
    std::string identity;
    std::string group;
    std::string metric = "<X,Y> = -1/2 tr(XY)";
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    std::vector<Reference> references;
    double difference = 0.0;
    double bias_allowance = 0.0;
    Verdict verdict = Verdict::Inconclusive;
    std::uint64_t seed = 0;
    nlohmann::json config = nlohmann::json::object();
    std::string config_digest;
    nlohmann::json details = nlohmann::json::object();

    bool passed() const { return verdict == Verdict::Pass; }
    /// Recomputes config_digest from config.
    void seal();
};

/// pass iff |difference| <= max(3 stderr, bias_allowance); inconclusive when
/// the standard error exceeds `inconclusive_stderr`.
Verdict decide(double difference, double std_error, double bias_allowance, double inconclusive_stderr = 1e300);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view bytes);
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull);

nlohmann::json to_json(const VerificationReport& r);
VerificationReport report_from_json(const nlohmann::json& j);

/// Appends one JSON line per report.
void append_ledger(const std::string& path, const std::vector<VerificationReport>& reports);
std::vector<VerificationReport> read_ledger(const std::string& path);

/// Stable columns: identity,group,estimate,std_error,reference,verdict,seed
std::string to_csv(const std::vector<VerificationReport>& reports);
struct CsvRow {
    std::string identity;
    std::string group;
    double estimate = 0.0;
    double std_error = 0.0;
    double reference = 0.0;
    std::string verdict;
    std::uint64_t seed = 0;
};
std::vector<CsvRow> parse_csv(const std::string& text);

/// Fixed-width summary table for terminals.
std::string render_table(const std::vector<VerificationReport>& reports);

}  // namespace liebm
