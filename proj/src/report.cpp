#include "liebm/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace liebm {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "pass") return Verdict::Pass;
    if (s == "fail") return Verdict::Fail;
    if (s == "inconclusive") return Verdict::Inconclusive;
    throw std::invalid_argument("unknown verdict: " + s);
}

Verdict decide(double difference, double std_error, double bias_allowance, double inconclusive_stderr) {
    if (!std::isfinite(difference)) return Verdict::Fail;
    if (std_error > inconclusive_stderr) return Verdict::Inconclusive;
    return std::abs(difference) <= std::max(3.0 * std_error, bias_allowance) ? Verdict::Pass : Verdict::Fail;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
    return buf;
}

void VerificationReport::seal() { config_digest = fnv1a_hex(config.dump()); }

nlohmann::json to_json(const VerificationReport& r) {
    nlohmann::json refs = nlohmann::json::array();
    for (const auto& ref : r.references)
        refs.push_back({{"label", ref.label}, {"value", ref.value}, {"provenance", ref.provenance}});
    return {{"identity", r.identity},
            {"group", r.group},
            {"metric", r.metric},
            {"estimate", r.estimate},
            {"std_error", r.std_error},
            {"samples", r.samples},
            {"references", refs},
            {"difference", r.difference},
            {"bias_allowance", r.bias_allowance},
            {"verdict", to_string(r.verdict)},
            {"seed", r.seed},
            {"config", r.config},
            {"config_digest", r.config_digest},
            {"details", r.details}};
}

VerificationReport report_from_json(const nlohmann::json& j) {
    VerificationReport r;
    r.identity = j.at("identity").get<std::string>();
    r.group = j.value("group", "");
    r.metric = j.value("metric", r.metric);
    r.estimate = j.value("estimate", 0.0);
    r.std_error = j.value("std_error", 0.0);
    r.samples = j.value("samples", std::uint64_t{0});
    for (const auto& ref : j.value("references", nlohmann::json::array()))
        r.references.push_back({ref.at("label").get<std::string>(), ref.at("value").get<double>(),
                                ref.value("provenance", "")});
    r.difference = j.value("difference", 0.0);
    r.bias_allowance = j.value("bias_allowance", 0.0);
    r.verdict = verdict_from_string(j.value("verdict", "inconclusive"));
    r.seed = j.value("seed", std::uint64_t{0});
    r.config = j.value("config", nlohmann::json::object());
    r.config_digest = j.value("config_digest", "");
    r.details = j.value("details", nlohmann::json::object());
    return r;
}

void append_ledger(const std::string& path, const std::vector<VerificationReport>& reports) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open ledger for append: " + path);
    for (const auto& r : reports) out << to_json(r).dump() << '\n';
    if (!out) throw std::runtime_error("failed writing ledger: " + path);
}

std::vector<VerificationReport> read_ledger(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing ledger: " + path);
    std::vector<VerificationReport> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(report_from_json(nlohmann::json::parse(line)));
    }
    return out;
}

namespace {

std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

double primary_reference(const VerificationReport& r) {
    return r.references.empty() ? std::nan("") : r.references.front().value;
}

}  // namespace

namespace {

// RFC 4180 quoting for text fields
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> f(1);
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                f.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                f.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            f.emplace_back();
        } else {
            f.back() += c;
        }
    }
    if (quoted) throw std::runtime_error("unterminated quote in csv row: " + line);
    return f;
}

}  // namespace

std::string to_csv(const std::vector<VerificationReport>& reports) {
    std::ostringstream os;
    os << "identity,group,estimate,std_error,reference,verdict,seed\n";
    for (const auto& r : reports)
        os << csv_field(r.identity) << ',' << csv_field(r.group) << ',' << fmt_double(r.estimate) << ',' << fmt_double(r.std_error) << ','
           << fmt_double(primary_reference(r)) << ',' << to_string(r.verdict) << ',' << r.seed << '\n';
    return os.str();
}

std::vector<CsvRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<CsvRow> rows;
    if (!std::getline(in, line)) return rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 7) throw std::runtime_error("malformed csv row: " + line);
        rows.push_back({f[0], f[1], std::stod(f[2]), std::stod(f[3]), std::stod(f[4]), f[5], std::stoull(f[6])});
    }
    return rows;
}

std::string render_table(const std::vector<VerificationReport>& reports) {
    std::ostringstream os;
    os << std::left << std::setw(44) << "identity" << std::setw(10) << "group" << std::right << std::setw(14)
       << "estimate" << std::setw(12) << "stderr" << std::setw(14) << "reference" << "  verdict\n";
    for (const auto& r : reports) {
        os << std::left << std::setw(44) << r.identity << std::setw(10) << r.group << std::right << std::setprecision(6)
           << std::setw(14) << r.estimate << std::setw(12) << r.std_error << std::setw(14) << primary_reference(r)
           << "  " << to_string(r.verdict) << '\n';
    }
    return os.str();
}

}  // namespace liebm
