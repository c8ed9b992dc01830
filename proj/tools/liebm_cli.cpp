// liebm: simulate ensembles, run verification campaigns, render ledgers.

#include "liebm/ensemble_io.hpp"
#include "liebm/report.hpp"
#include "liebm/suites.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace liebm;

namespace {

constexpr int kUsageError = 3;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("LIEBM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError("LIEBM_SEED is not an unsigned integer");
        }
    }
    return 7;
}

struct CampaignFlags {
    std::string config_path;
    std::optional<double> horizon;
    std::optional<int> steps;
    std::optional<std::uint64_t> paths;
    std::vector<std::uint64_t> seeds;
    std::vector<int> ladder;
};

SuiteConfig build_config(const CampaignFlags& f) {
    SuiteConfig c;
    c.seeds = {default_seed()};
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw ConfigError("cannot read config " + f.config_path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        c = SuiteConfig::from_json(j, c);
    }
    if (f.horizon) c.horizon = *f.horizon;
    if (f.steps) c.steps = *f.steps;
    if (f.paths) c.paths = *f.paths;
    if (!f.seeds.empty()) c.seeds = f.seeds;
    if (!f.ladder.empty()) c.ladder = f.ladder;
    c.validate();
    return c;
}

int cmd_simulate(const std::string& group_name, double horizon, int steps, std::uint64_t paths,
                 std::optional<std::uint64_t> seed, const std::string& out, bool audit) {
    if (steps <= 0) throw ConfigError("N must be positive");
    if (!(horizon > 0)) throw ConfigError("T must be positive");
    if (paths == 0) throw ConfigError("M must be positive");
    LieGroup group = group_from_name(group_name);
    std::string file = out.empty() ? group.name() + "_T" + std::to_string(horizon) + "_N" + std::to_string(steps) +
                                         "_M" + std::to_string(paths) + ".ens"
                                   : out;
    EnsembleSummary s = simulate_ensemble(file, group, TimeGrid(horizon, steps), paths, seed.value_or(default_seed()));
    std::cout << "file   " << s.file << "\npaths  " << s.paths << "\ndigest " << s.digest << "\n";
    if (audit) {
        EnsembleSummary a = audit_ensemble(file);
        std::cout << "audit  " << (a.digest == s.digest && a.bad_frames == 0 ? "ok" : "MISMATCH") << "\n";
        if (a.digest != s.digest || a.bad_frames) return 1;
    }
    return 0;
}

int cmd_audit(const std::string& file) {
    EnsembleSummary a = audit_ensemble(file);
    std::cout << "file       " << a.file << "\npaths      " << a.paths << "\nbad_frames " << a.bad_frames
              << "\ndigest     " << a.digest << "\n";
    return a.bad_frames ? 1 : 0;
}

int cmd_verify(const std::vector<std::string>& suites, const std::string& identity, const std::string& group,
               const CampaignFlags& flags, const std::string& ledger, bool quiet) {
    Selection sel;
    sel.suites = suites;
    sel.identity = identity;
    sel.families = families_from_string(group);
    SuiteConfig config = build_config(flags);
    if (select_identities(sel).empty()) throw ConfigError("identity selection is empty");
    auto reports = run_selection(sel, config, [&](const VerificationReport& r) {
        if (!quiet) std::cerr << "  " << r.identity << " [" << r.group << "] " << to_string(r.verdict) << "\n";
    });
    if (!ledger.empty()) append_ledger(ledger, reports);
    std::cout << render_table(reports);
    int code = exit_code(reports);
    size_t pass = 0;
    for (const auto& r : reports) pass += r.passed();
    std::cout << pass << "/" << reports.size() << " passed\n";
    return code;
}

int cmd_report(const std::string& ledger, const std::string& format, const std::string& verdict) {
    auto reports = read_ledger(ledger);
    if (!verdict.empty()) {
        Verdict v = verdict_from_string(verdict);
        std::erase_if(reports, [&](const VerificationReport& r) { return r.verdict != v; });
    }
    if (format == "csv") {
        std::cout << to_csv(reports);
    } else if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : reports) arr.push_back(to_json(r));
        std::cout << arr.dump(2) << "\n";
    } else {
        std::cout << render_table(reports);
    }
    return 0;
}

void list_catalog() {
    for (const auto& id : identity_catalog()) {
        std::cout << id.name << "  [";
        for (size_t i = 0; i < id.suites.size(); ++i) std::cout << (i ? "," : "") << id.suites[i];
        std::cout << "]  groups:";
        for (auto f : id.families) std::cout << " " << to_string(f);
        std::cout << "  " << id.summary << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Brownian motion on compact Lie groups: simulation and verification"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "write a reproducible Brownian ensemble");
    std::string sim_group = "so3", sim_out;
    double sim_t = 1.0;
    int sim_n = 200;
    std::uint64_t sim_m = 1000;
    std::optional<std::uint64_t> sim_seed;
    bool sim_audit = false;
    sim->add_option("--group", sim_group, "so3, so4, circle, torus2, ...");
    sim->add_option("--T", sim_t, "horizon");
    sim->add_option("--N", sim_n, "steps");
    sim->add_option("--M", sim_m, "paths");
    sim->add_option("--seed", sim_seed, "seed (default LIEBM_SEED or 7)");
    sim->add_option("-o,--out", sim_out, "ensemble file");
    sim->add_flag("--audit", sim_audit, "re-read the file and check every frame");

    auto* aud = app.add_subcommand("audit", "check frame checksums of an ensemble file");
    std::string aud_file;
    aud->add_option("file", aud_file)->required();

    auto* ver = app.add_subcommand("verify", "run verification identities");
    std::vector<std::string> suites;
    std::string identity = "*", group = "all", ledger;
    bool quiet = false;
    CampaignFlags flags;
    ver->add_option("--suite", suites, "suite name (repeatable)");
    ver->add_option("--identity", identity, "glob over identity names");
    ver->add_option("--group", group, "so3, torus, circle or all");
    ver->add_option("--config", flags.config_path, "JSON config overriding defaults");
    ver->add_option("--T", flags.horizon, "horizon");
    ver->add_option("--N", flags.steps, "steps");
    ver->add_option("--M", flags.paths, "paths");
    ver->add_option("--seed", flags.seeds, "seed (repeatable)");
    ver->add_option("--ladder", flags.ladder, "nested step counts");
    ver->add_option("--ledger", ledger, "append reports to this JSONL ledger");
    ver->add_flag("-q,--quiet", quiet, "no progress lines");

    auto* rep = app.add_subcommand("report", "render a ledger");
    std::string rep_ledger, rep_format = "table", rep_verdict;
    rep->add_option("ledger", rep_ledger)->required();
    rep->add_option("--format", rep_format)->check(CLI::IsMember({"table", "json", "csv"}));
    rep->add_option("--verdict", rep_verdict)->check(CLI::IsMember({"pass", "fail", "inconclusive"}));

    app.add_subcommand("list", "list identities and suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (*sim) return cmd_simulate(sim_group, sim_t, sim_n, sim_m, sim_seed, sim_out, sim_audit);
        if (*aud) return cmd_audit(aud_file);
        if (*ver) return cmd_verify(suites, identity, group, flags, ledger, quiet);
        if (*rep) return cmd_report(rep_ledger, rep_format, rep_verdict);
        list_catalog();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    }
}
