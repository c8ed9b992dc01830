// Acceptance runner: one PASS/FAIL line per criterion at the default campaign
// configuration (T = 1, N = 200, M = 1e5, so3 and circle/torus).

#include "liebm/report.hpp"
#include "liebm/suites.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>

using namespace liebm;

namespace {

struct Criterion {
    int number;
    std::string title;
    std::vector<std::string> suites;
    std::vector<std::string> identities;  // globs; empty means the whole suite
    std::optional<double> budget_seconds;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list{
        {1, "exact pathwise", {"exact"}, {}, 60.0},
        {2, "symbolic", {"symbolic"}, {}, 1.0},
        {3, "girsanov", {}, {"normalization", "quasi_invariance", "quasi_invariance_ladder"}, 300.0},
        {4, "half-density", {}, {"tau", "half_density"}, 300.0},
        {5, "non-trace", {}, {"tau_pair"}, std::nullopt},
        {6, "heat kernel and fdd", {"heat"}, {}, 300.0},
        {7, "intertwining", {"intertwining"}, {}, std::nullopt},
        {8, "cyclicity", {"cyclicity"}, {}, std::nullopt},
        {9, "quadratic variation", {"qv"}, {}, std::nullopt},
        {10, "martingale", {"martingale"}, {}, std::nullopt},
    };
    return list;
}

std::vector<VerificationReport> run_criterion(const Criterion& c, const SuiteConfig& config) {
    std::vector<Selection> selections;
    if (c.identities.empty()) {
        Selection s;
        s.suites = c.suites;
        selections.push_back(s);
    }
    for (const auto& id : c.identities) {
        Selection s;
        s.suites = c.suites;
        s.identity = id;
        selections.push_back(s);
    }
    std::vector<VerificationReport> out;
    for (const auto& s : selections) {
        auto r = run_selection(s, config);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> only;
    std::vector<std::uint64_t> seeds{7};
    std::string ledger;
    bool verbose = false;
    app.add_option("--criterion", only, "run only these criteria");
    app.add_option("--seed", seeds, "seeds (repeatable)");
    app.add_option("--ledger", ledger, "append every report to this ledger");
    app.add_flag("-v,--verbose", verbose, "print every report");
    CLI11_PARSE(app, argc, argv);

    SuiteConfig config;
    config.seeds = seeds;
    config.validate();

    int failed = 0;
    for (const auto& c : criteria()) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.number) == only.end()) continue;
        auto start = std::chrono::steady_clock::now();
        auto reports = run_criterion(c, config);
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!ledger.empty()) append_ledger(ledger, reports);

        size_t pass = 0;
        for (const auto& r : reports) pass += r.passed();
        const bool in_time = !c.budget_seconds || seconds < *c.budget_seconds;
        const bool ok = !reports.empty() && pass == reports.size() && in_time;
        failed += !ok;

        char line[256];
        std::snprintf(line, sizeof line, "criterion %d (%s): %s  %zu/%zu reports pass, %.2f s", c.number,
                      c.title.c_str(), ok ? "PASS" : "FAIL", pass, reports.size(), seconds);
        std::cout << line;
        if (c.budget_seconds) std::cout << " (budget " << *c.budget_seconds << " s" << (in_time ? "" : ", exceeded") << ")";
        std::cout << "\n";
        for (const auto& r : reports)
            if (verbose || !r.passed())
                std::cout << "    " << to_string(r.verdict) << "  " << r.identity << " [" << r.group
                          << "] estimate " << r.estimate << " diff " << r.difference << " se " << r.std_error << "\n";
        std::cout.flush();
    }
    return failed ? 1 : 0;
}
