#pragma once

// Catalog of verification identities grouped into suites, plus the campaign
// configuration shared by the command line and the acceptance runner.

#include "liebm/lie.hpp"
#include "liebm/mc.hpp"
#include "liebm/pathspace.hpp"
#include "liebm/report.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace liebm {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Group selection: so3, or the torus family (circle for the heat kernel,
/// quadratic variation and martingale checks, torus2 elsewhere).
enum class GroupFamily { SO3, Torus };

std::string to_string(GroupFamily f);
/// "so3", "torus", "circle" (alias of torus) or "all".
std::vector<GroupFamily> families_from_string(const std::string& s);

struct SuiteConfig {
    double horizon = 1.0;
    int steps = 200;
    std::uint64_t paths = 100000;
    std::vector<std::uint64_t> seeds{7};
    std::vector<int> ladder{2, 4, 8, 16, 32};
    int exact_paths = 100;       // paths for pathwise identities
    int intertwining_paths = 1000;
    RunOptions run;

    void validate() const;
    nlohmann::json to_json() const;
    /// Fields present in `j` override `base`. Unknown keys are rejected.
    static SuiteConfig from_json(const nlohmann::json& j, SuiteConfig base);
    static SuiteConfig from_json(const nlohmann::json& j);
};

using IdentityRunner = std::function<std::vector<VerificationReport>(const SuiteConfig&, GroupFamily)>;

struct Identity {
    std::string name;
    std::vector<std::string> suites;
    std::vector<GroupFamily> families;
    std::string summary;
    IdentityRunner run;
};

/// Suites: exact, symbolic, statistical, convergence, and the topical
/// girsanov, halfdensity, nontrace, heat, intertwining, cyclicity, qv, martingale.
const std::vector<Identity>& identity_catalog();
std::vector<std::string> suite_names();

/// Shell-style wildcard match (*, ?, [...]).
bool glob_match(const std::string& pattern, const std::string& name);

struct Selection {
    std::vector<std::string> suites;  // empty: any suite
    std::string identity = "*";
    std::vector<GroupFamily> families{GroupFamily::SO3, GroupFamily::Torus};
};

struct SelectedRun {
    const Identity* identity;
    GroupFamily family;
};

/// Identity/family pairs matching a selection, in catalog order. Throws
/// ConfigError on an unknown suite name.
std::vector<SelectedRun> select_identities(const Selection& selection);

/// Runs a selection; `on_report` sees each report as it is produced.
std::vector<VerificationReport> run_selection(const Selection& selection, const SuiteConfig& config,
                                              const std::function<void(const VerificationReport&)>& on_report = {});

/// 0 when every report passes, 1 on any failure, 2 when the only non-passing
/// outcomes are inconclusive.
int exit_code(const std::vector<VerificationReport>& reports);

/// {"kind": "torus", "k": 2}, {"kind": "so", "n": 3} or {"kind": "user", "basis": [[[...]]]}.
nlohmann::json group_spec(const LieGroup& group);
LieGroup group_from_spec(const nlohmann::json& spec);
/// so3, so4, torus1, circle, torus2, ...
LieGroup group_from_name(const std::string& name);

/// The five test paths of the density checks, energies 0.25 .. 6.25 on [0, T].
std::vector<CameronMartinPath> density_test_paths(const LieGroup& group, double horizon);
/// Pair with a nonzero trace defect on so3 (a commuting pair on the torus).
std::pair<CameronMartinPath, CameronMartinPath> witness_pair(const LieGroup& group, double horizon);

}  // namespace liebm
