#pragma once

// Quasi-invariance densities of Wiener measure on W(G) under Cameron-Martin
// translations, and the Monte Carlo checks built on them.

#include "liebm/flow.hpp"
#include "liebm/mc.hpp"
#include "liebm/pathspace.hpp"
#include "liebm/report.hpp"

#include <functional>
#include <string>
#include <vector>

namespace liebm {

enum class Side { Left, Right };

std::string to_string(Side s);

struct LogDensity {
    double value = 0.0;  // natural log of the density
    Side side = Side::Right;
};

/// log Z^R = -sum <b_k, dB^L_k> - 1/2 |b|^2, b the right log-derivative phi' phi^{-1}.
LogDensity log_density_right(const CameronMartinPath& phi, const AlgebraPath& bl);
/// log Z^L = +sum <b_k, dB^R_k> - 1/2 |b|^2.
LogDensity log_density_left(const CameronMartinPath& phi, const AlgebraPath& br);

/// Same formulas with the derivative given as a step function (grid paths).
double log_density(const StepFunction& b, double energy, const AlgebraPath& w, Side side);

/// int_0^T <D_a phi, D_b psi> ds where D is phi^{-1}phi' (Side::Left) or
/// phi' phi^{-1} (Side::Right). Exact on the merged partition.
double derivative_integral(const CameronMartinPath& phi, Side a, const CameronMartinPath& psi, Side b);

/// Built-in bounded path functionals.
struct PathFunctional {
    std::string name;
    double bound = 1.0;  // sup |F|
    std::function<double(const GroupPath&)> eval;
};

PathFunctional trace_end();
PathFunctional entry_end(int row, int col);
/// tr(g_{T/2}^T g_T) / n: a two-time cylinder function.
PathFunctional two_time_overlap(int matrix_size);

struct QuasiInvarianceOptions {
    std::uint64_t paths = 100000;
    std::uint64_t seed = 7;
    double bias_constant = 1.0;       // budget = bias_constant * dt * (1 + |phi|^2) * sup|F|
    double inconclusive_stderr = 0.5; // relative to sup|F|
    RunOptions run;
};

struct QuasiInvarianceResult {
    VerificationReport right;  // E[F(g phi) Z^R(g)] vs E[F(g)]
    VerificationReport left;   // E[F(phi^{-1} h) Z^L(h)] vs E[F(h)]
};

QuasiInvarianceResult verify_quasi_invariance(const PathFunctional& f, const CameronMartinPath& phi,
                                              const TimeGrid& grid, const QuasiInvarianceOptions& options);

/// E[F(g phi) Z^R(g)] - E[F(g)] through a pathwise coupling. On the grid the
/// first term equals E[F(dev(w - int b) phi)] (Gaussian shift) and the second
/// E[F(dev(O_{phi^{-1}} w))] (rotation invariance); the two paths agree in
/// continuous time, so their difference isolates the discretization bias.
Estimate coupled_quasi_invariance_gap(const PathFunctional& f, const CameronMartinPath& phi, const TimeGrid& grid,
                                      int fine_steps, std::uint64_t paths, std::uint64_t seed,
                                      const RunOptions& run = {});

/// Coupled gap on each grid of a ladder; the grids share one fine Brownian
/// path per index.
SlopeReport quasi_invariance_ladder(const PathFunctional& f, const CameronMartinPath& phi,
                                    const std::vector<int>& ladder, std::uint64_t paths, std::uint64_t seed,
                                    const RunOptions& run = {});

/// E[Z^R] and E[Z^L] against 1.
std::pair<VerificationReport, VerificationReport> verify_normalization(const CameronMartinPath& phi,
                                                                       const TimeGrid& grid, std::uint64_t paths,
                                                                       std::uint64_t seed, const RunOptions& run = {});

/// max over paths of |log Z^R_phi(g) - log Z^L_phi(Theta g)|, Theta g = g^{-1} pointwise.
double involution_defect(const CameronMartinPath& phi, const TimeGrid& grid, int paths, std::uint64_t seed);

struct HalfDensityClosedForms {
    double left_form = 0.0;  // cross term from phi^{-1} phi', psi^{-1} psi'
    double alt = 0.0;    // cross term from phi' phi^{-1}, psi' psi^{-1}
};

HalfDensityClosedForms half_density_closed_forms(const CameronMartinPath& phi, const CameronMartinPath& psi);

/// <sqrt Z_phi, sqrt Z_psi> by Monte Carlo; references closed_paper and closed_alt.
/// details.matches names every closed form within 3 stderr.
VerificationReport half_density_inner(const CameronMartinPath& phi, const CameronMartinPath& psi,
                                      const TimeGrid& grid, std::uint64_t paths, std::uint64_t seed,
                                      const RunOptions& run = {});

/// exp(-|phi|^2 / 8)
double tau_closed(const CameronMartinPath& phi);
/// E[sqrt Z_phi] against exp(-|phi|^2 / 8).
VerificationReport tau(const CameronMartinPath& phi, const TimeGrid& grid, std::uint64_t paths, std::uint64_t seed,
                       const RunOptions& run = {});

/// |int <phi^{-1}phi', psi' psi^{-1}> - int <phi' phi^{-1}, psi^{-1}psi'>|
double trace_defect(const CameronMartinPath& phi, const CameronMartinPath& psi);

/// |phi psi|^2 for the pointwise product path.
double product_energy(const CameronMartinPath& phi, const CameronMartinPath& psi);

struct TauPair {
    VerificationReport phi_psi;    // E[sqrt Z_{phi psi}] on the product grid path
    VerificationReport psi_phi;    // E[sqrt Z_{psi phi}]
    VerificationReport cocycle;    // E[sqrt Z_phi(g) sqrt Z_psi(g phi)] - E[sqrt Z_{phi psi}(g)]
    VerificationReport asymmetry;  // tau(phi psi) - tau(psi phi), common random numbers
};

TauPair tau_pair(const CameronMartinPath& phi, const CameronMartinPath& psi, const TimeGrid& grid,
                 std::uint64_t paths, std::uint64_t seed, const RunOptions& run = {});

/// E[(sqrt Z_phi - sqrt Z_psi)^2] = 2 - 2 <sqrt Z_phi, sqrt Z_psi>.
/// estimate / std_error is the separation statistic.
VerificationReport density_injectivity_probe(const CameronMartinPath& phi, const CameronMartinPath& psi,
                                             const TimeGrid& grid, std::uint64_t paths, std::uint64_t seed,
                                             const RunOptions& run = {});

}  // namespace liebm
