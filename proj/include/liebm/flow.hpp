#pragma once

// Brownian motion in the algebra, its development into the group, the
// discrete left/right Ito maps and the pathwise identities they satisfy.

#include "liebm/lie.hpp"
#include "liebm/mc.hpp"
#include "liebm/pathspace.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace liebm {

/// Identifies an independent, reproducible stream of Gaussian increments.
struct NoiseStream {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;

    static constexpr const char* kGenerator = "mt19937_64/seed_seq(seed,index)/normal";
    std::mt19937_64 engine() const;
};

/// Increments N(0, dt I_d) in basis coordinates; w_0 = 0.
AlgebraPath sample_bm(const LieGroup& group, const TimeGrid& grid, const NoiseStream& noise);

/// Same Brownian path observed on a coarser grid: `fine_steps` increments are
/// drawn and summed in blocks. grid.steps must divide fine_steps, so grids of
/// a ladder share one underlying path per noise stream.
AlgebraPath sample_bm_nested(const LieGroup& group, const TimeGrid& grid, int fine_steps, const NoiseStream& noise);

/// g_{k+1} = g_k exp(dw_k)
GroupPath develop_left(const LieGroup& group, const AlgebraPath& w);
/// g_{k+1} = exp(dw_k) g_k
GroupPath develop_right(const LieGroup& group, const AlgebraPath& w);

/// Increments log(g_k^{-1} g_{k+1}). Throws CutLocusError carrying the step.
AlgebraPath ito_left(const LieGroup& group, const GroupPath& g);
/// Increments log(g_{k+1} g_k^{-1}).
AlgebraPath ito_right(const LieGroup& group, const GroupPath& g);

/// sum_k <h_k, dw_k> (left-point rule, compensated).
double stoch_integral(const StepFunction& h, const AlgebraPath& w);

/// Increments Ad_{phi(t_k)} dw_k.
AlgebraPath rotate_path(const CameronMartinPath& phi, const AlgebraPath& w);
/// Same with phi given by its grid samples.
AlgebraPath rotate_path(const LieGroup& group, const GroupPath& phi, const AlgebraPath& w);

/// sum_k dw_k dw_k^T in basis coordinates.
AdMatrix quadratic_variation(const AlgebraPath& w);

/// Max-norm distance between two algebra paths on the same grid.
double max_distance(const AlgebraPath& a, const AlgebraPath& b);

/// Max over nodes of |B^L(g phi) - (int Ad_{phi^{-1}} dB^L + int phi^{-1} dphi)|
/// where the right-hand side is built from the exact log-derivatives of phi.
double right_translation_defect(const LieGroup& group, const GroupPath& g, const CameronMartinPath& phi);

/// Max over steps of |dB^R_k - Ad_{g_k} dB^L_k|.
double adjoint_relation_defect(const LieGroup& group, const GroupPath& g);

/// z such that `checks` independent two-sided z-tests have the family-wise
/// error rate of one 3-sigma test (Sidak). Returns 3 for a single check.
double family_sigma_threshold(size_t checks);

struct MartingaleCheck {
    double s = 0.0;
    double t = 0.0;
    std::string test_function;  // "1" or "g_s[ab]"
    int row = 0;                // matrix entry of f
    int col = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    double bias_allowance = 0.0;
    bool pass = false;
};

struct MartingaleReport {
    std::vector<MartingaleCheck> checks;
    bool compensated = true;
    double worst_sigma = 0.0;  // max |estimate| / std_error
    double sigma_threshold = 3.0;
    bool pass() const;
};

/// E[(M_t - M_s) F] for f = matrix entries of g, M_t = f(g_t) - 1/2 int (g C2)_{ab},
/// F in {1, entries of g_s}. With `compensated = false` the drift term is dropped.
MartingaleReport martingale_defect(const LieGroup& group, const TimeGrid& grid,
                                   const std::vector<std::pair<int, int>>& checkpoints, std::uint64_t paths,
                                   std::uint64_t seed, bool compensated = true, const RunOptions& options = {});

}  // namespace liebm
