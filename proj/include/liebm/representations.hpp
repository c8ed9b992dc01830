#pragma once

// Representations of the Cameron-Martin group on the exponential class, the
// intertwining check against the Fourier-Wiener transform, the involution J
// and the cyclicity residual of the constant function.

#include "liebm/cylinder.hpp"
#include "liebm/girsanov.hpp"
#include "liebm/mc.hpp"
#include "liebm/report.hpp"

#include <functional>
#include <string>
#include <vector>

namespace liebm {

/// Piecewise constant direction on `grid` taking values[j] on [partition[j], partition[j+1]).
StepFunction piecewise_direction(const TimeGrid& grid, const std::vector<double>& partition,
                                 const std::vector<AlgebraVector>& values);

/// Direction u_k -> Ad_{phi(t_k)} u_k: the class action of f -> f(O_{phi^{-1}} .).
std::vector<ComplexVector> rotate_direction(const CameronMartinPath& phi, const TimeGrid& grid,
                                            const std::vector<ComplexVector>& u);

/// f -> f(O_{phi^{-1}} w + A) with A the path with increments a_k dt.
CylinderExponential rotate_translate(const CameronMartinPath& phi, const StepFunction& a, const CylinderExponential& f);

/// (U_{R,h} f)(w) = exp(S_h/2 - |h|^2/4) f(R^{-1}(w - h)), R = O_phi on the grid.
/// Half-density normalization, so the operator is unitary.
CylinderExponential gauss_regular_rep(const StepFunction& h, const CameronMartinPath& rotation,
                                      const CylinderExponential& f);

/// Phase constant and log-derivative side used by the energy representation
/// (E f)(w) = exp(i kappa S_D(w)) f(O_{phi^{-1}} w).
struct EnergyConvention {
    double kappa = -0.5;
    Side derivative = Side::Right;
    std::string label() const;
};

/// kappa in {1, 1/2, -1/2, -1} crossed with both derivative sides.
std::vector<EnergyConvention> energy_candidates();

CylinderExponential energy_rep(const CameronMartinPath& phi, const CylinderExponential& f,
                               const EnergyConvention& convention = {});

enum class PullbackForm {
    Derived,  // prefactor sqrt Z^R(w) = exp(-S_b/2 - |b|^2/4), b = phi' phi^{-1}
    Printed   // prefactor exp(S_a/2 - |phi|^2/4), a = phi^{-1} phi'
};

/// (u_phi f)(w) = prefactor(w) f(O_{phi^{-1}} w + int phi^{-1} dphi) on the class.
CylinderExponential brownian_rep_pullback(const CameronMartinPath& phi, const CylinderExponential& f,
                                          PullbackForm form = PullbackForm::Derived);

/// sqrt Z^R(g) f(B^L(g phi)) for g = develop_left(w): the pullback realized on group paths.
Complex brownian_rep_pathwise(const CameronMartinPath& phi, const GroupPath& phi_samples,
                              const CylinderExponential& f, const AlgebraPath& w);

/// Largest deviation between two class members: |c - c'| + max |u - u'|.
double data_distance(const CylinderExponential& a, const CylinderExponential& b);

/// Functional on group paths.
using GroupCylinderFunction = std::function<Complex(const GroupPath&)>;

/// g -> f(B^L(g))
GroupCylinderFunction pullback(const LieGroup& group, const CylinderExponential& f);
/// (J F)(g) = F(Theta g), Theta g = g^{-1} pointwise.
GroupCylinderFunction involution_J(const GroupCylinderFunction& f);
/// f(-B^R(g)): the value of J(f o B^L) through the identity B^L o Theta = -B^R.
Complex involution_via_right(const LieGroup& group, const CylinderExponential& f, const GroupPath& g);

struct ConventionStats {
    EnergyConvention convention;
    double max_abs = 0.0;
    double rms = 0.0;
};

struct IntertwiningResult {
    VerificationReport report;
    std::vector<ConventionStats> candidates;
    EnergyConvention selected;
    double symbolic_defect = 0.0;      // |F^{-1} u F f - E f| data distance for the selected convention
    double prop_rewrite_printed = 0.0; // F^{-1} U F f against e^{-i<h,w>/2} f(R^* w)
    double prop_rewrite_conjugate = 0.0; // F U F^{-1} f against e^{+i<h,w>/2} f(R^* w)
};

/// {|F^{-1} U F f - e^{-i<h,.>/2} f(R^* .)|, |F U F^{-1} f - e^{+i<h,.>/2} f(R^* .)|}
/// with R = O_phi and h = -phi' phi^{-1}, as data distances.
std::pair<double, double> prop_rewrite_defects(const CameronMartinPath& phi, const CylinderExponential& f);

/// Compares u_phi(F^{-1} f), realized on group paths, with F^{-1} E_phi f for
/// every candidate convention on `paths` sampled w. The selected convention
/// has the smallest rms deviation. `budget` bounds the selected rms.
IntertwiningResult verify_intertwining(const CameronMartinPath& phi, const CylinderExponential& f, int paths,
                                       std::uint64_t seed, double budget);

/// rms pointwise deviation of the selected convention on each grid of a
/// ladder, for f = exp(i S_h) with h piecewise constant on `partition`.
SlopeReport intertwining_ladder(const CameronMartinPath& phi, const std::vector<double>& partition,
                                const std::vector<AlgebraVector>& values, const EnergyConvention& convention,
                                const std::vector<int>& ladder, int paths, std::uint64_t seed);

/// Nested probe designs in the x-coordinates of phi_x (generators x_j xi_j):
/// {0}, then for each eps the axis points +-eps e_j and, when max_order >= 2,
/// the diagonal points +-eps e_i +-eps e_j.
std::vector<std::vector<std::vector<double>>> finite_difference_designs(int cells, const std::vector<double>& eps,
                                                                       int max_order);

struct CyclicityStep {
    std::size_t design_size = 0;
    double residual = 0.0;      // closed-form relative residual
    double condition = 0.0;     // of the Gram matrix
    double mc_residual = 0.0;   // Monte Carlo relative residual of the same projection
    double mc_std_error = 0.0;
};

struct CyclicityResult {
    std::vector<CyclicityStep> steps;
    bool monotone = true;
    VerificationReport report;
};

/// Projects `target` onto span{sqrt Z_{phi_x} : x in design} for each design.
CyclicityResult cyclicity_residual(const CylinderPolynomial& target,
                                   const std::vector<std::vector<std::vector<double>>>& designs, std::uint64_t paths,
                                   std::uint64_t seed, double ridge = 1e-10);

}  // namespace liebm
