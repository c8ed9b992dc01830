#pragma once

// Heat kernels of the built-in groups and the finite-dimensional
// distributions of group Brownian motion built from them.
//
// Compact kernels are densities with respect to Haar measure of total mass 1.
// The flat kernel is a density with respect to Lebesgue measure.

#include "liebm/lie.hpp"
#include "liebm/report.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace liebm {

enum class KernelVariant { FlatGaussian, WrappedGaussianTorus, SpectralSO3 };

std::string to_string(KernelVariant v);

class KernelDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// One irreducible summand of the SO(3) expansion.
struct SpectralTerm {
    int ell = 0;
    int dimension = 1;       // 2 ell + 1
    double fitted = 0.0;     // eigenvalue measured by finite differences
    double eigenvalue = 0.0; // value used by the kernel
};

/// How the SO(3) eigenvalues were obtained.
struct DerivationRecord {
    std::string method;
    double step = 0.0;              // finite-difference step
    int probes = 0;                 // random group elements per character
    double eigenfunction_spread = 0.0;  // worst max-min of Delta chi / chi over probes
    double snap_tolerance = 0.0;
    bool snapped = false;           // eigenvalues replaced by the nearest -l(l+1)
};

class HeatKernelModel {
public:
    /// Flat kernel on R^d.
    static HeatKernelModel flat(int dim);
    /// Product of wrapped Gaussians on T^k.
    static HeatKernelModel torus(int k);
    /// Character expansion on SO(3) with eigenvalues derived from `group`,
    /// which must be the built-in so3.
    static HeatKernelModel so3(const LieGroup& group, int max_ell = 400);

    /// Picks the model matching a built-in group.
    static HeatKernelModel for_group(const LieGroup& group);

    KernelVariant variant() const { return variant_; }
    int dim() const { return dim_; }
    const std::vector<SpectralTerm>& spectrum() const { return spectrum_; }
    const DerivationRecord& derivation() const { return derivation_; }

    /// Density at a group element. Not available for the flat variant.
    double eval(double t, const GroupElement& x) const;
    /// Density from coordinates: flat -> vector, torus -> angles, so3 -> {angle}.
    double eval_coords(double t, const std::vector<double>& coords) const;
    /// Coordinates of a group element (torus angles in (-pi, pi], so3 angle in [0, pi]).
    std::vector<double> coords_of(const GroupElement& x) const;

    /// Circle factor relative to dtheta / (2 pi).
    static double circle_density(double t, double theta);
    /// SO(3) class function relative to normalized Haar.
    double so3_density(double t, double angle) const;
    /// Density of the rotation angle on [0, pi] relative to dtheta.
    double so3_angle_density(double t, double angle) const;
    /// Number of SO(3) terms used at time t.
    int truncation(double t) const;

    /// Mass of the one-dimensional angle marginal on [a, b]: circle angle for
    /// the torus variant, rotation angle for so3.
    double angle_mass(double t, double a, double b) const;

    nlohmann::json spectral_json() const;

private:
    KernelVariant variant_ = KernelVariant::FlatGaussian;
    int dim_ = 1;
    std::vector<SpectralTerm> spectrum_;
    DerivationRecord derivation_;
};

/// Density at x: requires t > 0.
double kernel_eval(const HeatKernelModel& model, double t, const GroupElement& x);

/// sum_i log p_{s_i - s_{i-1}}(x_{i-1}^{-1} x_i) with s_0 = 0, x_0 = e.
double fdd_log_density(const HeatKernelModel& model, const std::vector<double>& partition,
                       const std::vector<GroupElement>& points);

/// Haar integral of p_t; should be 1.
double kernel_normalization(const HeatKernelModel& model, double t);

/// |int p_s(y) p_t(y^{-1} x) dy - p_{s+t}(x)| by quadrature (flat and torus variants).
double chapman_kolmogorov_defect(const HeatKernelModel& model, double s, double t, const std::vector<double>& x);

struct GoodnessOfFit {
    double statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 0.0;
    int bins_requested = 0;
    int bins_used = 0;  // after merging undersampled bins
    std::size_t samples = 0;
};

/// Chi-square test of sampled (g_{s_1}, ..., g_{s_k}) against the product of
/// increment kernels. Bins the angle of each increment x_{i-1}^{-1} x_i on a
/// product grid; cells with expected count below 5 are merged in order.
/// `time_scale` multiplies every time in the model (2 gives a wrong-variance control).
GoodnessOfFit fdd_goodness_of_fit(const HeatKernelModel& model, const std::vector<double>& partition,
                                  const std::vector<std::vector<GroupElement>>& samples, int bins_per_time = 12,
                                  double time_scale = 1.0);

}  // namespace liebm
