#include "liebm/flow.hpp"
#include "liebm/heat_kernel.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

using namespace liebm;

namespace {

constexpr double kPi = std::numbers::pi;

double circle_fourier(double t, double theta) {
    double s = 1.0;
    for (int n = 1; n < 200; ++n) s += 2.0 * std::exp(-0.5 * n * n * t) * std::cos(n * theta);
    return s;
}

double so3_characters(double t, double angle) {
    double s = 0.0;
    for (int l = 0; l < 200; ++l) {
        double chi = std::abs(std::sin(0.5 * angle)) < 1e-12 ? 2 * l + 1
                                                               : std::sin((l + 0.5) * angle) / std::sin(0.5 * angle);
        s += (2 * l + 1) * std::exp(-0.5 * l * (l + 1) * t) * chi;
    }
    return s;
}

}  // namespace

TEST_SUITE("heat") {

TEST_CASE("circle kernel matches its Fourier series") {
    for (double t : {0.05, 0.3, 1.0, 4.0})
        for (double th : {0.0, 0.4, -1.7, 3.1, kPi}) {
            CHECK(HeatKernelModel::circle_density(t, th) == doctest::Approx(circle_fourier(t, th)).epsilon(1e-12));
        }
    CHECK(HeatKernelModel::circle_density(1.0, 0.5) == HeatKernelModel::circle_density(1.0, 0.5 + 2 * kPi));
    CHECK_THROWS_AS(HeatKernelModel::circle_density(0.0, 0.1), KernelDomainError);
}

TEST_CASE("so3 spectrum is -l(l+1)") {
    HeatKernelModel m = HeatKernelModel::so3(LieGroup::special_orthogonal(3));
    CHECK(m.variant() == KernelVariant::SpectralSO3);
    CHECK(m.derivation().snapped);
    for (const auto& s : m.spectrum()) {
        CHECK(s.dimension == 2 * s.ell + 1);
        CHECK(s.eigenvalue == -s.ell * (s.ell + 1.0));
        if (s.ell <= 6) CHECK(std::abs(s.fitted - s.eigenvalue) < 1e-5 * (1 + std::abs(s.eigenvalue)));
        else CHECK(std::isnan(s.fitted));
    }
    CHECK_THROWS(HeatKernelModel::so3(LieGroup::special_orthogonal(4)));
}

TEST_CASE("so3 kernel matches the character expansion") {
    HeatKernelModel m = HeatKernelModel::so3(LieGroup::special_orthogonal(3));
    for (double t : {0.1, 0.5, 2.0})
        for (double a : {0.0, 0.3, 1.5, 3.0, kPi})
            CHECK(m.so3_density(t, a) == doctest::Approx(so3_characters(t, a)).epsilon(1e-10));
    CHECK(m.truncation(0.01) > m.truncation(1.0));
    CHECK(m.so3_density(20.0, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("densities integrate to one") {
    HeatKernelModel so3 = HeatKernelModel::so3(LieGroup::special_orthogonal(3));
    HeatKernelModel tor = HeatKernelModel::torus(2);
    for (double t : {0.1, 1.0}) {
        CHECK(kernel_normalization(so3, t) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(kernel_normalization(tor, t) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(so3.angle_mass(t, 0.0, kPi) == doctest::Approx(1.0).epsilon(1e-8));
        double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double a) { return so3.so3_angle_density(t, a); }, 0.0, kPi, 10, 1e-12);
        CHECK(q == doctest::Approx(1.0).epsilon(1e-8));
    }
    CHECK(kernel_normalization(HeatKernelModel::flat(2), 0.7) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("Chapman-Kolmogorov on the circle and the plane") {
    HeatKernelModel c = HeatKernelModel::torus(1), f = HeatKernelModel::flat(2);
    CHECK(chapman_kolmogorov_defect(c, 0.3, 0.5, {1.1}) < 1e-6);
    CHECK(chapman_kolmogorov_defect(c, 0.05, 1.0, {-2.9}) < 1e-6);
    CHECK(chapman_kolmogorov_defect(f, 0.3, 0.5, {0.2, -0.4}) < 1e-6);
}

TEST_CASE("element coordinates and evaluation") {
    LieGroup g = LieGroup::special_orthogonal(3);
    HeatKernelModel m = HeatKernelModel::for_group(g);
    AlgebraVector v(3);
    v << 0.3, -0.2, 0.9;
    GroupElement x = g.exp(v);
    CHECK(m.coords_of(x)[0] == doctest::Approx(v.norm()).epsilon(1e-13));
    CHECK(kernel_eval(m, 0.4, x) == doctest::Approx(m.so3_density(0.4, v.norm())).epsilon(1e-12));
    CHECK_THROWS_AS(kernel_eval(m, -1.0, x), KernelDomainError);
    CHECK(fdd_log_density(m, {0.4}, {x}) == doctest::Approx(std::log(kernel_eval(m, 0.4, x))));
    CHECK(fdd_log_density(m, {0.4, 1.0}, {x, x}) ==
          doctest::Approx(std::log(kernel_eval(m, 0.4, x)) + std::log(kernel_eval(m, 0.6, g.identity()))));
    CHECK_THROWS(kernel_eval(HeatKernelModel::flat(2), 1.0, g.identity()));
}

TEST_CASE("goodness of fit against sampled circle paths") {
    LieGroup c = LieGroup::torus(1);
    HeatKernelModel m = HeatKernelModel::for_group(c);
    TimeGrid grid(1.0, 20);
    std::vector<std::vector<GroupElement>> samples;
    for (std::uint64_t i = 0; i < 4000; ++i) {
        GroupPath p = develop_left(c, sample_bm(c, grid, {21, i}));
        samples.push_back({p.values[10], p.values[20]});
    }
    GoodnessOfFit ok = fdd_goodness_of_fit(m, {0.5, 1.0}, samples);
    CHECK(ok.samples == 4000);
    CHECK(ok.p_value > 0.01);
    CHECK(ok.bins_used <= ok.bins_requested);
    GoodnessOfFit wrong = fdd_goodness_of_fit(m, {0.5, 1.0}, samples, 12, 2.0);
    CHECK(wrong.p_value < 1e-6);
}

}
