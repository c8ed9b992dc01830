#include "liebm/cylinder.hpp"
#include "liebm/flow.hpp"

#include <doctest.h>

#include <cmath>

using namespace liebm;

namespace {

const Complex kI{0.0, 1.0};

StepFunction steps(const TimeGrid& grid, int dim, double scale) {
    StepFunction h = StepFunction::zero(grid, dim);
    for (int k = 0; k < grid.steps; ++k)
        for (int i = 0; i < dim; ++i) h.cells[k][i] = scale * std::sin(1.0 + k + 2.3 * i);
    return h;
}

CylinderExponential sample_function(const TimeGrid& grid) {
    CylinderExponential f = CylinderExponential::from_direction(Complex(0.4, -0.7), steps(grid, 3, 1.0), {0.1, 0.2});
    return f * CylinderExponential::character(steps(grid, 3, 0.3));
}

}  // namespace

TEST_SUITE("cylinder") {

TEST_CASE("exact sums") {
    ExactSum s;
    for (double x : {1e100, 1.0, -1e100, 1e-20}) s.add(x);
    CHECK(s.value() == 1.0 + 1e-20);
    ExactSum a(0.1), b;
    b.add(0.3);
    b.add(-0.2);
    CHECK_FALSE(a == b);  // 0.3 - 0.2 != 0.1 in doubles, and the sum keeps that
    ExactSum c = b;
    c.add(b.negated());
    CHECK(c.value() == 0.0);
    CHECK(c == ExactSum());
    ExactSum d;
    d.add(1.0);
    d.add(1e-30);
    ExactSum e;
    e.add(1e-30);
    e.add(1.0);
    CHECK(d == e);
}

TEST_CASE("Hermite polynomials") {
    for (double x : {-1.5, 0.0, 0.7, 2.0}) {
        CHECK(hermite(0, x) == 1.0);
        CHECK(hermite(1, x) == x);
        CHECK(hermite(2, x) == doctest::Approx(x * x - 1));
        CHECK(hermite(3, x) == doctest::Approx(x * x * x - 3 * x));
        CHECK(hermite(4, x) == doctest::Approx(x * x * x * x - 6 * x * x + 3));
    }
}

TEST_CASE("Fourier-Wiener transform algebra is exact") {
    TimeGrid grid(1.0, 8);
    CylinderExponential f = sample_function(grid);
    CHECK(fw_inverse(fw_transform(f)) == f);
    CHECK(fw_transform(fw_inverse(f)) == f);
    CylinderExponential f4 = fw_transform(fw_transform(fw_transform(fw_transform(f))));
    CHECK(f4 == f);
    // F^2 f = f(-w)
    CylinderExponential f2 = fw_transform(fw_transform(f));
    CHECK(f2.offset() == f.offset());
    for (size_t k = 0; k < f.direction().size(); ++k) CHECK((f2.direction()[k] + f.direction()[k]).norm() == 0.0);
    CylinderExponential t = fw_transform(f);
    for (size_t k = 0; k < f.direction().size(); ++k) CHECK((t.direction()[k] - kI * f.direction()[k]).norm() == 0.0);
}

TEST_CASE("Gaussian expectations") {
    TimeGrid grid(1.0, 10);
    StepFunction h = steps(grid, 3, 0.8);
    CylinderExponential chi = CylinderExponential::character(h);
    CHECK(std::abs(gaussian_expectation(chi) - std::exp(-0.5 * h.l2_norm_sq())) < 1e-14);
    CylinderExponential f = sample_function(grid);
    CHECK(std::abs(gaussian_pairing(f, f).imag()) < 1e-14);
    CHECK(gaussian_pairing(f, f).real() > 0);
    // E[f conj g] = E[f * conj(g)] for the product functional
    CHECK(std::abs(gaussian_pairing(f, chi) - gaussian_expectation(f * chi.conjugate())) < 1e-13);

    LieGroup g = LieGroup::special_orthogonal(3);
    Complex sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) sum += chi.eval(sample_bm(g, grid, {13, static_cast<std::uint64_t>(i)}));
    CHECK(std::abs(sum / double(n) - gaussian_expectation(chi)) < 4.0 / std::sqrt(n));
}

TEST_CASE("integral formula agrees with the transform") {
    LieGroup g = LieGroup::special_orthogonal(3);
    TimeGrid grid(1.0, 6);
    CylinderExponential f = CylinderExponential::character(steps(grid, 3, 0.5));
    AlgebraPath w = sample_bm(g, grid, {2, 0});
    ComplexEstimate e = fw_integral_formula(f, w, 40000, 3);
    CHECK(std::abs(e.mean - fw_transform(f).eval(w)) < 4 * e.std_error + 1e-12);
}

TEST_CASE("products, conjugates and serialization") {
    TimeGrid grid(1.0, 5);
    CylinderExponential f = sample_function(grid), g = CylinderExponential::character(steps(grid, 3, 1.1));
    LieGroup so3 = LieGroup::special_orthogonal(3);
    AlgebraPath w = sample_bm(so3, grid, {0, 0});
    CHECK(std::abs((f * g).eval(w) - f.eval(w) * g.eval(w)) < 1e-12 * std::abs(f.eval(w) * g.eval(w)));
    CHECK(std::abs(f.conjugate().eval(w) - std::conj(f.eval(w))) < 1e-13 * std::abs(f.eval(w)));
    CHECK(CylinderExponential::from_json(f.to_json()) == f);
    CHECK_THROWS(f * CylinderExponential::constant(TimeGrid(1.0, 6), 3));
}

TEST_CASE("cylinder polynomials") {
    AlgebraVector a(3), b(3);
    a << 1, 0, 0;
    b << 0, 2, 0;
    CylinderPolynomial p({0, 0.5, 1}, {a, b});
    CHECK(p.sigma(1) == doctest::Approx(2 * std::sqrt(0.5)));
    p.add_term({1, 0}, 2.0).add_term({1, 1}, -1.0).add_term({0, 0}, 0.5);
    CHECK(p.degree() == 2);
    CHECK(p.gaussian_expectation() == 0.5);
    CHECK(p.pairing(p) == doctest::Approx(4 + 1 + 0.25));
    LieGroup g = LieGroup::special_orthogonal(3);
    AlgebraPath w = sample_bm(g, TimeGrid(1.0, 4), {1, 1});
    auto y = p.variables(w);
    CHECK(y[0] == doctest::Approx(w.values[2][0] / std::sqrt(0.5)));
    CHECK(p.eval(w) == doctest::Approx(2 * y[0] - y[0] * y[1] + 0.5));
    CHECK_THROWS(p.variables(sample_bm(g, TimeGrid(1.0, 3), {1, 1})));
}

}
