#include "liebm/flow.hpp"
#include "liebm/representations.hpp"
#include "liebm/suites.hpp"

#include <doctest.h>

#include <cmath>

using namespace liebm;

namespace {

AlgebraVector v3(double a, double b, double c) {
    AlgebraVector v(3);
    v << a, b, c;
    return v;
}

CylinderExponential test_function(const TimeGrid& grid) {
    StepFunction h = piecewise_direction(grid, {0, 0.5, 1}, {v3(0.5, -0.2, 0.1), v3(0, 0.4, -0.6)});
    return CylinderExponential::character(h);
}

}  // namespace

TEST_SUITE("representations") {

TEST_CASE("piecewise directions follow cell midpoints") {
    TimeGrid grid(1.0, 4);
    StepFunction h = piecewise_direction(grid, {0, 0.4, 1}, {v3(1, 0, 0), v3(0, 1, 0)});
    CHECK(h.cells[0][0] == 1.0);
    CHECK(h.cells[1][0] == 1.0);  // midpoint 0.375
    CHECK(h.cells[2][1] == 1.0);
    CHECK_THROWS(piecewise_direction(grid, {0, 1}, {v3(1, 0, 0), v3(0, 1, 0)}));
}

TEST_CASE("regular representation is unitary") {
    LieGroup g = LieGroup::special_orthogonal(3);
    TimeGrid grid(1.0, 8);
    CylinderExponential f = test_function(grid);
    CylinderExponential k = CylinderExponential::character(piecewise_direction(grid, {0, 1}, {v3(0.3, 0.3, 0.3)}));
    CameronMartinPath rot(g, {0, 0.5, 1}, {v3(1, 0, 0), v3(0, 0, 2)});
    StepFunction h = piecewise_direction(grid, {0, 1}, {v3(-0.5, 0.2, 1)});
    Complex before = gaussian_pairing(f, k);
    Complex after = gaussian_pairing(gauss_regular_rep(h, rot, f), gauss_regular_rep(h, rot, k));
    CHECK(std::abs(before - after) < 1e-12);
}

TEST_CASE("conjugated half-density action") {
    LieGroup g = LieGroup::special_orthogonal(3);
    TimeGrid grid(1.0, 8);
    CameronMartinPath phi(g, {0, 0.5, 1}, {v3(1.2, 0, 0), v3(0, 1.2, 0)});
    auto [printed, conj] = prop_rewrite_defects(phi, test_function(grid));
    CHECK(printed < 1e-12);
    CHECK(conj < 1e-12);
}

TEST_CASE("identity rotation leaves directions alone") {
    LieGroup g = LieGroup::special_orthogonal(3);
    TimeGrid grid(1.0, 4);
    CylinderExponential f = test_function(grid);
    auto r = rotate_direction(CameronMartinPath::identity(g, 1.0), grid, f.direction());
    for (size_t k = 0; k < r.size(); ++k) CHECK((r[k] - f.direction()[k]).norm() == 0.0);
    CHECK(energy_candidates().size() == 8);
    CHECK(EnergyConvention{}.label() == "kappa=-0.5,right");
}

TEST_CASE("involution through the right Ito map") {
    LieGroup g = LieGroup::special_orthogonal(3);
    TimeGrid grid(1.0, 16);
    CylinderExponential f = test_function(grid);
    GroupCylinderFunction jf = involution_J(pullback(g, f));
    GroupCylinderFunction jjf = involution_J(jf);
    for (std::uint64_t i = 0; i < 10; ++i) {
        GroupPath x = develop_left(g, sample_bm(g, grid, {6, i}));
        CHECK(std::abs(jf(x) - involution_via_right(g, f, x)) < 1e-12);
        CHECK(std::abs(jjf(x) - pullback(g, f)(x)) == 0.0);
    }
}

TEST_CASE("pullback symbolic and pathwise forms agree") {
    LieGroup t = LieGroup::torus(2);
    TimeGrid grid(1.0, 10);
    AlgebraVector a(2), b(2);
    a << 1, -1;
    b << 0.5, 2;
    CameronMartinPath phi(t, {0, 0.5, 1}, {a, b});
    AlgebraVector u(2);
    u << 0.3, 0.4;
    CylinderExponential f = CylinderExponential::character(piecewise_direction(grid, {0, 1}, {u}));
    CylinderExponential sym = brownian_rep_pullback(phi, f);
    GroupPath phis = phi.sample(grid);
    for (std::uint64_t i = 0; i < 10; ++i) {
        AlgebraPath w = sample_bm(t, grid, {8, i});
        CHECK(std::abs(sym.eval(w) - brownian_rep_pathwise(phi, phis, f, w)) < 1e-12);
    }
}

TEST_CASE("intertwining selects the right-derivative convention") {
    LieGroup t = LieGroup::torus(2);
    TimeGrid grid(1.0, 10);
    auto [tphi, tpsi] = witness_pair(t, 1.0);
    AlgebraVector u(2);
    u << 0.3, -0.4;
    CylinderExponential tf = CylinderExponential::character(piecewise_direction(grid, {0, 1}, {u}));
    IntertwiningResult tr = verify_intertwining(tphi, tf, 200, 1, 1e-8);
    CHECK(tr.report.passed());
    CHECK(tr.selected.kappa == -0.5);
    CHECK(tr.selected.derivative == Side::Right);

    LieGroup g = LieGroup::special_orthogonal(3);
    TimeGrid fine(1.0, 40);
    auto [phi, psi] = witness_pair(g, 1.0);
    IntertwiningResult r = verify_intertwining(phi, test_function(fine), 200, 1, 1.0);
    CHECK(r.selected.kappa == -0.5);
    CHECK(r.selected.derivative == Side::Right);
    CHECK(r.report.details["kappa_separation"].get<double>() > 1e-2);
}

TEST_CASE("finite-difference designs") {
    auto d = finite_difference_designs(2, {1.0, 0.5}, 2);
    REQUIRE(d.size() == 5);
    CHECK(d[0].size() == 1);
    CHECK(d[1].size() == 5);
    CHECK(d[2].size() == 9);
    CHECK(d[4].size() == 17);
    CHECK(finite_difference_designs(3, {1.0}, 1).back().size() == 7);
}

TEST_CASE("cyclicity residuals shrink with the design") {
    AlgebraVector a(3), b(3);
    a << 1, 0, 0;
    b << 0, 1, 0;
    CylinderPolynomial one({0, 0.5, 1}, {a, b});
    one.add_term({0, 0}, 1.0);
    CHECK(cyclicity_residual(one, {{{0.0, 0.0}}}, 0, 1, 0.0).steps[0].residual == 0.0);

    CylinderPolynomial he1({0, 0.5, 1}, {a, b});
    he1.add_term({1, 0}, 1.0);
    CyclicityResult r = cyclicity_residual(he1, finite_difference_designs(2, {1.0, 0.5, 0.25}, 2), 2000, 1);
    CHECK(r.monotone);
    CHECK(r.steps.front().residual == doctest::Approx(1.0));
    CHECK(r.steps.back().residual < 0.05);
    CHECK(r.report.passed());
}

}
