#include "liebm/flow.hpp"

#include <doctest.h>

#include <cmath>

using namespace liebm;

namespace {

AlgebraVector v3(double a, double b, double c) {
    AlgebraVector v(3);
    v << a, b, c;
    return v;
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("noise streams are reproducible and distinct") {
    LieGroup g = LieGroup::special_orthogonal(3);
    TimeGrid grid(1.0, 50);
    AlgebraPath a = sample_bm(g, grid, {7, 3}), b = sample_bm(g, grid, {7, 3}), c = sample_bm(g, grid, {7, 4});
    CHECK(a.values.front().norm() == 0.0);
    CHECK(max_distance(a, b) == 0.0);
    CHECK(max_distance(a, c) > 0.0);
    CHECK(max_distance(a, sample_bm(g, grid, {8, 3})) > 0.0);
}

TEST_CASE("nested sampling sums fine increments") {
    LieGroup g = LieGroup::special_orthogonal(3);
    AlgebraPath fine = sample_bm(g, TimeGrid(1.0, 32), {5, 1});
    AlgebraPath coarse = sample_bm_nested(g, TimeGrid(1.0, 8), 32, {5, 1});
    for (int k = 0; k <= 8; ++k) CHECK((coarse.values[k] - fine.values[4 * k]).norm() < 1e-14);
    CHECK(max_distance(sample_bm_nested(g, TimeGrid(1.0, 32), 32, {5, 1}), fine) == 0.0);
    CHECK_THROWS(sample_bm_nested(g, TimeGrid(1.0, 12), 32, {5, 1}));
}

TEST_CASE("increment variance is dt") {
    LieGroup c = LieGroup::torus(1);
    TimeGrid grid(2.0, 4000);
    AlgebraPath w = sample_bm(c, grid, {11, 0});
    AdMatrix qv = quadratic_variation(w);
    // QV of one path: mean T, sd T sqrt(2/N)
    CHECK(std::abs(qv(0, 0) - 2.0) < 4 * 2.0 * std::sqrt(2.0 / 4000));
}

TEST_CASE("Ito maps invert the developments") {
    LieGroup g = LieGroup::special_orthogonal(3);
    TimeGrid grid(1.0, 100);
    AlgebraPath w = sample_bm(g, grid, {1, 2});
    CHECK(max_distance(ito_left(g, develop_left(g, w)), w) < 1e-12);
    CHECK(max_distance(ito_right(g, develop_right(g, w)), w) < 1e-12);
    GroupPath gl = develop_left(g, w);
    for (const auto& x : gl.values) CHECK((x.transpose() * x - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(adjoint_relation_defect(g, gl) < 1e-12);
}

TEST_CASE("abelian developments coincide") {
    LieGroup t = LieGroup::torus(2);
    TimeGrid grid(1.0, 60);
    AlgebraPath w = sample_bm(t, grid, {3, 0});
    GroupPath l = develop_left(t, w), r = develop_right(t, w);
    for (size_t k = 0; k < l.values.size(); ++k) CHECK((l.values[k] - r.values[k]).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(max_distance(ito_right(t, l), w) < 1e-13);
}

TEST_CASE("stochastic integral of a constant") {
    LieGroup g = LieGroup::special_orthogonal(3);
    TimeGrid grid(1.0, 64);
    AlgebraPath w = sample_bm(g, grid, {9, 9});
    StepFunction h = StepFunction::zero(grid, 3);
    for (auto& c : h.cells) c = v3(0.5, -1, 2);
    CHECK(stoch_integral(h, w) == doctest::Approx(v3(0.5, -1, 2).dot(w.values.back())).epsilon(1e-13));
}

TEST_CASE("rotation by the identity path is trivial") {
    LieGroup g = LieGroup::special_orthogonal(3);
    TimeGrid grid(1.0, 20);
    AlgebraPath w = sample_bm(g, grid, {2, 2});
    CHECK(max_distance(rotate_path(CameronMartinPath::identity(g, 1.0), w), w) == 0.0);
    CameronMartinPath phi(g, {0, 0.5, 1}, {v3(1, 0, 0), v3(0, 2, 0)});
    AlgebraPath r = rotate_path(phi, w);
    // Ad is orthogonal, so the quadratic variation trace is preserved
    CHECK(quadratic_variation(r).trace() == doctest::Approx(quadratic_variation(w).trace()).epsilon(1e-12));
}

TEST_CASE("right translation by a Cameron-Martin path") {
    LieGroup t = LieGroup::torus(2);
    AlgebraVector a(2), b(2);
    a << 1, -2;
    b << 0.5, 3;
    CameronMartinPath tphi(t, {0, 0.25, 1}, {a, b});
    CHECK(right_translation_defect(t, develop_left(t, sample_bm(t, TimeGrid(1.0, 40), {4, 0})), tphi) < 1e-12);

    // first order on so3: the defect halves with the step
    LieGroup g = LieGroup::special_orthogonal(3);
    CameronMartinPath phi(g, {0, 0.25, 1}, {v3(1, 0.5, 0), v3(0, -1, 1)});
    double coarse = 0.0, fine = 0.0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        coarse += right_translation_defect(g, develop_left(g, sample_bm_nested(g, TimeGrid(1.0, 40), 80, {4, i})), phi);
        fine += right_translation_defect(g, develop_left(g, sample_bm_nested(g, TimeGrid(1.0, 80), 80, {4, i})), phi);
    }
    CHECK(coarse / fine == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("Sidak thresholds") {
    CHECK(family_sigma_threshold(1) == doctest::Approx(3.0));
    CHECK(family_sigma_threshold(10) > family_sigma_threshold(2));
    CHECK(family_sigma_threshold(2) > 3.0);
    CHECK(family_sigma_threshold(100) < 5.0);
}

TEST_CASE("martingale check on the circle") {
    LieGroup c = LieGroup::torus(1);
    TimeGrid grid(1.0, 20);
    MartingaleReport ok = martingale_defect(c, grid, {{5, 10}, {10, 20}}, 4000, 3);
    CHECK(ok.pass());
    CHECK(ok.compensated);
    MartingaleReport bad = martingale_defect(c, grid, {{0, 20}}, 4000, 3, false);
    CHECK_FALSE(bad.pass());
    CHECK(bad.worst_sigma > 10);
}

}
