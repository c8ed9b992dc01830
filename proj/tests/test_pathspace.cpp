#include "liebm/pathspace.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace liebm;

namespace {

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

AlgebraVector v3(double a, double b, double c) {
    AlgebraVector v(3);
    v << a, b, c;
    return v;
}

CameronMartinPath three_segments(const LieGroup& g) {
    return CameronMartinPath(g, {0, 0.25, 0.5, 1.0}, {v3(1, 0, 0.5), v3(0, -1.5, 0.2), v3(0.7, 0.7, -0.3)});
}

}  // namespace

TEST_SUITE("pathspace") {

TEST_CASE("partition validation") {
    LieGroup g = LieGroup::special_orthogonal(3);
    CHECK_THROWS(CameronMartinPath(g, {0, 0.5, 0.4}, {v3(1, 0, 0), v3(0, 1, 0)}));
    CHECK_THROWS(CameronMartinPath(g, {0.1, 1}, {v3(1, 0, 0)}));
    CHECK_THROWS(CameronMartinPath(g, {0, 1}, {v3(1, 0, 0), v3(0, 1, 0)}));
    CHECK_THROWS(TimeGrid(1.0, 0));
    CHECK_THROWS(TimeGrid(-1.0, 4));
}

TEST_CASE("segment oracles") {
    LieGroup g = LieGroup::special_orthogonal(3);
    CameronMartinPath zero(g, {0, 2}, {g.zero()});
    TimeGrid grid(2, 8);
    for (const auto& x : zero.sample(grid).values) CHECK(max_abs(x - g.identity()) == 0.0);
    CHECK(zero.energy() == 0.0);

    AlgebraVector xi = v3(0.3, -0.4, 1.2);
    CameronMartinPath one(g, {0, 2}, {xi});
    CHECK(max_abs(one.eval(2.0) - g.exp(-2.0 * xi)) < 1e-15);
    CHECK(max_abs(one.eval(0.0) - g.identity()) == 0.0);
    CHECK(one.energy() == doctest::Approx(xi.squaredNorm() * 2.0));
    CHECK_THROWS_AS(one.eval(2.5), std::out_of_range);
}

TEST_CASE("interior nodes are products of segment exponentials") {
    LieGroup g = LieGroup::special_orthogonal(3);
    CameronMartinPath p = three_segments(g);
    Mat expected = g.exp(-0.25 * p.generators()[1]) * g.exp(-0.25 * p.generators()[0]);
    CHECK(max_abs(p.eval(0.5) - expected) < 1e-15);
    CameronMartinPath r(g, p.partition(), p.generators(), Orientation::RightFactor);
    CHECK(max_abs(r.eval(0.5) - g.exp(-0.25 * p.generators()[0]) * g.exp(-0.25 * p.generators()[1])) < 1e-15);
}

TEST_CASE("torus single segment is a rotation by -t|xi|") {
    LieGroup c = LieGroup::torus(1);
    AlgebraVector xi(1);
    xi << 1.7;
    CameronMartinPath p(c, {0, 1}, {xi});
    for (double t : {0.0, 0.3, 1.0}) {
        double a = -t * 1.7;
        Mat r(2, 2);
        r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
        CHECK(max_abs(p.eval(t) - r) < 1e-15);
    }
}

TEST_CASE("normalized segments have energy sum 1/dt") {
    LieGroup g = LieGroup::special_orthogonal(3);
    std::vector<double> part{0, 0.2, 0.5, 1.0};
    std::vector<AlgebraVector> gens;
    double expected = 0.0;
    for (int j = 0; j < 3; ++j) {
        double dt = part[j + 1] - part[j];
        gens.push_back(v3(1, j, -1).normalized() / dt);
        expected += 1.0 / dt;
    }
    CHECK(CameronMartinPath(g, part, gens).energy() == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("scaled family and refinement") {
    LieGroup g = LieGroup::special_orthogonal(3);
    CameronMartinPath p = three_segments(g);
    CameronMartinPath s = p.scaled({2.0, 0.0, -1.0});
    CHECK((s.generators()[0] - 2.0 * p.generators()[0]).norm() == 0.0);
    CHECK(s.generators()[1].norm() == 0.0);
    CameronMartinPath r = p.refined_at(0.7);
    CHECK(r.segments() == 4);
    CHECK(r.energy() == doctest::Approx(p.energy()).epsilon(1e-12));
    for (double t : {0.1, 0.6, 0.7, 0.85, 1.0}) CHECK(max_abs(r.eval(t) - p.eval(t)) < 1e-14);
}

TEST_CASE("log derivatives") {
    LieGroup g = LieGroup::special_orthogonal(3);
    TimeGrid grid(1.0, 40);
    auto [l0, r0] = CameronMartinPath::identity(g, 1.0).log_derivatives(grid);
    CHECK(l0.l2_norm_sq() == 0.0);
    CHECK(r0.l2_norm_sq() == 0.0);

    CameronMartinPath p = three_segments(g);
    auto [left, right] = p.log_derivatives(grid);
    GroupPath s = p.sample(grid);
    for (int k = 0; k < grid.steps; ++k) {
        CHECK((right.cells[k] + p.generators()[p.segment_of(grid.node(k) + 1e-9)]).norm() < 1e-15);
        // a_k = Ad_{phi(t_k)^{-1}} b_k
        CHECK((left.cells[k] - g.adjoint(s.values[k].transpose(), right.cells[k])).norm() < 1e-10);
    }
    CHECK(right.l2_norm_sq() == doctest::Approx(p.energy()).epsilon(1e-13));
    // the grid log-derivative recovers the same step functions
    StepFunction gl = grid_left_log_derivative(g, s), gr = grid_right_log_derivative(g, s);
    for (int k = 0; k < grid.steps; ++k) {
        CHECK((gl.cells[k] - left.cells[k]).norm() < 1e-12);
        CHECK((gr.cells[k] - right.cells[k]).norm() < 1e-12);
    }

    LieGroup t = LieGroup::torus(2);
    AlgebraVector a(2), b(2);
    a << 1, 2;
    b << -0.5, 0.3;
    auto [tl, tr] = CameronMartinPath(t, {0, 0.5, 1}, {a, b}).log_derivatives(grid);
    for (int k = 0; k < grid.steps; ++k) CHECK((tl.cells[k] - tr.cells[k]).norm() < 1e-15);
}

TEST_CASE("inverse path") {
    LieGroup g = LieGroup::special_orthogonal(3);
    CameronMartinPath p = three_segments(g);
    CameronMartinPath q = p.inverse();
    TimeGrid grid(1.0, 20);
    GroupPath prod = path_multiply(p.sample(grid), q.sample(grid));
    for (const auto& x : prod.values) CHECK(max_abs(x - g.identity()) < 1e-14);
    CHECK(q.energy() == doctest::Approx(p.energy()));
}

TEST_CASE("path products") {
    LieGroup g = LieGroup::special_orthogonal(3);
    TimeGrid grid(1.0, 20);
    GroupPath a = three_segments(g).sample(grid);
    GroupPath b = CameronMartinPath(g, {0, 1}, {v3(0.1, 0.9, 0.4)}).sample(grid);
    GroupPath c = CameronMartinPath(g, {0, 0.5, 1}, {v3(-1, 0, 0), v3(0, 0, 2)}).sample(grid);
    GroupPath theta2 = path_invert(path_invert(a));
    for (size_t k = 0; k < a.values.size(); ++k) CHECK(max_abs(theta2.values[k] - a.values[k]) == 0.0);
    GroupPath lhs = path_multiply(path_multiply(a, b), c), rhs = path_multiply(a, path_multiply(b, c));
    GroupPath e = identity_path(g, grid);
    GroupPath ae = path_multiply(a, e), ea = path_multiply(e, a);
    for (size_t k = 0; k < a.values.size(); ++k) {
        CHECK(max_abs(lhs.values[k] - rhs.values[k]) < 1e-15);
        CHECK(max_abs(ae.values[k] - a.values[k]) == 0.0);
        CHECK(max_abs(ea.values[k] - a.values[k]) == 0.0);
    }
    CHECK_THROWS_AS(path_multiply(a, identity_path(g, TimeGrid(1.0, 10))), GridMismatchError);
}

TEST_CASE("discrete energy is exact on refining grids and first order otherwise") {
    LieGroup g = LieGroup::special_orthogonal(3);
    CameronMartinPath p = three_segments(g);
    CHECK(discrete_energy(g, p.sample(TimeGrid(1.0, 40))) == doctest::Approx(p.energy()).epsilon(1e-12));

    CameronMartinPath kinked(g, {0, 1.0 / 3.0, 1.0}, {v3(2, 0, 0), v3(0, 0, 2)});
    std::vector<double> logs_dt, logs_err;
    for (int n : {100, 200, 400, 800}) {
        double err = std::abs(discrete_energy(g, kinked.sample(TimeGrid(1.0, n))) - kinked.energy());
        logs_dt.push_back(std::log(1.0 / n));
        logs_err.push_back(std::log(err));
    }
    double slope = (logs_err.back() - logs_err.front()) / (logs_dt.back() - logs_dt.front());
    CHECK(slope == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("step functions") {
    TimeGrid grid(2.0, 4);
    StepFunction h = StepFunction::zero(grid, 2);
    for (int k = 0; k < 4; ++k) h.cells[k] << k, 1.0;
    CHECK(h.l2_norm_sq() == doctest::Approx((0 + 1 + 4 + 9 + 4) * 0.5));
    AlgebraPath w = h.integrate();
    CHECK(w.values.back()[0] == doctest::Approx(3.0));
    CHECK(w.values.back()[1] == doctest::Approx(2.0));
    CHECK((w.increment(2) - h.cells[2] * 0.5).norm() < 1e-15);
}

}
