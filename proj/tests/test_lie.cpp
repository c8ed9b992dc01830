#include "liebm/lie.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace liebm;

namespace {

AlgebraVector random_vector(std::mt19937_64& rng, int d, double scale) {
    std::normal_distribution<double> n;
    AlgebraVector v(d);
    for (int i = 0; i < d; ++i) v[i] = n(rng);
    return v * (scale / std::max(v.norm(), 1e-12));
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("lie") {

TEST_CASE("circle is a single rotation block") {
    LieGroup g = LieGroup::torus(1);
    CHECK(g.dim() == 1);
    CHECK(g.matrix_size() == 2);
    Mat j(2, 2);
    j << 0, -1, 1, 0;
    CHECK(max_abs(g.basis()[0] - j) == 0.0);
    CHECK(g.is_abelian());
}

TEST_CASE("so3 basis is orthonormal under the trace form") {
    LieGroup g = LieGroup::special_orthogonal(3);
    CHECK(g.dim() == 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(LieGroup::trace_inner(g.basis()[i], g.basis()[j]) == doctest::Approx(i == j ? 1.0 : 0.0));
    CHECK(g.orthonormality_defect() < 1e-15);
    CHECK(g.bracket_closure_residual() < 1e-15);
}

TEST_CASE("non-closed user basis is rejected") {
    LieGroup so3 = LieGroup::special_orthogonal(3);
    CHECK_THROWS_AS(LieGroup::from_basis({so3.basis()[0], so3.basis()[1]}), InvalidGroupError);
    Mat sym = Mat::Identity(3, 3);
    CHECK_THROWS_AS(LieGroup::from_basis({sym}), InvalidGroupError);
}

TEST_CASE("user basis spanning so3 behaves like so3") {
    LieGroup so3 = LieGroup::special_orthogonal(3);
    LieGroup u = LieGroup::from_basis(so3.basis());
    CHECK(u.kind() == GroupKind::User);
    AlgebraVector x(3);
    x << 0.3, -0.2, 0.5;
    CHECK(max_abs(u.exp(x) - so3.exp(x)) < 1e-14);
}

TEST_CASE("exp oracles") {
    LieGroup so3 = LieGroup::special_orthogonal(3);
    CHECK(max_abs(so3.exp(so3.zero()) - so3.identity()) == 0.0);
    AlgebraVector x = so3.zero();
    x[2] = M_PI;
    Mat d = Mat::Zero(3, 3);
    d.diagonal() << -1, -1, 1;
    CHECK(max_abs(so3.exp(x) - d) < 1e-15);

    LieGroup c = LieGroup::torus(1);
    for (double th : {0.1, 1.0, 2.5, -3.0}) {
        AlgebraVector y(1);
        y << th;
        Mat r(2, 2);
        r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        CHECK(max_abs(c.exp(y) - r) < 1e-15);
    }
}

TEST_CASE("log oracles and cut locus") {
    LieGroup so3 = LieGroup::special_orthogonal(3);
    CHECK(so3.log(so3.identity()).norm() == 0.0);
    Mat d = Mat::Zero(3, 3);
    d.diagonal() << -1, -1, 1;
    CHECK_THROWS_AS(so3.log(d), CutLocusError);
    AlgebraVector near = so3.zero();
    near[0] = M_PI - 1e-8;
    CHECK_THROWS_AS(so3.log(so3.exp(near)), CutLocusError);
    near[0] = M_PI - 1e-3;
    CHECK((so3.log(so3.exp(near)) - near).norm() < 1e-9);
}

TEST_CASE("log inverts exp in the injectivity region") {
    std::mt19937_64 rng(3);
    for (auto g : {LieGroup::special_orthogonal(3), LieGroup::torus(2), LieGroup::special_orthogonal(4),
                   LieGroup::special_orthogonal(2)}) {
        for (int i = 0; i < 200; ++i) {
            AlgebraVector x = random_vector(rng, g.dim(), 1.0 * (i + 1) / 200.0);
            CHECK((g.log(g.exp(x)) - x).norm() < 1e-13);
        }
    }
}

TEST_CASE("closed-form exp and log agree with Pade expm and logm") {
    std::mt19937_64 rng(5);
    for (auto g : {LieGroup::special_orthogonal(3), LieGroup::torus(2), LieGroup::special_orthogonal(2)}) {
        for (int i = 0; i < 300; ++i) {
            AlgebraVector x = random_vector(rng, g.dim(), 3.0 * (i + 1) / 300.0);
            Mat gx = g.exp(x);
            CHECK(max_abs(gx - expm(g.to_matrix(x))) < 1e-13);
            if (g.rotation_angle(gx) < 3.0) CHECK(max_abs(g.to_matrix(g.log(gx)) - logm(gx)) < 1e-11);
        }
    }
}

TEST_CASE("small angles keep full relative accuracy") {
    LieGroup so3 = LieGroup::special_orthogonal(3);
    AlgebraVector x(3);
    x << 1e-9, -2e-9, 3e-10;
    CHECK((so3.log(so3.exp(x)) - x).norm() < 1e-22);
}

TEST_CASE("algebra structure") {
    LieGroup so3 = LieGroup::special_orthogonal(3);
    AlgebraVector l1 = so3.zero(), l2 = so3.zero(), l3 = so3.zero();
    l1[0] = l2[1] = l3[2] = 1.0;
    CHECK((so3.bracket(l1, l2) - l3).norm() < 1e-15);
    CHECK(so3.bracket(l1, l1).norm() == 0.0);
    CHECK(so3.inner(l1, l1) == 1.0);
    CHECK((so3.adjoint(so3.identity(), l2) - l2).norm() == 0.0);
    CHECK(so3.ad_invariance_defect(200, 1) < 1e-13);
}

TEST_CASE("casimir is basis independent and scalar on so3") {
    LieGroup so3 = LieGroup::special_orthogonal(3);
    CHECK(max_abs(so3.casimir() + 2.0 * Mat::Identity(3, 3)) < 1e-15);
    AlgebraVector x(3);
    x << 0.4, 1.1, -0.7;
    AdMatrix q = so3.adjoint_matrix(so3.exp(x));
    CHECK(max_abs(so3.casimir_in_basis(q) - so3.casimir()) < 1e-14);
}

TEST_CASE("adjoint matrices are orthogonal and exp stays on the group") {
    std::mt19937_64 rng(9);
    for (auto g : {LieGroup::special_orthogonal(3), LieGroup::special_orthogonal(4), LieGroup::torus(2)}) {
        for (int i = 0; i < 50; ++i) {
            GroupElement e = g.exp(random_vector(rng, g.dim(), 2.0));
            CHECK(g.membership_residual(e) < 1e-13);
            AdMatrix a = g.adjoint_matrix(e);
            CHECK((a.transpose() * a - AdMatrix::Identity(g.dim(), g.dim())).norm() < 1e-13);
        }
    }
}

TEST_CASE("group names") {
    CHECK(LieGroup::special_orthogonal(3).name() == "so3");
    CHECK(LieGroup::torus(2).name() == "torus2");
    CHECK_THROWS(LieGroup::special_orthogonal(7));
    CHECK_THROWS(LieGroup::torus(0));
}

}
