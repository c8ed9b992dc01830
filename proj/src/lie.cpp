#include "liebm/lie.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <limits>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace liebm {

namespace {

// [6/6] Pade coefficients c_k = (12-k)! 6! / (12! k! (6-k)!)
constexpr double kPade6[] = {1.0,
                             1.0 / 2.0,
                             5.0 / 44.0,
                             1.0 / 66.0,
                             1.0 / 792.0,
                             1.0 / 15840.0,
                             1.0 / 665280.0};

Mat sqrtm_denman_beavers(const Mat& a) {
    Mat y = a;
    Mat z = Mat::Identity(a.rows(), a.cols());
    for (int it = 0; it < 60; ++it) {
        Mat yi = y.inverse();
        Mat zi = z.inverse();
        Mat ny = 0.5 * (y + zi);
        Mat nz = 0.5 * (z + yi);
        double delta = (ny - y).norm();
        y = ny;
        z = nz;
        if (delta <= 1e-15 * std::max(1.0, y.norm())) break;
    }
    return y;
}

}  // namespace

CutLocusError::CutLocusError(double angle, long step)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "logarithm requested on the cut locus (rotation angle " << angle << ")";
          if (step >= 0) os << " at step " << step;
          return os.str();
      }()),
      angle_(angle),
      step_(step) {}

std::string to_string(GroupKind kind) {
    switch (kind) {
        case GroupKind::Torus: return "torus";
        case GroupKind::SpecialOrthogonal: return "special-orthogonal";
        case GroupKind::User: return "user";
    }
    return "user";
}

GroupKind group_kind_from_string(const std::string& s) {
    if (s == "torus") return GroupKind::Torus;
    if (s == "special-orthogonal") return GroupKind::SpecialOrthogonal;
    if (s == "user") return GroupKind::User;
    throw InvalidGroupError("unknown group kind: " + s);
}

Mat expm(const Mat& a) {
    const int n = static_cast<int>(a.rows());
    double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > 0.5) squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / 0.5))));
    Mat x = a / std::ldexp(1.0, squarings);

    Mat id = Mat::Identity(n, n);
    Mat x2 = x * x;
    Mat x4 = x2 * x2;
    Mat x6 = x4 * x2;
    Mat even = kPade6[0] * id + kPade6[2] * x2 + kPade6[4] * x4 + kPade6[6] * x6;
    Mat odd = x * (kPade6[1] * id + kPade6[3] * x2 + kPade6[5] * x4);
    Mat result = (even - odd).partialPivLu().solve(even + odd);
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

Mat logm(const Mat& g) {
    const int n = static_cast<int>(g.rows());
    Mat id = Mat::Identity(n, n);
    Mat a = g;
    int roots = 0;
    while ((a - id).norm() > 0.25 && roots < 40) {
        a = sqrtm_denman_beavers(a);
        ++roots;
    }
    // log A = 2 atanh(Z), Z = (A - I)(A + I)^{-1}
    Mat z = (a - id) * (a + id).inverse();
    Mat z2 = z * z;
    Mat term = z;
    Mat sum = z;
    for (int k = 3; k < 60; k += 2) {
        term = term * z2;
        Mat add = term / static_cast<double>(k);
        sum += add;
        if (add.norm() < 1e-18) break;
    }
    return std::ldexp(2.0, roots) * sum;
}

LieGroup::LieGroup(GroupKind kind, int n, std::vector<Mat> basis, double tolerance)
    : kind_(kind), n_(n), d_(static_cast<int>(basis.size())), basis_(std::move(basis)), tolerance_(tolerance) {
    casimir_ = Mat::Zero(n_, n_);
    for (const auto& a : basis_) casimir_ += a * a;
    abelian_ = true;
    for (int i = 0; i < d_ && abelian_; ++i)
        for (int j = i + 1; j < d_; ++j)
            if ((basis_[i] * basis_[j] - basis_[j] * basis_[i]).norm() > 1e-12) {
                abelian_ = false;
                break;
            }
}

LieGroup LieGroup::torus(int k) {
    if (k < 1 || 2 * k > kMaxMatrixSize) throw InvalidGroupError("torus dimension must be 1 or 2");
    std::vector<Mat> basis;
    for (int i = 0; i < k; ++i) {
        Mat a = Mat::Zero(2 * k, 2 * k);
        a(2 * i, 2 * i + 1) = -1.0;
        a(2 * i + 1, 2 * i) = 1.0;
        basis.push_back(a);
    }
    LieGroup g(GroupKind::Torus, 2 * k, std::move(basis), 1e-9);
    g.validate();
    return g;
}

LieGroup LieGroup::special_orthogonal(int n) {
    if (n < 2 || n > kMaxMatrixSize) throw InvalidGroupError("special orthogonal size must be in [2, 4]");
    std::vector<Mat> basis;
    if (n == 3) {
        // L1, L2, L3 with [L1, L2] = L3
        Mat l1 = Mat::Zero(3, 3), l2 = Mat::Zero(3, 3), l3 = Mat::Zero(3, 3);
        l1(1, 2) = -1; l1(2, 1) = 1;
        l2(0, 2) = 1;  l2(2, 0) = -1;
        l3(0, 1) = -1; l3(1, 0) = 1;
        basis = {l1, l2, l3};
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                Mat a = Mat::Zero(n, n);
                a(j, i) = 1.0;
                a(i, j) = -1.0;
                basis.push_back(a);
            }
    }
    LieGroup g(GroupKind::SpecialOrthogonal, n, std::move(basis), 1e-9);
    g.validate();
    return g;
}

LieGroup LieGroup::from_basis(std::vector<Mat> basis, bool orthonormalize, double tolerance) {
    if (basis.empty()) throw InvalidGroupError("empty basis");
    const int n = static_cast<int>(basis.front().rows());
    if (n < 1 || n > kMaxMatrixSize || static_cast<int>(basis.size()) > kMaxAlgebraDim)
        throw InvalidGroupError("basis dimensions out of range");
    for (const auto& a : basis) {
        if (a.rows() != n || a.cols() != n) throw InvalidGroupError("basis matrices must be square and equal-sized");
        if ((a + a.transpose()).norm() > tolerance) throw InvalidGroupError("basis matrices must be skew-symmetric");
    }
    if (orthonormalize) {
        std::vector<Mat> ortho;
        for (const auto& a : basis) {
            Mat v = a;
            for (const auto& q : ortho) v -= trace_inner(v, q) * q;
            double nv = std::sqrt(std::max(0.0, trace_inner(v, v)));
            if (nv < tolerance) throw InvalidGroupError("basis is linearly dependent");
            ortho.push_back(v / nv);
        }
        basis = std::move(ortho);
    }
    LieGroup g(GroupKind::User, n, std::move(basis), tolerance);
    g.validate();
    return g;
}

void LieGroup::validate() const {
    if (double defect = orthonormality_defect(); defect > tolerance_) {
        std::ostringstream os;
        os << "basis is not orthonormal under -1/2 tr(XY) (defect " << defect << ")";
        throw InvalidGroupError(os.str());
    }
    if (double residual = bracket_closure_residual(); residual > 1e-10) {
        std::ostringstream os;
        os << "basis is not closed under the bracket (residual " << residual << ")";
        throw InvalidGroupError(os.str());
    }
}

std::string LieGroup::name() const {
    switch (kind_) {
        case GroupKind::Torus: return "torus" + std::to_string(d_);
        case GroupKind::SpecialOrthogonal: return "so" + std::to_string(n_);
        case GroupKind::User: return "user" + std::to_string(n_) + "x" + std::to_string(d_);
    }
    return "user";
}

double LieGroup::trace_inner(const Mat& x, const Mat& y) { return -0.5 * (x * y).trace(); }

Mat LieGroup::to_matrix(const AlgebraVector& x) const {
    Mat m = Mat::Zero(n_, n_);
    for (int i = 0; i < d_; ++i) m += x[i] * basis_[i];
    return m;
}

AlgebraVector LieGroup::to_coords(const Mat& x) const {
    AlgebraVector c(d_);
    for (int i = 0; i < d_; ++i) c[i] = trace_inner(x, basis_[i]);
    return c;
}

double LieGroup::projection_residual(const Mat& x) const { return (x - to_matrix(to_coords(x))).norm(); }

AlgebraVector LieGroup::bracket(const AlgebraVector& x, const AlgebraVector& y) const {
    Mat a = to_matrix(x), b = to_matrix(y);
    return to_coords(a * b - b * a);
}

namespace {

// Closed forms for the built-in groups; the Pade route stays the general path.
bool rotation_blocks(GroupKind kind, int n) { return kind == GroupKind::Torus || (kind == GroupKind::SpecialOrthogonal && n == 2); }
bool rodrigues_applies(GroupKind kind, int n) { return kind == GroupKind::SpecialOrthogonal && n == 3; }

}  // namespace

GroupElement LieGroup::exp(const AlgebraVector& x) const {
    if (rotation_blocks(kind_, n_)) {
        Mat g = Mat::Zero(n_, n_);
        for (int i = 0; i < n_ / 2; ++i) {
            double c = std::cos(x[i]), s = std::sin(x[i]);
            g(2 * i, 2 * i) = c;
            g(2 * i, 2 * i + 1) = -s;
            g(2 * i + 1, 2 * i) = s;
            g(2 * i + 1, 2 * i + 1) = c;
        }
        return g;
    }
    if (rodrigues_applies(kind_, n_)) {
        Mat a = to_matrix(x);
        double theta = x.norm();
        if (theta == 0.0) return identity();
        double h = std::sin(0.5 * theta) / (0.5 * theta);
        return identity() + (std::sin(theta) / theta) * a + (0.5 * h * h) * (a * a);
    }
    return expm(to_matrix(x));
}

double LieGroup::rotation_angle(const GroupElement& g) const {
    if (n_ == 2) return std::abs(std::atan2(g(1, 0), g(0, 0)));
    if (n_ == 3) {
        double c = std::clamp((g.trace() - 1.0) / 2.0, -1.0, 1.0);
        return std::acos(c);
    }
    if (kind_ == GroupKind::Torus) {
        double angle = 0.0;
        for (int i = 0; i < n_; i += 2) angle = std::max(angle, std::abs(std::atan2(g(i + 1, i), g(i, i))));
        return angle;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(g), false);
    double angle = 0.0;
    for (int i = 0; i < n_; ++i) angle = std::max(angle, std::abs(std::arg(es.eigenvalues()[i])));
    return angle;
}

AlgebraVector LieGroup::log(const GroupElement& g) const {
    if (rotation_blocks(kind_, n_)) {
        AlgebraVector x(d_);
        for (int i = 0; i < d_; ++i) {
            x[i] = std::atan2(g(2 * i + 1, 2 * i), g(2 * i, 2 * i));
            if (std::abs(x[i]) >= std::numbers::pi - cut_margin_) throw CutLocusError(std::abs(x[i]));
        }
        return x;
    }
    if (rodrigues_applies(kind_, n_)) {
        Mat a = 0.5 * (g - g.transpose());
        double s = std::sqrt(std::max(0.0, trace_inner(a, a)));
        double c = 0.5 * (g.trace() - 1.0);
        double theta = std::atan2(s, c);
        if (theta >= std::numbers::pi - cut_margin_) throw CutLocusError(theta);
        if (theta < std::numbers::pi - 1e-2) {
            double scale = s > 0.0 ? theta / s : 1.0;
            return to_coords(scale * a);
        }
    }
    double angle = rotation_angle(g);
    if (angle >= std::numbers::pi - cut_margin_) throw CutLocusError(angle);
    return to_coords(logm(g));
}

AlgebraVector LieGroup::adjoint(const GroupElement& g, const AlgebraVector& x) const {
    if (abelian_) return x;
    return to_coords(g * to_matrix(x) * g.transpose());
}

AdMatrix LieGroup::adjoint_matrix(const GroupElement& g) const {
    AdMatrix ad(d_, d_);
    for (int j = 0; j < d_; ++j) ad.col(j) = to_coords(g * basis_[j] * g.transpose());
    return ad;
}

double LieGroup::membership_residual(const GroupElement& g) const {
    if (g.rows() != n_ || g.cols() != n_) return std::numeric_limits<double>::infinity();
    return (g.transpose() * g - identity()).norm() + std::abs(g.determinant() - 1.0);
}

Mat LieGroup::casimir_in_basis(const AdMatrix& q) const {
    Mat c = Mat::Zero(n_, n_);
    for (int i = 0; i < d_; ++i) {
        Mat b = Mat::Zero(n_, n_);
        for (int j = 0; j < d_; ++j) b += q(i, j) * basis_[j];
        c += b * b;
    }
    return c;
}

double LieGroup::ad_invariance_defect(int samples, unsigned seed) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    auto random_vec = [&] {
        AlgebraVector v(d_);
        for (int i = 0; i < d_; ++i) v[i] = normal(rng);
        return v;
    };
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        GroupElement g = exp(random_vec() * 1.5);
        AlgebraVector x = random_vec(), y = random_vec();
        Mat gx = g * to_matrix(x) * g.transpose();
        Mat gy = g * to_matrix(y) * g.transpose();
        worst = std::max(worst, std::abs(trace_inner(gx, gy) - trace_inner(to_matrix(x), to_matrix(y))));
    }
    return worst;
}

double LieGroup::bracket_closure_residual() const {
    double worst = 0.0;
    for (int i = 0; i < d_; ++i)
        for (int j = i + 1; j < d_; ++j)
            worst = std::max(worst, projection_residual(basis_[i] * basis_[j] - basis_[j] * basis_[i]));
    return worst;
}

double LieGroup::orthonormality_defect() const {
    double worst = 0.0;
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j)
            worst = std::max(worst, std::abs(trace_inner(basis_[i], basis_[j]) - (i == j ? 1.0 : 0.0)));
    return worst;
}

}  // namespace liebm
