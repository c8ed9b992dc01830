#pragma once

// Compact matrix Lie groups with an Ad-invariant inner product.
//
// Every group handled here is a closed subgroup of SO(n), n <= 4, and the
// algebra carries the trace form <X,Y> = -1/2 tr(XY). Algebra elements are
// stored by their coordinates in an orthonormal basis, so the inner product
// on coordinates is the Euclidean one.

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace liebm {

inline constexpr int kMaxMatrixSize = 4;
inline constexpr int kMaxAlgebraDim = 6;

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxMatrixSize, kMaxMatrixSize>;
using AlgebraVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxAlgebraDim, 1>;
using GroupElement = Mat;
using AdMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAlgebraDim, kMaxAlgebraDim>;

enum class GroupKind { Torus, SpecialOrthogonal, User };

std::string to_string(GroupKind kind);
GroupKind group_kind_from_string(const std::string& s);

/// Raised when a logarithm is requested at (or too close to) the cut locus.
class CutLocusError : public std::runtime_error {
public:
    CutLocusError(double angle, long step = -1);
    double angle() const { return angle_; }
    long step() const { return step_; }

private:
    double angle_;
    long step_;
};

class InvalidGroupError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Matrix exponential by scaling and squaring with a [6/6] Pade approximant.
Mat expm(const Mat& a);

/// Principal matrix logarithm of an orthogonal matrix by inverse scaling and
/// squaring. The caller is responsible for staying away from eigenvalue -1.
Mat logm(const Mat& g);

class LieGroup {
public:
    static LieGroup torus(int k);
    static LieGroup special_orthogonal(int n);
    /// User-supplied skew-symmetric basis. With `orthonormalize` the basis is
    /// passed through Gram-Schmidt under the trace form first.
    static LieGroup from_basis(std::vector<Mat> basis, bool orthonormalize = false,
                               double tolerance = 1e-9);

    GroupKind kind() const { return kind_; }
    int matrix_size() const { return n_; }
    int dim() const { return d_; }
    const std::vector<Mat>& basis() const { return basis_; }
    double tolerance() const { return tolerance_; }
    double cut_margin() const { return cut_margin_; }
    /// Short identifier such as "so3" or "torus1".
    std::string name() const;
    bool is_abelian() const { return abelian_; }

    Mat identity() const { return Mat::Identity(n_, n_); }
    AlgebraVector zero() const { return AlgebraVector::Zero(d_); }

    Mat to_matrix(const AlgebraVector& x) const;
    /// Orthogonal projection of a matrix onto the algebra, in basis coordinates.
    AlgebraVector to_coords(const Mat& x) const;
    /// Frobenius distance from `x` to its projection onto the algebra.
    double projection_residual(const Mat& x) const;

    double inner(const AlgebraVector& x, const AlgebraVector& y) const { return x.dot(y); }
    double norm(const AlgebraVector& x) const { return x.norm(); }
    /// Trace-form inner product of two matrices, -1/2 tr(XY).
    static double trace_inner(const Mat& x, const Mat& y);

    AlgebraVector bracket(const AlgebraVector& x, const AlgebraVector& y) const;
    GroupElement exp(const AlgebraVector& x) const;
    /// Principal logarithm; throws CutLocusError when the rotation angle of
    /// `g` is at least pi - cut_margin.
    AlgebraVector log(const GroupElement& g) const;
    /// Largest principal rotation angle of `g`, in [0, pi].
    double rotation_angle(const GroupElement& g) const;

    AlgebraVector adjoint(const GroupElement& g, const AlgebraVector& x) const;
    /// Matrix of Ad_g in basis coordinates (orthogonal, d x d).
    AdMatrix adjoint_matrix(const GroupElement& g) const;

    /// ||g^T g - I|| (Frobenius) plus |det g - 1|.
    double membership_residual(const GroupElement& g) const;
    bool is_member(const GroupElement& g) const { return membership_residual(g) <= tolerance_; }

    /// C2 = sum over the basis of A*A.
    Mat casimir() const { return casimir_; }
    /// Casimir recomputed in a rotated orthonormal basis B_i = sum_j Q_ij A_j.
    Mat casimir_in_basis(const AdMatrix& q) const;

    /// Max |<Ad_g X, Ad_g Y> - <X,Y>| over `samples` random (g, X, Y).
    double ad_invariance_defect(int samples, unsigned seed) const;
    /// Max projection residual of [A_i, A_j] onto the span of the basis.
    double bracket_closure_residual() const;
    /// Max |<A_i, A_j> - delta_ij| under the trace form.
    double orthonormality_defect() const;

private:
    LieGroup(GroupKind kind, int n, std::vector<Mat> basis, double tolerance);
    void validate() const;

    GroupKind kind_;
    int n_;
    int d_;
    std::vector<Mat> basis_;
    double tolerance_;
    double cut_margin_ = 1e-6;
    Mat casimir_;
    bool abelian_ = false;
};

}  // namespace liebm
