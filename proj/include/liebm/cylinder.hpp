#pragma once

// Cylinder functionals on the Gaussian path space W(g).
//
// The exponential class holds w -> exp(c + S_u(w)) with S_u(w) = sum_k <u_k, dw_k>
// for a complex step function u. The polynomial class holds Hermite
// polynomials in normalized increments over a coarse partition.

#include "liebm/pathspace.hpp"

#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace liebm {

using Complex = std::complex<double>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1, 0, 6, 1>;

/// Exact sum of doubles as a nonoverlapping expansion.
class ExactSum {
public:
    ExactSum() = default;
    explicit ExactSum(double x) { add(x); }
    void add(double x);
    void add(const ExactSum& other);
    ExactSum negated() const;
    double value() const;
    const std::vector<double>& parts() const { return parts_; }
    /// Exact equality of the represented real numbers.
    friend bool operator==(const ExactSum& a, const ExactSum& b);

private:
    std::vector<double> parts_;  // increasing magnitude, no zeros
};

struct ExactComplex {
    ExactSum re, im;
    void add(Complex z) {
        re.add(z.real());
        im.add(z.imag());
    }
    void add(const ExactComplex& z) {
        re.add(z.re);
        im.add(z.im);
    }
    Complex value() const { return {re.value(), im.value()}; }
    friend bool operator==(const ExactComplex& a, const ExactComplex& b) { return a.re == b.re && a.im == b.im; }
};

/// sum_k sum_i u_ki v_ki dt (bilinear, no conjugation). Fixed summation order.
Complex bilinear(const TimeGrid& grid, const std::vector<ComplexVector>& u, const std::vector<ComplexVector>& v);

class CylinderExponential {
public:
    CylinderExponential(TimeGrid grid, int dim);

    /// exp(c + z S_h)
    static CylinderExponential from_direction(Complex z, const StepFunction& h, Complex c = 0.0);
    static CylinderExponential constant(const TimeGrid& grid, int dim, Complex c = 0.0);
    /// exp(i S_h)
    static CylinderExponential character(const StepFunction& h);

    const TimeGrid& grid() const { return grid_; }
    int dim() const { return dim_; }
    const ExactComplex& offset() const { return offset_; }
    ExactComplex& offset() { return offset_; }
    const std::vector<ComplexVector>& direction() const { return u_; }
    std::vector<ComplexVector>& direction() { return u_; }

    /// Q(u, u)
    Complex direction_square() const;

    /// Value at a path: exp(c + S_u(w)), evaluated in log space.
    Complex eval(const AlgebraPath& w) const;
    Complex log_eval(const AlgebraPath& w) const;

    /// Pointwise product; same grid required.
    CylinderExponential operator*(const CylinderExponential& other) const;
    /// Complex conjugate functional.
    CylinderExponential conjugate() const;

    /// Exact equality of (c, u) data.
    friend bool operator==(const CylinderExponential& a, const CylinderExponential& b);

    nlohmann::json to_json() const;
    static CylinderExponential from_json(const nlohmann::json& j);

private:
    TimeGrid grid_;
    int dim_;
    ExactComplex offset_;
    std::vector<ComplexVector> u_;
};

/// E[f] = exp(c + Q(u,u)/2)
Complex gaussian_expectation(const CylinderExponential& f);
/// log of E[f]
Complex log_gaussian_expectation(const CylinderExponential& f);
/// <f, g> = E[f conj(g)]
Complex gaussian_pairing(const CylinderExponential& f, const CylinderExponential& g);

/// Fourier-Wiener transform on the class: (c, u) -> (c + Q(u,u), i u).
CylinderExponential fw_transform(const CylinderExponential& f);
/// Inverse: (c, u) -> (c + Q(u,u), -i u).
CylinderExponential fw_inverse(const CylinderExponential& f);

/// Monte Carlo value of E_v[f(i w + sqrt2 v)] over `samples` Gaussian paths v.
/// Cross-check of the transform only; never used as its definition.
struct ComplexEstimate {
    Complex mean;
    double std_error = 0.0;  // of the modulus of the deviation
};
ComplexEstimate fw_integral_formula(const CylinderExponential& f, const AlgebraPath& w, int samples,
                                    std::uint64_t seed);

/// Hermite polynomials in Y_j = <xi_j, w(t_j) - w(t_{j-1})> / sigma_j,
/// sigma_j = |xi_j| sqrt(t_j - t_{j-1}).
class CylinderPolynomial {
public:
    using Multi = std::vector<int>;

    CylinderPolynomial(std::vector<double> partition, std::vector<AlgebraVector> directions);

    const std::vector<double>& partition() const { return partition_; }
    const std::vector<AlgebraVector>& directions() const { return xi_; }
    const std::map<Multi, double>& terms() const { return terms_; }
    int cells() const { return static_cast<int>(xi_.size()); }
    double sigma(int j) const;

    /// Adds coef * prod_j He_{n_j}(Y_j).
    CylinderPolynomial& add_term(const Multi& degrees, double coef);
    int degree() const;

    /// Normalized increments Y_j of a path whose grid refines the partition.
    std::vector<double> variables(const AlgebraPath& w) const;
    double eval(const AlgebraPath& w) const;

    /// Coefficient of the constant monomial.
    double gaussian_expectation() const;
    /// sum_n a_n b_n prod_j n_j! (Hermite orthogonality).
    double pairing(const CylinderPolynomial& other) const;
    double norm() const { return std::sqrt(pairing(*this)); }

    nlohmann::json to_json() const;

private:
    std::vector<double> partition_;
    std::vector<AlgebraVector> xi_;
    std::map<Multi, double> terms_;
};

/// Probabilists' Hermite polynomial He_n(x).
double hermite(int n, double x);

}  // namespace liebm
