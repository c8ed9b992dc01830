#include "liebm/cylinder.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace liebm {

namespace {

// a + b = x + y exactly
inline void two_sum(double a, double b, double& x, double& y) {
    x = a + b;
    double bv = x - a;
    double av = x - bv;
    y = (a - av) + (b - bv);
}

// No fused multiply-add: keeps (iu)(iu) = -(u u) bit for bit.
inline Complex mul(Complex a, Complex b) {
    double re = a.real() * b.real() - a.imag() * b.imag();
    double im = a.real() * b.imag() + a.imag() * b.real();
    return {re, im};
}

inline Complex times_i(Complex a) { return {-a.imag(), a.real()}; }
inline Complex times_minus_i(Complex a) { return {a.imag(), -a.real()}; }

nlohmann::json complex_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

Complex complex_from_json(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

void require_grid(const CylinderExponential& a, const CylinderExponential& b) {
    require_same_grid(a.grid(), b.grid());
    if (a.dim() != b.dim()) throw GridMismatchError("cylinder functionals have different algebra dimensions");
}

}  // namespace

void ExactSum::add(double x) {
    if (x == 0.0) return;
    std::vector<double> out;
    out.reserve(parts_.size() + 1);
    double q = x;
    for (double e : parts_) {
        double s, h;
        two_sum(q, e, s, h);
        if (h != 0.0) out.push_back(h);
        q = s;
    }
    if (q != 0.0) out.push_back(q);
    parts_ = std::move(out);
}

void ExactSum::add(const ExactSum& other) {
    for (double p : other.parts_) add(p);
}

ExactSum ExactSum::negated() const {
    ExactSum r;
    r.parts_ = parts_;
    for (double& p : r.parts_) p = -p;
    return r;
}

double ExactSum::value() const {
    double s = 0.0;
    for (double p : parts_) s += p;
    return s;
}

bool operator==(const ExactSum& a, const ExactSum& b) {
    ExactSum d = a;
    d.add(b.negated());
    return d.parts_.empty();
}

Complex bilinear(const TimeGrid& grid, const std::vector<ComplexVector>& u, const std::vector<ComplexVector>& v) {
    if (u.size() != v.size()) throw GridMismatchError("direction length mismatch");
    Complex sum = 0.0;
    for (size_t k = 0; k < u.size(); ++k)
        for (Eigen::Index i = 0; i < u[k].size(); ++i) sum += mul(u[k][i], v[k][i]);
    return sum * grid.dt();
}

CylinderExponential::CylinderExponential(TimeGrid grid, int dim)
    : grid_(grid), dim_(dim), u_(grid.steps, ComplexVector::Zero(dim)) {}

CylinderExponential CylinderExponential::from_direction(Complex z, const StepFunction& h, Complex c) {
    if (h.cells.empty()) throw std::invalid_argument("empty direction");
    CylinderExponential f(h.grid, static_cast<int>(h.cells[0].size()));
    for (size_t k = 0; k < h.cells.size(); ++k)
        for (int i = 0; i < f.dim_; ++i) f.u_[k][i] = Complex(z.real() * h.cells[k][i], z.imag() * h.cells[k][i]);
    f.offset_.add(c);
    return f;
}

CylinderExponential CylinderExponential::constant(const TimeGrid& grid, int dim, Complex c) {
    CylinderExponential f(grid, dim);
    f.offset_.add(c);
    return f;
}

CylinderExponential CylinderExponential::character(const StepFunction& h) { return from_direction({0.0, 1.0}, h); }

Complex CylinderExponential::direction_square() const { return bilinear(grid_, u_, u_); }

Complex CylinderExponential::log_eval(const AlgebraPath& w) const {
    require_same_grid(grid_, w.grid);
    Complex s = 0.0;
    for (int k = 0; k < grid_.steps; ++k) {
        AlgebraVector dw = w.increment(k);
        for (int i = 0; i < dim_; ++i) s += u_[k][i] * dw[i];
    }
    return offset_.value() + s;
}

Complex CylinderExponential::eval(const AlgebraPath& w) const { return std::exp(log_eval(w)); }

CylinderExponential CylinderExponential::operator*(const CylinderExponential& other) const {
    require_grid(*this, other);
    CylinderExponential r = *this;
    r.offset_.add(other.offset_);
    for (size_t k = 0; k < u_.size(); ++k) r.u_[k] += other.u_[k];
    return r;
}

CylinderExponential CylinderExponential::conjugate() const {
    CylinderExponential r = *this;
    r.offset_.im = offset_.im.negated();
    for (auto& cell : r.u_) cell = cell.conjugate();
    return r;
}

bool operator==(const CylinderExponential& a, const CylinderExponential& b) {
    if (!(a.grid_ == b.grid_) || a.dim_ != b.dim_ || !(a.offset_ == b.offset_)) return false;
    for (size_t k = 0; k < a.u_.size(); ++k)
        for (int i = 0; i < a.dim_; ++i)
            if (a.u_[k][i] != b.u_[k][i]) return false;
    return true;
}

nlohmann::json CylinderExponential::to_json() const {
    nlohmann::json dir = nlohmann::json::array();
    for (const auto& cell : u_) {
        nlohmann::json c = nlohmann::json::array();
        for (int i = 0; i < dim_; ++i) c.push_back(complex_json(cell[i]));
        dir.push_back(c);
    }
    return {{"class", "exponential"},
            {"grid", {{"horizon", grid_.horizon}, {"steps", grid_.steps}}},
            {"dim", dim_},
            {"c", {{"re", offset_.re.parts()}, {"im", offset_.im.parts()}}},
            {"c_value", complex_json(offset_.value())},
            {"direction", dir}};
}

CylinderExponential CylinderExponential::from_json(const nlohmann::json& j) {
    if (j.at("class") != "exponential") throw std::invalid_argument("not an exponential cylinder functional");
    TimeGrid grid(j.at("grid").at("horizon").get<double>(), j.at("grid").at("steps").get<int>());
    CylinderExponential f(grid, j.at("dim").get<int>());
    for (double p : j.at("c").at("re").get<std::vector<double>>()) f.offset_.re.add(p);
    for (double p : j.at("c").at("im").get<std::vector<double>>()) f.offset_.im.add(p);
    const auto& dir = j.at("direction");
    if (static_cast<int>(dir.size()) != grid.steps) throw GridMismatchError("direction length mismatch");
    for (int k = 0; k < grid.steps; ++k)
        for (int i = 0; i < f.dim_; ++i) f.u_[k][i] = complex_from_json(dir.at(k).at(i));
    return f;
}

Complex log_gaussian_expectation(const CylinderExponential& f) {
    return f.offset().value() + 0.5 * f.direction_square();
}

Complex gaussian_expectation(const CylinderExponential& f) { return std::exp(log_gaussian_expectation(f)); }

Complex gaussian_pairing(const CylinderExponential& f, const CylinderExponential& g) {
    return gaussian_expectation(f * g.conjugate());
}

CylinderExponential fw_transform(const CylinderExponential& f) {
    CylinderExponential r = f;
    r.offset().add(f.direction_square());
    for (auto& cell : r.direction())
        for (auto& z : cell) z = times_i(z);
    return r;
}

CylinderExponential fw_inverse(const CylinderExponential& f) {
    CylinderExponential r = f;
    r.offset().add(f.direction_square());
    for (auto& cell : r.direction())
        for (auto& z : cell) z = times_minus_i(z);
    return r;
}

ComplexEstimate fw_integral_formula(const CylinderExponential& f, const AlgebraPath& w, int samples,
                                    std::uint64_t seed) {
    if (samples < 2) throw std::invalid_argument("need at least two samples");
    const Complex base = f.offset().value();
    Complex sw = 0.0;
    for (int k = 0; k < f.grid().steps; ++k) {
        AlgebraVector dw = w.increment(k);
        for (int i = 0; i < f.dim(); ++i) sw += f.direction()[k][i] * dw[i];
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(f.grid().dt()));
    std::vector<Complex> values;
    values.reserve(samples);
    Complex mean = 0.0;
    for (int s = 0; s < samples; ++s) {
        Complex sv = 0.0;
        for (int k = 0; k < f.grid().steps; ++k)
            for (int i = 0; i < f.dim(); ++i) sv += f.direction()[k][i] * normal(rng);
        values.push_back(std::exp(base + Complex(0.0, 1.0) * sw + std::sqrt(2.0) * sv));
        mean += values.back();
    }
    mean /= static_cast<double>(samples);
    double var = 0.0;
    for (const auto& v : values) var += std::norm(v - mean);
    var /= samples - 1.0;
    return {mean, std::sqrt(var / samples)};
}

double hermite(int n, double x) {
    if (n < 0) throw std::invalid_argument("negative Hermite degree");
    double prev = 1.0, cur = x;
    if (n == 0) return prev;
    for (int k = 1; k < n; ++k) {
        double next = x * cur - k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

CylinderPolynomial::CylinderPolynomial(std::vector<double> partition, std::vector<AlgebraVector> directions)
    : partition_(std::move(partition)), xi_(std::move(directions)) {
    if (partition_.size() != xi_.size() + 1 || partition_.front() != 0.0)
        throw std::invalid_argument("partition 0 = t_0 < ... < t_m needs m directions");
    for (size_t j = 0; j + 1 < partition_.size(); ++j)
        if (partition_[j + 1] <= partition_[j]) throw std::invalid_argument("partition must be increasing");
    for (const auto& x : xi_)
        if (x.norm() == 0.0) throw std::invalid_argument("directions must be nonzero");
}

double CylinderPolynomial::sigma(int j) const { return xi_[j].norm() * std::sqrt(partition_[j + 1] - partition_[j]); }

CylinderPolynomial& CylinderPolynomial::add_term(const Multi& degrees, double coef) {
    if (static_cast<int>(degrees.size()) != cells()) throw std::invalid_argument("multi-index length mismatch");
    for (int n : degrees)
        if (n < 0) throw std::invalid_argument("negative degree");
    terms_[degrees] += coef;
    return *this;
}

int CylinderPolynomial::degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) {
        int s = 0;
        for (int n : m) s += n;
        if (c != 0.0) d = std::max(d, s);
    }
    return d;
}

std::vector<double> CylinderPolynomial::variables(const AlgebraPath& w) const {
    const double dt = w.grid.dt();
    std::vector<double> y;
    int prev = 0;
    for (int j = 0; j < cells(); ++j) {
        double kf = partition_[j + 1] / dt;
        int k = static_cast<int>(std::lround(kf));
        if (std::abs(kf - k) > 1e-9 || k > w.grid.steps) throw GridMismatchError("grid does not refine the partition");
        y.push_back(xi_[j].dot(w.values[k] - w.values[prev]) / sigma(j));
        prev = k;
    }
    return y;
}

double CylinderPolynomial::eval(const AlgebraPath& w) const {
    std::vector<double> y = variables(w);
    double sum = 0.0;
    for (const auto& [m, c] : terms_) {
        double p = c;
        for (int j = 0; j < cells(); ++j) p *= hermite(m[j], y[j]);
        sum += p;
    }
    return sum;
}

double CylinderPolynomial::gaussian_expectation() const {
    auto it = terms_.find(Multi(cells(), 0));
    return it == terms_.end() ? 0.0 : it->second;
}

double CylinderPolynomial::pairing(const CylinderPolynomial& other) const {
    if (partition_ != other.partition_) throw std::invalid_argument("pairing needs a common partition");
    for (int j = 0; j < cells(); ++j)
        if (xi_[j] != other.xi_[j]) throw std::invalid_argument("pairing needs common directions");
    double sum = 0.0;
    for (const auto& [m, c] : terms_) {
        auto it = other.terms_.find(m);
        if (it == other.terms_.end()) continue;
        double f = 1.0;
        for (int n : m) f *= std::tgamma(n + 1.0);
        sum += c * it->second * f;
    }
    return sum;
}

nlohmann::json CylinderPolynomial::to_json() const {
    nlohmann::json dirs = nlohmann::json::array();
    for (const auto& x : xi_) dirs.push_back(std::vector<double>(x.data(), x.data() + x.size()));
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [m, c] : terms_) terms.push_back({{"degrees", m}, {"coef", c}});
    return {{"class", "hermite"}, {"partition", partition_}, {"directions", dirs}, {"terms", terms}};
}

}  // namespace liebm
