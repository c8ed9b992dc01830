#include "liebm/heat_kernel.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace liebm {

namespace {

constexpr double kPi = std::numbers::pi;

double integrate(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

double wrap_angle(double theta) {
    double r = std::remainder(theta, 2.0 * kPi);
    return r <= -kPi ? r + 2.0 * kPi : r;
}

int image_count(double t) { return static_cast<int>(std::ceil(6.0 * std::sqrt(t) / (2.0 * kPi))) + 3; }

double std_normal_cdf(double x) { return 0.5 * boost::math::erfc(-x / std::numbers::sqrt2); }

// chi_l as a polynomial in cos(theta): 1 + 2 sum_{m <= l} T_m(c).
double character_from_cos(int ell, double c) {
    double sum = 1.0, t_prev = 1.0, t_cur = c;
    for (int m = 1; m <= ell; ++m) {
        sum += 2.0 * t_cur;
        double t_next = 2.0 * c * t_cur - t_prev;
        t_prev = t_cur;
        t_cur = t_next;
    }
    return sum;
}

double character(int ell, double angle) {
    double s = std::sin(0.5 * angle);
    if (std::abs(s) > 1e-3) return std::sin((ell + 0.5) * angle) / s;
    return character_from_cos(ell, std::cos(angle));
}

double character_of(int ell, const GroupElement& g) { return character_from_cos(ell, 0.5 * (g.trace() - 1.0)); }

}  // namespace

std::string to_string(KernelVariant v) {
    switch (v) {
        case KernelVariant::FlatGaussian: return "flat-gaussian";
        case KernelVariant::WrappedGaussianTorus: return "wrapped-gaussian-torus";
        case KernelVariant::SpectralSO3: return "spectral-so3";
    }
    return "?";
}

HeatKernelModel HeatKernelModel::flat(int dim) {
    if (dim < 1) throw std::invalid_argument("flat kernel needs dim >= 1");
    HeatKernelModel m;
    m.variant_ = KernelVariant::FlatGaussian;
    m.dim_ = dim;
    return m;
}

HeatKernelModel HeatKernelModel::torus(int k) {
    if (k < 1) throw std::invalid_argument("torus kernel needs k >= 1");
    HeatKernelModel m;
    m.variant_ = KernelVariant::WrappedGaussianTorus;
    m.dim_ = k;
    return m;
}

HeatKernelModel HeatKernelModel::so3(const LieGroup& group, int max_ell) {
    if (group.kind() != GroupKind::SpecialOrthogonal || group.matrix_size() != 3)
        throw KernelDomainError("spectral kernel requires the built-in so3");
    HeatKernelModel m;
    m.variant_ = KernelVariant::SpectralSO3;
    m.dim_ = 3;

    // Delta chi = sum_i d^2/ds^2 chi(g exp(s X_i)) at s = 0, by Richardson
    // extrapolated central differences at random g.
    constexpr int kFitEll = 6;
    constexpr int kProbes = 8;
    const double h = 1e-2;
    DerivationRecord rec;
    rec.method = "central differences of chi_l(g exp(s X_i)), Richardson extrapolated, l <= 6";
    rec.step = h;
    rec.probes = kProbes;
    rec.snap_tolerance = 1e-5;

    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> normal;
    std::vector<GroupElement> probes;
    while (static_cast<int>(probes.size()) < kProbes) {
        AlgebraVector x(3);
        for (int i = 0; i < 3; ++i) x[i] = normal(rng);
        double a = x.norm();
        if (a < 0.4 || a > 2.6) continue;
        probes.push_back(group.exp(x));
    }

    auto second = [&](int ell, const GroupElement& g, double step) {
        double c0 = character_of(ell, g);
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) {
            AlgebraVector e = AlgebraVector::Zero(3);
            e[i] = step;
            acc += character_of(ell, g * group.exp(e)) - 2.0 * c0 + character_of(ell, g * group.exp(-e));
        }
        return acc / (step * step);
    };

    bool all_snap = true;
    for (int ell = 0; ell <= kFitEll; ++ell) {
        double lo = 1e300, hi = -1e300, sum = 0.0;
        int used = 0;
        for (const auto& g : probes) {
            double chi = character_of(ell, g);
            if (std::abs(chi) < 0.5) continue;
            double d1 = second(ell, g, h), d2 = second(ell, g, h / 2);
            double ratio = (4.0 * d2 - d1) / 3.0 / chi;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            sum += ratio;
            ++used;
        }
        SpectralTerm term;
        term.ell = ell;
        term.dimension = 2 * ell + 1;
        term.fitted = used ? sum / used : 0.0;
        if (used) rec.eigenfunction_spread = std::max(rec.eigenfunction_spread, hi - lo);
        double law = -static_cast<double>(ell * (ell + 1));
        if (std::abs(term.fitted - law) > rec.snap_tolerance * std::max(1.0, std::abs(law))) all_snap = false;
        term.eigenvalue = term.fitted;
        m.spectrum_.push_back(term);
    }
    if (!all_snap)
        throw KernelDomainError("measured so3 eigenvalues do not follow a single quadratic law; metric mismatch");
    rec.snapped = true;
    for (auto& term : m.spectrum_) term.eigenvalue = -static_cast<double>(term.ell * (term.ell + 1));
    for (int ell = kFitEll + 1; ell <= max_ell; ++ell)
        m.spectrum_.push_back({ell, 2 * ell + 1, std::nan(""), -static_cast<double>(ell * (ell + 1))});
    m.derivation_ = rec;
    return m;
}

HeatKernelModel HeatKernelModel::for_group(const LieGroup& group) {
    if (group.kind() == GroupKind::Torus) return torus(group.dim());
    if (group.kind() == GroupKind::SpecialOrthogonal && group.matrix_size() == 2) return torus(1);
    if (group.kind() == GroupKind::SpecialOrthogonal && group.matrix_size() == 3) return so3(group);
    throw KernelDomainError("no built-in heat kernel for group " + group.name());
}

int HeatKernelModel::truncation(double t) const {
    if (t <= 0) throw KernelDomainError("heat kernel needs t > 0");
    const int max_ell = static_cast<int>(spectrum_.size()) - 1;
    for (int ell = 1; ell <= max_ell; ++ell) {
        double d = 2.0 * ell + 1.0;
        // tail bound of the remaining terms at angle 0
        if (d * d * std::exp(spectrum_[ell].eigenvalue * t / 2.0) < 1e-16 && -spectrum_[ell].eigenvalue * t > 2.0)
            return ell;
    }
    throw KernelDomainError("spectral truncation insufficient at t = " + std::to_string(t));
}

double HeatKernelModel::circle_density(double t, double theta) {
    if (t <= 0) throw KernelDomainError("heat kernel needs t > 0");
    theta = wrap_angle(theta);
    const int images = image_count(t);
    double sum = 0.0;
    for (int m = -images; m <= images; ++m) {
        double y = theta + 2.0 * kPi * m;
        sum += std::exp(-y * y / (2.0 * t));
    }
    return 2.0 * kPi * sum / std::sqrt(2.0 * kPi * t);
}

double HeatKernelModel::so3_density(double t, double angle) const {
    const int L = truncation(t);
    double sum = 0.0;
    for (int ell = 0; ell <= L; ++ell) {
        const auto& term = spectrum_[ell];
        sum += term.dimension * std::exp(term.eigenvalue * t / 2.0) * character(ell, angle);
    }
    return sum;
}

double HeatKernelModel::so3_angle_density(double t, double angle) const {
    return so3_density(t, angle) * (1.0 - std::cos(angle)) / kPi;
}

std::vector<double> HeatKernelModel::coords_of(const GroupElement& x) const {
    switch (variant_) {
        case KernelVariant::FlatGaussian: throw KernelDomainError("flat kernel takes coordinates, not group elements");
        case KernelVariant::WrappedGaussianTorus: {
            if (x.rows() != 2 * dim_) throw std::invalid_argument("element does not match torus dimension");
            std::vector<double> a;
            for (int i = 0; i < dim_; ++i) a.push_back(std::atan2(x(2 * i + 1, 2 * i), x(2 * i, 2 * i)));
            return a;
        }
        case KernelVariant::SpectralSO3: {
            double c = std::clamp(0.5 * (x.trace() - 1.0), -1.0, 1.0);
            return {std::acos(c)};
        }
    }
    return {};
}

double HeatKernelModel::eval_coords(double t, const std::vector<double>& coords) const {
    if (t <= 0) throw KernelDomainError("heat kernel needs t > 0");
    switch (variant_) {
        case KernelVariant::FlatGaussian: {
            if (static_cast<int>(coords.size()) != dim_) throw std::invalid_argument("coordinate count mismatch");
            double r2 = 0.0;
            for (double c : coords) r2 += c * c;
            return std::pow(2.0 * kPi * t, -0.5 * dim_) * std::exp(-r2 / (2.0 * t));
        }
        case KernelVariant::WrappedGaussianTorus: {
            if (static_cast<int>(coords.size()) != dim_) throw std::invalid_argument("coordinate count mismatch");
            double p = 1.0;
            for (double c : coords) p *= circle_density(t, c);
            return p;
        }
        case KernelVariant::SpectralSO3:
            if (coords.size() != 1) throw std::invalid_argument("so3 kernel takes the rotation angle");
            return so3_density(t, coords[0]);
    }
    return 0.0;
}

double HeatKernelModel::eval(double t, const GroupElement& x) const { return eval_coords(t, coords_of(x)); }

double HeatKernelModel::angle_mass(double t, double a, double b) const {
    if (t <= 0) throw KernelDomainError("heat kernel needs t > 0");
    switch (variant_) {
        case KernelVariant::WrappedGaussianTorus: {
            const int images = image_count(t) + 1;
            const double s = std::sqrt(t);
            double mass = 0.0;
            for (int m = -images; m <= images; ++m)
                mass += std_normal_cdf((b + 2.0 * kPi * m) / s) - std_normal_cdf((a + 2.0 * kPi * m) / s);
            return mass;
        }
        case KernelVariant::SpectralSO3:
            return integrate([&](double th) { return so3_angle_density(t, th); }, a, b);
        case KernelVariant::FlatGaussian: break;
    }
    throw KernelDomainError("angle marginal needs a compact kernel");
}

nlohmann::json HeatKernelModel::spectral_json() const {
    nlohmann::json j{{"variant", to_string(variant_)}, {"dim", dim_}};
    if (variant_ != KernelVariant::SpectralSO3) return j;
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& term : spectrum_) {
        nlohmann::json e{{"ell", term.ell}, {"dimension", term.dimension}, {"eigenvalue", term.eigenvalue}};
        if (std::isfinite(term.fitted)) e["fitted"] = term.fitted;
        terms.push_back(e);
    }
    j["terms"] = terms;
    j["max_ell"] = static_cast<int>(spectrum_.size()) - 1;
    j["derivation"] = {{"method", derivation_.method},
                       {"step", derivation_.step},
                       {"probes", derivation_.probes},
                       {"eigenfunction_spread", derivation_.eigenfunction_spread},
                       {"snap_tolerance", derivation_.snap_tolerance},
                       {"snapped", derivation_.snapped}};
    return j;
}

double kernel_eval(const HeatKernelModel& model, double t, const GroupElement& x) {
    if (t <= 0) throw KernelDomainError("heat kernel needs t > 0");
    return model.eval(t, x);
}

double fdd_log_density(const HeatKernelModel& model, const std::vector<double>& partition,
                       const std::vector<GroupElement>& points) {
    if (partition.size() != points.size() || partition.empty())
        throw std::invalid_argument("partition and points must have equal nonzero length");
    double prev_t = 0.0;
    GroupElement prev = GroupElement::Identity(points[0].rows(), points[0].cols());
    double sum = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
        if (partition[i] <= prev_t) throw std::invalid_argument("partition must be strictly increasing from 0");
        sum += std::log(kernel_eval(model, partition[i] - prev_t, GroupElement(prev.transpose() * points[i])));
        prev_t = partition[i];
        prev = points[i];
    }
    return sum;
}

double kernel_normalization(const HeatKernelModel& model, double t) {
    if (t <= 0) throw KernelDomainError("heat kernel needs t > 0");
    switch (model.variant()) {
        case KernelVariant::FlatGaussian: {
            double w = 14.0 * std::sqrt(t);
            double one = integrate([&](double x) { return std::exp(-x * x / (2 * t)) / std::sqrt(2 * kPi * t); }, -w, w);
            return std::pow(one, model.dim());
        }
        case KernelVariant::WrappedGaussianTorus: {
            double one =
                integrate([&](double th) { return HeatKernelModel::circle_density(t, th) / (2 * kPi); }, -kPi, kPi);
            return std::pow(one, model.dim());
        }
        case KernelVariant::SpectralSO3:
            return integrate([&](double th) { return model.so3_angle_density(t, th); }, 0.0, kPi);
    }
    return 0.0;
}

double chapman_kolmogorov_defect(const HeatKernelModel& model, double s, double t, const std::vector<double>& x) {
    if (s <= 0 || t <= 0) throw KernelDomainError("heat kernel needs positive times");
    if (static_cast<int>(x.size()) != model.dim()) throw std::invalid_argument("coordinate count mismatch");
    double conv = 1.0;
    for (double xi : x) {
        if (model.variant() == KernelVariant::FlatGaussian) {
            auto p = [](double tt, double y) { return std::exp(-y * y / (2 * tt)) / std::sqrt(2 * kPi * tt); };
            double w = 14.0 * std::sqrt(std::max(s, t)) + std::abs(xi);
            conv *= integrate([&](double y) { return p(s, y) * p(t, xi - y); }, -w, w);
        } else if (model.variant() == KernelVariant::WrappedGaussianTorus) {
            conv *= integrate(
                [&](double y) {
                    return HeatKernelModel::circle_density(s, y) * HeatKernelModel::circle_density(t, xi - y) /
                           (2 * kPi);
                },
                -kPi, kPi);
        } else {
            throw KernelDomainError("Chapman-Kolmogorov quadrature is implemented for flat and torus kernels");
        }
    }
    return std::abs(conv - model.eval_coords(s + t, x));
}

GoodnessOfFit fdd_goodness_of_fit(const HeatKernelModel& model, const std::vector<double>& partition,
                                  const std::vector<std::vector<GroupElement>>& samples, int bins_per_time,
                                  double time_scale) {
    if (samples.size() < 1000) throw std::invalid_argument("goodness of fit needs at least 1000 samples");
    if (partition.empty()) throw std::invalid_argument("empty partition");
    if (bins_per_time < 2) throw std::invalid_argument("need at least two bins per time");
    const bool circle = model.variant() == KernelVariant::WrappedGaussianTorus && model.dim() == 1;
    if (!circle && model.variant() != KernelVariant::SpectralSO3)
        throw KernelDomainError("goodness of fit supports the circle and so3 kernels");
    const double lo = circle ? -kPi : 0.0;
    const double width = (circle ? 2.0 * kPi : kPi) / bins_per_time;
    const size_t k = partition.size();

    size_t cells = 1;
    for (size_t i = 0; i < k; ++i) cells *= bins_per_time;

    // bin masses per time step
    std::vector<std::vector<double>> mass(k, std::vector<double>(bins_per_time));
    double prev_t = 0.0;
    for (size_t i = 0; i < k; ++i) {
        double dt = (partition[i] - prev_t) * time_scale;
        if (partition[i] <= prev_t) throw std::invalid_argument("partition must be strictly increasing from 0");
        for (int b = 0; b < bins_per_time; ++b) mass[i][b] = model.angle_mass(dt, lo + b * width, lo + (b + 1) * width);
        prev_t = partition[i];
    }

    std::vector<double> observed(cells, 0.0);
    for (const auto& path : samples) {
        if (path.size() != k) throw std::invalid_argument("sample length does not match partition");
        size_t cell = 0;
        GroupElement prev = GroupElement::Identity(path[0].rows(), path[0].cols());
        for (size_t i = 0; i < k; ++i) {
            double a = model.coords_of(GroupElement(prev.transpose() * path[i]))[0];
            int b = std::clamp(static_cast<int>(std::floor((a - lo) / width)), 0, bins_per_time - 1);
            cell = cell * bins_per_time + b;
            prev = path[i];
        }
        observed[cell] += 1.0;
    }

    const double n = static_cast<double>(samples.size());
    std::vector<double> expected(cells);
    for (size_t c = 0; c < cells; ++c) {
        double p = 1.0;
        size_t rest = c;
        for (size_t i = k; i-- > 0;) {
            p *= mass[i][rest % bins_per_time];
            rest /= bins_per_time;
        }
        expected[c] = n * p;
    }

    // merge consecutive cells until each has expected count >= 5
    std::vector<std::pair<double, double>> merged;
    double e_acc = 0.0, o_acc = 0.0;
    for (size_t c = 0; c < cells; ++c) {
        e_acc += expected[c];
        o_acc += observed[c];
        if (e_acc >= 5.0) {
            merged.emplace_back(e_acc, o_acc);
            e_acc = o_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (merged.empty()) merged.emplace_back(e_acc, o_acc);
        else {
            merged.back().first += e_acc;
            merged.back().second += o_acc;
        }
    }

    GoodnessOfFit fit;
    fit.samples = samples.size();
    fit.bins_requested = static_cast<int>(cells);
    fit.bins_used = static_cast<int>(merged.size());
    for (auto [e, o] : merged) fit.statistic += (o - e) * (o - e) / e;
    fit.degrees_of_freedom = std::max(1, fit.bins_used - 1);
    boost::math::chi_squared_distribution<double> chi(fit.degrees_of_freedom);
    fit.p_value = boost::math::cdf(boost::math::complement(chi, fit.statistic));
    return fit;
}

}  // namespace liebm
