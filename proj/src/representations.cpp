#include "liebm/representations.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace liebm {

namespace {

const Complex kI{0.0, 1.0};

std::vector<ComplexVector> as_complex(const StepFunction& h) {
    std::vector<ComplexVector> out;
    out.reserve(h.cells.size());
    for (const auto& c : h.cells) out.push_back(c.cast<Complex>());
    return out;
}

void require_grid(const CylinderExponential& f, const TimeGrid& grid) { require_same_grid(f.grid(), grid); }

}  // namespace

StepFunction piecewise_direction(const TimeGrid& grid, const std::vector<double>& partition,
                                 const std::vector<AlgebraVector>& values) {
    if (partition.size() != values.size() + 1) throw std::invalid_argument("partition needs one more node than values");
    StepFunction h{grid, {}};
    size_t j = 0;
    for (int k = 0; k < grid.steps; ++k) {
        double mid = 0.5 * (grid.node(k) + grid.node(k + 1));
        while (j + 1 < values.size() && mid >= partition[j + 1]) ++j;
        h.cells.push_back(values[j]);
    }
    return h;
}

std::vector<ComplexVector> rotate_direction(const CameronMartinPath& phi, const TimeGrid& grid,
                                            const std::vector<ComplexVector>& u) {
    if (static_cast<int>(u.size()) != grid.steps) throw GridMismatchError("direction does not match grid");
    GroupPath phis = phi.sample(grid);
    std::vector<ComplexVector> out;
    out.reserve(u.size());
    for (int k = 0; k < grid.steps; ++k) {
        AdMatrix ad = phi.group().adjoint_matrix(phis.values[k]);
        out.push_back(ad.cast<Complex>() * u[k]);
    }
    return out;
}

CylinderExponential rotate_translate(const CameronMartinPath& phi, const StepFunction& a, const CylinderExponential& f) {
    require_grid(f, a.grid);
    CylinderExponential r = f;
    r.offset().add(bilinear(f.grid(), f.direction(), as_complex(a)));
    r.direction() = rotate_direction(phi, f.grid(), f.direction());
    return r;
}

CylinderExponential gauss_regular_rep(const StepFunction& h, const CameronMartinPath& rotation,
                                      const CylinderExponential& f) {
    require_grid(f, h.grid);
    CylinderExponential r = f;
    std::vector<ComplexVector> ru = rotate_direction(rotation, f.grid(), f.direction());
    std::vector<ComplexVector> hc = as_complex(h);
    r.offset().add(-bilinear(f.grid(), ru, hc));
    r.offset().add(Complex(-0.25 * h.l2_norm_sq(), 0.0));
    for (size_t k = 0; k < ru.size(); ++k) ru[k] += 0.5 * hc[k];
    r.direction() = std::move(ru);
    return r;
}

std::string EnergyConvention::label() const {
    std::ostringstream os;
    os << "kappa=" << kappa << "," << to_string(derivative);
    return os.str();
}

std::vector<EnergyConvention> energy_candidates() {
    std::vector<EnergyConvention> out;
    for (double k : {1.0, 0.5, -0.5, -1.0})
        for (Side s : {Side::Left, Side::Right}) out.push_back({k, s});
    return out;
}

CylinderExponential energy_rep(const CameronMartinPath& phi, const CylinderExponential& f,
                               const EnergyConvention& convention) {
    auto [left, right] = phi.log_derivatives(f.grid());
    const StepFunction& d = convention.derivative == Side::Left ? left : right;
    CylinderExponential r = f;
    r.direction() = rotate_direction(phi, f.grid(), f.direction());
    for (size_t k = 0; k < d.cells.size(); ++k) r.direction()[k] += (kI * convention.kappa) * d.cells[k].cast<Complex>();
    return r;
}

CylinderExponential brownian_rep_pullback(const CameronMartinPath& phi, const CylinderExponential& f,
                                          PullbackForm form) {
    auto [left, right] = phi.log_derivatives(f.grid());
    CylinderExponential r = rotate_translate(phi, left, f);
    if (form == PullbackForm::Derived) {
        for (size_t k = 0; k < right.cells.size(); ++k) r.direction()[k] -= 0.5 * right.cells[k].cast<Complex>();
        r.offset().add(Complex(-0.25 * right.l2_norm_sq(), 0.0));
    } else {
        for (size_t k = 0; k < left.cells.size(); ++k) r.direction()[k] += 0.5 * left.cells[k].cast<Complex>();
        r.offset().add(Complex(-0.25 * phi.energy(), 0.0));
    }
    return r;
}

Complex brownian_rep_pathwise(const CameronMartinPath& phi, const GroupPath& phi_samples,
                              const CylinderExponential& f, const AlgebraPath& w) {
    const LieGroup& group = phi.group();
    StepFunction b = phi.log_derivatives(w.grid).second;
    double half_log_z = 0.5 * log_density(b, b.l2_norm_sq(), w, Side::Right);
    GroupPath g = develop_left(group, w);
    AlgebraPath shifted = ito_left(group, path_multiply(g, phi_samples));
    return std::exp(half_log_z + f.log_eval(shifted));
}

double data_distance(const CylinderExponential& a, const CylinderExponential& b) {
    require_same_grid(a.grid(), b.grid());
    double worst = 0.0;
    for (size_t k = 0; k < a.direction().size(); ++k)
        worst = std::max(worst, (a.direction()[k] - b.direction()[k]).cwiseAbs().maxCoeff());
    return std::abs(a.offset().value() - b.offset().value()) + worst;
}

GroupCylinderFunction pullback(const LieGroup& group, const CylinderExponential& f) {
    return [group, f](const GroupPath& g) { return f.eval(ito_left(group, g)); };
}

GroupCylinderFunction involution_J(const GroupCylinderFunction& f) {
    return [f](const GroupPath& g) { return f(path_invert(g)); };
}

Complex involution_via_right(const LieGroup& group, const CylinderExponential& f, const GroupPath& g) {
    AlgebraPath br = ito_right(group, g);
    for (auto& v : br.values) v = -v;
    return f.eval(br);
}

std::pair<double, double> prop_rewrite_defects(const CameronMartinPath& phi, const CylinderExponential& f) {
    const TimeGrid& grid = f.grid();
    StepFunction b = phi.log_derivatives(grid).second;
    StepFunction h{grid, {}};
    for (const auto& cell : b.cells) h.cells.push_back(-cell);
    std::vector<ComplexVector> ru = rotate_direction(phi, grid, f.direction());
    CylinderExponential printed = f, conj = f;
    printed.direction() = ru;
    conj.direction() = ru;
    for (size_t k = 0; k < ru.size(); ++k) {
        printed.direction()[k] -= (0.5 * kI) * h.cells[k].cast<Complex>();
        conj.direction()[k] += (0.5 * kI) * h.cells[k].cast<Complex>();
    }
    return {data_distance(fw_inverse(gauss_regular_rep(h, phi, fw_transform(f))), printed),
            data_distance(fw_transform(gauss_regular_rep(h, phi, fw_inverse(f))), conj)};
}

IntertwiningResult verify_intertwining(const CameronMartinPath& phi, const CylinderExponential& f, int paths,
                                       std::uint64_t seed, double budget) {
    if (paths < 2) throw std::invalid_argument("need at least two paths");
    const LieGroup& group = phi.group();
    const TimeGrid& grid = f.grid();
    const GroupPath phis = phi.sample(grid);
    const CylinderExponential finv = fw_inverse(f);
    const std::vector<EnergyConvention> cands = energy_candidates();
    std::vector<CylinderExponential> rhs;
    for (const auto& c : cands) rhs.push_back(fw_inverse(energy_rep(phi, f, c)));

    std::vector<ConventionStats> stats(cands.size());
    for (size_t c = 0; c < cands.size(); ++c) stats[c].convention = cands[c];
    for (int p = 0; p < paths; ++p) {
        AlgebraPath w = sample_bm(group, grid, NoiseStream{seed, static_cast<std::uint64_t>(p)});
        Complex lhs = brownian_rep_pathwise(phi, phis, finv, w);
        for (size_t c = 0; c < cands.size(); ++c) {
            double d = std::abs(lhs - rhs[c].eval(w));
            stats[c].max_abs = std::max(stats[c].max_abs, d);
            stats[c].rms += d * d;
        }
    }
    for (auto& s : stats) s.rms = std::sqrt(s.rms / paths);

    IntertwiningResult out;
    out.candidates = stats;
    // ties (the abelian case) go to the right derivative
    size_t best = 0;
    for (size_t c = 1; c < stats.size(); ++c) {
        double tie = 1e-12 * std::max(1.0, stats[best].rms);
        if (stats[c].rms < stats[best].rms - tie ||
            (std::abs(stats[c].rms - stats[best].rms) <= tie && cands[c].derivative == Side::Right))
            best = c;
    }
    out.selected = cands[best];
    out.symbolic_defect = data_distance(brownian_rep_pullback(phi, finv), rhs[best]);

    std::tie(out.prop_rewrite_printed, out.prop_rewrite_conjugate) = prop_rewrite_defects(phi, f);

    double kappa_sep = 1e300, side_sep = 1e300;
    for (size_t c = 0; c < stats.size(); ++c) {
        if (c == best) continue;
        if (cands[c].kappa != out.selected.kappa) kappa_sep = std::min(kappa_sep, stats[c].max_abs);
        else side_sep = std::min(side_sep, stats[c].max_abs);
    }

    VerificationReport& r = out.report;
    r.identity = "intertwining";
    r.group = group.name();
    r.samples = static_cast<std::uint64_t>(paths);
    r.seed = seed;
    r.estimate = stats[best].rms;
    r.references.push_back({"0", 0.0, "pointwise identity"});
    r.difference = stats[best].max_abs;
    r.bias_allowance = budget;
    const bool separated = kappa_sep > 1e-2;
    r.verdict = stats[best].max_abs <= budget && separated ? Verdict::Pass : Verdict::Fail;
    nlohmann::json cj = nlohmann::json::array();
    for (const auto& s : stats)
        cj.push_back({{"convention", s.convention.label()}, {"max_abs", s.max_abs}, {"rms", s.rms}});
    r.details = {{"selected", out.selected.label()},
                 {"candidates", cj},
                 {"kappa_separation", kappa_sep},
                 {"side_separation", side_sep},
                 {"symbolic_defect", out.symbolic_defect},
                 {"prop_rewrite_printed", out.prop_rewrite_printed},
                 {"prop_rewrite_conjugate", out.prop_rewrite_conjugate}};
    r.config = {{"horizon", grid.horizon}, {"steps", grid.steps}, {"paths", paths}, {"seed", seed},
                {"budget", budget}, {"phi_energy", phi.energy()}};
    r.seal();
    return out;
}

SlopeReport intertwining_ladder(const CameronMartinPath& phi, const std::vector<double>& partition,
                                const std::vector<AlgebraVector>& values, const EnergyConvention& convention,
                                const std::vector<int>& ladder, int paths, std::uint64_t seed) {
    if (ladder.empty()) throw std::invalid_argument("empty ladder");
    const LieGroup& group = phi.group();
    const int fine = *std::max_element(ladder.begin(), ladder.end());
    auto gap_at = [&](int steps) {
        TimeGrid grid(phi.horizon(), steps);
        CylinderExponential f = CylinderExponential::character(piecewise_direction(grid, partition, values));
        CylinderExponential finv = fw_inverse(f);
        CylinderExponential rhs = fw_inverse(energy_rep(phi, f, convention));
        GroupPath phis = phi.sample(grid);
        EstimatorState sq;
        for (int p = 0; p < paths; ++p) {
            AlgebraPath w = sample_bm_nested(group, grid, fine, NoiseStream{seed, static_cast<std::uint64_t>(p)});
            sq.add(std::norm(brownian_rep_pathwise(phi, phis, finv, w) - rhs.eval(w)));
        }
        LadderPoint pt;
        pt.gap = std::sqrt(sq.mean);
        pt.std_error = pt.gap > 0 ? sq.std_error() / (2.0 * pt.gap) : 0.0;
        return pt;
    };
    return bias_ladder(ladder, phi.horizon(), gap_at);
}

std::vector<std::vector<std::vector<double>>> finite_difference_designs(int cells, const std::vector<double>& eps,
                                                                       int max_order) {
    std::vector<std::vector<std::vector<double>>> designs;
    std::vector<std::vector<double>> current{std::vector<double>(cells, 0.0)};
    designs.push_back(current);
    for (double e : eps) {
        for (int j = 0; j < cells; ++j)
            for (double s : {e, -e}) {
                std::vector<double> x(cells, 0.0);
                x[j] = s;
                current.push_back(x);
            }
        designs.push_back(current);
        if (max_order >= 2 && cells >= 2) {
            for (int i = 0; i < cells; ++i)
                for (int j = i + 1; j < cells; ++j)
                    for (double si : {e, -e})
                        for (double sj : {e, -e}) {
                            std::vector<double> x(cells, 0.0);
                            x[i] = si;
                            x[j] = sj;
                            current.push_back(x);
                        }
            designs.push_back(current);
        }
    }
    return designs;
}

CyclicityResult cyclicity_residual(const CylinderPolynomial& target,
                                   const std::vector<std::vector<std::vector<double>>>& designs, std::uint64_t paths,
                                   std::uint64_t seed, double ridge) {
    const int m = target.cells();
    std::vector<double> sigma(m);
    for (int j = 0; j < m; ++j) sigma[j] = target.sigma(j);
    const double norm2 = target.pairing(target);
    if (norm2 <= 0.0) throw std::invalid_argument("target has zero norm");

    // sqrt Z_x = prod_j exp(a_j Z_j - a_j^2), a_j = x_j sigma_j / 2, Z_j standard normal
    auto coeffs = [&](const std::vector<double>& x) {
        std::vector<double> a(m);
        for (int j = 0; j < m; ++j) a[j] = 0.5 * x[j] * sigma[j];
        return a;
    };
    auto gram = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
        return std::exp(-0.5 * s);
    };
    auto cross = [&](const std::vector<double>& a) {
        double sum = 0.0;
        for (const auto& [deg, c] : target.terms()) {
            double p = c;
            for (int j = 0; j < m; ++j) p *= std::pow(a[j], deg[j]) * std::exp(-0.5 * a[j] * a[j]);
            sum += p;
        }
        return sum;
    };

    struct Fit {
        std::vector<std::vector<double>> a;
        Eigen::VectorXd beta;
    };
    std::vector<Fit> fits;
    CyclicityResult out;
    for (const auto& design : designs) {
        const int n = static_cast<int>(design.size());
        Fit fit;
        for (const auto& x : design) {
            if (static_cast<int>(x.size()) != m) throw std::invalid_argument("design point has wrong length");
            fit.a.push_back(coeffs(x));
        }
        Eigen::MatrixXd g(n, n);
        Eigen::VectorXd b(n);
        for (int i = 0; i < n; ++i) {
            b[i] = cross(fit.a[i]);
            for (int k = 0; k < n; ++k) g(i, k) = gram(fit.a[i], fit.a[k]);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
        const auto& sv = svd.singularValues();
        CyclicityStep step;
        step.design_size = design.size();
        step.condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
        Eigen::MatrixXd reg = g + ridge * Eigen::MatrixXd::Identity(n, n);
        fit.beta = reg.ldlt().solve(b);
        double explained = b.dot(fit.beta);
        step.residual = std::sqrt(std::max(0.0, norm2 - explained) / norm2);
        out.steps.push_back(step);
        fits.push_back(std::move(fit));
    }

    if (paths >= 2) {
        auto task = [&](std::uint64_t index, std::span<double> col) {
            auto rng = NoiseStream{seed, index}.engine();
            std::normal_distribution<double> normal;
            std::vector<double> z(m);
            for (auto& v : z) v = normal(rng);
            double t = 0.0;
            for (const auto& [deg, c] : target.terms()) {
                double p = c;
                for (int j = 0; j < m; ++j) p *= hermite(deg[j], z[j]);
                t += p;
            }
            for (size_t s = 0; s < fits.size(); ++s) {
                double proj = 0.0;
                for (size_t i = 0; i < fits[s].a.size(); ++i) {
                    double e = 0.0;
                    for (int j = 0; j < m; ++j) e += fits[s].a[i][j] * z[j] - fits[s].a[i][j] * fits[s].a[i][j];
                    proj += fits[s].beta[i] * std::exp(e);
                }
                col[s] = (t - proj) * (t - proj) / norm2;
            }
        };
        EnsembleResult res = run_ensemble(fits.size(), task, paths);
        for (size_t s = 0; s < fits.size(); ++s) {
            double mean = std::max(0.0, res.mean(s));
            out.steps[s].mc_residual = std::sqrt(mean);
            out.steps[s].mc_std_error = mean > 0 ? res.std_error(s) / (2.0 * std::sqrt(mean)) : 0.0;
        }
    }

    for (size_t s = 1; s < out.steps.size(); ++s)
        if (out.steps[s].residual > out.steps[s - 1].residual + 1e-9) out.monotone = false;

    VerificationReport& r = out.report;
    r.identity = "cyclicity";
    r.group = "gaussian";
    r.samples = paths;
    r.seed = seed;
    r.estimate = out.steps.back().residual;
    r.std_error = out.steps.back().mc_std_error;
    r.references.push_back({"threshold", 0.05, "acceptance bound"});
    r.difference = r.estimate;
    r.verdict = out.monotone && r.estimate < 0.05 ? Verdict::Pass : Verdict::Fail;
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : out.steps)
        steps.push_back({{"design_size", s.design_size},
                         {"residual", s.residual},
                         {"condition", s.condition},
                         {"mc_residual", s.mc_residual},
                         {"mc_std_error", s.mc_std_error}});
    r.details = {{"steps", steps}, {"monotone", out.monotone}, {"degree", target.degree()}};
    r.config = {{"target", target.to_json()}, {"ridge", ridge}, {"paths", paths}, {"seed", seed}};
    r.seal();
    return out;
}

}  // namespace liebm
