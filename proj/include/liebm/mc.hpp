#pragma once

// Reproducible Monte Carlo execution.
//
// Work is split into fixed-size chunks of path indices. Each chunk is
// accumulated sequentially and chunk states are merged by a binary tree keyed
// on chunk order, so results do not depend on the number of workers.

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace liebm {

struct EstimatorState {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;  // sum of squared deviations from the mean
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();

    void add(double x);
    void merge(const EstimatorState& other);
    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
    /// sqrt(m2 / (count (count - 1)))
    double std_error() const;
};

EstimatorState merge(EstimatorState a, const EstimatorState& b);

class CampaignFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    unsigned workers = 0;             // 0: hardware concurrency
    std::uint64_t chunk_size = 512;   // paths per deterministic chunk
    std::uint64_t first_index = 0;    // first path index
    double max_failure_rate = 1e-3;
};

/// Task writes `width` values for path `index` into `out`.
using PathTask = std::function<void(std::uint64_t index, std::span<double> out)>;

struct EnsembleResult {
    std::vector<EstimatorState> columns;
    std::uint64_t failures = 0;
    std::string first_failure;

    double mean(size_t i) const { return columns.at(i).mean; }
    double std_error(size_t i) const { return columns.at(i).std_error(); }
};

/// Runs `task` on M paths. Throws CampaignFailure when more than
/// `max_failure_rate` of paths throw.
EnsembleResult run_ensemble(size_t width, const PathTask& task, std::uint64_t paths, const RunOptions& options = {});

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t count = 0;
};

/// Scalar convenience wrapper; requires M >= 2.
Estimate run_estimator(const std::function<double(std::uint64_t)>& task, std::uint64_t paths,
                       const RunOptions& options = {});

struct LadderPoint {
    int steps = 0;
    double dt = 0.0;
    double gap = 0.0;
    double std_error = 0.0;
};

struct SlopeReport {
    std::vector<LadderPoint> points;
    double order = 0.0;        // fitted slope of log|gap| against log dt
    double intercept = 0.0;
    bool noise_limited = false;
    std::string verdict() const;
};

/// Log-log fit of |gap| against dt. When no gap exceeds
/// max(3 stderr, noise_floor) the fit is reported as noise-limited.
SlopeReport fit_ladder(std::vector<LadderPoint> points, double noise_floor = 1e-12);

/// Runs `gap_at(steps)` for each ladder entry and fits the order.
SlopeReport bias_ladder(const std::vector<int>& ladder, double horizon,
                        const std::function<LadderPoint(int steps)>& gap_at, double noise_floor = 1e-12);

}  // namespace liebm
