#include "liebm/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace liebm {

void EstimatorState::add(double x) {
    ++count;
    double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
    min = std::min(min, x);
    max = std::max(max, x);
}

void EstimatorState::merge(const EstimatorState& other) {
    if (other.count == 0) return;
    if (count == 0) {
        *this = other;
        return;
    }
    double na = static_cast<double>(count), nb = static_cast<double>(other.count);
    double n = na + nb;
    double delta = other.mean - mean;
    mean += delta * nb / n;
    m2 += other.m2 + delta * delta * na * nb / n;
    count += other.count;
    min = std::min(min, other.min);
    max = std::max(max, other.max);
}

double EstimatorState::std_error() const {
    if (count < 2) return 0.0;
    double n = static_cast<double>(count);
    return std::sqrt(m2 / (n * (n - 1.0)));
}

EstimatorState merge(EstimatorState a, const EstimatorState& b) {
    a.merge(b);
    return a;
}

namespace {

struct ChunkResult {
    std::vector<EstimatorState> columns;
    std::uint64_t failures = 0;
    std::string first_failure;
};

ChunkResult merge_tree(std::vector<ChunkResult>& chunks, size_t lo, size_t hi) {
    if (hi - lo == 1) return std::move(chunks[lo]);
    size_t mid = lo + (hi - lo) / 2;
    ChunkResult left = merge_tree(chunks, lo, mid);
    ChunkResult right = merge_tree(chunks, mid, hi);
    for (size_t i = 0; i < left.columns.size(); ++i) left.columns[i].merge(right.columns[i]);
    left.failures += right.failures;
    if (left.first_failure.empty()) left.first_failure = std::move(right.first_failure);
    return left;
}

}  // namespace

EnsembleResult run_ensemble(size_t width, const PathTask& task, std::uint64_t paths, const RunOptions& options) {
    if (paths == 0) return EnsembleResult{std::vector<EstimatorState>(width), 0, {}};
    const std::uint64_t chunk = std::max<std::uint64_t>(1, options.chunk_size);
    const size_t n_chunks = static_cast<size_t>((paths + chunk - 1) / chunk);
    std::vector<ChunkResult> chunks(n_chunks);

    auto run_chunk = [&](size_t c) {
        ChunkResult r;
        r.columns.resize(width);
        std::vector<double> buf(width);
        std::uint64_t begin = options.first_index + c * chunk;
        std::uint64_t end = std::min(options.first_index + paths, begin + chunk);
        for (std::uint64_t i = begin; i < end; ++i) {
            try {
                std::fill(buf.begin(), buf.end(), 0.0);
                task(i, buf);
                bool finite = std::all_of(buf.begin(), buf.end(), [](double v) { return std::isfinite(v); });
                if (!finite) throw std::runtime_error("non-finite task output");
                for (size_t j = 0; j < width; ++j) r.columns[j].add(buf[j]);
            } catch (const std::exception& e) {
                if (r.failures++ == 0) r.first_failure = "path " + std::to_string(i) + ": " + e.what();
            }
        }
        chunks[c] = std::move(r);
    };

    unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<size_t>(workers, n_chunks));
    if (workers <= 1) {
        for (size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (size_t c = next++; c < n_chunks; c = next++) run_chunk(c);
            });
        for (auto& t : pool) t.join();
    }

    ChunkResult total = merge_tree(chunks, 0, n_chunks);
    double rate = static_cast<double>(total.failures) / static_cast<double>(paths);
    if (rate > options.max_failure_rate) {
        std::ostringstream os;
        os << "campaign failed: " << total.failures << " of " << paths << " paths threw (" << total.first_failure << ")";
        throw CampaignFailure(os.str());
    }
    return EnsembleResult{std::move(total.columns), total.failures, std::move(total.first_failure)};
}

Estimate run_estimator(const std::function<double(std::uint64_t)>& task, std::uint64_t paths,
                       const RunOptions& options) {
    if (paths < 2) throw std::invalid_argument("run_estimator needs at least two paths");
    auto r = run_ensemble(1, [&](std::uint64_t i, std::span<double> out) { out[0] = task(i); }, paths, options);
    return Estimate{r.columns[0].mean, r.columns[0].std_error(), r.columns[0].count};
}

std::string SlopeReport::verdict() const {
    if (noise_limited) return "noise-limited";
    std::ostringstream os;
    os << "order " << order;
    return os.str();
}

SlopeReport fit_ladder(std::vector<LadderPoint> points, double noise_floor) {
    SlopeReport rep;
    rep.points = std::move(points);
    bool any_signal = false;
    for (const auto& p : rep.points)
        if (std::abs(p.gap) > std::max(3.0 * p.std_error, noise_floor)) any_signal = true;
    if (!any_signal) {
        rep.noise_limited = true;
        return rep;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = 0;
    for (const auto& p : rep.points) {
        double x = std::log(p.dt);
        double y = std::log(std::max(std::abs(p.gap), 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        n += 1;
    }
    double denom = n * sxx - sx * sx;
    if (n < 2 || denom == 0.0) {
        rep.noise_limited = true;
        return rep;
    }
    rep.order = (n * sxy - sx * sy) / denom;
    rep.intercept = (sy - rep.order * sx) / n;
    return rep;
}

SlopeReport bias_ladder(const std::vector<int>& ladder, double horizon,
                        const std::function<LadderPoint(int steps)>& gap_at, double noise_floor) {
    if (ladder.size() < 3) throw std::invalid_argument("bias ladder needs at least three grids");
    for (size_t i = 1; i < ladder.size(); ++i)
        if (ladder[i] <= ladder[i - 1]) throw std::invalid_argument("grid ladder must be strictly increasing");
    std::vector<LadderPoint> pts;
    for (int n : ladder) {
        LadderPoint p = gap_at(n);
        p.steps = n;
        p.dt = horizon / n;
        pts.push_back(p);
    }
    return fit_ladder(std::move(pts), noise_floor);
}

}  // namespace liebm
