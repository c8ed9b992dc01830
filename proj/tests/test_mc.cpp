#include "liebm/mc.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace liebm;

TEST_SUITE("mc") {

TEST_CASE("estimator merge matches sequential accumulation") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(2.0, 3.0);
    EstimatorState all, a, b;
    for (int i = 0; i < 1000; ++i) {
        double x = n(rng);
        all.add(x);
        (i < 300 ? a : b).add(x);
    }
    EstimatorState m = merge(a, b);
    CHECK(m.count == 1000);
    CHECK(m.mean == doctest::Approx(all.mean).epsilon(1e-13));
    CHECK(m.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
    CHECK(m.min == all.min);
    CHECK(m.max == all.max);
    CHECK(m.std_error() == doctest::Approx(std::sqrt(all.variance() / 1000)).epsilon(1e-12));
    CHECK(merge(EstimatorState{}, a).mean == a.mean);
}

TEST_CASE("results do not depend on the worker count") {
    auto task = [](std::uint64_t i, std::span<double> out) {
        std::mt19937_64 rng(i);
        std::normal_distribution<double> n;
        out[0] = n(rng);
        out[1] = out[0] * out[0];
    };
    RunOptions one, three;
    one.workers = 1;
    three.workers = 3;
    one.chunk_size = three.chunk_size = 64;
    EnsembleResult a = run_ensemble(2, task, 5000, one), b = run_ensemble(2, task, 5000, three);
    for (size_t c = 0; c < 2; ++c) {
        CHECK(a.mean(c) == b.mean(c));
        CHECK(a.columns[c].m2 == b.columns[c].m2);
    }
    CHECK(std::abs(a.mean(0)) < 4 * a.std_error(0));
    CHECK(a.mean(1) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("path failures") {
    auto rare = [](std::uint64_t i, std::span<double> out) {
        if (i == 17) throw std::runtime_error("boom");
        out[0] = 1.0;
    };
    RunOptions opt;
    opt.max_failure_rate = 0.01;
    EnsembleResult r = run_ensemble(1, rare, 1000, opt);
    CHECK(r.failures == 1);
    CHECK(r.columns[0].count == 999);
    CHECK(r.first_failure.find("boom") != std::string::npos);
    auto often = [](std::uint64_t i, std::span<double> out) {
        if (i % 10 == 0) throw std::runtime_error("boom");
        out[0] = 1.0;
    };
    CHECK_THROWS_AS(run_ensemble(1, often, 1000, opt), CampaignFailure);
}

TEST_CASE("scalar estimator") {
    Estimate e = run_estimator([](std::uint64_t i) { return static_cast<double>(i); }, 101);
    CHECK(e.count == 101);
    CHECK(e.mean == doctest::Approx(50.0));
    CHECK_THROWS(run_estimator([](std::uint64_t) { return 0.0; }, 1));
}

TEST_CASE("ladder fit recovers the order") {
    std::vector<LadderPoint> pts;
    for (int n : {4, 8, 16, 32}) pts.push_back({n, 1.0 / n, 0.3 * std::pow(1.0 / n, 1.5), 1e-9});
    SlopeReport s = fit_ladder(pts);
    CHECK(s.order == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(s.intercept == doctest::Approx(std::log(0.3)).epsilon(1e-10));
    CHECK_FALSE(s.noise_limited);

    for (auto& p : pts) p.gap = 0.0;
    CHECK(fit_ladder(pts).noise_limited);

    SlopeReport b = bias_ladder({2, 4, 8}, 2.0, [](int n) {
        LadderPoint p;
        p.gap = 2.0 / n;
        return p;
    });
    CHECK(b.points.size() == 3);
    CHECK(b.points[1].dt == doctest::Approx(0.5));
    CHECK(b.order == doctest::Approx(1.0).epsilon(1e-12));
}

}
