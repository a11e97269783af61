#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "esac/detect.hpp"
#include "esac/errors.hpp"
#include "esac/rng.hpp"
#include "oracles.hpp"

using esac::DataMatrix;
using esac::DetectionResult;
using esac::EsacConfig;
using esac::NEff;
using esac::PenaltyTable;
using esac::RateContext;
using esac::SeededIntervalSet;
using esac::Variant;

namespace {

// Reference recursion: scans every contained interval with the naive score,
// then filters to the minimal detecting length. No early exit, no shared
// scan engine; tie-breaks as specified (smallest start, then smallest v).
struct OracleSearch {
    const std::vector<std::vector<double>>& rows;
    const SeededIntervalSet& set;
    const oracle::NaiveTable gamma;
    const oracle::NaiveTable lambda;
    Variant variant;
    std::vector<int> found;

    double max_over_positions(const oracle::NaiveTable& table, int s, int e, int* argmax) const {
        double best = -std::numeric_limits<double>::infinity();
        int best_v = s + 1;
        for (int v = s + 1; v < e; ++v) {
            const double value = oracle::naive_penalized_score(rows, s, e, v, table);
            if (value > best) {
                best = value;
                best_v = v;
            }
        }
        if (argmax) *argmax = best_v;
        return best;
    }

    void run(int s, int e) {
        if (e - s <= 1) return;
        std::vector<int> fired;
        for (std::size_t idx = 0; idx < set.intervals.size(); ++idx) {
            const auto& iv = set.intervals[idx];
            if (iv.s < s || iv.e > e) continue;
            double max_gamma;
            if (variant == Variant::MidpointTest) {
                const int mid = (iv.s + iv.e) / 2;
                max_gamma = oracle::naive_penalized_score(rows, iv.s, iv.e, mid, gamma);
            } else {
                max_gamma = max_over_positions(gamma, iv.s, iv.e, nullptr);
            }
            if (max_gamma > 0.0) fired.push_back(static_cast<int>(idx));
        }
        if (fired.empty()) return;
        int l_star = std::numeric_limits<int>::max();
        for (int idx : fired) l_star = std::min(l_star, set.intervals[idx].length());
        double best = -std::numeric_limits<double>::infinity();
        int best_idx = -1;
        int best_v = -1;
        for (int idx : fired) {
            const auto& iv = set.intervals[idx];
            if (iv.length() != l_star) continue;
            int v = 0;
            const double value = max_over_positions(lambda, iv.s, iv.e, &v);
            if (value > best) {
                best = value;
                best_idx = idx;
                best_v = v;
            }
        }
        found.push_back(best_v);
        const auto& chosen = set.intervals[best_idx];
        if (variant == Variant::SplitAtEstimate) {
            run(s, best_v);
            run(best_v, e);
        } else {
            run(s, chosen.s + 1);
            run(chosen.e - 1, e);
        }
    }
};

std::vector<int> oracle_esac(const std::vector<std::vector<double>>& rows, const SeededIntervalSet& set,
                             const PenaltyTable& gamma, const PenaltyTable& lambda, Variant variant) {
    OracleSearch search{rows,
                        set,
                        {gamma.grid, gamma.a, gamma.nu, gamma.penalty},
                        {lambda.grid, lambda.a, lambda.nu, lambda.penalty},
                        variant,
                        {}};
    search.run(0, set.n);
    std::sort(search.found.begin(), search.found.end());
    return search.found;
}

std::vector<std::vector<double>> step_rows(int p, int n, const std::vector<int>& etas, double height) {
    std::vector<std::vector<double>> rows(p, std::vector<double>(n, 0.0));
    for (auto& row : rows) {
        double level = 0.0;
        std::size_t next = 0;
        for (int t = 1; t <= n; ++t) {
            if (next < etas.size() && t == etas[next] + 1) {
                level += height;
                ++next;
            }
            row[t - 1] = level;
        }
    }
    return rows;
}

} // namespace

TEST_SUITE_BEGIN("detect");

TEST_CASE("single-change estimator finds a noiseless step") {
    const RateContext ctx = RateContext::make(8, 2, NEff::Fourth);
    const auto lambda = PenaltyTable::analytic(ctx);
    const DataMatrix x = DataMatrix::from_rows(step_rows(2, 8, {4}, 10.0));
    const auto [eta_hat, score] = esac::estimate_single(x, ctx, lambda);
    CHECK(eta_hat == 4);
    CHECK(score.value > 0.0);
}

TEST_CASE("single-change estimator tie-break on all-zero data") {
    const RateContext ctx = RateContext::make(16, 3, NEff::Fourth);
    const auto lambda = PenaltyTable::analytic(ctx);
    const DataMatrix zeros(3, 16, std::vector<double>(3 * 16, 0.0));
    const auto [eta_hat, score] = esac::estimate_single(zeros, ctx, lambda);
    CHECK(eta_hat == 1); // constant-in-v score, smallest maximizer
    CHECK(score.value < 0.0);
}

TEST_CASE("esac finds nothing on zeros") {
    const RateContext ctx = RateContext::make(64, 4, NEff::Fourth);
    const auto set = SeededIntervalSet::generate(64, 1.5, 4);
    const auto cfg = EsacConfig::analytic(ctx);
    const DataMatrix zeros(4, 64, std::vector<double>(4 * 64, 0.0));
    CHECK(esac::esac(zeros, ctx, cfg, set).changepoints.empty());
}

TEST_CASE("esac recovers two strong dense changes exactly") {
    const RateContext ctx = RateContext::make(64, 4, NEff::Fourth);
    const auto set = SeededIntervalSet::generate(64, 1.5, 4);
    const auto rows = step_rows(4, 64, {20, 44}, 10.0);
    const DataMatrix x = DataMatrix::from_rows(rows);

    for (Variant variant : {Variant::SplitAtEstimate, Variant::Trimming, Variant::MidpointTest}) {
        const auto cfg = EsacConfig::analytic(ctx, variant);
        const auto result = esac::esac(x, ctx, cfg, set);
        const auto reference = oracle_esac(rows, set, cfg.gamma, cfg.lambda, variant);
        CHECK(result.positions() == reference);
        if (variant == Variant::SplitAtEstimate) {
            CHECK(result.positions() == std::vector<int>{20, 44});
        }
    }
}

TEST_CASE("narrowest-first early exit matches the full-scan reference on random data") {
    esac::SplitRng rng(99);
    const RateContext ctx = RateContext::make(64, 8, NEff::Fourth);
    const auto set = SeededIntervalSet::generate(64, 1.5, 4);
    const auto cfg = EsacConfig::analytic(ctx);
    int detected_total = 0;
    for (int instance = 0; instance < 50; ++instance) {
        std::vector<std::vector<double>> rows(8, std::vector<double>(64));
        for (auto& row : rows) {
            for (auto& v : row) v = rng.normal();
        }
        // Half the instances get planted changes so both branches are hit.
        if (instance % 2 == 0) {
            const int eta1 = 12 + static_cast<int>(rng.uniform_int(0, 8));
            const int eta2 = 40 + static_cast<int>(rng.uniform_int(0, 8));
            for (auto& row : rows) {
                for (int t = eta1 + 1; t <= 64; ++t) row[t - 1] += 3.0;
                for (int t = eta2 + 1; t <= 64; ++t) row[t - 1] -= 3.5;
            }
        }
        const DataMatrix x = DataMatrix::from_rows(rows);
        const auto result = esac::esac(x, ctx, cfg, set);
        detected_total += static_cast<int>(result.changepoints.size());
        CHECK(result.positions() == oracle_esac(rows, set, cfg.gamma, cfg.lambda, Variant::SplitAtEstimate));
    }
    CHECK(detected_total > 0);
}

TEST_CASE("recursion output is sorted, interior and duplicate-free") {
    esac::SplitRng rng(123);
    const RateContext ctx = RateContext::make(100, 5, NEff::Fourth);
    const auto set = SeededIntervalSet::generate(100, 1.5, 4);
    const auto cfg = EsacConfig::analytic(ctx);
    for (int instance = 0; instance < 10; ++instance) {
        std::vector<std::vector<double>> rows(5, std::vector<double>(100));
        for (auto& row : rows) {
            for (auto& v : row) v = rng.normal();
        }
        for (auto& row : rows) {
            for (int t = 31; t <= 100; ++t) row[t - 1] += 4.0;
            for (int t = 71; t <= 100; ++t) row[t - 1] -= 4.0;
        }
        const auto result = esac::esac(DataMatrix::from_rows(rows), ctx, cfg, set);
        const auto positions = result.positions();
        for (std::size_t i = 0; i < positions.size(); ++i) {
            CHECK(positions[i] > 0);
            CHECK(positions[i] < 100);
            if (i > 0) CHECK(positions[i] > positions[i - 1]);
        }
        CHECK(positions.size() <= 99);
    }
}

TEST_CASE("interval set built for another n is rejected") {
    const RateContext ctx = RateContext::make(64, 4, NEff::Fourth);
    const auto wrong = SeededIntervalSet::generate(32, 1.5, 4);
    const auto cfg = EsacConfig::analytic(ctx);
    const DataMatrix zeros(4, 64, std::vector<double>(4 * 64, 0.0));
    CHECK_THROWS_AS(esac::esac(zeros, ctx, cfg, wrong), esac::MismatchedNError);
}

TEST_CASE("significance ranking keeps the strongest scores in location order") {
    DetectionResult result;
    result.changepoints = {{10, 0, 20, 5.0, 1}, {30, 20, 40, 2.0, 1}, {50, 40, 60, 9.0, 2}};

    const auto top2 = esac::significance_rank(result, 2);
    REQUIRE(top2.changepoints.size() == 2);
    CHECK(top2.changepoints[0].position == 10);
    CHECK(top2.changepoints[1].position == 50);

    CHECK(esac::significance_rank(result, 5).changepoints.size() == 3); // clipped to J-hat
    CHECK(esac::significance_rank(result, 0).changepoints.empty());
}

TEST_SUITE_END();
