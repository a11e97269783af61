#include "esac/calibrate.hpp"

#include <algorithm>
#include <cmath>

#include "esac/errors.hpp"
#include "esac/parallel.hpp"
#include "esac/rng.hpp"
#include "esac/score.hpp"

namespace esac {

namespace {
constexpr double kMadFactor = 1.4826 / 1.4142135623730951; // 1.4826 / sqrt(2)

double median_inplace(std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    return 0.5 * (v[mid - 1] + upper);
}
} // namespace

SigmaEstimate SigmaEstimate::known(std::vector<double> sigmas) {
    return {std::move(sigmas), SigmaMethod::Known};
}

double mad_sigma(std::span<const double> series) {
    if (series.size() < 3) throw TooShortError("mad_sigma: need at least three observations");
    std::vector<double> diffs(series.size() - 1);
    for (std::size_t v = 0; v + 1 < series.size(); ++v) diffs[v] = series[v + 1] - series[v];
    std::vector<double> work = diffs;
    const double center = median_inplace(work);
    for (std::size_t v = 0; v < diffs.size(); ++v) work[v] = std::fabs(diffs[v] - center);
    const double mad = median_inplace(work);
    const double sigma = kMadFactor * mad;
    if (sigma <= 0.0) throw DegenerateSeriesError("mad_sigma: zero noise estimate");
    return sigma;
}

SigmaEstimate estimate_sigma(const DataMatrix& X) {
    SigmaEstimate est;
    est.method = SigmaMethod::MadDiff;
    est.per_series.reserve(X.p());
    for (int i = 0; i < X.p(); ++i) {
        const auto row = X.row(i);
        est.per_series.push_back(mad_sigma(row));
    }
    return est;
}

DataMatrix normalize(const DataMatrix& X, const SigmaEstimate& sigma) {
    if (sigma.per_series.size() != static_cast<std::size_t>(X.p())) {
        throw BadParamsError("normalize: one sigma per series required");
    }
    for (double s : sigma.per_series) {
        if (!(s > 0.0) || !std::isfinite(s)) throw DegenerateSeriesError("normalize: nonpositive noise scale");
    }
    return X.scaled_rows(sigma.per_series);
}

PenaltyTable CalibratedGamma::to_table(const RateContext& ctx) const {
    if (ctx.n != n || ctx.p != p || ctx.grid != grid || ctx.mode != n_eff) {
        throw ConfigMismatchError("calibrated penalty does not match the detection configuration");
    }
    return PenaltyTable::from_values(ctx, gamma);
}

CalibratedGamma calibrate_gamma(const RateContext& ctx, const SeededIntervalSet& set, int N,
                                double epsilon, std::uint64_t seed, const CalibrateOptions& options) {
    if (N < 100) throw BadParamsError("calibrate_gamma: need N >= 100");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw BadParamsError("calibrate_gamma: epsilon must be in (0,1)");
    if (set.n != ctx.n) throw MismatchedNError("calibrate_gamma: interval set generated for a different n");

    const int m = static_cast<int>(ctx.grid.size());
    const PenaltyTable zero = PenaltyTable::zero(ctx);
    std::vector<std::vector<double>> maxima(N);

    parallel_for(N, options.threads, [&](int rep) {
        SplitRng rng(seed, static_cast<std::uint64_t>(rep));
        std::vector<double> values(static_cast<std::size_t>(ctx.p) * ctx.n);
        for (auto& x : values) x = rng.normal();
        DataMatrix draw(ctx.p, ctx.n, std::move(values));
        if (options.normalize) draw = normalize(draw, estimate_sigma(draw));
        ScoreScanner scanner(draw, zero);
        scanner.unpenalized_max_per_t(set, options.midpoint_scan, maxima[rep]);
    });

    // k-th smallest with k = ceil(N (1 - eps/3)): the empirical quantile per
    // level, after a Bonferroni split over the three penalty segments.
    const int k = static_cast<int>(std::ceil(N * (1.0 - epsilon / 3.0)));
    CalibratedGamma cal;
    cal.n = ctx.n;
    cal.p = ctx.p;
    cal.alpha = set.alpha;
    cal.K = set.K;
    cal.n_eff = ctx.mode;
    cal.normalized = options.normalize;
    cal.midpoint_scan = options.midpoint_scan;
    cal.epsilon = epsilon;
    cal.mc_n = N;
    cal.seed = seed;
    cal.grid = ctx.grid;
    cal.raw_quantiles.resize(m);
    std::vector<double> column(N);
    for (int j = 0; j < m; ++j) {
        for (int rep = 0; rep < N; ++rep) column[rep] = maxima[rep][j];
        std::nth_element(column.begin(), column.begin() + (k - 1), column.end());
        cal.raw_quantiles[j] = column[k - 1];
    }

    // Segment boundaries use the theoretical sample size (log n, not
    // log n_eff); the terminal level t = p always takes its raw quantile.
    const double log_n = std::log(static_cast<double>(ctx.n));
    cal.gamma1 = 0.0;
    cal.gamma2 = 0.0;
    for (int j = 0; j < m; ++j) {
        const int t = ctx.grid[j];
        if (j == m - 1 && t == ctx.p) break;
        const double ratio = cal.raw_quantiles[j] / rate_r(t, ctx);
        if (t <= log_n) {
            cal.gamma1 = std::max(cal.gamma1, ratio);
        } else {
            cal.gamma2 = std::max(cal.gamma2, ratio);
        }
    }
    cal.dense_value = std::max(0.0, cal.raw_quantiles[m - 1]);
    cal.gamma.resize(m);
    for (int j = 0; j < m; ++j) {
        const int t = ctx.grid[j];
        if (j == m - 1 && t == ctx.p) {
            cal.gamma[j] = cal.dense_value;
        } else if (t <= log_n) {
            cal.gamma[j] = cal.gamma1 * rate_r(t, ctx);
        } else {
            cal.gamma[j] = cal.gamma2 * rate_r(t, ctx);
        }
    }
    return cal;
}

} // namespace esac
