#pragma once

#include <cstdint>
#include <vector>

#include "esac/intervals.hpp"
#include "esac/matrix.hpp"
#include "esac/rates.hpp"

namespace esac {

enum class SigmaMethod { MadDiff, Known };

struct SigmaEstimate {
    std::vector<double> per_series;
    SigmaMethod method = SigmaMethod::MadDiff;

    static SigmaEstimate known(std::vector<double> sigmas);
};

/// Noise scale of one series from the median absolute deviation of its first
/// differences, with the Gaussian consistency factor 1.4826/sqrt(2). Throws
/// DegenerateSeriesError when the estimate is zero (e.g. constant series).
double mad_sigma(std::span<const double> series);

/// Per-series MAD estimates for a whole matrix.
SigmaEstimate estimate_sigma(const DataMatrix& X);

/// Each series divided by its noise scale; prefix sums rebuilt.
DataMatrix normalize(const DataMatrix& X, const SigmaEstimate& sigma);

struct CalibrateOptions {
    bool normalize = false;     // MAD-rescale the null draws (match a normalizing pipeline)
    bool midpoint_scan = false; // calibrate for the midpoint-only detection scan
    int threads = 0;            // 0 = available parallelism
};

/// Monte Carlo detection penalty: raw per-level quantiles of the null score
/// maxima plus the three-segment penalty built from them.
struct CalibratedGamma {
    // calibration inputs (validated against the detection configuration)
    int n = 0;
    int p = 0;
    double alpha = 0.0;
    int K = 0;
    NEff n_eff = NEff::Fourth;
    bool normalized = false;
    bool midpoint_scan = false;
    double epsilon = 0.0;
    int mc_n = 0;
    std::uint64_t seed = 0;

    std::vector<int> grid;
    std::vector<double> raw_quantiles; // gamma-hat_{eps/3}(t), the (1-eps/3) empirical quantile
    std::vector<double> gamma;         // applied penalty per grid level
    double gamma1 = 0.0;               // leading constant, t <= log n
    double gamma2 = 0.0;               // leading constant, log n < t (non-terminal)
    double dense_value = 0.0;          // raw quantile at t = p

    /// Penalty table for a detection run; throws ConfigMismatchError if the
    /// context grid differs from the calibration grid.
    PenaltyTable to_table(const RateContext& ctx) const;
};

/// Simulate N null data sets and build the empirical penalty. Deterministic
/// given (seed, N, n, p, set) and independent of the worker count: replicate
/// r draws from the stream (seed, r) regardless of scheduling.
CalibratedGamma calibrate_gamma(const RateContext& ctx, const SeededIntervalSet& set, int N,
                                double epsilon, std::uint64_t seed, const CalibrateOptions& options = {});

} // namespace esac
