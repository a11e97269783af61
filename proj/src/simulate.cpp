#include "esac/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "esac/errors.hpp"
#include "esac/parallel.hpp"
#include "esac/rng.hpp"

namespace esac {

namespace {
// Stream-splitting rule: master seed, then replicate index, then role.
enum Role : std::uint64_t { kDesign = 0, kSignal = 1, kNoise = 2, kShifts = 3 };
} // namespace

double signal_rate(int k, int n, int p, SignalRate rate, NEff mode) {
    if (rate == SignalRate::MaxForm) {
        return rate_r(k, RateContext::make(n, p, mode));
    }
    const double log_n = std::log(static_cast<double>(n));
    const double boundary = std::sqrt(p * log_n);
    if (k >= boundary) return boundary;
    return k * std::log(std::numbers::e * p * log_n / (static_cast<double>(k) * k)) + log_n;
}

namespace {

void validate(const SimulationSpec& spec) {
    if (spec.n < 2 || spec.p < 1) throw SpecInvalidError("simulate: need n >= 2, p >= 1");
    if (spec.changepoints.size() != spec.sparsities.size()) {
        throw SpecInvalidError("simulate: one sparsity per changepoint required");
    }
    int prev = 0;
    for (int eta : spec.changepoints) {
        if (eta <= prev || eta >= spec.n) throw SpecInvalidError("simulate: changepoints must be ascending in (0,n)");
        prev = eta;
    }
    for (int k : spec.sparsities) {
        if (k < 1 || k > spec.p) throw SpecInvalidError("simulate: sparsity outside [1,p]");
    }
    if (!(spec.sigma > 0.0)) throw SpecInvalidError("simulate: sigma must be positive");
    if (spec.noise.model == NoiseModel::StudentT && spec.noise.df <= 2) {
        throw SpecInvalidError("simulate: Student t noise requires df > 2");
    }
    switch (spec.noise.model) {
        case NoiseModel::CsLoc:
        case NoiseModel::Cs:
        case NoiseModel::Temp:
            if (!(spec.noise.rho >= 0.0 && spec.noise.rho < 1.0)) {
                throw SpecInvalidError("simulate: rho must lie in [0,1)");
            }
            break;
        default:
            break;
    }
}

std::vector<int> min_gaps(const std::vector<int>& etas, int n) {
    std::vector<int> delta(etas.size());
    for (std::size_t j = 0; j < etas.size(); ++j) {
        const int left = j == 0 ? etas[j] : etas[j] - etas[j - 1];
        const int right = j + 1 == etas.size() ? n - etas[j] : etas[j + 1] - etas[j];
        delta[j] = std::min(left, right);
    }
    return delta;
}

} // namespace

GeneratedData generate(const SimulationSpec& spec) {
    validate(spec);
    const int n = spec.n;
    const int p = spec.p;
    const int J = static_cast<int>(spec.changepoints.size());
    const std::vector<int> delta = min_gaps(spec.changepoints, n);

    // Change vectors: phi_j from the signal rule, spread over the first k_j
    // coordinates with random signs (or a random Gaussian direction).
    SplitRng signal_rng(spec.seed, spec.replicate, kSignal);
    std::vector<std::vector<double>> theta(J, std::vector<double>(p, 0.0));
    for (int j = 0; j < J; ++j) {
        const int k = spec.sparsities[j];
        const double phi2 =
            spec.snr_c * signal_rate(k, n, p, spec.rate, spec.n_eff) * spec.sigma * spec.sigma / delta[j];
        const double phi = std::sqrt(phi2);
        if (spec.directions == DirectionScheme::EqualSigns) {
            const double magnitude = phi / std::sqrt(static_cast<double>(k));
            for (int i = 0; i < k; ++i) {
                theta[j][i] = signal_rng.uniform() < 0.5 ? magnitude : -magnitude;
            }
        } else {
            double norm2 = 0.0;
            for (int i = 0; i < k; ++i) {
                theta[j][i] = signal_rng.normal();
                norm2 += theta[j][i] * theta[j][i];
            }
            const double scale = phi / std::sqrt(norm2);
            for (int i = 0; i < k; ++i) theta[j][i] *= scale;
        }
    }

    // Mean matrix, built additively so overlapping ramps/shifts compose.
    std::vector<double> mean(static_cast<std::size_t>(p) * n, 0.0);
    auto mu = [&](int i, int v) -> double& { return mean[static_cast<std::size_t>(i) * n + v]; };
    if (spec.noise.model == NoiseModel::Async) {
        SplitRng shift_rng(spec.seed, spec.replicate, kShifts);
        for (int j = 0; j < J; ++j) {
            const int half = delta[j] / 2;
            for (int i = 0; i < p; ++i) {
                if (theta[j][i] == 0.0) continue;
                const int shifted =
                    static_cast<int>(shift_rng.uniform_int(spec.changepoints[j] - half, spec.changepoints[j] + half));
                for (int v = shifted; v < n; ++v) mu(i, v) += theta[j][i]; // v is 0-based: time v+1 > shifted
            }
        }
    } else if (spec.noise.model == NoiseModel::Gradual) {
        for (int j = 0; j < J; ++j) {
            const int half = delta[j] / 2;
            const int left = spec.changepoints[j] - half;
            const int right = spec.changepoints[j] + half + 1;
            for (int i = 0; i < p; ++i) {
                if (theta[j][i] == 0.0) continue;
                for (int v = left; v < n; ++v) { // 0-based v holds time v+1
                    const int time = v + 1;
                    const double frac = time >= right ? 1.0 : static_cast<double>(time - left) / (right - left);
                    mu(i, v) += frac * theta[j][i];
                }
            }
        }
    } else {
        for (int j = 0; j < J; ++j) {
            for (int i = 0; i < p; ++i) {
                if (theta[j][i] == 0.0) continue;
                for (int v = spec.changepoints[j]; v < n; ++v) mu(i, v) += theta[j][i];
            }
        }
    }

    // Noise.
    SplitRng rng(spec.seed, spec.replicate, kNoise);
    std::vector<double> values(static_cast<std::size_t>(p) * n);
    auto at = [&](int i, int v) -> double& { return values[static_cast<std::size_t>(i) * n + v]; };
    const double sigma = spec.sigma;
    switch (spec.noise.model) {
        case NoiseModel::M0:
        case NoiseModel::Async:
        case NoiseModel::Gradual:
            for (auto& x : values) x = sigma * rng.normal();
            break;
        case NoiseModel::Unif: {
            const double bound = std::sqrt(3.0);
            for (auto& x : values) x = sigma * rng.uniform(-bound, bound);
            break;
        }
        case NoiseModel::StudentT: {
            const int df = spec.noise.df;
            const double scale = std::sqrt((df - 2.0) / df);
            for (auto& x : values) {
                const double t = rng.normal() / std::sqrt(rng.chi_square(df) / df);
                x = sigma * scale * t;
            }
            break;
        }
        case NoiseModel::CsLoc: {
            // AR(1) across coordinates at each time point: Sigma_{jk} = rho^|j-k|.
            const double rho = spec.noise.rho;
            const double innov = std::sqrt(1.0 - rho * rho);
            for (int v = 0; v < n; ++v) {
                double w = rng.normal();
                at(0, v) = sigma * w;
                for (int i = 1; i < p; ++i) {
                    w = rho * w + innov * rng.normal();
                    at(i, v) = sigma * w;
                }
            }
            break;
        }
        case NoiseModel::Cs: {
            // (1-rho) I + (rho/p) 11^T via one shared factor per time point.
            const double rho = spec.noise.rho;
            const double own = std::sqrt(1.0 - rho);
            const double shared = std::sqrt(rho / p);
            for (int v = 0; v < n; ++v) {
                const double g = rng.normal();
                for (int i = 0; i < p; ++i) at(i, v) = sigma * (own * rng.normal() + shared * g);
            }
            break;
        }
        case NoiseModel::Temp: {
            // W_v = sqrt(rho) W~_v + sqrt(1-rho) W_{v-1}, taken verbatim; the
            // recursion is not variance-stationary.
            const double rho = spec.noise.rho;
            const double fresh = std::sqrt(rho);
            const double carry = std::sqrt(1.0 - rho);
            for (int i = 0; i < p; ++i) at(i, 0) = sigma * rng.normal();
            for (int v = 1; v < n; ++v) {
                for (int i = 0; i < p; ++i) at(i, v) = fresh * sigma * rng.normal() + carry * at(i, v - 1);
            }
            break;
        }
    }
    for (std::size_t idx = 0; idx < values.size(); ++idx) values[idx] += mean[idx];

    return {DataMatrix(p, n, std::move(values)), spec.changepoints, std::move(theta)};
}

double mse(std::span<const int> estimates, int truth) {
    if (estimates.empty()) return 0.0;
    double sum = 0.0;
    for (int est : estimates) {
        const double d = est - truth;
        sum += d * d;
    }
    return sum / static_cast<double>(estimates.size());
}

double hausdorff(std::span<const int> a, std::span<const int> b, int n) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return static_cast<double>(n);
    auto directed = [](std::span<const int> from, std::span<const int> to) {
        int worst = 0;
        for (int x : from) {
            int best = std::numeric_limits<int>::max();
            for (int y : to) best = std::min(best, std::abs(x - y));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return static_cast<double>(std::max(directed(a, b), directed(b, a)));
}

namespace {

// Locations drawn uniformly without replacement from {1,...,n-1}, returned
// sorted; sparsities per regime with the plain-log-n boundary.
std::vector<int> draw_locations(SplitRng& rng, int n, int j) {
    std::vector<int> etas;
    etas.reserve(j);
    while (static_cast<int>(etas.size()) < j) {
        const int candidate = static_cast<int>(rng.uniform_int(1, n - 1));
        if (std::find(etas.begin(), etas.end(), candidate) == etas.end()) etas.push_back(candidate);
    }
    std::sort(etas.begin(), etas.end());
    return etas;
}

std::vector<int> draw_sparsities(SplitRng& rng, int n, int p, int j, Regime regime) {
    const double boundary = std::sqrt(p * std::log(static_cast<double>(n)));
    const int sparse_hi = std::max(1, static_cast<int>(std::floor(boundary)));
    const int dense_lo = std::min(p, static_cast<int>(std::ceil(boundary)));
    std::vector<int> ks(j);
    for (int idx = 0; idx < j; ++idx) {
        Regime pick = regime;
        if (regime == Regime::Mixed) pick = rng.uniform() < 0.5 ? Regime::Sparse : Regime::Dense;
        ks[idx] = pick == Regime::Sparse ? static_cast<int>(rng.uniform_int(1, sparse_hi))
                                         : static_cast<int>(rng.uniform_int(dense_lo, p));
    }
    return ks;
}

} // namespace

MetricsReport run_experiment(const ExperimentDesign& design, int N, std::uint64_t seed, int threads) {
    if (N < 1) throw BadParamsError("run_experiment: need at least one replicate");
    const auto start = std::chrono::steady_clock::now();

    const RateContext ctx = RateContext::make(design.n, design.p, design.n_eff);
    const PenaltyTable lambda = PenaltyTable::analytic(ctx);
    const SeededIntervalSet set = design.mode == ExperimentDesign::Mode::Multi
                                      ? SeededIntervalSet::generate(design.n, design.alpha, design.K)
                                      : SeededIntervalSet{};
    EsacConfig cfg;
    if (design.mode == ExperimentDesign::Mode::Multi) {
        cfg.alpha = design.alpha;
        cfg.K = design.K;
        cfg.variant = design.variant;
        cfg.lambda = lambda;
        cfg.gamma = design.calibrated ? design.calibrated->to_table(ctx) : lambda;
        if (design.calibrated && (design.calibrated->alpha != design.alpha || design.calibrated->K != design.K ||
                                  design.calibrated->midpoint_scan != (design.variant == Variant::MidpointTest))) {
            throw ConfigMismatchError("run_experiment: calibration scan parameters do not match the design");
        }
    }

    MetricsReport report;
    report.replicates = N;
    report.seed = seed;
    report.prng = SplitRng::kAlgorithm;
    report.records.resize(N);

    parallel_for(N, threads, [&](int rep) {
        SimulationSpec spec;
        spec.n = design.n;
        spec.p = design.p;
        spec.directions = design.directions;
        spec.snr_c = design.snr_c;
        spec.rate = design.rate;
        spec.n_eff = design.n_eff;
        spec.noise = design.noise;
        spec.sigma = design.sigma;
        spec.seed = seed;
        spec.replicate = static_cast<std::uint64_t>(rep);

        SplitRng design_rng(seed, spec.replicate, kDesign);
        if (design.mode == ExperimentDesign::Mode::SingleChange) {
            spec.changepoints = {design.eta > 0 ? design.eta : (design.n + 4) / 5};
            spec.sparsities = {design.k};
        } else if (design.j > 0) {
            spec.changepoints = draw_locations(design_rng, design.n, design.j);
            spec.sparsities = draw_sparsities(design_rng, design.n, design.p, design.j, design.regime);
        }

        GeneratedData data = generate(spec);
        DataMatrix x = design.normalize ? normalize(data.X, estimate_sigma(data.X)) : std::move(data.X);

        ReplicateRecord& record = report.records[rep];
        record.truth = data.truth;
        if (design.mode == ExperimentDesign::Mode::SingleChange) {
            const auto [eta_hat, score] = estimate_single(x, ctx, lambda);
            record.estimate = {eta_hat};
            const double err = eta_hat - data.truth.front();
            record.squared_error = err * err;
            record.hausdorff = std::abs(err);
            record.j_err = 0;
        } else {
            const DetectionResult result = esac(x, ctx, cfg, set);
            record.estimate = result.positions();
            record.hausdorff = hausdorff(record.estimate, record.truth, design.n);
            record.j_err = std::abs(static_cast<int>(record.estimate.size()) - static_cast<int>(record.truth.size()));
        }
    });

    for (const auto& record : report.records) {
        report.mse += record.squared_error;
        report.hausdorff += record.hausdorff;
        report.abs_j_err += record.j_err;
    }
    report.mse /= N;
    report.hausdorff /= N;
    report.abs_j_err /= N;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace esac
