#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "esac/calibrate.hpp"
#include "esac/detect.hpp"
#include "esac/matrix.hpp"
#include "esac/rates.hpp"

namespace esac {

enum class NoiseModel { M0, Unif, StudentT, CsLoc, Cs, Temp, Async, Gradual };

struct NoiseSpec {
    NoiseModel model = NoiseModel::M0;
    double rho = 0.0; // CsLoc / Cs / Temp
    int df = 0;       // StudentT, requires df > 2
};

enum class DirectionScheme { EqualSigns, GaussianRandom };

/// Rate function used in the signal-strength rule Delta_j phi_j^2 = c * rate(k_j) sigma^2.
///   Additive: k log(e p log(n) / k^2) + log n (sparse) / sqrt(p log n)
///             (dense) -- the scaling behind the published magnitude columns;
///   MaxForm:  rate_r under the supplied n_eff mode.
enum class SignalRate { Additive, MaxForm };

double signal_rate(int k, int n, int p, SignalRate rate, NEff mode = NEff::Fourth);

/// Ground-truth model for one generated data set.
struct SimulationSpec {
    int n = 0;
    int p = 0;
    std::vector<int> changepoints; // ascending, each in (0,n)
    std::vector<int> sparsities;   // one k_j in [1,p] per changepoint
    DirectionScheme directions = DirectionScheme::EqualSigns;
    double snr_c = 0.0; // c in Delta_j phi_j^2 = c * rate(k_j) sigma^2
    SignalRate rate = SignalRate::Additive;
    NEff n_eff = NEff::Fourth; // only consulted for SignalRate::MaxForm
    NoiseSpec noise;
    double sigma = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
};

struct GeneratedData {
    DataMatrix X;
    std::vector<int> truth;
    std::vector<std::vector<double>> theta; // change vector per changepoint (p entries)
};

GeneratedData generate(const SimulationSpec& spec);

/// Mean squared location error over replicates of a single-change design.
double mse(std::span<const int> estimates, int truth);

/// max over each set of the distance to the nearest point of the other set.
/// Both sets empty gives 0; exactly one empty gives n.
double hausdorff(std::span<const int> a, std::span<const int> b, int n);

enum class Regime { Dense, Sparse, Mixed };

/// One row of the simulation studies: either a single-change estimation run
/// or a multiple-changepoint run with randomly drawn locations/sparsities.
struct ExperimentDesign {
    enum class Mode { SingleChange, Multi };
    Mode mode = Mode::SingleChange;
    int n = 200;
    int p = 100;
    // single-change mode
    int k = 1;
    int eta = 0; // 0 means ceil(n/5)
    // multi mode
    int j = 0;
    Regime regime = Regime::Sparse;
    double snr_c = 6.25;
    SignalRate rate = SignalRate::Additive;
    DirectionScheme directions = DirectionScheme::EqualSigns;
    NoiseSpec noise;
    double sigma = 1.0;
    bool normalize = true;
    // detection configuration (multi mode)
    double alpha = 1.5;
    int K = 4;
    Variant variant = Variant::SplitAtEstimate;
    NEff n_eff = NEff::Fourth;
    std::optional<CalibratedGamma> calibrated; // detection penalty when set, else analytic
};

struct ReplicateRecord {
    std::vector<int> truth;
    std::vector<int> estimate;
    double squared_error = 0.0; // single-change mode
    double hausdorff = 0.0;     // multi mode
    int j_err = 0;              // |J_hat - J|
};

struct MetricsReport {
    double mse = 0.0;
    double hausdorff = 0.0;
    double abs_j_err = 0.0;
    int replicates = 0;
    std::vector<ReplicateRecord> records;
    std::uint64_t seed = 0;
    std::string prng;
    double wall_seconds = 0.0; // informational; not part of the canonical JSON
};

MetricsReport run_experiment(const ExperimentDesign& design, int N, std::uint64_t seed, int threads = 0);

} // namespace esac
