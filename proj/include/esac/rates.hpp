#pragma once

#include <vector>

namespace esac {

/// Effective sample size used inside the threshold, rate and penalty
/// functions. Fourth (n^4) is the practical default; Theoretical (n) is the
/// scaling under which the finite-sample guarantees are stated.
enum class NEff { Fourth, Theoretical };

/// Candidate sparsity levels: powers of two up to floor(sqrt(p log n_eff)),
/// always including 1 and p. Ascending, deduplicated.
std::vector<int> sparsity_grid(int n, int p, NEff mode = NEff::Fourth);

/// Problem dimensions plus the derived quantities every rate function needs.
struct RateContext {
    int n = 0;
    int p = 0;
    NEff mode = NEff::Fourth;
    double n_eff = 0.0;     // n or n^4
    double log_n_eff = 0.0; // log(n_eff), natural log
    std::vector<int> grid;  // candidate sparsity levels

    static RateContext make(int n, int p, NEff mode = NEff::Fourth);

    /// sqrt(p log n_eff): the sparse/dense boundary for thresholds and rates.
    double dense_boundary() const;
};

/// Conditional second moment E(Z^2 | |Z| >= a) of a standard normal.
/// Equals 1 + a phi(a)/Q(a) for a > 0 and 1 at a = 0; evaluated through the
/// scaled complementary error function (Mills-ratio asymptotics beyond
/// a = 30) so large thresholds do not underflow.
double nu_trunc(double a);

/// Detection-boundary rate r(t): sqrt(p log n_eff) in the dense regime,
/// max{t log(e p log(n_eff) / t^2), log n_eff} in the sparse regime.
double rate_r(int t, const RateContext& ctx);

/// Localization rate h(t): as r(t) but with dense value
/// sqrt(p max{log n_eff, log log(e p)}).
double rate_h(int t, const RateContext& ctx);

/// CUSUM threshold a(t): sqrt(4 log(e p log(n_eff) / t^2)) for sparse t,
/// zero in the dense regime.
double threshold_a(int t, const RateContext& ctx);

/// Recommended analytic estimation penalty: the additive-form rate with
/// leading constant 3/2 on the dense branch.
double lambda_tilde(int t, const RateContext& ctx);

/// Penalty values, thresholds and centering terms evaluated on the grid.
struct PenaltyTable {
    std::vector<int> grid;
    std::vector<double> a;       // threshold a(t)
    std::vector<double> nu;      // nu_{a(t)}
    std::vector<double> penalty; // lambda(t) or gamma(t)

    /// lambda-tilde penalties (the analytic default).
    static PenaltyTable analytic(const RateContext& ctx);
    /// c * r(t) penalties (theory-mode tables, e.g. gamma0 = 82).
    static PenaltyTable scaled_rate(const RateContext& ctx, double c);
    /// Zero penalties (used when Monte Carlo calibrating raw score maxima).
    static PenaltyTable zero(const RateContext& ctx);
    /// Externally supplied penalty values, one per grid entry.
    static PenaltyTable from_values(const RateContext& ctx, std::vector<double> values);

    int size() const { return static_cast<int>(grid.size()); }
    int index_of(int t) const; // position of t on the grid, throws BadSparsityError
};

} // namespace esac
