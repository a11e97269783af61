#include "esac/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "esac/errors.hpp"

namespace esac {

namespace {

double log_n_eff_for(int n, NEff mode) {
    const double ln = std::log(static_cast<double>(n));
    return mode == NEff::Fourth ? 4.0 * ln : ln;
}

void check_t(int t, const RateContext& ctx) {
    if (t < 1 || t > ctx.p) throw OutOfRangeError("sparsity level outside [1,p]");
}

} // namespace

std::vector<int> sparsity_grid(int n, int p, NEff mode) {
    if (n < 2 || p < 1) throw BadParamsError("sparsity_grid: need n >= 2, p >= 1");
    const double bound = std::sqrt(p * log_n_eff_for(n, mode));
    std::vector<int> grid{1};
    for (long long t = 2; t <= static_cast<long long>(std::floor(bound)) && t <= p; t *= 2) {
        grid.push_back(static_cast<int>(t));
    }
    if (grid.back() != p) grid.push_back(p);
    return grid;
}

RateContext RateContext::make(int n, int p, NEff mode) {
    if (n < 2 || p < 1) throw BadParamsError("RateContext: need n >= 2, p >= 1");
    RateContext ctx;
    ctx.n = n;
    ctx.p = p;
    ctx.mode = mode;
    ctx.log_n_eff = log_n_eff_for(n, mode);
    ctx.n_eff = mode == NEff::Fourth ? std::pow(static_cast<double>(n), 4.0) : static_cast<double>(n);
    ctx.grid = sparsity_grid(n, p, mode);
    return ctx;
}

double RateContext::dense_boundary() const {
    return std::sqrt(p * log_n_eff);
}

double nu_trunc(double a) {
    if (a < 0.0) throw NegativeThresholdError("nu_trunc: threshold must be nonnegative");
    if (a == 0.0) return 1.0;
    if (a > 30.0) {
        // Mills-ratio asymptotics: phi/Q = a / (1 - 1/a^2 + 3/a^4 - 15/a^6 + 105/a^8).
        const double inv2 = 1.0 / (a * a);
        const double series = 1.0 + inv2 * (-1.0 + inv2 * (3.0 + inv2 * (-15.0 + inv2 * 105.0)));
        return 1.0 + a * a / series;
    }
    // Q(a) = 0.5 erfc(a/sqrt(2)) = 0.5 exp(-x^2) erfcx(x); the exp(-a^2/2)
    // factors cancel against phi(a), leaving the stable ratio below.
    const double x = a / std::numbers::sqrt2;
    const double erfcx = std::exp(x * x) * std::erfc(x);
    const double hazard = 2.0 / (std::sqrt(2.0 * std::numbers::pi) * erfcx);
    return 1.0 + a * hazard;
}

double rate_r(int t, const RateContext& ctx) {
    check_t(t, ctx);
    const double boundary = ctx.dense_boundary();
    if (t >= boundary) return boundary;
    const double sparse = t * std::log(std::numbers::e * ctx.p * ctx.log_n_eff / (static_cast<double>(t) * t));
    return std::max(sparse, ctx.log_n_eff);
}

double rate_h(int t, const RateContext& ctx) {
    check_t(t, ctx);
    const double boundary = ctx.dense_boundary();
    if (t >= boundary) {
        return std::sqrt(ctx.p * std::max(ctx.log_n_eff, std::log(std::log(std::numbers::e * ctx.p))));
    }
    return rate_r(t, ctx);
}

double threshold_a(int t, const RateContext& ctx) {
    check_t(t, ctx);
    if (t > ctx.dense_boundary()) return 0.0;
    return std::sqrt(4.0 * std::log(std::numbers::e * ctx.p * ctx.log_n_eff / (static_cast<double>(t) * t)));
}

double lambda_tilde(int t, const RateContext& ctx) {
    check_t(t, ctx);
    const double boundary = ctx.dense_boundary();
    if (t >= boundary) return 1.5 * (boundary + ctx.log_n_eff);
    return t * std::log(std::numbers::e * ctx.p * ctx.log_n_eff / (static_cast<double>(t) * t)) + ctx.log_n_eff;
}

namespace {

PenaltyTable table_with_penalty(const RateContext& ctx, std::vector<double> values) {
    PenaltyTable table;
    table.grid = ctx.grid;
    table.penalty = std::move(values);
    table.a.reserve(ctx.grid.size());
    table.nu.reserve(ctx.grid.size());
    for (int t : ctx.grid) {
        const double at = threshold_a(t, ctx);
        table.a.push_back(at);
        table.nu.push_back(nu_trunc(at));
    }
    return table;
}

} // namespace

PenaltyTable PenaltyTable::analytic(const RateContext& ctx) {
    std::vector<double> pen;
    pen.reserve(ctx.grid.size());
    for (int t : ctx.grid) pen.push_back(lambda_tilde(t, ctx));
    return table_with_penalty(ctx, std::move(pen));
}

PenaltyTable PenaltyTable::scaled_rate(const RateContext& ctx, double c) {
    std::vector<double> pen;
    pen.reserve(ctx.grid.size());
    for (int t : ctx.grid) pen.push_back(c * rate_r(t, ctx));
    return table_with_penalty(ctx, std::move(pen));
}

PenaltyTable PenaltyTable::zero(const RateContext& ctx) {
    return table_with_penalty(ctx, std::vector<double>(ctx.grid.size(), 0.0));
}

PenaltyTable PenaltyTable::from_values(const RateContext& ctx, std::vector<double> values) {
    if (values.size() != ctx.grid.size()) {
        throw BadParamsError("PenaltyTable: one penalty per grid entry required");
    }
    return table_with_penalty(ctx, std::move(values));
}

int PenaltyTable::index_of(int t) const {
    const auto it = std::find(grid.begin(), grid.end(), t);
    if (it == grid.end()) throw BadSparsityError("sparsity level not on the grid");
    return static_cast<int>(it - grid.begin());
}

} // namespace esac
