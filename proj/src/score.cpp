#include "esac/score.hpp"

#include <cmath>
#include <limits>

#include "esac/errors.hpp"

namespace esac {

ScoreScanner::ScoreScanner(const DataMatrix& X, const PenaltyTable& table)
    : x_(X), table_(table), bucket_sum_(table.grid.size() + 1), bucket_cnt_(table.grid.size() + 1) {}

void ScoreScanner::check_interval(int s, int e, int v) const {
    if (!(0 <= s && s < v && v < e && e <= x_.n())) {
        throw BadIntervalError("score: need 0 <= s < v < e <= n");
    }
}

double ScoreScanner::score_at(int s, int e, int v, int t) const {
    check_interval(s, e, v);
    const int j = table_.index_of(t);
    const double a = table_.a[j];
    const double nu = table_.nu[j];
    double sum = 0.0;
    for (int i = 0; i < x_.p(); ++i) {
        const double c = x_.cusum(i, s, e, v);
        if (std::fabs(c) >= a) sum += c * c - nu;
    }
    return sum - table_.penalty[j];
}

void ScoreScanner::fill_buckets(int s, int e, int v) {
    const int m = static_cast<int>(table_.grid.size());
    std::fill(bucket_sum_.begin(), bucket_sum_.end(), 0.0);
    std::fill(bucket_cnt_.begin(), bucket_cnt_.end(), 0.0);
    const double* ps = x_.prefix_col(s);
    const double* pv = x_.prefix_col(v);
    const double* pe = x_.prefix_col(e);
    const double len = e - s;
    const double wl = std::sqrt((e - v) / (len * (v - s)));
    const double wr = std::sqrt((v - s) / (len * (e - v)));
    const double* thr = table_.a.data();
    for (int i = 0; i < x_.p(); ++i) {
        const double c = wl * (pv[i] - ps[i]) - wr * (pe[i] - pv[i]);
        const double abs_c = std::fabs(c);
        // Smallest grid level whose threshold |C| clears; thresholds are
        // nonincreasing, so under the null the loop usually stops at once.
        int j = m;
        while (j > 0 && abs_c >= thr[j - 1]) --j;
        bucket_sum_[j] += c * c;
        bucket_cnt_[j] += 1.0;
    }
}

double ScoreScanner::best_level(int* best_idx) const {
    const int m = static_cast<int>(table_.grid.size());
    double acc_sum = 0.0;
    double acc_cnt = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    int idx = 0;
    for (int j = 0; j < m; ++j) {
        acc_sum += bucket_sum_[j];
        acc_cnt += bucket_cnt_[j];
        const double value = acc_sum - acc_cnt * table_.nu[j] - table_.penalty[j];
        if (value > best) {
            best = value;
            idx = j;
        }
    }
    if (best_idx) *best_idx = idx;
    return best;
}

ScoreValue ScoreScanner::penalized_score(int s, int e, int v, bool keep_per_t) {
    check_interval(s, e, v);
    fill_buckets(s, e, v);
    ScoreValue result;
    int idx = 0;
    result.value = best_level(&idx);
    result.best_t = table_.grid[idx];
    if (keep_per_t) {
        std::vector<std::pair<int, double>> per_t;
        per_t.reserve(table_.grid.size());
        double acc_sum = 0.0;
        double acc_cnt = 0.0;
        for (std::size_t j = 0; j < table_.grid.size(); ++j) {
            acc_sum += bucket_sum_[j];
            acc_cnt += bucket_cnt_[j];
            per_t.emplace_back(table_.grid[j], acc_sum - acc_cnt * table_.nu[j] - table_.penalty[j]);
        }
        result.per_t = std::move(per_t);
    }
    return result;
}

IntervalTest ScoreScanner::test_interval(int s, int e, bool midpoint_only) {
    if (!(0 <= s && s + 2 <= e && e <= x_.n())) {
        throw BadIntervalError("test_interval: need 0 <= s, e - s >= 2, e <= n");
    }
    IntervalTest result;
    result.score = -std::numeric_limits<double>::infinity();
    const int first = midpoint_only ? (s + e) / 2 : s + 1;
    const int last = midpoint_only ? (s + e) / 2 : e - 1;
    for (int v = first; v <= last; ++v) {
        fill_buckets(s, e, v);
        const double value = best_level(nullptr);
        if (value > result.score) {
            result.score = value;
            result.argmax_v = v;
        }
    }
    result.detected = result.score > 0.0;
    return result;
}

bool ScoreScanner::fires(int s, int e, bool midpoint_only) {
    if (!(0 <= s && s + 2 <= e && e <= x_.n())) {
        throw BadIntervalError("fires: need 0 <= s, e - s >= 2, e <= n");
    }
    const int first = midpoint_only ? (s + e) / 2 : s + 1;
    const int last = midpoint_only ? (s + e) / 2 : e - 1;
    for (int v = first; v <= last; ++v) {
        fill_buckets(s, e, v);
        if (best_level(nullptr) > 0.0) return true;
    }
    return false;
}

double ScoreScanner::max_score(int s, int e, int* argmax_v, int* best_t) {
    if (!(0 <= s && s + 2 <= e && e <= x_.n())) {
        throw BadIntervalError("max_score: need 0 <= s, e - s >= 2, e <= n");
    }
    double best = -std::numeric_limits<double>::infinity();
    int best_v = s + 1;
    int best_idx = 0;
    for (int v = s + 1; v < e; ++v) {
        fill_buckets(s, e, v);
        int idx = 0;
        const double value = best_level(&idx);
        if (value > best) {
            best = value;
            best_v = v;
            best_idx = idx;
        }
    }
    if (argmax_v) *argmax_v = best_v;
    if (best_t) *best_t = table_.grid[best_idx];
    return best;
}

void ScoreScanner::unpenalized_max_per_t(const SeededIntervalSet& set, bool midpoint_only,
                                         std::vector<double>& out) {
    const int m = static_cast<int>(table_.grid.size());
    out.assign(m, -std::numeric_limits<double>::infinity());
    for (const auto& iv : set.intervals) {
        const int first = midpoint_only ? (iv.s + iv.e) / 2 : iv.s + 1;
        const int last = midpoint_only ? (iv.s + iv.e) / 2 : iv.e - 1;
        for (int v = first; v <= last; ++v) {
            fill_buckets(iv.s, iv.e, v);
            double acc_sum = 0.0;
            double acc_cnt = 0.0;
            for (int j = 0; j < m; ++j) {
                acc_sum += bucket_sum_[j];
                acc_cnt += bucket_cnt_[j];
                const double value = acc_sum - acc_cnt * table_.nu[j];
                if (value > out[j]) out[j] = value;
            }
        }
    }
}

double score_at(const DataMatrix& X, int s, int e, int v, int t, const PenaltyTable& table) {
    return ScoreScanner(X, table).score_at(s, e, v, t);
}

ScoreValue penalized_score(const DataMatrix& X, int s, int e, int v, const PenaltyTable& table, bool keep_per_t) {
    return ScoreScanner(X, table).penalized_score(s, e, v, keep_per_t);
}

IntervalTest test_interval(const DataMatrix& X, int s, int e, const PenaltyTable& gamma_table, bool midpoint_only) {
    return ScoreScanner(X, gamma_table).test_interval(s, e, midpoint_only);
}

} // namespace esac
