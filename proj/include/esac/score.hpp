#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "esac/intervals.hpp"
#include "esac/matrix.hpp"
#include "esac/rates.hpp"

namespace esac {

/// Penalized score at one candidate position: the grid maximum, its argmax
/// sparsity level (smallest level on ties) and, when requested, the full
/// per-level table.
struct ScoreValue {
    double value = 0.0;
    int best_t = 0;
    std::optional<std::vector<std::pair<int, double>>> per_t;
};

struct IntervalTest {
    bool detected = false;
    int argmax_v = 0;
    double score = 0.0;
};

/// Scan engine for the sparsity-specific penalized score
///
///   S^v(t) = sum_i (C_i^2 - nu_{a(t)}) 1{|C_i| >= a(t)} - penalty(t),
///
/// with C_i the CUSUM of series i over (s,e] at v. One pass over the
/// coordinates assigns each |C_i| to the first grid level whose threshold it
/// clears (thresholds are nonincreasing along the grid), after which every
/// level's score is a prefix accumulation. All buffers live in the scanner,
/// so scans are allocation-free; use one scanner per worker thread.
class ScoreScanner {
public:
    ScoreScanner(const DataMatrix& X, const PenaltyTable& table);

    /// Reference path: the score at a single sparsity level, computed by the
    /// direct loop over coordinates.
    double score_at(int s, int e, int v, int t) const;

    /// max_t S^v(t) with smallest-t tie-break.
    ScoreValue penalized_score(int s, int e, int v, bool keep_per_t = false);

    /// Scan all s < v < e: detected iff the maximum is strictly positive;
    /// argmax_v is the smallest maximizing position. midpoint_only restricts
    /// the scan to v = floor((s+e)/2).
    IntervalTest test_interval(int s, int e, bool midpoint_only = false);

    /// Detection-only variant of test_interval with early exit at the first
    /// positive score.
    bool fires(int s, int e, bool midpoint_only = false);

    /// Full scan of (s,e) returning the maximum score, the smallest argmax
    /// position and the sparsity level attaining it.
    double max_score(int s, int e, int* argmax_v, int* best_t);

    /// For each grid level, the running maximum of the unpenalized score over
    /// all intervals of the set and all interior positions (the Monte Carlo
    /// calibration statistic). out must have one slot per grid level.
    void unpenalized_max_per_t(const SeededIntervalSet& set, bool midpoint_only, std::vector<double>& out);

    const PenaltyTable& table() const { return table_; }

private:
    const DataMatrix& x_;
    PenaltyTable table_;
    std::vector<double> bucket_sum_;
    std::vector<double> bucket_cnt_;

    void check_interval(int s, int e, int v) const;
    void fill_buckets(int s, int e, int v);
    // max_j of prefix-accumulated scores; tie broken toward the smallest level
    double best_level(int* best_idx) const;
};

/// Free-function forms of the operations above (convenience wrappers that
/// build a scanner per call).
double score_at(const DataMatrix& X, int s, int e, int v, int t, const PenaltyTable& table);
ScoreValue penalized_score(const DataMatrix& X, int s, int e, int v, const PenaltyTable& table,
                           bool keep_per_t = false);
IntervalTest test_interval(const DataMatrix& X, int s, int e, const PenaltyTable& gamma_table,
                           bool midpoint_only = false);

} // namespace esac
