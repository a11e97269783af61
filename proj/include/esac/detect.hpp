#pragma once

#include <utility>
#include <vector>

#include "esac/intervals.hpp"
#include "esac/matrix.hpp"
#include "esac/rates.hpp"
#include "esac/score.hpp"

namespace esac {

/// Recursion variants. SplitAtEstimate recurses on (s,v*] and (v*,e] and is
/// the recommended default; Trimming recurses on (s, s*+1] and (e*-1, e]
/// (retained for guarantee-mode runs); MidpointTest additionally restricts the
/// detection scan to interval midpoints.
enum class Variant { Trimming, SplitAtEstimate, MidpointTest };

struct EsacConfig {
    double alpha = 1.5;
    int K = 4;
    Variant variant = Variant::SplitAtEstimate;
    PenaltyTable gamma;  // testing penalty
    PenaltyTable lambda; // estimation penalty

    static EsacConfig analytic(const RateContext& ctx, Variant variant = Variant::SplitAtEstimate);
};

struct Changepoint {
    int position = 0;   // estimated location v*
    int interval_s = 0; // detecting interval (s*, e*]
    int interval_e = 0;
    double score = 0.0; // estimation score at v*
    int sparsity = 0;   // grid level attaining the score
};

struct DetectionResult {
    std::vector<Changepoint> changepoints; // ascending by position

    std::vector<int> positions() const;
};

/// Location estimate for a single changepoint: the smallest maximizer of the
/// penalized score over (0,n).
std::pair<int, ScoreValue> estimate_single(const DataMatrix& X, const RateContext& ctx,
                                           const PenaltyTable& lambda);

/// Full recursive search with narrowest-over-threshold selection.
DetectionResult esac(const DataMatrix& X, const RateContext& ctx, const EsacConfig& cfg,
                     const SeededIntervalSet& set);

/// Keep the top_k changepoints by estimation score, re-sorted by location.
DetectionResult significance_rank(const DetectionResult& result, int top_k);

} // namespace esac
