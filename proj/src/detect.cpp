#include "esac/detect.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "esac/errors.hpp"

namespace esac {

EsacConfig EsacConfig::analytic(const RateContext& ctx, Variant variant) {
    EsacConfig cfg;
    cfg.variant = variant;
    cfg.gamma = PenaltyTable::analytic(ctx);
    cfg.lambda = PenaltyTable::analytic(ctx);
    return cfg;
}

std::vector<int> DetectionResult::positions() const {
    std::vector<int> out;
    out.reserve(changepoints.size());
    for (const auto& cp : changepoints) out.push_back(cp.position);
    return out;
}

std::pair<int, ScoreValue> estimate_single(const DataMatrix& X, const RateContext& ctx,
                                           const PenaltyTable& lambda) {
    if (X.n() < 2) throw TooShortError("estimate_single: need n >= 2");
    if (X.n() != ctx.n || X.p() != ctx.p) throw MismatchedNError("estimate_single: context does not match data");
    ScoreScanner scanner(X, lambda);
    int eta_hat = 0;
    int best_t = 0;
    ScoreValue score;
    score.value = scanner.max_score(0, X.n(), &eta_hat, &best_t);
    score.best_t = best_t;
    return {eta_hat, score};
}

namespace {

class Search {
public:
    Search(const DataMatrix& X, const EsacConfig& cfg, const SeededIntervalSet& set)
        : cfg_(cfg), set_(set), gamma_scan_(X, cfg.gamma), lambda_scan_(X, cfg.lambda) {}

    // Explicit worklist instead of recursion: segment counts can reach n-1,
    // and each step strictly shrinks its segment, so this terminates.
    void run(int s0, int e0) {
        std::vector<std::pair<int, int>> pending{{s0, e0}};
        while (!pending.empty()) {
            const auto [s, e] = pending.back();
            pending.pop_back();
            step(s, e, pending);
        }
    }

    std::vector<Changepoint> take() {
        std::sort(found_.begin(), found_.end(),
                  [](const Changepoint& a, const Changepoint& b) { return a.position < b.position; });
        return std::move(found_);
    }

private:
    void step(int s, int e, std::vector<std::pair<int, int>>& pending) {
        if (e - s <= 1) return;
        // Detection stage: intervals come sorted by (length, start), so the
        // first firing length is minimal and the scan can stop once all
        // intervals of that length have been tested.
        const bool midpoint = cfg_.variant == Variant::MidpointTest;
        int l_star = -1;
        detecting_.clear();
        for (std::size_t idx = 0; idx < set_.intervals.size(); ++idx) {
            const auto& iv = set_.intervals[idx];
            if (l_star >= 0 && iv.length() > l_star) break;
            if (iv.s < s || iv.e > e) continue;
            if (gamma_scan_.fires(iv.s, iv.e, midpoint)) {
                l_star = iv.length();
                detecting_.push_back(static_cast<int>(idx));
            }
        }
        if (detecting_.empty()) return;

        // Selection stage: among the narrowest detecting intervals, take the
        // one maximizing the estimation score (smallest start on ties), then
        // the smallest maximizing position inside it.
        double best = -std::numeric_limits<double>::infinity();
        int best_interval = -1;
        int best_v = -1;
        int best_t = 0;
        for (int idx : detecting_) {
            const auto& iv = set_.intervals[idx];
            int v = 0;
            int t = 0;
            const double value = lambda_scan_.max_score(iv.s, iv.e, &v, &t);
            if (value > best) {
                best = value;
                best_interval = idx;
                best_v = v;
                best_t = t;
            }
        }
        const SeededInterval chosen = set_.intervals[best_interval];
        found_.push_back({best_v, chosen.s, chosen.e, best, best_t});

        if (cfg_.variant == Variant::SplitAtEstimate) {
            pending.emplace_back(s, best_v);
            pending.emplace_back(best_v, e);
        } else {
            pending.emplace_back(s, chosen.s + 1);
            pending.emplace_back(chosen.e - 1, e);
        }
    }

    const EsacConfig& cfg_;
    const SeededIntervalSet& set_;
    ScoreScanner gamma_scan_;
    ScoreScanner lambda_scan_;
    std::vector<int> detecting_;
    std::vector<Changepoint> found_;
};

} // namespace

DetectionResult esac(const DataMatrix& X, const RateContext& ctx, const EsacConfig& cfg,
                     const SeededIntervalSet& set) {
    if (set.n != X.n()) throw MismatchedNError("esac: interval set generated for a different n");
    if (X.n() != ctx.n || X.p() != ctx.p) throw MismatchedNError("esac: context does not match data");
    Search search(X, cfg, set);
    search.run(0, X.n());
    return DetectionResult{search.take()};
}

DetectionResult significance_rank(const DetectionResult& result, int top_k) {
    const int count = static_cast<int>(result.changepoints.size());
    top_k = std::clamp(top_k, 0, count);
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& ca = result.changepoints[a];
        const auto& cb = result.changepoints[b];
        if (ca.score != cb.score) return ca.score > cb.score;
        return ca.position < cb.position;
    });
    order.resize(top_k);
    std::sort(order.begin(), order.end());
    DetectionResult kept;
    kept.changepoints.reserve(top_k);
    for (int idx : order) kept.changepoints.push_back(result.changepoints[idx]);
    return kept;
}

} // namespace esac
