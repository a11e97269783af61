#include "esac/intervals.hpp"

#include <algorithm>
#include <cmath>

#include "esac/errors.hpp"

namespace esac {

std::vector<int> SeededIntervalSet::length_ladder(int n, double alpha) {
    std::vector<int> ladder;
    for (long long l = 1; l <= n / 2; l = std::max(l + 1, static_cast<long long>(std::floor(alpha * l)))) {
        ladder.push_back(static_cast<int>(l));
    }
    return ladder;
}

SeededIntervalSet SeededIntervalSet::generate(int n, double alpha, int K) {
    if (n < 2 || alpha <= 1.0 || K < 1) {
        throw BadParamsError("seeded intervals: need n >= 2, alpha > 1, K >= 1");
    }
    SeededIntervalSet set;
    set.n = n;
    set.alpha = alpha;
    set.K = K;
    for (int l : length_ladder(n, alpha)) {
        const int shift = std::max(1, l / K);
        const int steps = (n - 2 * l) / shift;
        for (int i = 0; i <= steps; ++i) {
            set.intervals.push_back({i * shift, i * shift + 2 * l});
        }
        set.intervals.push_back({n - 2 * l, n});
    }
    std::sort(set.intervals.begin(), set.intervals.end(), [](const SeededInterval& a, const SeededInterval& b) {
        if (a.length() != b.length()) return a.length() < b.length();
        return a.s < b.s;
    });
    set.intervals.erase(std::unique(set.intervals.begin(), set.intervals.end()), set.intervals.end());
    set.index_lengths();
    return set;
}

void SeededIntervalSet::truncate_length(int max_length) {
    std::erase_if(intervals, [max_length](const SeededInterval& iv) { return iv.length() > max_length; });
    index_lengths();
}

void SeededIntervalSet::index_lengths() {
    distinct_lengths_.clear();
    length_ranges_.clear();
    int begin = 0;
    for (int i = 0; i <= static_cast<int>(intervals.size()); ++i) {
        if (i == static_cast<int>(intervals.size()) || (i > begin && intervals[i].length() != intervals[begin].length())) {
            distinct_lengths_.push_back(intervals[begin].length());
            length_ranges_.emplace_back(begin, i);
            begin = i;
            if (i == static_cast<int>(intervals.size())) break;
        }
    }
}

std::pair<int, int> SeededIntervalSet::length_range(int length) const {
    const auto it = std::lower_bound(distinct_lengths_.begin(), distinct_lengths_.end(), length);
    if (it == distinct_lengths_.end() || *it != length) return {0, 0};
    return length_ranges_[it - distinct_lengths_.begin()];
}

std::optional<SeededInterval> coverage_witness(const SeededIntervalSet& set, double h, int eta) {
    if (h <= 0.0) throw BadParamsError("coverage_witness: h must be positive");
    auto ladder = SeededIntervalSet::length_ladder(set.n, set.alpha);
    std::reverse(ladder.begin(), ladder.end()); // prefer the widest admissible length
    for (int l : ladder) {
        if (l < h / 2.0 || l > std::max(h, 1.0)) continue;
        const auto [begin, end] = set.length_range(2 * l);
        if (begin == end) continue;
        // Intervals of a given length are sorted by start; the candidate
        // center closest to eta has start near eta - l.
        const auto first = set.intervals.begin() + begin;
        const auto last = set.intervals.begin() + end;
        auto it = std::lower_bound(first, last, eta - l,
                                   [](const SeededInterval& iv, int start) { return iv.s < start; });
        for (auto cand : {it, it == first ? last : std::prev(it)}) {
            if (cand == last) continue;
            const int v = cand->s + l;
            if (std::abs(v - eta) * static_cast<double>(set.K) <= l) return *cand;
        }
    }
    return std::nullopt;
}

long long triple_count(const SeededIntervalSet& set) {
    long long total = 0;
    for (const auto& iv : set.intervals) total += iv.length() - 1;
    return total;
}

} // namespace esac
