#pragma once

#include <optional>
#include <vector>

namespace esac {

/// Half-open integer interval (s, e] = {s+1, ..., e}.
struct SeededInterval {
    int s = 0;
    int e = 0;

    int length() const { return e - s; }
    friend bool operator==(const SeededInterval&, const SeededInterval&) = default;
};

/// Deterministic multiscale grid of candidate intervals. Lengths follow the
/// geometric ladder l_1 = 1, l_{j+1} = max(l_j + 1, floor(alpha l_j)) with
/// l_j <= n/2; intervals of length 2l are shifted by max(1, floor(l/K)) and
/// a right-anchored copy (n-2l, n] is always included. Deduplicated and
/// sorted by (length, start) so narrowest-over-threshold iteration order is
/// canonical.
struct SeededIntervalSet {
    int n = 0;
    double alpha = 0.0;
    int K = 0;
    std::vector<SeededInterval> intervals;

    static SeededIntervalSet generate(int n, double alpha, int K);

    /// The ladder of half-lengths l_1, l_2, ... actually used for n.
    static std::vector<int> length_ladder(int n, double alpha);

    /// Drop every interval longer than max_length (a cap on the scan scale).
    void truncate_length(int max_length);

    /// [begin, end) range of intervals having exactly the given length.
    std::pair<int, int> length_range(int length) const;

private:
    std::vector<int> distinct_lengths_;
    std::vector<std::pair<int, int>> length_ranges_;
    void index_lengths();
};

/// Witness for the coverage guarantee: an interval (v-l, v+l] of the set
/// with h/2 <= l <= max(h,1) and |v - eta| <= l/K. Requires alpha <= 2 and
/// K >= 2 for existence; returns nullopt only if no such interval exists.
std::optional<SeededInterval> coverage_witness(const SeededIntervalSet& set, double h, int eta);

/// Number of scan triples (s, v, e) with s < v < e over all intervals.
long long triple_count(const SeededIntervalSet& set);

} // namespace esac
