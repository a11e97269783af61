#pragma once

#include <span>
#include <vector>

namespace esac {

/// p series observed at n time points, with per-series prefix sums so any
/// CUSUM evaluates in O(1).
///
/// Values are stored row-major (one series contiguous). Prefix sums are
/// stored column-major: all p partial sums for a given time index are
/// adjacent, which is the access pattern of the score scans.
class DataMatrix {
public:
    /// Build from row-major values (series i contiguous). Throws
    /// TooShortError if n < 2 and NonFiniteError on NaN/Inf entries.
    DataMatrix(int p, int n, std::vector<double> values);

    static DataMatrix from_rows(const std::vector<std::vector<double>>& rows);

    int p() const { return p_; }
    int n() const { return n_; }

    double value(int series, int time) const { return values_[static_cast<std::size_t>(series) * n_ + time]; }
    std::span<const double> row(int series) const {
        return {values_.data() + static_cast<std::size_t>(series) * n_, static_cast<std::size_t>(n_)};
    }

    /// Cumulative sum of series i over times 1..v (prefix(i,0) == 0).
    double prefix(int series, int v) const { return prefix_[static_cast<std::size_t>(v) * p_ + series]; }

    /// Pointer to the p prefix values at time index v, contiguous in series.
    const double* prefix_col(int v) const { return prefix_.data() + static_cast<std::size_t>(v) * p_; }

    /// Sum of series i over the integer interval (s,e].
    double interval_sum(int series, int s, int e) const { return prefix(series, e) - prefix(series, s); }

    /// CUSUM of series i over (s,e] evaluated at v. Requires 0 <= s < v < e <= n
    /// (throws BadIntervalError otherwise).
    double cusum(int series, int s, int e, int v) const;

    /// Copy with each series divided by its scale factor; prefix sums rebuilt.
    DataMatrix scaled_rows(std::span<const double> scales) const;

private:
    int p_;
    int n_;
    std::vector<double> values_; // row-major, p x n
    std::vector<double> prefix_; // column-major, (n+1) x p

    void build_prefix();
};

} // namespace esac
