#include "esac/matrix.hpp"

#include <cmath>

#include "esac/errors.hpp"

namespace esac {

DataMatrix::DataMatrix(int p, int n, std::vector<double> values) : p_(p), n_(n), values_(std::move(values)) {
    if (p_ < 1) throw BadParamsError("DataMatrix: need at least one series");
    if (n_ < 2) throw TooShortError("DataMatrix: need at least two time points");
    if (values_.size() != static_cast<std::size_t>(p_) * n_) {
        throw BadParamsError("DataMatrix: value buffer does not match p*n");
    }
    for (double x : values_) {
        if (!std::isfinite(x)) throw NonFiniteError("DataMatrix: non-finite entry");
    }
    build_prefix();
}

DataMatrix DataMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw BadParamsError("DataMatrix: no series");
    const std::size_t n = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * n);
    for (const auto& row : rows) {
        if (row.size() != n) throw BadParamsError("DataMatrix: ragged rows");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return DataMatrix(static_cast<int>(rows.size()), static_cast<int>(n), std::move(flat));
}

void DataMatrix::build_prefix() {
    prefix_.assign(static_cast<std::size_t>(n_ + 1) * p_, 0.0);
    for (int i = 0; i < p_; ++i) {
        double sum = 0.0;
        const double* row = values_.data() + static_cast<std::size_t>(i) * n_;
        for (int v = 0; v < n_; ++v) {
            sum += row[v];
            prefix_[static_cast<std::size_t>(v + 1) * p_ + i] = sum;
        }
    }
}

double DataMatrix::cusum(int series, int s, int e, int v) const {
    if (!(0 <= s && s < v && v < e && e <= n_)) {
        throw BadIntervalError("cusum: need 0 <= s < v < e <= n");
    }
    const double left = interval_sum(series, s, v);
    const double right = interval_sum(series, v, e);
    const double len = e - s;
    return std::sqrt((e - v) / (len * (v - s))) * left - std::sqrt((v - s) / (len * (e - v))) * right;
}

DataMatrix DataMatrix::scaled_rows(std::span<const double> scales) const {
    if (scales.size() != static_cast<std::size_t>(p_)) {
        throw BadParamsError("scaled_rows: one scale per series required");
    }
    std::vector<double> scaled(values_.size());
    for (int i = 0; i < p_; ++i) {
        const double inv = 1.0 / scales[i];
        const double* src = values_.data() + static_cast<std::size_t>(i) * n_;
        double* dst = scaled.data() + static_cast<std::size_t>(i) * n_;
        for (int v = 0; v < n_; ++v) dst[v] = src[v] * inv;
    }
    return DataMatrix(p_, n_, std::move(scaled));
}

} // namespace esac
