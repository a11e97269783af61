#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace esac {

/// Deterministic stream-split random generator.
///
/// Every consumer derives its stream from (master seed, replicate index,
/// role index) through std::seed_seq, so parallel execution order cannot
/// change which numbers a replicate sees. Variates are produced by fully
/// specified algorithms (mt19937_64 for bits, Box-Muller for normals)
/// rather than std::*_distribution, whose output is implementation
/// defined.
class SplitRng {
public:
    // Recorded in every serialized report so a run can be reproduced.
    static constexpr const char* kAlgorithm = "mt19937_64/box-muller";

    SplitRng(std::uint64_t master, std::uint64_t replicate = 0, std::uint64_t role = 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(master),
                          static_cast<std::uint32_t>(master >> 32),
                          static_cast<std::uint32_t>(replicate),
                          static_cast<std::uint32_t>(replicate >> 32),
                          static_cast<std::uint32_t>(role),
                          static_cast<std::uint32_t>(role >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t raw() { return engine_(); }

    /// Uniform on [0,1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on {lo, ..., hi}, inclusive, bias-free via rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t r = engine_();
        while (r >= limit) r = engine_();
        return lo + static_cast<std::int64_t>(r % span);
    }

    /// Standard normal via Box-Muller, one cached variate.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        // u1 in (0,1] so the log is finite.
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return radius * std::cos(angle);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Chi-square with integer degrees of freedom (sum of squared normals).
    double chi_square(int df) {
        double sum = 0.0;
        for (int i = 0; i < df; ++i) {
            const double z = normal();
            sum += z * z;
        }
        return sum;
    }

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace esac
