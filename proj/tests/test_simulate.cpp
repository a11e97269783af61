#include <doctest.h>

#include <cmath>
#include <numeric>

#include "esac/errors.hpp"
#include "esac/rng.hpp"
#include "esac/simulate.hpp"

using esac::DirectionScheme;
using esac::ExperimentDesign;
using esac::NoiseModel;
using esac::NoiseSpec;
using esac::Regime;
using esac::SignalRate;
using esac::SimulationSpec;

namespace {

SimulationSpec base_spec(int n, int p) {
    SimulationSpec spec;
    spec.n = n;
    spec.p = p;
    spec.snr_c = 6.25;
    spec.seed = 17;
    return spec;
}

double sample_variance(const esac::DataMatrix& x) {
    double sum = 0.0;
    double sum2 = 0.0;
    const double count = static_cast<double>(x.p()) * x.n();
    for (int i = 0; i < x.p(); ++i) {
        for (int v = 0; v < x.n(); ++v) {
            sum += x.value(i, v);
            sum2 += x.value(i, v) * x.value(i, v);
        }
    }
    const double mean = sum / count;
    return sum2 / count - mean * mean;
}

} // namespace

TEST_SUITE_BEGIN("simulate");

TEST_CASE("null Gaussian and uniform noise have unit variance") {
    auto spec = base_spec(500, 200); // np = 1e5
    const auto gauss = esac::generate(spec);
    CHECK(sample_variance(gauss.X) >= 0.95);
    CHECK(sample_variance(gauss.X) <= 1.05);

    spec.noise.model = NoiseModel::Unif;
    const auto unif = esac::generate(spec);
    CHECK(sample_variance(unif.X) >= 0.95);
    CHECK(sample_variance(unif.X) <= 1.05);

    spec.noise.model = NoiseModel::StudentT;
    spec.noise.df = 10;
    const auto student = esac::generate(spec);
    CHECK(sample_variance(student.X) >= 0.90);
    CHECK(sample_variance(student.X) <= 1.10);
}

TEST_CASE("invalid specs are rejected") {
    auto spec = base_spec(100, 10);
    spec.changepoints = {50, 40};
    spec.sparsities = {1, 1};
    CHECK_THROWS_AS(esac::generate(spec), esac::SpecInvalidError);

    spec.changepoints = {40};
    spec.sparsities = {11};
    CHECK_THROWS_AS(esac::generate(spec), esac::SpecInvalidError);

    spec.sparsities = {2};
    spec.noise.model = NoiseModel::StudentT;
    spec.noise.df = 2;
    CHECK_THROWS_AS(esac::generate(spec), esac::SpecInvalidError);
}

TEST_CASE("norm rule: Delta * |theta|^2 = c * rate(k) exactly") {
    for (SignalRate rate : {SignalRate::Additive, SignalRate::MaxForm}) {
        auto spec = base_spec(200, 100);
        spec.changepoints = {40, 120};
        spec.sparsities = {3, 60};
        spec.rate = rate;
        spec.snr_c = 12.25;
        const auto data = esac::generate(spec);
        REQUIRE(data.theta.size() == 2);
        const int deltas[2] = {40, 80};
        for (int j = 0; j < 2; ++j) {
            double norm2 = 0.0;
            int nonzero = 0;
            for (double coeff : data.theta[j]) {
                norm2 += coeff * coeff;
                nonzero += coeff != 0.0;
            }
            CHECK(nonzero == spec.sparsities[j]);
            const double expected = 12.25 * esac::signal_rate(spec.sparsities[j], 200, 100, rate);
            CHECK(deltas[j] * norm2 == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("the additive signal rate reproduces the published magnitude columns") {
    auto phi = [](int n, int p, int k, double c) {
        const int delta = (n + 4) / 5;
        return std::sqrt(c * esac::signal_rate(k, n, p, SignalRate::Additive) / delta);
    };
    CHECK(phi(200, 100, 1, 6.25) == doctest::Approx(1.40).epsilon(0.005));
    CHECK(phi(200, 100, 5, 6.25) == doctest::Approx(2.00).epsilon(0.005));
    CHECK(phi(200, 100, 24, 6.25) == doctest::Approx(1.90).epsilon(0.005));
    CHECK(phi(200, 100, 100, 6.25) == doctest::Approx(1.90).epsilon(0.005));
    CHECK(phi(500, 100, 1, 6.25) == doctest::Approx(0.92).epsilon(0.005));
    CHECK(phi(200, 1000, 10, 6.25) == doctest::Approx(2.93).epsilon(0.005));
}

TEST_CASE("mse arithmetic") {
    CHECK(esac::mse(std::vector<int>{40, 40, 40}, 40) == 0.0);
    CHECK(esac::mse(std::vector<int>{39, 41}, 40) == doctest::Approx(1.0));
    CHECK(esac::mse(std::vector<int>{38, 44}, 40) == doctest::Approx(10.0));
}

TEST_CASE("hausdorff distance: hand values, empties and metric properties") {
    CHECK(esac::hausdorff(std::vector<int>{10}, std::vector<int>{10}, 100) == 0.0);
    CHECK(esac::hausdorff(std::vector<int>{40}, std::vector<int>{42}, 100) == 2.0);
    CHECK(esac::hausdorff(std::vector<int>{10, 50}, std::vector<int>{12}, 100) == 38.0);
    CHECK(esac::hausdorff(std::vector<int>{}, std::vector<int>{}, 100) == 0.0);
    CHECK(esac::hausdorff(std::vector<int>{5}, std::vector<int>{}, 100) == 100.0);

    esac::SplitRng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        auto draw = [&rng]() {
            std::vector<int> s(1 + rng.uniform_int(0, 3));
            for (auto& x : s) x = static_cast<int>(rng.uniform_int(1, 99));
            std::sort(s.begin(), s.end());
            return s;
        };
        const auto a = draw();
        const auto b = draw();
        const auto c = draw();
        const double ab = esac::hausdorff(a, b, 100);
        const double ba = esac::hausdorff(b, a, 100);
        const double ac = esac::hausdorff(a, c, 100);
        const double cb = esac::hausdorff(c, b, 100);
        CHECK(ab == ba);
        CHECK(ab <= ac + cb + 1e-12);
    }
}

TEST_CASE("coordinate AR noise shows the requested neighbour correlation") {
    auto spec = base_spec(300, 300);
    spec.noise.model = NoiseModel::CsLoc;
    spec.noise.rho = 0.4;
    const auto data = esac::generate(spec);
    double num = 0.0;
    double den = 0.0;
    for (int v = 0; v < 300; ++v) {
        for (int i = 0; i + 1 < 300; ++i) {
            num += data.X.value(i, v) * data.X.value(i + 1, v);
            den += data.X.value(i, v) * data.X.value(i, v);
        }
    }
    CHECK(num / den == doctest::Approx(0.4).epsilon(0.125)); // within +-0.05
}

TEST_CASE("temporal recursion carries sqrt(1-rho) lag-one correlation") {
    auto spec = base_spec(20000, 1);
    spec.noise.model = NoiseModel::Temp;
    spec.noise.rho = 0.36;
    const auto data = esac::generate(spec);
    double num = 0.0;
    double den = 0.0;
    for (int v = 1; v < 20000; ++v) {
        num += data.X.value(0, v) * data.X.value(0, v - 1);
        den += data.X.value(0, v - 1) * data.X.value(0, v - 1);
    }
    CHECK(num / den == doctest::Approx(std::sqrt(1.0 - 0.36)).epsilon(0.07));
}

TEST_CASE("global common-factor noise matches its covariance construction") {
    // Cov = (1-rho) I + (rho/p) 11^T: entry variance 1 - rho + rho/p and
    // column-mean variance exactly 1/p.
    auto spec = base_spec(400, 250); // np = 1e5
    spec.noise.model = NoiseModel::Cs;
    spec.noise.rho = 0.4;
    const auto data = esac::generate(spec);
    const double entry_var = 1.0 - 0.4 + 0.4 / 250.0;
    CHECK(sample_variance(data.X) == doctest::Approx(entry_var).epsilon(0.05));
    double mean_var = 0.0;
    for (int v = 0; v < 400; ++v) {
        double m = 0.0;
        for (int i = 0; i < 250; ++i) m += data.X.value(i, v);
        m /= 250.0;
        mean_var += m * m;
    }
    mean_var /= 400.0;
    CHECK(mean_var == doctest::Approx(1.0 / 250.0).epsilon(0.25));
}

TEST_CASE("async and gradual changes still deliver the full shift") {
    // The noise stream is keyed by (seed, replicate, role), so a run under
    // Async/Gradual and one under M0 share identical noise and identical
    // theta; their difference exposes the mean structure exactly.
    auto spec = base_spec(100, 6);
    spec.changepoints = {50};
    spec.sparsities = {6};
    const auto plain = esac::generate(spec); // hard step at eta = 50, delta = 50

    for (NoiseModel model : {NoiseModel::Async, NoiseModel::Gradual}) {
        auto shifted_spec = spec;
        shifted_spec.noise.model = model;
        const auto data = esac::generate(shifted_spec);
        REQUIRE(data.theta == plain.theta);
        for (int i = 0; i < 6; ++i) {
            const double theta = data.theta[0][i];
            // Identical outside the +-floor(delta/2) window around eta: no
            // shift before it, the full shift after it.
            for (int idx : {0, 10, 23}) {
                CHECK(data.X.value(i, idx) == doctest::Approx(plain.X.value(i, idx)).epsilon(1e-12));
            }
            for (int idx : {76, 90, 99}) {
                CHECK(data.X.value(i, idx) == doctest::Approx(plain.X.value(i, idx)).epsilon(1e-12));
            }
            if (model == NoiseModel::Gradual) {
                // At eta the ramp carries (eta - left)/(right - left) = 25/51
                // of the shift while the hard step carries none.
                const double diff = data.X.value(i, 49) - plain.X.value(i, 49);
                CHECK(diff == doctest::Approx((25.0 / 51.0 - 0.0) * theta).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("run_experiment is reproducible and thread-invariant") {
    ExperimentDesign design;
    design.mode = ExperimentDesign::Mode::Multi;
    design.n = 60;
    design.p = 10;
    design.j = 1;
    design.regime = Regime::Sparse;
    design.snr_c = 12.25;
    const auto a = esac::run_experiment(design, 6, 99, 1);
    const auto b = esac::run_experiment(design, 6, 99, 2);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].truth == b.records[i].truth);
        CHECK(a.records[i].estimate == b.records[i].estimate);
    }
    CHECK(a.mse == b.mse);
    CHECK(a.hausdorff == b.hausdorff);
    CHECK(a.prng == std::string(esac::SplitRng::kAlgorithm));
}

TEST_CASE("single-change experiment row produces sane metrics") {
    ExperimentDesign design;
    design.mode = ExperimentDesign::Mode::SingleChange;
    design.n = 100;
    design.p = 20;
    design.k = 20;
    design.snr_c = 25.0; // strong signal at unit-test scale
    const auto report = esac::run_experiment(design, 10, 7, 0);
    CHECK(report.replicates == 10);
    CHECK(report.mse >= 0.0);
    CHECK(report.mse < 100.0);
    for (const auto& record : report.records) {
        REQUIRE(record.truth.size() == 1);
        CHECK(record.truth.front() == 20); // ceil(100/5)
        REQUIRE(record.estimate.size() == 1);
    }
}

TEST_SUITE_END();
