#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "esac/errors.hpp"
#include "esac/io.hpp"

TEST_SUITE_BEGIN("io");

TEST_CASE("csv parsing: header autodetection and column orientation") {
    // Rows are time points, columns are series.
    const auto x = esac::parse_csv("s1,s2\n1.0,4.0\n2.0,5.0\n3.0,6.0\n");
    CHECK(x.p() == 2);
    CHECK(x.n() == 3);
    CHECK(x.value(0, 0) == 1.0);
    CHECK(x.value(0, 2) == 3.0);
    CHECK(x.value(1, 1) == 5.0);

    const auto no_header = esac::parse_csv("1.5,-2e-1\n0.25,3.75\n");
    CHECK(no_header.p() == 2);
    CHECK(no_header.n() == 2);
    CHECK(no_header.value(1, 0) == doctest::Approx(-0.2));

    CHECK_THROWS_AS(esac::parse_csv("a,b\n1,2\nx,3\n"), esac::ParseError);
    CHECK_THROWS_AS(esac::parse_csv("1,2\n3\n"), esac::ParseError);
    CHECK_THROWS_AS(esac::parse_csv("header_only\n"), esac::ParseError);
    CHECK_THROWS_AS(esac::parse_csv("1,2\n"), esac::ParseError);        // single time point
    CHECK_THROWS_AS(esac::parse_csv("time,1.5\n1,2\n"), esac::ParseError); // mixed first row is not a header
}

TEST_CASE("csv write/read round trip") {
    const auto x = esac::DataMatrix::from_rows({{1.25, -3.5, 0.0625}, {2.0, 4.0, 8.0}});
    const std::string path = "io_roundtrip_test.csv";
    esac::write_csv(path, x);
    const auto back = esac::read_csv(path);
    REQUIRE(back.p() == x.p());
    REQUIRE(back.n() == x.n());
    for (int i = 0; i < x.p(); ++i) {
        for (int v = 0; v < x.n(); ++v) CHECK(back.value(i, v) == x.value(i, v));
    }
    std::remove(path.c_str());
}

TEST_CASE("detection json carries the documented schema") {
    const auto x = esac::DataMatrix::from_rows({{0, 0, 5, 5}});
    esac::DetectionResult result;
    result.changepoints = {{2, 0, 4, 12.5, 1}};
    const auto j = esac::detection_to_json(result, x, {1.0}, {{"variant", "split"}});
    CHECK(j.at("n") == 4);
    CHECK(j.at("p") == 1);
    CHECK(j.at("changepoints").size() == 1);
    CHECK(j.at("changepoints")[0].at("position") == 2);
    CHECK(j.at("changepoints")[0].at("interval")[0] == 0);
    CHECK(j.at("changepoints")[0].at("interval")[1] == 4);
    CHECK(j.at("sigma")[0] == 1.0);
    CHECK(j.at("config").at("variant") == "split");
}

TEST_CASE("calibration json round trip preserves every field") {
    esac::CalibratedGamma cal;
    cal.n = 100;
    cal.p = 20;
    cal.alpha = 1.5;
    cal.K = 4;
    cal.n_eff = esac::NEff::Fourth;
    cal.normalized = true;
    cal.midpoint_scan = false;
    cal.epsilon = 0.01;
    cal.mc_n = 1000;
    cal.seed = 4242;
    cal.grid = {1, 2, 4, 8, 20};
    cal.raw_quantiles = {10, 11, 12, 13, 30};
    cal.gamma = {12, 13, 14, 15, 30};
    cal.gamma1 = 1.5;
    cal.gamma2 = 1.25;
    cal.dense_value = 30;

    const std::string path = "io_calibration_test.json";
    esac::save_calibration(path, cal);
    const auto back = esac::load_calibration(path);
    CHECK(back.n == cal.n);
    CHECK(back.p == cal.p);
    CHECK(back.alpha == cal.alpha);
    CHECK(back.K == cal.K);
    CHECK(back.n_eff == cal.n_eff);
    CHECK(back.normalized == cal.normalized);
    CHECK(back.midpoint_scan == cal.midpoint_scan);
    CHECK(back.epsilon == cal.epsilon);
    CHECK(back.mc_n == cal.mc_n);
    CHECK(back.seed == cal.seed);
    CHECK(back.grid == cal.grid);
    CHECK(back.raw_quantiles == cal.raw_quantiles);
    CHECK(back.gamma == cal.gamma);
    CHECK(back.gamma1 == cal.gamma1);
    CHECK(back.gamma2 == cal.gamma2);
    CHECK(back.dense_value == cal.dense_value);
    std::remove(path.c_str());

    CHECK_THROWS_AS(esac::load_calibration("does_not_exist.json"), esac::ParseError);
}

TEST_CASE("enum names round trip") {
    for (auto v : {esac::Variant::Trimming, esac::Variant::SplitAtEstimate, esac::Variant::MidpointTest}) {
        CHECK(esac::variant_from_string(esac::to_string(v)) == v);
    }
    for (auto m : {esac::NEff::Fourth, esac::NEff::Theoretical}) {
        CHECK(esac::neff_from_string(esac::to_string(m)) == m);
    }
    for (auto nm : {esac::NoiseModel::M0, esac::NoiseModel::Unif, esac::NoiseModel::StudentT,
                    esac::NoiseModel::CsLoc, esac::NoiseModel::Cs, esac::NoiseModel::Temp,
                    esac::NoiseModel::Async, esac::NoiseModel::Gradual}) {
        CHECK(esac::noise_model_from_string(esac::to_string(nm)) == nm);
    }
    CHECK_THROWS_AS(esac::variant_from_string("bogus"), esac::ParseError);
}

TEST_CASE("report json is canonical: no timing unless requested") {
    esac::MetricsReport report;
    report.mse = 1.5;
    report.replicates = 2;
    report.records.resize(2);
    report.records[0].truth = {40};
    report.records[0].estimate = {41};
    report.seed = 7;
    report.prng = "mt19937_64/box-muller";
    report.wall_seconds = 123.0;
    const auto plain = esac::report_to_json(report, {{"mode", "single"}});
    CHECK_FALSE(plain.contains("timing"));
    const auto timed = esac::report_to_json(report, {{"mode", "single"}}, true);
    CHECK(timed.at("timing").at("wall_seconds") == 123.0);
    CHECK(plain.at("metrics").at("mse") == 1.5);
    CHECK(plain.at("records").size() == 2);
}

TEST_SUITE_END();
