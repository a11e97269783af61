#include "esac/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "esac/errors.hpp"

namespace esac {

namespace {

bool parse_double(std::string_view field, double& out) {
    // Trim surrounding whitespace; std::from_chars is locale-independent.
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t' || field.front() == '\r')) {
        field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
        field.remove_suffix(1);
    }
    if (field.empty()) return false;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t begin = 0;
    while (true) {
        const std::size_t comma = line.find(',', begin);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(begin));
            break;
        }
        fields.push_back(line.substr(begin, comma - begin));
        begin = comma + 1;
    }
    return fields;
}

} // namespace

DataMatrix parse_csv(const std::string& text) {
    std::vector<std::vector<double>> columns; // per series
    std::size_t line_no = 0;
    std::istringstream stream(text);
    std::string line;
    bool first_data_row = true;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_fields(line);
        std::vector<double> row(fields.size());
        std::size_t numeric = 0;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (parse_double(fields[c], row[c])) ++numeric;
        }
        if (numeric != fields.size()) {
            // A first row with no numeric field at all is a header.
            if (first_data_row && numeric == 0) continue;
            throw ParseError("csv: non-numeric field at line " + std::to_string(line_no));
        }
        if (first_data_row) {
            columns.assign(row.size(), {});
            first_data_row = false;
        } else if (row.size() != columns.size()) {
            throw ParseError("csv: inconsistent field count at line " + std::to_string(line_no));
        }
        for (std::size_t c = 0; c < row.size(); ++c) columns[c].push_back(row[c]);
    }
    if (columns.empty() || columns.front().empty()) throw ParseError("csv: no data rows");
    try {
        return DataMatrix::from_rows(columns);
    } catch (const Error& err) {
        throw ParseError(std::string("csv: ") + err.what());
    }
}

DataMatrix read_csv(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ParseError("cannot open " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_csv(buffer.str());
}

void write_csv(const std::string& path, const DataMatrix& x) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ParseError("cannot open " + path + " for writing");
    file.precision(17);
    for (int v = 0; v < x.n(); ++v) {
        for (int i = 0; i < x.p(); ++i) {
            if (i) file << ',';
            file << x.value(i, v);
        }
        file << '\n';
    }
}

nlohmann::json detection_to_json(const DetectionResult& result, const DataMatrix& x,
                                 const std::vector<double>& sigma, const nlohmann::json& config) {
    nlohmann::json cps = nlohmann::json::array();
    for (const auto& cp : result.changepoints) {
        cps.push_back({{"position", cp.position},
                       {"interval", {cp.interval_s, cp.interval_e}},
                       {"score", cp.score},
                       {"sparsity", cp.sparsity}});
    }
    return {{"n", x.n()}, {"p", x.p()}, {"changepoints", cps}, {"sigma", sigma}, {"config", config}};
}

nlohmann::json report_to_json(const MetricsReport& report, const nlohmann::json& config, bool include_timing) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& record : report.records) {
        records.push_back({{"truth", record.truth},
                           {"estimate", record.estimate},
                           {"squared_error", record.squared_error},
                           {"hausdorff", record.hausdorff},
                           {"j_err", record.j_err}});
    }
    nlohmann::json out = {{"metrics", {{"mse", report.mse}, {"hausdorff", report.hausdorff}, {"abs_j_err", report.abs_j_err}}},
                          {"replicates", report.replicates},
                          {"records", records},
                          {"seed", report.seed},
                          {"prng", report.prng},
                          {"config", config}};
    if (include_timing) out["timing"] = {{"wall_seconds", report.wall_seconds}};
    return out;
}

nlohmann::json calibration_to_json(const CalibratedGamma& cal) {
    return {{"n", cal.n},
            {"p", cal.p},
            {"alpha", cal.alpha},
            {"K", cal.K},
            {"n_eff", to_string(cal.n_eff)},
            {"normalized", cal.normalized},
            {"midpoint_scan", cal.midpoint_scan},
            {"epsilon", cal.epsilon},
            {"N", cal.mc_n},
            {"seed", cal.seed},
            {"grid", cal.grid},
            {"raw", cal.raw_quantiles},
            {"gamma", cal.gamma},
            {"gamma1", cal.gamma1},
            {"gamma2", cal.gamma2},
            {"dense", cal.dense_value}};
}

CalibratedGamma calibration_from_json(const nlohmann::json& j) {
    try {
        CalibratedGamma cal;
        cal.n = j.at("n").get<int>();
        cal.p = j.at("p").get<int>();
        cal.alpha = j.at("alpha").get<double>();
        cal.K = j.at("K").get<int>();
        cal.n_eff = neff_from_string(j.at("n_eff").get<std::string>());
        cal.normalized = j.at("normalized").get<bool>();
        cal.midpoint_scan = j.at("midpoint_scan").get<bool>();
        cal.epsilon = j.at("epsilon").get<double>();
        cal.mc_n = j.at("N").get<int>();
        cal.seed = j.at("seed").get<std::uint64_t>();
        cal.grid = j.at("grid").get<std::vector<int>>();
        cal.raw_quantiles = j.at("raw").get<std::vector<double>>();
        cal.gamma = j.at("gamma").get<std::vector<double>>();
        cal.gamma1 = j.at("gamma1").get<double>();
        cal.gamma2 = j.at("gamma2").get<double>();
        cal.dense_value = j.at("dense").get<double>();
        if (cal.gamma.size() != cal.grid.size() || cal.raw_quantiles.size() != cal.grid.size()) {
            throw ParseError("calibration: grid/penalty length mismatch");
        }
        return cal;
    } catch (const nlohmann::json::exception& err) {
        throw ParseError(std::string("calibration: ") + err.what());
    }
}

void save_calibration(const std::string& path, const CalibratedGamma& cal) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ParseError("cannot open " + path + " for writing");
    file << calibration_to_json(cal).dump(2) << '\n';
}

CalibratedGamma load_calibration(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ParseError("cannot open " + path);
    nlohmann::json j;
    try {
        file >> j;
    } catch (const nlohmann::json::exception& err) {
        throw ParseError(std::string("calibration: ") + err.what());
    }
    return calibration_from_json(j);
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::Trimming: return "trim";
        case Variant::SplitAtEstimate: return "split";
        case Variant::MidpointTest: return "midpoint";
    }
    return "split";
}

Variant variant_from_string(const std::string& s) {
    if (s == "trim") return Variant::Trimming;
    if (s == "split") return Variant::SplitAtEstimate;
    if (s == "midpoint") return Variant::MidpointTest;
    throw ParseError("unknown variant: " + s);
}

std::string to_string(NEff mode) {
    return mode == NEff::Fourth ? "n4" : "n";
}

NEff neff_from_string(const std::string& s) {
    if (s == "n4") return NEff::Fourth;
    if (s == "n") return NEff::Theoretical;
    throw ParseError("unknown n_eff mode: " + s);
}

std::string to_string(NoiseModel model) {
    switch (model) {
        case NoiseModel::M0: return "m0";
        case NoiseModel::Unif: return "unif";
        case NoiseModel::StudentT: return "student_t";
        case NoiseModel::CsLoc: return "cs_loc";
        case NoiseModel::Cs: return "cs";
        case NoiseModel::Temp: return "temp";
        case NoiseModel::Async: return "async";
        case NoiseModel::Gradual: return "gradual";
    }
    return "m0";
}

NoiseModel noise_model_from_string(const std::string& s) {
    if (s == "m0") return NoiseModel::M0;
    if (s == "unif") return NoiseModel::Unif;
    if (s == "student_t") return NoiseModel::StudentT;
    if (s == "cs_loc") return NoiseModel::CsLoc;
    if (s == "cs") return NoiseModel::Cs;
    if (s == "temp") return NoiseModel::Temp;
    if (s == "async") return NoiseModel::Async;
    if (s == "gradual") return NoiseModel::Gradual;
    throw ParseError("unknown noise model: " + s);
}

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::Dense: return "dense";
        case Regime::Sparse: return "sparse";
        case Regime::Mixed: return "mixed";
    }
    return "sparse";
}

Regime regime_from_string(const std::string& s) {
    if (s == "dense") return Regime::Dense;
    if (s == "sparse") return Regime::Sparse;
    if (s == "mixed") return Regime::Mixed;
    throw ParseError("unknown regime: " + s);
}

} // namespace esac
