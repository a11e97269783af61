#pragma once

#include <string>

#include <json.hpp>

#include "esac/calibrate.hpp"
#include "esac/detect.hpp"
#include "esac/simulate.hpp"

namespace esac {

/// CSV with rows = time points and columns = series (dot decimals, comma
/// separated). A first row in which no field parses as a number is treated
/// as a header. Throws ParseError on malformed input.
DataMatrix read_csv(const std::string& path);
DataMatrix parse_csv(const std::string& text);

void write_csv(const std::string& path, const DataMatrix& x);

nlohmann::json detection_to_json(const DetectionResult& result, const DataMatrix& x,
                                 const std::vector<double>& sigma, const nlohmann::json& config);

/// Canonical report JSON. Wall time is excluded so runs are byte-identical
/// across seeds/thread counts; pass include_timing to attach it.
nlohmann::json report_to_json(const MetricsReport& report, const nlohmann::json& config,
                              bool include_timing = false);

nlohmann::json calibration_to_json(const CalibratedGamma& cal);
CalibratedGamma calibration_from_json(const nlohmann::json& j);

void save_calibration(const std::string& path, const CalibratedGamma& cal);
CalibratedGamma load_calibration(const std::string& path);

// enum <-> string helpers shared by the CLI and the JSON schemas
std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);
std::string to_string(NEff mode);
NEff neff_from_string(const std::string& s);
std::string to_string(NoiseModel model);
NoiseModel noise_model_from_string(const std::string& s);
std::string to_string(Regime regime);
Regime regime_from_string(const std::string& s);

} // namespace esac
