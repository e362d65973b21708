#pragma once

#include "surge/landscape.hpp"
#include "surge/optimize.hpp"
#include "surge/partition.hpp"
#include "surge/quartic.hpp"

#include <nlohmann/json_fwd.hpp>

#include <stdexcept>
#include <string>

namespace surge {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// '%.17g', C locale: enough digits to round-trip any double
std::string format_double(double x);

void write_text_file(const std::string& path, const std::string& content); // throws io_error
std::string read_text_file(const std::string& path);                       // throws io_error

nlohmann::json targets_to_json(const TargetSet& targets);
TargetSet targets_from_json(const nlohmann::json& j);

nlohmann::json series_to_json(const PowerSeries& series);
PowerSeries series_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const AnalysisReport& report);

std::string trajectory_to_csv(const Trajectory& trajectory);

std::string dataset_to_csv(const Dataset& data);
Dataset dataset_from_csv(const std::string& text);

// flat parameter vector with a one-line JSON shape header, then raw
// little-endian doubles
std::string params_to_blob(const std::vector<int>& layer_sizes, const std::vector<double>& params);
std::pair<std::vector<int>, std::vector<double>> params_from_blob(const std::string& blob);

std::string oracle_report_to_csv(const OracleReport& report);
nlohmann::json oracle_report_to_json(const OracleReport& report);
std::string oracle_report_table(const OracleReport& report); // human-readable

} // namespace surge
