#pragma once

// File formats: the semi-supervised data CSV, the flat experiment config, the
// JSON reports and the plot-ready CSV tables.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tailcv/core.hpp"
#include "tailcv/dependence.hpp"
#include "tailcv/estimators.hpp"
#include "tailcv/experiment.hpp"

#include <json.hpp>

namespace tailcv::io {

struct DataRow {
    std::optional<double> target;
    double source = 0.0;
};

/// A parsed "target,source" file. Rows with a target form the coupled set in
/// file order; rows with an empty target cell are unpaired source values.
struct DataFile {
    std::filesystem::path path;
    std::vector<std::string> header;
    std::vector<DataRow> rows;

    std::size_t coupled_count() const;
    std::size_t unpaired_count() const;
    SemiSupervisedDataset to_dataset() const;
};

DataFile read_data_file(const std::filesystem::path& path);
DataFile parse_data_csv(std::string_view text, const std::filesystem::path& origin = {});
SemiSupervisedDataset load_semi_supervised_csv(const std::filesystem::path& path);
void write_semi_supervised_csv(const std::filesystem::path& path,
                               const SemiSupervisedDataset& dataset);

/// Flat "key = value" config. '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_text(const ExperimentConfig& config);

/// Shortest text that parses back to exactly the same double (at most 17
/// significant digits).
std::string format_double(double value);
double parse_double(std::string_view text);
std::vector<Method> parse_method_list(std::string_view text);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EviEstimate& estimate);
nlohmann::json to_json(const DependenceReport& report);
/// The report without per-replication records.
nlohmann::json to_json(const RvrReport& report);
RvrReport rvr_report_from_json(const nlohmann::json& j);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv_table(const std::filesystem::path& path);
void write_csv_table(const std::filesystem::path& path, const CsvTable& table);

CsvTable estimates_table(const RvrReport& report);
CsvTable hill_plot_table(const HillPlotSeries& series);
CsvTable threshold_scan_table(const std::vector<ThresholdScanRow>& rows);
CsvTable bootstrap_table(const std::vector<BootstrapSeries>& series);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace tailcv::io
