#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gemn/metrics/series.hpp"

namespace gemn::metrics {

// Layout: "name,unit,label" header, the series' metadata row, the column
// header, then one row per entry.
std::string render_csv(const MetricSeries& series);
std::string render_csv(const Table& table);
MetricSeries parse_csv(const std::string& text);

// File name derived from the run label and series name.
std::string artifact_name(const std::string& label, const std::string& name, const std::string& extension);

// Writes the text; throws std::runtime_error when the path is unwritable.
void write_file(const std::filesystem::path& path, const std::string& text);
std::filesystem::path write_csv(const std::filesystem::path& dir, const MetricSeries& series);
std::filesystem::path write_csv(const std::filesystem::path& dir, const Table& table);

}  // namespace gemn::metrics
