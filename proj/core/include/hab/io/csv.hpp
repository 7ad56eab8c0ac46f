#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hab/types.hpp"

namespace hab::io {

// CSV schemas are strict: exact headers, comma-delimited, UTF-8, no quoting.
// Parse errors name the file, line and offending field.

/// Header: uid,latitude,longitude,date,split
std::vector<SampleMeta> read_metadata_csv(const std::filesystem::path& path);
void write_metadata_csv(const std::filesystem::path& path,
                        const std::vector<SampleMeta>& rows);

/// Header: uid,region,severity,density (region parsed case-insensitively)
std::vector<Label> read_labels_csv(const std::filesystem::path& path);
void write_labels_csv(const std::filesystem::path& path, const std::vector<Label>& rows);

/// Header: uid,fold,prediction with fold in {0..4, test}. One prediction per
/// uid across the whole file.
PredictionSet read_external_predictions(const std::filesystem::path& path,
                                        std::string model_id = {});
void write_predictions_csv(const std::filesystem::path& path, const PredictionSet& set);

/// Header: uid,severity
std::vector<std::pair<std::string, int>> read_severity_csv(
    const std::filesystem::path& path);
void write_severity_csv(const std::filesystem::path& path,
                        const std::vector<std::pair<std::string, int>>& rows);

// Shared line-level helpers for other CSV-shaped files.
std::vector<std::string> split_csv_line(const std::string& line);
double parse_csv_double(const std::string& token, const std::string& context);
long parse_csv_long(const std::string& token, const std::string& context);

}  // namespace hab::io
