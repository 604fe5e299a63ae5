#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "entlab/types.hpp"

// Report plumbing shared by the command-line experiments: operators as JSON
// attachments, a deterministic report envelope, and CSV emission for
// external plotting.

namespace entlab {

using json = nlohmann::ordered_json;  // insertion order keeps dumps stable

inline constexpr int kReportSchemaVersion = 1;

// {dim, layout, re[], im[]} with the matrix entries row-major.
json operator_to_json(const cmat& m, const Layout& layout = {});
cmat operator_from_json(const json& j, Layout* layout_out = nullptr);

// {schema_version, config, results, meta: {timestamp}}.  Everything under
// config and results is caller data, so two runs with the same inputs dump
// the same bytes there; the timestamp stays quarantined in meta.
json report_envelope(json config, json results);

// Render rows as CSV under a comma-separated header; values print with
// enough digits to round-trip.
std::string csv_table(const std::string& header, const std::vector<std::vector<double>>& rows);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace entlab
