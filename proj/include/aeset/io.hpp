#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aeset/constructions.hpp"
#include "aeset/core.hpp"
#include "aeset/criterion.hpp"
#include "aeset/optimizer.hpp"
#include "aeset/separability.hpp"
#include "aeset/volume.hpp"

namespace aeset::io {

using Json = nlohmann::json;

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

// Complex numbers are [re, im] pairs throughout.

/// {"format": "state-set", "dim": d, "partition": "2x2" (optional),
///  "states": [[[re, im], ...], ...]}
Json state_set_to_json(const StateSet& set, const Partition* p = nullptr);
StateSet state_set_from_json(const Json& j);
/// The "partition" field of a state-set document, if present.
std::optional<Partition> partition_from_json(const Json& j);

/// {"format": "unitary", "dim": d, "matrix": [[[re, im], ...], ...]} by rows.
Json unitary_to_json(const Unitary& u);
Unitary unitary_from_json(const Json& j);

Json verdict_to_json(const CriterionVerdict& v);
Json scan_to_json(const MaximalScanReport& r);
Json optimization_to_json(const OptimizationResult& r);
Json volume_to_json(const VolumeEstimate& e);
VolumeEstimate volume_from_json(const Json& j);
Json amin_table_to_json(const AminTable& t);
Json chain_to_json(const ChainReport& r);

/// Columns: partition, N, D, terms, amin_max, amin_min. List-valued cells are
/// ';'-separated. One row per partition followed by an "all" summary row.
std::string amin_table_csv(const AminTable& t);

std::string volume_csv_header();
std::string volume_csv_row(const VolumeEstimate& e);
/// Appends a row, writing the header first when the file is new or empty.
void append_volume_csv(const std::filesystem::path& path,
                       const VolumeEstimate& e);

/// Parses JSON text; malformed input raises InvalidInput with
/// "<source>:<line>:<column>: <message>".
Json parse_json(std::string_view text, std::string_view source = "<input>");
Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

std::string sha256_hex(std::string_view data);

struct OutputDigest {
  std::string path;
  std::string sha256;
};

/// Record of one CLI invocation that wrote files.
struct RunManifest {
  std::vector<std::string> command_line;  // argv without the program name
  Json config;
  std::uint64_t seed = 0;
  std::string started;   // ISO-8601 UTC
  std::string finished;
  std::string library_version;
  double wall_seconds = 0.0;
  std::vector<OutputDigest> outputs;
};

Json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);
std::string utc_timestamp();

}  // namespace aeset::io
