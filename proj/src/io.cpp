#include "aeset/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

namespace aeset::io {
namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorKind::InvalidInput, what);
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    schema_error("complex numbers must be [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Eigen::VectorXcd vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) schema_error("expected a non-empty array");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  }
  return v;
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    schema_error(std::string("missing field '") + name + "'");
  }
  return j.at(name);
}

void expect_format(const Json& j, const char* format) {
  if (j.is_object() && j.contains("format") && j["format"] != format) {
    schema_error(std::string("expected a ") + format + " document");
  }
}

Json number_or_inf(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Json doubles(const std::vector<double>& xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(x);
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ';';
    out += format_double(xs[i]);
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw Error(ErrorKind::Internal, "double formatting failed");
  return std::string(buf, end);
}

Json state_set_to_json(const StateSet& set, const Partition* p) {
  Json states = Json::array();
  for (const auto& s : set) {
    Json amps = Json::array();
    for (int i = 0; i < s.dim(); ++i) amps.push_back(complex_to_json(s[i]));
    states.push_back(std::move(amps));
  }
  Json j{{"format", "state-set"}, {"dim", set.dim()}};
  if (p) j["partition"] = p->str();
  j["states"] = std::move(states);
  return j;
}

StateSet state_set_from_json(const Json& j) {
  expect_format(j, "state-set");
  const Json& states = field(j, "states");
  if (!states.is_array() || states.empty()) {
    schema_error("'states' must be a non-empty array");
  }
  std::vector<PureState> out;
  for (const auto& s : states) out.emplace_back(vector_from_json(s));
  const int dim = out.front().dim();
  if (j.contains("dim") && (!j["dim"].is_number_integer() || j["dim"] != dim)) {
    schema_error("'dim' does not match the state length");
  }
  return StateSet(dim, std::move(out));
}

std::optional<Partition> partition_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("partition")) return std::nullopt;
  if (!j["partition"].is_string()) schema_error("'partition' must be a string");
  return Partition::parse(j["partition"].get<std::string>());
}

Json unitary_to_json(const Unitary& u) {
  Json rows = Json::array();
  for (int r = 0; r < u.dim(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < u.dim(); ++c) row.push_back(complex_to_json(u(r, c)));
    rows.push_back(std::move(row));
  }
  return Json{{"format", "unitary"}, {"dim", u.dim()}, {"matrix", std::move(rows)}};
}

Unitary unitary_from_json(const Json& j) {
  expect_format(j, "unitary");
  const Json& rows = field(j, "matrix");
  if (!rows.is_array() || rows.empty()) schema_error("'matrix' must be an array");
  const auto d = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const Eigen::VectorXcd row = vector_from_json(rows[static_cast<std::size_t>(r)]);
    if (row.size() != d) schema_error("'matrix' must be square");
    m.row(r) = row.transpose();
  }
  return Unitary(std::move(m));
}

Json verdict_to_json(const CriterionVerdict& v) {
  return Json{{"detected", v.detected},
              {"permutation", v.permutation},
              {"c", v.c},
              {"L", number_or_inf(v.L)},
              {"threshold", v.threshold},
              {"c22", v.c22},
              {"margin", v.margin()}};
}

Json scan_to_json(const MaximalScanReport& r) {
  Json subsets = Json::array();
  for (const auto& s : r.subsets) {
    subsets.push_back(
        Json{{"subset", s.subset_indices}, {"verdict", verdict_to_json(s.verdict)}});
  }
  return Json{{"subsets", std::move(subsets)},
              {"certified_count", r.certified_count},
              {"all_subsets_certified", r.all_subsets_certified}};
}

Json optimization_to_json(const OptimizationResult& r) {
  return Json{{"min_total_entropy", r.min_total_entropy},
              {"classified_aes", r.classified_aes},
              {"entropy_band_warning", r.entropy_band_warning},
              {"converged", r.converged},
              {"restarts_used", r.restarts_used},
              {"iterations_used", r.iterations_used},
              {"best_params", r.best_params},
              {"best_unitary", unitary_to_json(r.best_unitary)}};
}

Json volume_to_json(const VolumeEstimate& e) {
  return Json{{"format", "volume-estimate"},
              {"partition", e.partition.str()},
              {"N", e.N},
              {"samples", e.samples},
              {"detected", e.detected},
              {"criterion_detected", e.criterion_detected},
              {"fraction", e.fraction},
              {"stddev_counts", e.stddev_counts},
              {"method", to_string(e.method)},
              {"seed", e.seed}};
}

VolumeEstimate volume_from_json(const Json& j) {
  expect_format(j, "volume-estimate");
  try {
    const std::string method = field(j, "method").get<std::string>();
    VolumeEstimate e{Partition::parse(field(j, "partition").get<std::string>()),
                     field(j, "N").get<int>(),
                     field(j, "samples").get<std::int64_t>(),
                     field(j, "detected").get<std::int64_t>(),
                     j.value("criterion_detected", std::int64_t{0}),
                     field(j, "fraction").get<double>(),
                     field(j, "stddev_counts").get<double>(),
                     method == "criterion-only" ? VolumeMethod::CriterionOnly
                                                : VolumeMethod::CriterionThenOptimizer,
                     field(j, "seed").get<std::uint64_t>()};
    return e;
  } catch (const nlohmann::json::exception& ex) {
    schema_error(std::string("bad volume estimate: ") + ex.what());
  }
}

Json amin_table_to_json(const AminTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    rows.push_back(Json{{"partition", r.partition.str()},
                        {"N", r.N},
                        {"D", doubles(r.D)},
                        {"terms", doubles(r.terms)},
                        {"amin_max", r.amin_max},
                        {"amin_min", r.amin_min}});
  }
  return Json{{"rows", std::move(rows)},
              {"all", Json{{"N", t.all_N},
                           {"amin_max", t.all_amin_max},
                           {"amin_min", t.all_amin_min}}}};
}

Json chain_to_json(const ChainReport& r) {
  Json links = Json::array();
  for (const auto& l : r.links) {
    links.push_back(Json{{"S", l.S}, {"D", l.D}, {"holds", l.holds}});
  }
  Json j{{"a", r.a},
         {"amin_max", r.amin_max},
         {"inconclusive", r.inconclusive},
         {"links", std::move(links)},
         {"S", doubles(r.sums.S)},
         {"B", doubles(r.sums.B)},
         {"T", doubles(r.sums.T)},
         {"I", r.sums.I}};
  j["first_violation"] =
      r.first_violation ? Json(*r.first_violation) : Json(nullptr);
  return j;
}

std::string amin_table_csv(const AminTable& t) {
  std::ostringstream out;
  out << "partition,N,D,terms,amin_max,amin_min\n";
  for (const auto& r : t.rows) {
    out << r.partition.str() << ',' << r.N << ',' << join(r.D) << ','
        << join(r.terms) << ',' << format_double(r.amin_max) << ','
        << format_double(r.amin_min) << '\n';
  }
  out << "all," << t.all_N << ",,," << format_double(t.all_amin_max) << ','
      << format_double(t.all_amin_min) << '\n';
  return out.str();
}

std::string volume_csv_header() {
  return "partition,N,samples,detected,criterion_detected,fraction,"
         "stddev_counts,method,seed\n";
}

std::string volume_csv_row(const VolumeEstimate& e) {
  std::ostringstream out;
  out << e.partition.str() << ',' << e.N << ',' << e.samples << ','
      << e.detected << ',' << e.criterion_detected << ','
      << format_double(e.fraction) << ',' << format_double(e.stddev_counts)
      << ',' << to_string(e.method) << ',' << e.seed << '\n';
  return out.str();
}

void append_volume_csv(const std::filesystem::path& path,
                       const VolumeEstimate& e) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) ||
                     std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::InvalidInput, "cannot open " + path.string());
  }
  if (fresh) out << volume_csv_header();
  out << volume_csv_row(e);
}

Json parse_json(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& ex) {
    // ex.byte is 1-based and points one past the offending character.
    const std::size_t stop = std::min(ex.byte == 0 ? 0 : ex.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string message = ex.what();
    const auto colon = message.rfind(": ");
    if (colon != std::string::npos) message = message.substr(colon + 2);
    throw Error(ErrorKind::InvalidInput,
                std::string(source) + ":" + std::to_string(line) + ":" +
                    std::to_string(column) + ": " + message);
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json read_json_file(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::InvalidInput, "write failed: " + path.string());
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorKind::Internal, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

Json manifest_to_json(const RunManifest& m) {
  Json outputs = Json::array();
  for (const auto& o : m.outputs) {
    outputs.push_back(Json{{"path", o.path}, {"sha256", o.sha256}});
  }
  return Json{{"format", "run-manifest"},
              {"command_line", m.command_line},
              {"config", m.config},
              {"seed", m.seed},
              {"started", m.started},
              {"finished", m.finished},
              {"wall_seconds", m.wall_seconds},
              {"library_version", m.library_version},
              {"outputs", std::move(outputs)}};
}

RunManifest manifest_from_json(const Json& j) {
  expect_format(j, "run-manifest");
  try {
    RunManifest m;
    m.command_line = field(j, "command_line").get<std::vector<std::string>>();
    m.config = j.value("config", Json::object());
    m.seed = j.value("seed", std::uint64_t{0});
    m.started = j.value("started", "");
    m.finished = j.value("finished", "");
    m.wall_seconds = j.value("wall_seconds", 0.0);
    m.library_version = j.value("library_version", "");
    for (const auto& o : j.value("outputs", Json::array())) {
      m.outputs.push_back({o.at("path").get<std::string>(),
                           o.at("sha256").get<std::string>()});
    }
    return m;
  } catch (const nlohmann::json::exception& ex) {
    schema_error(std::string("bad manifest: ") + ex.what());
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace aeset::io
