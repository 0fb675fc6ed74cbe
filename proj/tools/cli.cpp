#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "aeset/constructions.hpp"
#include "aeset/criterion.hpp"
#include "aeset/io.hpp"
#include "aeset/optimizer.hpp"
#include "aeset/separability.hpp"
#include "aeset/volume.hpp"

namespace aeset::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;

// Residual above which a disentangled image does not count as product.
constexpr double kDisentangleTolerance = 1e-10;

struct Written {
  std::string path;  // as given on the command line
  std::string bytes; // what this run wrote (only the new row for appends)
  bool appended = false;
};

struct Session {
  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> args;  // effective command line
  fs::path redirect_dir;          // non-empty while replaying
  std::vector<Written> written;
  Json config = Json::object();
  std::uint64_t seed = 0;
  bool has_seed = false;
};

class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fs::path target_path(const Session& s, const std::string& path) {
  if (s.redirect_dir.empty()) return path;
  return s.redirect_dir /
         (std::to_string(s.written.size()) + "_" + fs::path(path).filename().string());
}

void write_output(Session& s, const std::string& path, const std::string& text) {
  io::write_text_file(target_path(s, path), text);
  s.written.push_back({path, text, false});
}

void append_volume_row(Session& s, const std::string& path,
                       const VolumeEstimate& e) {
  io::append_volume_csv(target_path(s, path), e);
  s.written.push_back({path, io::volume_csv_row(e), true});
}

void emit(Session& s, const Json& j) { s.out << j.dump(2) << '\n'; }

std::uint64_t resolve_seed(Session& s, const std::optional<std::uint64_t>& given) {
  std::uint64_t seed = 0;
  if (given) {
    seed = *given;
  } else {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    s.err << "seed: " << seed << '\n';
    s.args.push_back("--seed");
    s.args.push_back(std::to_string(seed));
  }
  s.seed = seed;
  s.has_seed = true;
  s.config["seed"] = seed;
  return seed;
}

Partition resolve_partition(const std::string& flag, const Json& doc, int dim) {
  if (!flag.empty()) return Partition::parse(flag);
  if (auto p = io::partition_from_json(doc)) return *p;
  if (dim == 4) return Partition::bipartite(2, 2);
  throw Error(ErrorKind::InvalidPartition,
              "no partition given and none stored in the state file");
}

std::vector<std::array<int, 4>> all_four_subsets(int n) {
  std::vector<std::array<int, 4>> out;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d) out.push_back({a, b, c, d});
  return out;
}

// "0,1,2,3;0,1,2,4"
std::vector<std::array<int, 4>> parse_subsets(const std::string& text, int n) {
  std::vector<std::array<int, 4>> out;
  std::stringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::stringstream items(group);
    std::string item;
    std::vector<int> idx;
    while (std::getline(items, item, ',')) {
      try {
        idx.push_back(std::stoi(item));
      } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidParameter, "bad subset list '" + text + "'");
      }
    }
    if (idx.size() != 4) {
      throw Error(ErrorKind::InvalidParameter, "each subset needs 4 indices");
    }
    for (int i : idx) {
      if (i < 0 || i >= n) {
        throw Error(ErrorKind::InvalidParameter, "subset index out of range");
      }
    }
    out.push_back({idx[0], idx[1], idx[2], idx[3]});
  }
  if (out.empty()) throw Error(ErrorKind::InvalidParameter, "empty subset list");
  return out;
}

struct OptimizerFlags {
  int restarts = OptimizerConfig{}.restarts;
  int max_iterations = OptimizerConfig{}.max_iterations;
  double gradient_step = OptimizerConfig{}.gradient_step;
  double convergence_tol = OptimizerConfig{}.convergence_tol;
  double product_threshold = OptimizerConfig{}.product_threshold;

  void attach(CLI::App* cmd) {
    cmd->add_option("--restarts", restarts, "Random restarts")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-iterations", max_iterations, "Iterations per run")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--gradient-step", gradient_step, "Finite-difference step");
    cmd->add_option("--convergence-tol", convergence_tol,
                    "Relative decrease that ends a run");
    cmd->add_option("--product-threshold", product_threshold,
                    "Entropy below which a set counts as disentangled");
  }

  OptimizerConfig config(Session& s, std::uint64_t seed) const {
    OptimizerConfig cfg{restarts, max_iterations, gradient_step,
                        convergence_tol, product_threshold, RunSeed{seed, 0}};
    cfg.validate();
    s.config["optimizer"] = Json{{"restarts", restarts},
                                 {"max_iterations", max_iterations},
                                 {"gradient_step", gradient_step},
                                 {"convergence_tol", convergence_tol},
                                 {"product_threshold", product_threshold}};
    return cfg;
  }
};

void output_json(Session& s, const std::string& out_path, const Json& j) {
  if (out_path.empty()) {
    emit(s, j);
  } else {
    write_output(s, out_path, j.dump(2) + "\n");
  }
}

// ------------------------------------------------------------------ check

struct CheckArgs {
  std::string states;
  std::string partition;
  bool optimize = false;
  std::optional<std::uint64_t> seed;
  OptimizerFlags opt;
  std::string out;
};

void run_check(Session& s, const CheckArgs& a) {
  const Json doc = io::read_json_file(a.states);
  const StateSet set = io::state_set_from_json(doc);
  Json result{{"N", set.size()}, {"dim", set.dim()}};
  bool detected = false;
  if (set.dim() == 4 && set.size() == 4) {
    const CriterionVerdict given = theorem1_check_ordering(set);
    const CriterionVerdict scan = theorem1_scan(set);
    detected = scan.detected;
    result["given_order"] = io::verdict_to_json(given);
    result["scan"] = io::verdict_to_json(scan);
  } else if (set.dim() == 4 && set.size() > 4) {
    const MaximalScanReport report = maximal_entangled_scan(set);
    detected = report.certified_count > 0;
    result["subsets"] = io::scan_to_json(report);
  } else {
    result["criterion_applicable"] = false;
  }
  result["detected"] = detected;
  if (a.optimize) {
    const Partition p = resolve_partition(a.partition, doc, set.dim());
    const OptimizerConfig cfg = a.opt.config(s, resolve_seed(s, a.seed));
    result["partition"] = p.str();
    result["optimizer"] = io::optimization_to_json(minimize_total_entropy(set, p, cfg));
    result["seed"] = s.seed;
  }
  output_json(s, a.out, result);
}

// -------------------------------------------------------------- construct

struct ConstructArgs {
  std::string kind;
  std::string partition;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  int points = 4;
  double tolerance = kDefaultCoplanarityTolerance;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void run_construct(Session& s, const ConstructArgs& a) {
  s.config["kind"] = a.kind;
  Json doc;
  if (a.kind == "theorem4") {
    if (a.partition.empty()) {
      throw Error(ErrorKind::InvalidParameter, "theorem4 needs --partition");
    }
    const Partition p = Partition::parse(a.partition);
    doc = io::state_set_to_json(theorem4_states(p, a.a), &p);
    doc["a"] = a.a;
  } else if (a.kind == "eq1") {
    const Partition p = Partition::parse(a.partition.empty() ? "2x2" : a.partition);
    if (p.size() != 2) {
      throw Error(ErrorKind::InvalidPartition, "eq1 needs a bipartition");
    }
    doc = io::state_set_to_json(special_set(p.factor(0), p.factor(1), a.c), &p);
    doc["c"] = a.c;
  } else if (a.kind == "n5") {
    const Partition p = Partition::bipartite(2, 2);
    doc = io::state_set_to_json(n5_symmetric_set(a.b), &p);
    doc["b"] = a.b;
  } else {
    const Partition p = Partition::bipartite(2, 2);
    const std::uint64_t seed = resolve_seed(s, a.seed);
    const SpherePoints pts =
        sphere_points_general_position(a.points, RunSeed{seed, 0}, a.tolerance);
    doc = io::state_set_to_json(theorem2_states(pts, a.a), &p);
    doc["a"] = a.a;
    Json points = Json::array();
    for (const auto& v : pts.points) points.push_back({v.x(), v.y(), v.z()});
    doc["sphere_points"] = std::move(points);
    doc["min_tetra_det"] = pts.min_tetra_det;
    doc["seed"] = seed;
  }
  output_json(s, a.out, doc);
}

// ------------------------------------------------------------- amin-table

struct AminArgs {
  int d = 0;
  bool json = false;
  std::string out;
};

void run_amin(Session& s, const AminArgs& a) {
  s.config["d"] = a.d;
  const AminTable table = amin_table(a.d);
  const std::string text =
      a.json ? io::amin_table_to_json(table).dump(2) + "\n" : io::amin_table_csv(table);
  if (a.out.empty()) {
    s.out << text;
  } else {
    write_output(s, a.out, text);
  }
}

// ----------------------------------------------------------------- volume

struct VolumeArgs {
  std::string partition;
  int n = 0;
  std::int64_t samples = 0;
  std::optional<std::uint64_t> seed;
  std::string method = "full";
  int workers = 1;
  OptimizerFlags opt;
  std::string csv;
  std::string out;
};

void run_volume(Session& s, const VolumeArgs& a) {
  const Partition p = Partition::parse(a.partition);
  const std::uint64_t seed = resolve_seed(s, a.seed);
  s.config["partition"] = p.str();
  s.config["n"] = a.n;
  s.config["samples"] = a.samples;
  s.config["method"] = a.method;
  s.config["workers"] = a.workers;
  VolumeEstimate e = a.method == "lower"
                         ? estimate_volume_lower(p, a.n, a.samples, seed, a.workers)
                         : estimate_volume(p, a.n, a.samples, seed,
                                           a.opt.config(s, seed), a.workers);
  const Json j = io::volume_to_json(e);
  if (!a.out.empty()) write_output(s, a.out, j.dump(2) + "\n");
  if (!a.csv.empty()) append_volume_row(s, a.csv, e);
  emit(s, j);
}

// --------------------------------------------------------------- minimize

struct MinimizeArgs {
  std::string states;
  std::string partition;
  std::optional<std::uint64_t> seed;
  OptimizerFlags opt;
  std::string out;
};

void run_minimize(Session& s, const MinimizeArgs& a) {
  const Json doc = io::read_json_file(a.states);
  const StateSet set = io::state_set_from_json(doc);
  const Partition p = resolve_partition(a.partition, doc, set.dim());
  s.config["partition"] = p.str();
  const OptimizerConfig cfg = a.opt.config(s, resolve_seed(s, a.seed));
  Json j = io::optimization_to_json(minimize_total_entropy(set, p, cfg));
  j["partition"] = p.str();
  j["seed"] = s.seed;
  output_json(s, a.out, j);
}

// ------------------------------------------------------------ disentangle

struct DisentangleArgs {
  std::string states;
  std::string partition;
  std::string out;
};

void run_disentangle(Session& s, const DisentangleArgs& a) {
  const Json doc = io::read_json_file(a.states);
  const StateSet set = io::state_set_from_json(doc);
  const Partition p = resolve_partition(a.partition, doc, set.dim());
  s.config["partition"] = p.str();
  const Unitary u = disentangling_unitary(set, p);
  Json residuals = Json::array();
  double worst = 0.0;
  for (const auto& state : set) {
    const double r =
        is_fully_product(u.apply(state), p, kDisentangleTolerance).residual;
    worst = std::max(worst, r);
    residuals.push_back(r);
  }
  Json j{{"partition", p.str()},
         {"residuals", std::move(residuals)},
         {"max_residual", worst},
         {"all_product", worst < kDisentangleTolerance}};
  if (a.out.empty()) {
    j["unitary"] = io::unitary_to_json(u);
  } else {
    write_output(s, a.out, io::unitary_to_json(u).dump(2) + "\n");
  }
  emit(s, j);
  if (!(worst < kDisentangleTolerance)) {
    throw NumericFailure("disentangled images are not product (max residual " +
                         io::format_double(worst) + ")");
  }
}

// ------------------------------------------------------------- critical-a

struct CriticalArgs {
  std::string family = "n5";
  int points = 5;
  double tolerance = kDefaultCoplanarityTolerance;
  std::optional<std::uint64_t> seed;
  std::string subsets;
  double resolution = kDefaultBisectionResolution;
  std::string out;
};

void run_critical(Session& s, const CriticalArgs& a) {
  s.config["family"] = a.family;
  s.config["resolution"] = a.resolution;
  FamilyGenerator family;
  int n = 5;
  std::optional<SpherePoints> pts;
  if (a.family == "n5") {
    family = [](double b) { return n5_symmetric_set(b); };
  } else {
    const std::uint64_t seed = resolve_seed(s, a.seed);
    pts = sphere_points_general_position(a.points, RunSeed{seed, 0}, a.tolerance);
    n = a.points;
    family = [p = *pts](double x) { return theorem2_states(p, x); };
  }
  const auto subsets = a.subsets.empty() ? all_four_subsets(n)
                                         : parse_subsets(a.subsets, n);
  const CriticalSearchResult r = critical_a_search(family, subsets, a.resolution);
  Json rows = Json::array();
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    Json row{{"subset", subsets[i]}};
    row["critical"] = r.per_subset[i] ? Json(*r.per_subset[i]) : Json(nullptr);
    if (pts) {
      const AsymptoticThreshold t = theorem2_asymptotic_threshold(*pts, subsets[i]);
      row["asymptotic_L"] = t.L_prime;
      row["asymptotic_threshold"] = t.o;
    }
    rows.push_back(std::move(row));
  }
  Json j{{"family", a.family}, {"resolution", a.resolution}, {"subsets", rows}};
  j["critical"] = r.critical ? Json(*r.critical) : Json(nullptr);
  if (s.has_seed) j["seed"] = s.seed;
  output_json(s, a.out, j);
}

// ----------------------------------------------------------------- replay

int dispatch(Session& s, const std::vector<std::string>& args);

void run_replay(Session& s, const std::string& manifest_path) {
  const io::RunManifest m = io::manifest_from_json(io::read_json_file(manifest_path));
  if (!m.command_line.empty() && m.command_line.front() == "replay") {
    throw Error(ErrorKind::InvalidInput, "refusing to replay a replay");
  }
  const fs::path dir = fs::temp_directory_path() /
                       ("aeset-replay-" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  std::ostringstream sink;
  Session inner{sink, s.err, m.command_line, dir, {}, Json::object(), 0, false};
  const int code = dispatch(inner, m.command_line);
  std::error_code ec;
  fs::remove_all(dir, ec);
  if (code != kExitOk) {
    throw NumericFailure("replayed command exited with " + std::to_string(code));
  }
  Json outputs = Json::array();
  bool match = inner.written.size() == m.outputs.size();
  for (std::size_t i = 0; i < m.outputs.size(); ++i) {
    const std::string now =
        i < inner.written.size() ? io::sha256_hex(inner.written[i].bytes) : "";
    const bool same = now == m.outputs[i].sha256;
    match = match && same;
    outputs.push_back(Json{{"path", m.outputs[i].path},
                           {"recorded", m.outputs[i].sha256},
                           {"replayed", now},
                           {"match", same}});
  }
  emit(s, Json{{"manifest", manifest_path}, {"match", match}, {"outputs", outputs}});
  if (!match) throw NumericFailure("replay does not reproduce the recorded outputs");
}

// --------------------------------------------------------------- dispatch

void write_manifest(Session& s, const std::string& started, double seconds) {
  if (s.written.empty() || !s.redirect_dir.empty()) return;
  io::RunManifest m;
  m.command_line = s.args;
  m.config = s.config;
  m.seed = s.seed;
  m.started = started;
  m.finished = io::utc_timestamp();
  m.wall_seconds = seconds;
  m.library_version = AESET_VERSION;
  for (const auto& w : s.written) {
    m.outputs.push_back({w.path, io::sha256_hex(w.bytes)});
  }
  const std::string path = s.written.front().path + ".manifest.json";
  io::write_text_file(path, io::manifest_to_json(m).dump(2) + "\n");
  s.err << "manifest: " << path << '\n';
}

int dispatch(Session& s, const std::vector<std::string>& args) {
  CLI::App app{"Absolutely entangled sets: criteria, constructions, volumes"};
  app.name("aeset");
  app.require_subcommand(1);

  CheckArgs check;
  auto* c_check = app.add_subcommand("check", "Criterion verdicts for a state-set file");
  c_check->add_option("--states", check.states, "State-set JSON")->required();
  c_check->add_option("--partition", check.partition, "e.g. 2x2");
  c_check->add_flag("--optimize", check.optimize, "Also run the entropy minimizer");
  c_check->add_option("--seed", check.seed, "Optimizer seed");
  check.opt.attach(c_check);
  c_check->add_option("--out", check.out, "Write the verdict JSON here");

  ConstructArgs cons;
  auto* c_cons = app.add_subcommand("construct", "Emit a state-set JSON");
  c_cons->add_option("kind", cons.kind, "theorem4 | theorem2 | n5 | eq1")
      ->required()
      ->check(CLI::IsMember({"theorem4", "theorem2", "n5", "eq1"}));
  c_cons->add_option("--partition", cons.partition, "e.g. 2x2x8");
  c_cons->add_option("--a", cons.a, "Overlap for theorem4 / theorem2");
  c_cons->add_option("--b", cons.b, "Overlap for n5");
  c_cons->add_option("--c", cons.c, "Overlap for eq1");
  c_cons->add_option("--points", cons.points, "Sphere points for theorem2")
      ->check(CLI::Range(4, 64));
  c_cons->add_option("--tolerance", cons.tolerance, "Coplanarity tolerance");
  c_cons->add_option("--seed", cons.seed, "Seed for theorem2 points");
  c_cons->add_option("--out", cons.out, "Output file");

  AminArgs amin;
  auto* c_amin = app.add_subcommand("amin-table", "Thresholds for every factorization of d");
  c_amin->add_option("--d", amin.d, "Dimension")->required();
  c_amin->add_flag("--json", amin.json, "JSON instead of CSV");
  c_amin->add_option("--out", amin.out, "Output file");

  VolumeArgs vol;
  auto* c_vol = app.add_subcommand("volume", "Monte-Carlo volume of absolutely entangled sets");
  c_vol->add_option("--partition", vol.partition, "e.g. 2x2")->required();
  c_vol->add_option("--n", vol.n, "Set size")->required()->check(CLI::PositiveNumber);
  c_vol->add_option("--samples", vol.samples, "Sample count")
      ->required()
      ->check(CLI::PositiveNumber);
  c_vol->add_option("--seed", vol.seed, "Base seed");
  c_vol->add_option("--method", vol.method, "lower | full")
      ->check(CLI::IsMember({"lower", "full"}));
  c_vol->add_option("--workers", vol.workers, "Threads")->check(CLI::PositiveNumber);
  vol.opt.attach(c_vol);
  c_vol->add_option("--csv", vol.csv, "Append a row to this CSV");
  c_vol->add_option("--out", vol.out, "Write the estimate JSON here");

  MinimizeArgs mini;
  auto* c_min = app.add_subcommand("minimize", "Minimize total entropy over unitaries");
  c_min->add_option("--states", mini.states, "State-set JSON")->required();
  c_min->add_option("--partition", mini.partition, "e.g. 2x2");
  c_min->add_option("--seed", mini.seed, "Seed");
  mini.opt.attach(c_min);
  c_min->add_option("--out", mini.out, "Output file");

  DisentangleArgs dis;
  auto* c_dis = app.add_subcommand("disentangle", "Unitary making a small set product");
  c_dis->add_option("--states", dis.states, "State-set JSON")->required();
  c_dis->add_option("--partition", dis.partition, "e.g. 2x2x2");
  c_dis->add_option("--out", dis.out, "Write the unitary JSON here");

  CriticalArgs crit;
  auto* c_crit = app.add_subcommand("critical-a", "Bisection for the detection threshold");
  c_crit->add_option("--family", crit.family, "n5 | theorem2")
      ->check(CLI::IsMember({"n5", "theorem2"}));
  c_crit->add_option("--points", crit.points, "Sphere points for theorem2")
      ->check(CLI::Range(4, 64));
  c_crit->add_option("--tolerance", crit.tolerance, "Coplanarity tolerance");
  c_crit->add_option("--seed", crit.seed, "Seed for theorem2 points");
  c_crit->add_option("--subsets", crit.subsets, "e.g. 0,1,2,3;0,1,2,4 (default: all)");
  c_crit->add_option("--resolution", crit.resolution, "Bisection resolution");
  c_crit->add_option("--out", crit.out, "Output file");

  std::string manifest;
  auto* c_replay = app.add_subcommand("replay", "Re-run a manifest and compare digests");
  c_replay->add_option("--manifest", manifest, "Manifest JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, s.out, s.err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::string started = io::utc_timestamp();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (*c_check) run_check(s, check);
    if (*c_cons) run_construct(s, cons);
    if (*c_amin) run_amin(s, amin);
    if (*c_vol) run_volume(s, vol);
    if (*c_min) run_minimize(s, mini);
    if (*c_dis) run_disentangle(s, dis);
    if (*c_crit) run_critical(s, crit);
    if (*c_replay) run_replay(s, manifest);
  } catch (const NumericFailure& e) {
    s.err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    s.err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == ErrorKind::Internal ? kExitNumeric : kExitUsage;
  } catch (const std::exception& e) {
    s.err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    write_manifest(s, started, seconds);
  } catch (const Error& e) {
    s.err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  Session s{out, err, args, {}, {}, Json::object(), 0, false};
  return dispatch(s, args);
}

}  // namespace aeset::cli
