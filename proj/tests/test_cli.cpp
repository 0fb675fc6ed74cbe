#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "aeset/io.hpp"
#include "cli.hpp"

using namespace aeset;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "aeset-test-cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("amin-table prints six partitions and a summary row") {
  const Run r = run({"amin-table", "--d", "32"});
  REQUIRE(r.code == cli::kExitOk);
  std::istringstream in(r.out);
  std::string line;
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  CHECK(rows == 8);
  CHECK(last.rfind("all,18", 0) == 0);

  const Run j = run({"amin-table", "--d", "12", "--json"});
  CHECK(j.code == 0);
  CHECK(io::parse_json(j.out)["rows"].size() == 3);
}

TEST_CASE("construct then check") {
  const fs::path dir = scratch_dir();
  const std::string file = (dir / "t4.json").string();
  const Run c = run({"construct", "theorem4", "--partition", "2x2", "--a", "0.9", "--out", file});
  REQUIRE(c.code == 0);
  CHECK(fs::exists(file + ".manifest.json"));

  const io::Json doc = io::read_json_file(file);
  CHECK(doc["states"].size() == 4);
  // Bitwise round trip against the library construction.
  CHECK(io::state_set_from_json(doc) == theorem4_states(Partition({2, 2}), 0.9));

  const Run chk = run({"check", "--states", file});
  REQUIRE(chk.code == 0);
  const io::Json v = io::parse_json(chk.out);
  CHECK(v["detected"] == true);
  CHECK(v["scan"]["detected"] == true);

  const Run low = run({"construct", "eq1", "--c", "0.4"});
  REQUIRE(low.code == 0);
  CHECK(io::state_set_from_json(io::parse_json(low.out)) == special_set(2, 2, 0.4));
}

TEST_CASE("check with the optimizer") {
  const fs::path dir = scratch_dir();
  const std::string file = (dir / "eq1.json").string();
  REQUIRE(run({"construct", "eq1", "--c", "0.9", "--out", file}).code == 0);
  const Run r = run({"check", "--states", file, "--optimize", "--seed", "4"});
  REQUIRE(r.code == 0);
  const io::Json v = io::parse_json(r.out);
  CHECK(v["optimizer"]["classified_aes"] == true);
  CHECK(v["seed"] == 4);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"volume", "--partition", "2x2"}).code == cli::kExitUsage);
  CHECK(run({"amin-table", "--d", "7"}).code == cli::kExitUsage);
  CHECK(run({"construct", "theorem4", "--partition", "2y2", "--a", "0.5"}).code == cli::kExitUsage);
  CHECK(run({"check", "--states", "/nonexistent/file.json"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);

  const fs::path dir = scratch_dir();
  const fs::path bad = dir / "bad.json";
  io::write_text_file(bad, "{\n\"states\": [\n  [1, 0,\n}");
  const Run r = run({"check", "--states", bad.string()});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find(bad.string() + ":4:") != std::string::npos);
}

TEST_CASE("disentangle refuses oversized sets") {
  const fs::path dir = scratch_dir();
  const fs::path f = dir / "s.json";
  const Partition p({2, 2});
  io::write_text_file(f, io::state_set_to_json(haar_random_state_set(4, 4, RunSeed{1, 2}), &p).dump());
  const Run r = run({"disentangle", "--states", f.string()});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("bound-exceeded") != std::string::npos);

  io::write_text_file(f, io::state_set_to_json(haar_random_state_set(4, 3, RunSeed{1, 2}), &p).dump());
  const Run ok = run({"disentangle", "--states", f.string()});
  REQUIRE(ok.code == 0);
  CHECK(io::parse_json(ok.out)["all_product"] == true);
}

TEST_CASE("volume runs replay bitwise") {
  const fs::path dir = scratch_dir();
  const std::string out = (dir / "v.json").string();
  const std::string csv = (dir / "v.csv").string();
  const Run r = run({"volume", "--partition", "2x2", "--n", "4", "--samples", "30", "--seed", "12",
                     "--out", out, "--csv", csv});
  REQUIRE(r.code == 0);
  const std::string manifest = out + ".manifest.json";
  REQUIRE(fs::exists(manifest));
  const io::RunManifest m = io::manifest_from_json(io::read_json_file(manifest));
  CHECK(m.seed == 12);
  CHECK(m.outputs.size() == 2);

  const Run rep = run({"replay", "--manifest", manifest});
  CHECK(rep.code == 0);
  CHECK(io::parse_json(rep.out)["match"] == true);

  // A tampered digest is detected.
  io::Json j = io::read_json_file(manifest);
  j["outputs"][0]["sha256"] = std::string(64, '0');
  io::write_text_file(manifest, j.dump());
  const Run bad = run({"replay", "--manifest", manifest});
  CHECK(bad.code == cli::kExitNumeric);
}

TEST_CASE("generated seeds are printed and recorded") {
  const fs::path dir = scratch_dir();
  const std::string out = (dir / "v.json").string();
  const Run r = run({"volume", "--partition", "2x2", "--n", "4", "--samples", "50",
                     "--method", "lower", "--out", out});
  REQUIRE(r.code == 0);
  const auto pos = r.err.find("seed: ");
  REQUIRE(pos != std::string::npos);
  const std::uint64_t seed = std::stoull(r.err.substr(pos + 6));
  CHECK(io::parse_json(r.out)["seed"] == seed);
  const io::RunManifest m = io::manifest_from_json(io::read_json_file(out + ".manifest.json"));
  CHECK(m.seed == seed);
  CHECK(run({"replay", "--manifest", out + ".manifest.json"}).code == 0);
}

TEST_CASE("critical-a on the symmetric five-state family") {
  const Run r = run({"critical-a", "--subsets", "0,1,2,3;0,1,2,4"});
  REQUIRE(r.code == 0);
  const io::Json j = io::parse_json(r.out);
  CHECK(j["subsets"].size() == 2);
  CHECK(j["subsets"][0]["critical"].get<double>() == doctest::Approx(0.5).epsilon(0.01));
  CHECK(run({"critical-a", "--subsets", "0,1,2,9"}).code == cli::kExitUsage);
}
