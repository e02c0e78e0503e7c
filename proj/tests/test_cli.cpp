#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "mixtopo_test_cli";

struct Run {
  int code = -1;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Run run(const std::string& args) {
  fs::create_directories(kRoot);
  const fs::path err = kRoot / "stderr.txt";
  const std::string cmd = std::string(MIXTOPO_CLI) + " " + args + " >/dev/null 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kRoot);
  const fs::path p = kRoot / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("successful runs exit 0 and write a manifest") {
  const fs::path out = kRoot / "ok";
  fs::remove_all(out);
  const fs::path cfg = write_config("ok.cfg", "nx = 8\nny = 8\n");
  const Run r = run("spectrum --config " + cfg.string() + " --out " + out.string());
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(j["ok"] == true);
  CHECK(fs::exists(out / "spectrum.csv"));
}

TEST_CASE("command line flags override the config file") {
  const fs::path out = kRoot / "flags";
  fs::remove_all(out);
  const fs::path cfg = write_config("flags.cfg", "temperatures = 1\ntransverse_points = 16\nformat = csv\n");
  CHECK(run("egp-winding --config " + cfg.string() + " --out " + out.string() + " --format json --jobs 2").code == 0);
  CHECK(fs::exists(out / "egp_winding.json"));
  const auto j = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(j["config"]["jobs"] == "2");
}

TEST_CASE("malformed configs exit 2 naming the key") {
  const fs::path cfg = write_config("bad.cfg", "nx = 8\nchain_length = ten\n");
  const Run r = run("egp-winding --config " + cfg.string() + " --out " + (kRoot / "bad").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("chain_length") != std::string::npos);
  CHECK(r.err.find("line 2") != std::string::npos);

  const fs::path unknown = write_config("unknown.cfg", "gama = 3\n");
  const Run u = run("spectrum --config " + unknown.string());
  CHECK(u.code == 2);
  CHECK(u.err.find("gama") != std::string::npos);
}

TEST_CASE("bad command lines exit 2") {
  CHECK(run("").code == 2);
  CHECK(run("plot").code == 2);
  CHECK(run("spectrum --format xml").code == 2);
  CHECK(run("spectrum --jobs 0").code == 2);
  CHECK(run("spectrum --config /nonexistent/mixtopo.cfg").code == 2);
  CHECK(run("--version").code == 0);
}

TEST_CASE("numerical failures exit 3 and still leave a manifest") {
  const fs::path out = kRoot / "gapless";
  fs::remove_all(out);
  const fs::path cfg = write_config("gapless.cfg", "mu = 1.5\nnx = 16\nny = 16\n");
  const Run r = run("spectrum --config " + cfg.string() + " --out " + out.string());
  CHECK(r.code == 3);
  CHECK(!r.err.empty());
  REQUIRE(fs::exists(out / "manifest.json"));
  const auto j = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(j["ok"] == false);
}

TEST_CASE("a missing covariance file exits 2") {
  const fs::path cfg = write_config("tab.cfg", "model = tabulated\nhfict_file = " + (kRoot / "none.txt").string() + "\n");
  const Run r = run("egp-winding --config " + cfg.string() + " --out " + (kRoot / "tab").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("none.txt") != std::string::npos);
}
