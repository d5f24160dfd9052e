#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("marginopt_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Result cli(const std::string& args) {
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = std::string(MARGINOPT_CLI_PATH) + " " + args + " 2>" + err.string();
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

// drops the header comment, which carries the config hash and so the output dir
std::string csv_body(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line, body;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    body += line + "\n";
  }
  return body;
}

}  // namespace

TEST(Cli, SynthHeavyBall) {
  const Result r = cli("synth --method heavy-ball --mu 1 --ell 9");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["coefficients"]["momentum"].get<double>(), 0.25, 1e-12);
  EXPECT_NEAR(j["coefficients"]["step"].get<double>(), 0.25, 1e-12);
  EXPECT_NEAR(j["rate"].get<double>(), 0.5, 1e-12);
  EXPECT_TRUE(std::regex_match(j["config_hash"].get<std::string>(), std::regex("[0-9a-f]{16}")));
  EXPECT_EQ(j["config"]["command"], "synth");
  EXPECT_EQ(j["config"]["seed"], j["seed"]);
}

TEST(Cli, MarginBoundary) {
  Result r = cli("margin --pole 1.25 --ratio 81");
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_FALSE(j["feasible"].get<bool>());
  EXPECT_NEAR(j["optimal_ratio"].get<double>(), 81.0, 1e-9);

  r = cli("margin --pole 1.25 --ratio 80");
  ASSERT_EQ(r.code, 0) << r.err;
  j = json::parse(r.out);
  EXPECT_TRUE(j["feasible"].get<bool>());
}

TEST(Cli, ValidationErrorExitsOne) {
  const Result r = cli("synth --method heavy-ball --mu 2 --ell 1");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(r.out.empty());
  const json j = json::parse(r.err);
  EXPECT_EQ(j["error"], "InvalidArgument");
  EXPECT_TRUE(j["message"].is_string());

  EXPECT_EQ(cli("synth --method nonsense --mu 1 --ell 9").code, 1);
  EXPECT_EQ(cli("frobnicate").code, 1);
  EXPECT_EQ(cli("").code, 1);
}

TEST(Cli, DivergenceExitsTwo) {
  const Result r = cli("--out " + (scratch() / "div").string() +
                       " run --method gd --alpha 1 --mu 1 --ell 9 --problem quadratic --d 5");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err)["error"], "Divergence");
}

TEST(Cli, RunTraceReproducible) {
  const std::string args =
      " run --method heavy-ball --mu 1 --ell 9 --problem quadratic --d 8";
  const fs::path a = scratch() / "rep_a", b = scratch() / "rep_b";
  const Result ra = cli("--seed 11 --out " + a.string() + args);
  const Result rb = cli("--seed 11 --out " + b.string() + args);
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(rb.code, 0) << rb.err;
  const std::string body = csv_body(a / "trace.csv");
  EXPECT_FALSE(body.empty());
  EXPECT_EQ(body, csv_body(b / "trace.csv"));
  EXPECT_EQ(body.rfind("t,err_norm,residual_norm,grad_evals\n", 0), 0u);

  // same directory twice: the whole file matches, header included
  const std::string first = slurp(a / "trace.csv");
  ASSERT_EQ(cli("--seed 11 --out " + a.string() + args).code, 0);
  EXPECT_EQ(first, slurp(a / "trace.csv"));

  const std::string hash = json::parse(ra.out)["config_hash"];
  EXPECT_NE(first.find("config_hash=" + hash), std::string::npos);
  EXPECT_NE(first.find("seed=11"), std::string::npos);

  const fs::path c = scratch() / "rep_c";
  ASSERT_EQ(cli("--seed 12 --out " + c.string() + args).code, 0);
  EXPECT_NE(body, csv_body(c / "trace.csv"));
}

TEST(Cli, ConfigFile) {
  const fs::path cfg = scratch() / "cfg.json";
  std::ofstream(cfg) << R"({"command":"synth","parameters":{"method":"heavy-ball","mu":1,"ell":9},"seed":4})";
  Result r = cli("--config " + cfg.string() + " synth");
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_NEAR(j["rate"].get<double>(), 0.5, 1e-12);
  EXPECT_EQ(j["seed"], 4);

  // flags override the file
  r = cli("--config " + cfg.string() + " synth --ell 4");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(json::parse(r.out)["rate"].get<double>(), 1.0 / 3.0, 1e-12);

  std::ofstream(cfg) << R"({"command":"synth","parameters":{"mu":1,"ell":9},"colour":1})";
  EXPECT_EQ(cli("--config " + cfg.string() + " synth").code, 1);
  std::ofstream(cfg) << R"({"parameters":{"mu":1,"ell":9,"flavour":2}})";
  EXPECT_EQ(cli("--config " + cfg.string() + " synth").code, 1);
  std::ofstream(cfg) << R"({"command":"margin","parameters":{}})";
  EXPECT_EQ(cli("--config " + cfg.string() + " synth").code, 1);
  EXPECT_EQ(cli("--config " + (scratch() / "missing.json").string() + " synth").code, 1);
}

TEST(Cli, SameConfigSameHash) {
  const std::string h1 = json::parse(cli("synth --method heavy-ball --mu 1 --ell 9").out)["config_hash"];
  const std::string h2 = json::parse(cli("synth --ell 9 --mu 1 --method heavy-ball").out)["config_hash"];
  const std::string h3 = json::parse(cli("synth --method heavy-ball --mu 1 --ell 8").out)["config_hash"];
  EXPECT_EQ(h1, h2);
  EXPECT_NE(h1, h3);
}
