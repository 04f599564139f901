#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "randex/extractor.hpp"
#include <json.hpp>
#include <filesystem>

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(RANDEX_CLI_PATH) + " " + args + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("gfunc smoke run emits a valid schema") {
  REQUIRE(run_cli("gfunc --grid 2 --out /tmp/randex_cli_gfunc.csv") == 0);
  auto lines = read_lines("/tmp/randex_cli_gfunc.csv");
  REQUIRE(lines.size() == 5);
  REQUIRE(lines[0] == "omega,theta,value,feasible");
  // (0.5, 0.5), (0.5, 1), (1, 0.5) sit in the zero region; (1,1) is infeasible
  CHECK(lines[1].rfind("0.5,0.5,0,", 0) == 0);
  CHECK(lines[4].find("inf,0") != std::string::npos);
}

TEST_CASE("simulate is deterministic and aborts with the right exit code") {
  std::string base =
      "simulate --n 5000 --gamma 0.1 --device qubit --theta 0.9 "
      "--theta-exp 0.9 --omega-exp 0.8 --delta-theta 0.15 --delta-omega 0.1 --seed 42";
  REQUIRE(run_cli(base + " --out /tmp/randex_cli_sim_a.csv") == 0);
  REQUIRE(run_cli(base + " --out /tmp/randex_cli_sim_b.csv") == 0);
  CHECK(slurp("/tmp/randex_cli_sim_a.csv") == slurp("/tmp/randex_cli_sim_b.csv"));

  auto lines = read_lines("/tmp/randex_cli_sim_a.csv");
  REQUIRE(lines[0] == "i,t,x,y");
  REQUIRE(lines.size() == 5001);

  // classical device cannot reach a qubit score of 0.8: Step-8 abort, exit 2
  int rc = run_cli(
      "simulate --n 5000 --gamma 0.1 --device classical --theta 0.9 "
      "--theta-exp 0.9 --omega-exp 0.8 --delta-theta 0.15 --delta-omega 0.05 --seed 7 "
      "--out /tmp/randex_cli_sim_abort.csv");
  CHECK(rc == 2);
  auto summary = slurp("/tmp/randex_cli_sim_abort.csv.summary.json");
  CHECK(summary.find("\"aborted\": true") != std::string::npos);
  CHECK(summary.find("score below threshold") != std::string::npos);
}

TEST_CASE("extract produces bits from a transcript") {
  REQUIRE(run_cli(
              "simulate --n 4000 --gamma 0.1 --device qubit --theta 0.9 --theta-exp 0.9 "
              "--omega-exp 0.8 --delta-theta 0.15 --delta-omega 0.1 --seed 9 "
              "--out /tmp/randex_cli_ext_transcript.csv") == 0);
  REQUIRE(run_cli(
              "extract --transcript /tmp/randex_cli_ext_transcript.csv --protocol recycling "
              "--h-min 500 --eps-ext 1e-6 --seed 11 --out /tmp/randex_cli_ext_out.bin") == 0);
  auto out = randex::read_bits("/tmp/randex_cli_ext_out.bin");
  // h_min 500 minus the leftover-hash loss
  REQUIRE(out.size() == 460);
  bool any = false;
  for (auto b : out.bits) any |= (b != 0);
  CHECK(any);

  // same seed, same artifacts
  REQUIRE(run_cli(
              "extract --transcript /tmp/randex_cli_ext_transcript.csv --protocol recycling "
              "--h-min 500 --eps-ext 1e-6 --seed 11 --out /tmp/randex_cli_ext_out2.bin") == 0);
  CHECK(slurp("/tmp/randex_cli_ext_out.bin") == slurp("/tmp/randex_cli_ext_out2.bin"));
}

TEST_CASE("configuration errors exit with code 3") {
  CHECK(run_cli("simulate --n 0 --out /tmp/randex_cli_bad.csv") == 3);
  CHECK(run_cli("extract --out /tmp/randex_cli_bad.bin") == 3);
  CHECK(run_cli("gfunc --mode bogus --grid 2 --out /tmp/randex_cli_bad.csv") == 3);
  CHECK(run_cli("nonsense") == 3);
}

TEST_CASE("config file provides defaults and flags override") {
  {
    std::ofstream cfg("/tmp/randex_cli_cfg.json");
    cfg << "{\"n\": 3000, \"gamma\": 0.1, \"theta\": 0.9, \"device\": \"qubit\", "
           "\"delta_theta\": 0.2, \"delta_omega\": 0.1, \"seed\": 5, "
           "\"out\": \"/tmp/randex_cli_cfg_out.csv\"}\n";
  }
  REQUIRE(run_cli("simulate --config /tmp/randex_cli_cfg.json") == 0);
  auto lines = read_lines("/tmp/randex_cli_cfg_out.csv");
  REQUIRE(lines.size() == 3001);

  // flag overrides the config's n
  REQUIRE(run_cli("simulate --config /tmp/randex_cli_cfg.json --n 1000") == 0);
  auto lines2 = read_lines("/tmp/randex_cli_cfg_out.csv");
  REQUIRE(lines2.size() == 1001);
}

TEST_CASE("rates and finite emit valid schemas") {
  std::filesystem::remove_all("/tmp/randex_cli_cache");  // no stale envelopes
  REQUIRE(run_cli("rates --grid 8 --p0 0.5 --thetas 0.9 --omega-steps 11 --protocols r1,r2_expansion "
                  "--cache-dir /tmp/randex_cli_cache --out /tmp/randex_cli_rates.csv") == 0);
  auto lines = read_lines("/tmp/randex_cli_rates.csv");
  REQUIRE(lines[0] == "omega,theta,protocol,rate");
  auto surf = read_lines("/tmp/randex_cli_rates.csv.surface.csv");
  REQUIRE(surf[0] == "omega,theta,value");
  REQUIRE(surf.size() == 1 + 8 * 8);
  CHECK(nlohmann::json::parse(slurp("/tmp/randex_cli_rates.csv.meta.json")).contains("envelope"));
  REQUIRE(lines.size() == 1 + 2 * 11);
  CHECK(lines[1].rfind("0.5,0.9,r1,", 0) == 0);

  REQUIRE(run_cli("finite --grid 8 --p0 0.5 --gamma 0.1 --theta 0.9 --omega 0.8 "
                  "--eps-c 1e-3 --eps-s 1e-6 --eps-ext 1e-6 --n-min 1e5 --n-max 1e8 --n-points 4 "
                  "--cache-dir /tmp/randex_cli_cache --out /tmp/randex_cli_finite.csv") == 0);
  auto fl = read_lines("/tmp/randex_cli_finite.csv");
  REQUIRE(fl[0] == "n,gamma,net_rate");
  REQUIRE(fl.size() == 1 + 4 + 1);  // header, points, crossover summary row
  CHECK(fl.back().rfind("# crossover_n=", 0) == 0);
  auto detail = read_lines("/tmp/randex_cli_finite.csv.detail.csv");
  REQUIRE(detail[0] == "n,rate_net,rate_asymptotic,delta_omega,delta_theta,eps_c,eps_s");
}

TEST_CASE("full pipeline: simulate, tradeoff, extract") {
  // honest device, comfortably past the finite-size crossover
  REQUIRE(run_cli("simulate --n 1000000 --gamma 0.1 --device qubit --theta 0.9 "
                  "--theta-exp 0.9 --omega-exp 0.8 --delta-theta 0.02 --delta-omega 0.01 "
                  "--seed 2718 --out /tmp/randex_pipe_transcript.csv") == 0);

  REQUIRE(run_cli("tradeoff --grid 20 --p0 0.5 --n 1000000 --gamma 0.1 --theta 0.9 --omega 0.8 "
                  "--delta-theta 0.02 --delta-omega 0.01 --eps-s 1e-6 --eps-ext 1e-6 "
                  "--cache-dir /tmp/randex_cli_cache --out /tmp/randex_pipe_tradeoff.json") == 0);
  auto report = nlohmann::json::parse(slurp("/tmp/randex_pipe_tradeoff.json"));
  double h_min = report.at("h_min").get<double>();
  REQUIRE(h_min > 1000.0);  // certifiable entropy at this scale
  REQUIRE(report.at("extractable_bits").get<long>() > 0);

  REQUIRE(run_cli("extract --transcript /tmp/randex_pipe_transcript.csv --protocol recycling "
                  "--m 256 --seed 99 --out /tmp/randex_pipe_out.bin") == 0);
  auto bits = randex::read_bits("/tmp/randex_pipe_out.bin");
  REQUIRE(bits.size() == 256);
  int ones = 0;
  for (auto b : bits.bits) ones += b;
  CHECK(ones > 0);
  CHECK(ones < 256);

  // tradeoff again: the cached envelope must reproduce the same certificate
  REQUIRE(run_cli("tradeoff --grid 20 --p0 0.5 --n 1000000 --gamma 0.1 --theta 0.9 --omega 0.8 "
                  "--delta-theta 0.02 --delta-omega 0.01 --eps-s 1e-6 --eps-ext 1e-6 "
                  "--cache-dir /tmp/randex_cli_cache --out /tmp/randex_pipe_tradeoff2.json") == 0);
  auto report2 = nlohmann::json::parse(slurp("/tmp/randex_pipe_tradeoff2.json"));
  CHECK(report2.at("h_min").get<double>() == Catch::Approx(h_min).margin(1e-6));
}
