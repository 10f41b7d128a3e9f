#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <cstdlib>
#include <sstream>
#include <unistd.h>

#include "semcom/cli.hpp"
#include "semcom/config.hpp"
#include "semcom/dqn.hpp"

using namespace semcom;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() /
                       ("semcom_test_" + std::to_string(::getpid()) + "_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (const char ch : text) n += ch == '\n';
  return n;
}

SimConfig tiny_run_config() {
  SimConfig config = load_config(std::nullopt, {});
  config.n_users = 2;
  config.n_steps = 10;
  config.methods = {Method::Greedy, Method::Random};
  config.master_seed = 3;
  return config;
}

}  // namespace

TEST_CASE("defaults resolve when no file is given") {
  const SimConfig c = load_config(std::nullopt, {});
  CHECK(c.n_users == 10);
  CHECK(c.n_steps == 250);
  CHECK(c.channel.bandwidth_hz == 1.4e6);
  CHECK(c.outage_prob == 0.2);
  CHECK(c.theta == 0.6);
  CHECK(c.methods.size() == 6);
  CHECK(c.thresholds == std::vector<double>{0.3, 0.6, 0.9});
  CHECK(c.channel.slot_ms == 50.0);
  CHECK(c.dqn.buffer_capacity == 2000);
  CHECK(c.dqn.batch_size == 32);
  CHECK(c.dqn.gamma == 0.995);
  CHECK_FALSE(c.use_external_llm);
}

TEST_CASE("an empty config file also resolves to the defaults") {
  const fs::path dir = fresh_dir("emptycfg");
  const fs::path file = dir / "empty.cfg";
  std::ofstream(file) << "";
  const SimConfig c = load_config(file.string(), {});
  CHECK(c.n_users == 10);
  CHECK(c.n_steps == 250);
  CHECK(c.channel.bandwidth_hz == 1.4e6);
  CHECK(c.outage_prob == 0.2);
  fs::remove_all(dir);
}

TEST_CASE("file values and override precedence") {
  const fs::path dir = fresh_dir("cfg");
  const fs::path file = dir / "run.cfg";
  std::ofstream(file) << "# comment line\n"
                      << "sim.n_steps = 100\n"
                      << "channel.slot_ms=25\n"
                      << "sim.methods=greedy,random\n";
  const SimConfig c =
      load_config(file.string(), {{"sim.n_steps", "250"}});
  CHECK(c.n_steps == 250);  // command line beats the file
  CHECK(c.channel.slot_ms == 25.0);
  CHECK(c.methods == std::vector<Method>{Method::Greedy, Method::Random});
  fs::remove_all(dir);
}

TEST_CASE("config errors name the offending key") {
  CHECK_THROWS_WITH_AS(load_config(std::nullopt, {{"sim.outage_prob", "1.5"}}),
                       doctest::Contains("sim.outage_prob"), ConfigError);
  CHECK_THROWS_WITH_AS(load_config(std::nullopt, {{"sim.bogus_key", "1"}}),
                       doctest::Contains("sim.bogus_key"), ConfigError);
  CHECK_THROWS_WITH_AS(load_config(std::nullopt, {{"sim.n_steps", "abc"}}),
                       doctest::Contains("sim.n_steps"), ConfigError);
  CHECK_THROWS_WITH_AS(
      load_config(std::nullopt, {{"sim.methods", "greedy,teleport"}}),
      doctest::Contains("sim.methods"), ConfigError);
  CHECK_THROWS_WITH_AS(
      load_config(std::nullopt, {{"fidelity.payload_bytes", "1,2,3"}}),
      doctest::Contains("fidelity.payload_bytes"), ConfigError);
  CHECK_THROWS_AS(load_config(std::string("/no/such/file.cfg"), {}),
                  ConfigError);
}

TEST_CASE("validation rejects out-of-range combinations") {
  CHECK_THROWS_WITH_AS(load_config(std::nullopt, {{"sim.theta", "0"}}),
                       doctest::Contains("sim.theta"), ConfigError);
  CHECK_THROWS_WITH_AS(load_config(std::nullopt, {{"fidelity.alpha", "1.5"}}),
                       doctest::Contains("fidelity.alpha"), ConfigError);
  CHECK_THROWS_WITH_AS(
      load_config(std::nullopt, {{"dqn.batch_size", "4000"}}),
      doctest::Contains("dqn.batch_size"), ConfigError);
  CHECK_THROWS_WITH_AS(
      load_config(std::nullopt, {{"sim.latency_tolerance_ms", "10"}}),
      doctest::Contains("sim.latency_tolerance_ms"), ConfigError);
  // Text payload is pinned to the embedding width.
  CHECK_THROWS_WITH_AS(
      load_config(std::nullopt,
                  {{"fidelity.payload_bytes", "25000,2000,40000,60000,999"}}),
      doctest::Contains("fidelity.payload_bytes"), ConfigError);
}

TEST_CASE("echoed config applies back to an identical configuration") {
  SimConfig original = load_config(
      std::nullopt, {{"sim.outage_prob", "0.35"},
                     {"sim.methods", "llm_gate,greedy"},
                     {"fidelity.alpha", "0.55"},
                     {"dqn.learning_rate", "0.002"},
                     {"llm.mode", "external"}});
  SimConfig replayed;
  for (const auto& [key, value] : echo_config(original)) {
    apply_config_kv(replayed, key, value);
  }
  CHECK(replayed.outage_prob == original.outage_prob);
  CHECK(replayed.methods == original.methods);
  CHECK(replayed.matrix.alpha == original.matrix.alpha);
  CHECK(replayed.dqn.learning_rate == original.dqn.learning_rate);
  CHECK(replayed.use_external_llm == original.use_external_llm);
  CHECK(echo_config(replayed) == echo_config(original));
}

TEST_CASE("six significant digit rendering") {
  CHECK(format_sig6(0.25) == "0.25");
  CHECK(format_sig6(1.0 / 3.0) == "0.333333");
  CHECK(format_sig6(0.0) == "0");
  CHECK(format_sig6(-13.0) == "-13");
  CHECK(format_sig6(0.123456789) == "0.123457");
}

TEST_CASE("cmd_run writes the documented files") {
  const fs::path dir = fresh_dir("run");
  const SimConfig config = tiny_run_config();
  std::ostringstream log;
  CHECK(cmd_run(config, dir.string(), log) == kExitOk);

  const std::string steps = slurp(dir / "steps.csv");
  const std::string series = slurp(dir / "rewards_series.csv");
  const std::string summary = slurp(dir / "summary.csv");
  const std::string corpus = slurp(dir / "corpus.csv");
  const std::string manifest = slurp(dir / "run_manifest.txt");

  CHECK(steps.rfind("method,step,user,category,theta,snr_db,action_mask,"
                    "fidelity,attempts,reward\n",
                    0) == 0);
  CHECK(line_count(steps) == 1 + 2 * 10 * 2);  // header + methods*steps*users
  CHECK(series.rfind("step,greedy,random\n", 0) == 0);
  CHECK(line_count(series) == 1 + 10);
  CHECK(line_count(summary) == 1 + 2);
  CHECK(line_count(corpus) == 100);
  CHECK(manifest.find("command=run") != std::string::npos);
  CHECK(manifest.find("sim.master_seed=3") != std::string::npos);
  CHECK(manifest.find("output=steps.csv") != std::string::npos);
  CHECK(manifest.find('\r') == std::string::npos);  // '\n' endings only

  fs::remove_all(dir);
}

TEST_CASE("cmd_run output is byte-identical across invocations") {
  const fs::path dir_a = fresh_dir("runa");
  const fs::path dir_b = fresh_dir("runb");
  const SimConfig config = tiny_run_config();
  std::ostringstream log;
  REQUIRE(cmd_run(config, dir_a.string(), log) == kExitOk);
  REQUIRE(cmd_run(config, dir_b.string(), log) == kExitOk);
  for (const char* name :
       {"steps.csv", "rewards_series.csv", "summary.csv", "corpus.csv",
        "run_manifest.txt"}) {
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("cmd_sweep emits one row per method and threshold") {
  const fs::path dir = fresh_dir("sweep");
  SimConfig config = load_config(std::nullopt, {});
  config.n_users = 2;
  config.n_steps = 8;
  config.master_seed = 4;
  std::ostringstream log;
  CHECK(cmd_sweep(config, dir.string(), log) == kExitOk);

  const std::string overhead = slurp(dir / "overhead.csv");
  CHECK(overhead.rfind("method,theta,mean_retx_per_step,failure_rate\n", 0) ==
        0);
  CHECK(line_count(overhead) == 1 + 6 * 3);
  fs::remove_all(dir);
}

TEST_CASE("cmd_validate passes on a healthy build and lists each check once") {
  std::ostringstream log;
  CHECK(cmd_validate("", log) == kExitOk);
  const std::string report = log.str();
  for (const char* name :
       {"simd_backends", "gradient_check", "channel_stats", "encode_decode",
        "epsilon_schedule", "checkpoint_io", "determinism_smoke"}) {
    std::size_t count = 0;
    for (std::size_t pos = report.find(name); pos != std::string::npos;
         pos = report.find(name, pos + 1)) {
      ++count;
    }
    CHECK(count == 1);
  }
  CHECK(report.find("[fail]") == std::string::npos);
}

TEST_CASE("the binary maps error classes to distinct exit codes") {
  const fs::path dir = fresh_dir("exitcodes");
  const std::string bin(SEMCOM_BIN);
  const auto run = [&](const std::string& args) {
    const int rc = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
  };
  CHECK(run("validate") == kExitOk);
  CHECK(run("run --out " + (dir / "ok").string() +
            " --set sim.n_steps=2 --set sim.n_users=1 --set "
            "sim.methods=greedy") == kExitOk);
  CHECK(run("run --set sim.outage_prob=1.5") == kExitConfigError);
  CHECK(run("run --config /no/such/file.cfg") == kExitConfigError);
  CHECK(run("run --no-such-flag") == kExitConfigError);
  // Output directory that cannot be created.
  CHECK(run("run --out /proc/semcom_nope --set sim.n_steps=1 --set "
            "sim.n_users=1 --set sim.methods=greedy") == kExitRuntimeError);
  // A corrupt checkpoint makes validate report a failure.
  const fs::path ckpt = dir / "bad.ckpt";
  std::ofstream(ckpt, std::ios::binary) << "XXXX not a checkpoint";
  CHECK(run("validate --checkpoint " + ckpt.string()) ==
        kExitValidationFailure);
  fs::remove_all(dir);
}

TEST_CASE("cmd_validate flags a corrupted checkpoint") {
  const fs::path dir = fresh_dir("ckpt");
  const fs::path file = dir / "net.ckpt";
  RngStream stream(6);
  save_checkpoint_file(MlpParams::glorot(stream), file.string());

  {
    std::ostringstream log;
    CHECK(cmd_validate(file.string(), log) == kExitOk);
  }

  std::string bytes = slurp(file);
  bytes[0] = 'X';  // break the magic
  std::ofstream(file, std::ios::binary) << bytes;
  std::ostringstream log;
  CHECK(cmd_validate(file.string(), log) == kExitValidationFailure);
  CHECK(log.str().find("[fail] checkpoint_io") != std::string::npos);

  fs::remove_all(dir);
}
