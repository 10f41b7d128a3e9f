#include "semcom/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "semcom/kernels.hpp"

namespace semcom {

namespace fs = std::filesystem;

std::string format_sig6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);  // '\n' endings everywhere
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path.string());
  }
  return out;
}

void write_manifest(const fs::path& path, const SimConfig& config,
                    const std::string& command,
                    const std::vector<std::string>& outputs) {
  std::ofstream out = open_output(path);
  out << "artifact=semcom-sim\n";
  out << "version=" << kArtifactVersion << "\n";
  out << "command=" << command << "\n";
  for (const auto& [key, value] : echo_config(config)) {
    out << key << "=" << value << "\n";
  }
  for (const std::string& name : outputs) {
    out << "output=" << name << "\n";
  }
}

void write_steps_csv(const fs::path& path,
                     const std::vector<StepRecord>& records) {
  std::ofstream out = open_output(path);
  out << "method,step,user,category,theta,snr_db,action_mask,fidelity,"
         "attempts,reward\n";
  for (const StepRecord& r : records) {
    out << method_name(r.method) << ',' << r.step << ',' << r.user << ','
        << category_name(r.category) << ',' << format_sig6(r.theta) << ','
        << format_sig6(r.snr_db) << ',' << r.action_mask << ','
        << format_sig6(r.fidelity) << ',' << r.attempts << ','
        << format_sig6(r.reward) << '\n';
  }
}

void write_rewards_series_csv(const fs::path& path, const SimConfig& config,
                              const ExperimentResult& result) {
  std::ofstream out = open_output(path);
  out << "step";
  for (const Method m : config.methods) out << ',' << method_name(m);
  out << '\n';
  for (int t = 0; t < config.n_steps; ++t) {
    out << t;
    for (const Method m : config.methods) {
      out << ',' << format_sig6(result.by_method.at(m).mean_reward_per_step[t]);
    }
    out << '\n';
  }
}

void write_summary_csv(const fs::path& path, const SimConfig& config,
                       const ExperimentResult& result) {
  std::ofstream out = open_output(path);
  out << "method,mean_reward_final50,total_retransmissions,failures,"
         "llm_calls,llm_errors\n";
  for (const Method m : config.methods) {
    const MethodRunResult& res = result.by_method.at(m);
    out << method_name(m) << ',' << format_sig6(res.final50_mean_reward) << ','
        << res.total_retransmissions << ',' << res.failures << ','
        << res.llm_calls << ',' << res.llm_errors << '\n';
  }
}

}  // namespace

int cmd_run(const SimConfig& config, const std::string& out_dir,
            std::ostream& log) {
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  const auto corpus = generate_prompt_corpus(config.master_seed);
  Simulator sim(config, corpus);
  const ExperimentResult result = sim.run_experiment();

  write_steps_csv(dir / "steps.csv", result.records);
  write_rewards_series_csv(dir / "rewards_series.csv", config, result);
  write_summary_csv(dir / "summary.csv", config, result);
  {
    std::ofstream out = open_output(dir / "corpus.csv");
    export_corpus_csv(corpus, out);
  }
  write_manifest(dir / "run_manifest.txt", config, "run",
                 {"steps.csv", "rewards_series.csv", "summary.csv",
                  "corpus.csv"});

  for (const Method m : config.methods) {
    const MethodRunResult& res = result.by_method.at(m);
    log << method_name(m)
        << ": final50 mean reward = " << format_sig6(res.final50_mean_reward)
        << ", retransmissions = " << res.total_retransmissions
        << ", failures = " << res.failures << "\n";
  }
  log << "wrote " << (dir / "steps.csv").string() << " and companions\n";
  return kExitOk;
}

int cmd_sweep(const SimConfig& config, const std::string& out_dir,
              std::ostream& log) {
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  const auto corpus = generate_prompt_corpus(config.master_seed);
  const auto rows = threshold_sweep(config, config.thresholds, corpus);

  {
    std::ofstream out = open_output(dir / "overhead.csv");
    out << "method,theta,mean_retx_per_step,failure_rate\n";
    for (const SweepRow& row : rows) {
      out << method_name(row.method) << ',' << format_sig6(row.theta) << ','
          << format_sig6(row.mean_retx_per_step) << ','
          << format_sig6(row.failure_rate) << '\n';
    }
  }
  write_manifest(dir / "run_manifest.txt", config, "sweep", {"overhead.csv"});

  log << "wrote " << (dir / "overhead.csv").string() << " (" << rows.size()
      << " rows)\n";
  return kExitOk;
}

namespace {

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

CheckResult check_simd_backends() {
  CheckResult r{"simd_backends", true, kernels::backend_name()};
  const auto& ref = kernels::scalar::table;
  const auto& act = kernels::active();
  RngStream stream(0xC0FFEE);
  constexpr std::size_t in = 9, out = 64;
  std::vector<double> w(in * out), x(in), a(out, 0.0), b(out, 0.0);
  for (double& v : w) v = stream.next_range(-1.0, 1.0);
  for (double& v : x) v = stream.next_range(-1.0, 1.0);
  ref.matvec_out_accum(a.data(), w.data(), x.data(), in, out);
  act.matvec_out_accum(b.data(), w.data(), x.data(), in, out);
  if (a != b) {
    r.ok = false;
    r.detail = "matvec mismatch between scalar and " + std::string(act.name);
  }
  return r;
}

CheckResult check_gradient() {
  CheckResult r{"gradient_check", true, ""};
  RngStream stream(0x5EED);
  for (int rep = 0; rep < 3 && r.ok; ++rep) {
    MlpParams p = MlpParams::glorot(stream);
    StateVector s{};
    for (double& v : s) v = stream.next_unit();
    const int action = 1 + static_cast<int>(stream.next_below(kFullMask));
    const double target = stream.next_unit();

    MlpGrad grad = MlpGrad::zeros();
    backward_accum(p, s.data(), action, target, 1.0, grad);

    // Spot-check a handful of coordinates against central differences.
    const double h = 1e-5;
    double q[MlpDims::out];
    const auto loss_at = [&](void) {
      forward(p, s.data(), q);
      const double e = q[action] - target;
      return e * e;
    };
    const auto pick = [&stream](const std::vector<double>& v) {
      return static_cast<std::size_t>(
          stream.next_below(static_cast<std::uint32_t>(v.size())));
    };
    const auto probe = [&](std::vector<double>& theta,
                           const std::vector<double>& g, std::size_t idx) {
      const double saved = theta[idx];
      theta[idx] = saved + h;
      const double up = loss_at();
      theta[idx] = saved - h;
      const double down = loss_at();
      theta[idx] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double denom = std::max({std::abs(numeric), std::abs(g[idx]), 1e-8});
      return std::abs(numeric - g[idx]) / denom;
    };
    for (int probe_i = 0; probe_i < 16 && r.ok; ++probe_i) {
      double rel = 0.0;
      switch (probe_i % 4) {
        case 0:
          rel = probe(p.w1, grad.w1, pick(p.w1));
          break;
        case 1:
          rel = probe(p.w2, grad.w2, pick(p.w2));
          break;
        case 2:
          rel = probe(p.w3, grad.w3, pick(p.w3));
          break;
        default:
          rel = probe(p.b2, grad.b2, pick(p.b2));
          break;
      }
      if (rel >= 1e-4) {
        r.ok = false;
        r.detail = "relative error " + format_sig6(rel);
      }
    }
  }
  return r;
}

CheckResult check_channel_stats() {
  CheckResult r{"channel_stats", true, ""};
  constexpr int n = 100000;
  RngStream stream(0xFADE);
  std::vector<double> draws(n);
  double sum = 0.0;
  for (double& g : draws) {
    g = sample_power_gain(stream);
    sum += g;
  }
  const double mean = sum / n;
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = 1.0 - std::exp(-draws[i]);
    ks = std::max(ks, std::abs((i + 1.0) / n - cdf));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
  }
  const double rate30 = shannon_rate(1.4e6, 30.0);
  const double rate0 = shannon_rate(1.4e6, 0.0);
  if (mean < 0.99 || mean > 1.01) {
    r.ok = false;
    r.detail = "power-gain mean " + format_sig6(mean);
  } else if (ks >= 0.006) {
    r.ok = false;
    r.detail = "KS distance " + format_sig6(ks);
  } else if (std::abs(rate30 - 1.4e6 * std::log2(1001.0)) > 1.0 ||
             std::abs(rate0 - 1.4e6) > 1e-6) {
    r.ok = false;
    r.detail = "shannon_rate spot values off";
  }
  return r;
}

CheckResult check_encode_decode() {
  CheckResult r{"encode_decode", true, ""};
  for (std::uint32_t mask = 0; mask <= kFullMask; ++mask) {
    const GatingDecision d = decode_action_index(mask);
    if (encode_action_index(d) != mask ||
        d.activated_experts != modalities_in_mask(mask)) {
      r.ok = false;
      r.detail = "round trip failed at mask " + std::to_string(mask);
      return r;
    }
  }
  try {
    decode_action_index(32);
    r.ok = false;
    r.detail = "index 32 was not rejected";
  } catch (const std::out_of_range&) {
  }
  return r;
}

CheckResult check_epsilon_schedule() {
  CheckResult r{"epsilon_schedule", true, ""};
  const EpsilonSchedule sched;
  if (sched.at(0) != 1.0 || std::abs(sched.at(249) - 0.01) > 1e-6) {
    r.ok = false;
    r.detail = "endpoints eps(0)=" + format_sig6(sched.at(0)) +
               " eps(249)=" + format_sig6(sched.at(249));
  }
  return r;
}

CheckResult check_checkpoint(const std::string& checkpoint_path) {
  CheckResult r{"checkpoint_io", true, ""};
  try {
    if (!checkpoint_path.empty()) {
      (void)load_checkpoint_file(checkpoint_path);
      r.detail = checkpoint_path;
      return r;
    }
    RngStream stream(0xCAFE);
    MlpParams p = MlpParams::glorot(stream);
    std::stringstream buffer;
    save_checkpoint(p, buffer);
    const MlpParams q = load_checkpoint(buffer);
    if (!p.bitwise_equal(q)) {
      r.ok = false;
      r.detail = "round trip altered parameters";
    }
  } catch (const CheckpointError& e) {
    r.ok = false;
    r.detail = e.what();
  }
  return r;
}

CheckResult check_determinism_smoke() {
  CheckResult r{"determinism_smoke", true, ""};
  SimConfig config;
  config.n_steps = 10;
  config.n_users = 2;
  config.methods = {Method::LlmGate, Method::Greedy, Method::Random};
  const auto corpus = generate_prompt_corpus(config.master_seed);
  const auto run = [&]() {
    Simulator sim(config, corpus);
    return sim.run_experiment().records;
  };
  const auto a = run();
  const auto b = run();
  if (a.size() != b.size()) {
    r.ok = false;
    r.detail = "record counts differ";
    return r;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].action_mask != b[i].action_mask || a[i].reward != b[i].reward ||
        a[i].snr_db != b[i].snr_db || a[i].fidelity != b[i].fidelity) {
      r.ok = false;
      r.detail = "records diverge at index " + std::to_string(i);
      return r;
    }
  }
  return r;
}

}  // namespace

int cmd_validate(const std::string& checkpoint_path, std::ostream& log) {
  const CheckResult results[] = {
      check_simd_backends(),     check_gradient(),
      check_channel_stats(),     check_encode_decode(),
      check_epsilon_schedule(),  check_checkpoint(checkpoint_path),
      check_determinism_smoke(),
  };
  bool all_ok = true;
  for (const CheckResult& r : results) {
    log << (r.ok ? "[ ok ] " : "[fail] ") << r.name;
    if (!r.detail.empty()) log << ": " << r.detail;
    log << "\n";
    all_ok = all_ok && r.ok;
  }
  log << (all_ok ? "validate: all checks passed\n"
                 : "validate: at least one check failed\n");
  return all_ok ? kExitOk : kExitValidationFailure;
}

}  // namespace semcom
