#pragma once
// Experiment orchestration: per step and per user, draws task and channel
// context, dispatches to the active policy (with outage fallback), runs the
// retransmission loop, trains the learned agents online, and accumulates
// metrics. Environment randomness is keyed by (seed, purpose, indices), so
// every method replays the identical sequence of prompts, mean SNRs, and
// fading draws.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "semcom/channel.hpp"
#include "semcom/domain.hpp"
#include "semcom/dqn.hpp"
#include "semcom/fidelity.hpp"
#include "semcom/llm_client.hpp"
#include "semcom/policies.hpp"

namespace semcom {

enum class Method : int {
  LlmGate = 0,
  DrlFallback = 1,
  PureDqn = 2,
  ContextBlind = 3,
  Greedy = 4,
  Random = 5,
};

inline constexpr int kNumMethods = 6;

std::string_view method_name(Method m);
std::optional<Method> method_from_name(std::string_view name);
std::vector<Method> all_methods();

struct SimConfig {
  int n_users = 10;
  int n_steps = 250;
  double outage_prob = 0.2;
  std::vector<Method> methods = all_methods();
  double theta = 0.6;
  std::vector<double> thresholds = {0.3, 0.6, 0.9};
  std::uint64_t master_seed = 42;
  bool train = true;
  double latency_tolerance_ms = 250.0;
  double retx_lambda = kDefaultRetxLambda;
  int k_max_cap = kDefaultRetxCap;
  ChannelParams channel;
  UtilityMatrix matrix = UtilityMatrix::defaults();
  ModalitySpecs specs = default_modality_specs();
  DqnConfig dqn;
  bool use_external_llm = false;
  LlmGateConfig llm;
};

struct StepRecord {
  Method method = Method::LlmGate;
  int step = 0;
  int user = 0;
  TaskCategory category = TaskCategory::Scenery;
  double theta = 0.0;
  double snr_db = 0.0;  // decision-time instantaneous SNR
  std::uint32_t action_mask = 0;
  double fidelity = 0.0;
  int attempts = 0;
  double reward = 0.0;
};

struct MethodRunResult {
  std::vector<double> mean_reward_per_step;
  long long total_retransmissions = 0;
  long long failures = 0;  // met_threshold == false count
  double final50_mean_reward = 0.0;
  long long llm_calls = 0;
  long long llm_errors = 0;
};

struct ExperimentResult {
  std::map<Method, MethodRunResult> by_method;
  std::vector<StepRecord> records;  // method-major, then step, then user
};

struct SimHooks {
  // attempt 0 is the decision-time observation; attempts 1..K carry the
  // transmission. Empty -> Rayleigh draws from the keyed fade streams.
  std::function<ChannelDraw(int user, int step, int attempt)> channel_draw;
  // Replaces the gate used by llm_gate and drl_fallback. Empty -> mock gate
  // (or the external client when configured).
  std::shared_ptr<GatePolicy> gate_override;
};

class Simulator {
 public:
  Simulator(SimConfig config, std::vector<PromptRecord> corpus,
            SimHooks hooks = {});

  ExperimentResult run_experiment();

  const SimConfig& config() const { return config_; }
  const std::vector<PromptRecord>& corpus() const { return corpus_; }

 private:
  struct MethodRun;
  SimConfig config_;
  std::vector<PromptRecord> corpus_;
  SimHooks hooks_;
  std::vector<double> mean_snr_db_;  // per user

  ChannelDraw channel_for(int user, int step, int attempt) const;
  void run_method(Method method, std::vector<StepRecord>& records,
                  MethodRunResult& result);
};

// Aggregates per-method series and summary counters from step records.
// Throws std::invalid_argument on an empty record set.
std::map<Method, MethodRunResult> collect_metrics(
    std::span<const StepRecord> records, int n_steps, int n_users);

struct SweepRow {
  Method method = Method::LlmGate;
  double theta = 0.0;
  double mean_retx_per_step = 0.0;  // per step per user
  double failure_rate = 0.0;
};

// Runs the full experiment once per threshold; rows ordered by the config's
// method list, then by threshold.
std::vector<SweepRow> threshold_sweep(const SimConfig& config,
                                      std::span<const double> thresholds,
                                      const std::vector<PromptRecord>& corpus,
                                      const SimHooks& hooks = {});

}  // namespace semcom
