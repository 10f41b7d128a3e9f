#include "semcom/simulator.hpp"

#include <algorithm>
#include <stdexcept>

namespace semcom {

namespace {

constexpr std::string_view kMethodNames[kNumMethods] = {
    "llm_gate", "drl_fallback", "pure_dqn", "context_blind", "greedy",
    "random"};

bool is_learned(Method m) {
  return m == Method::DrlFallback || m == Method::PureDqn ||
         m == Method::ContextBlind;
}

}  // namespace

std::string_view method_name(Method m) {
  return kMethodNames[static_cast<int>(m)];
}

std::optional<Method> method_from_name(std::string_view name) {
  for (int i = 0; i < kNumMethods; ++i) {
    if (kMethodNames[i] == name) return static_cast<Method>(i);
  }
  return std::nullopt;
}

std::vector<Method> all_methods() {
  std::vector<Method> out;
  for (int i = 0; i < kNumMethods; ++i) out.push_back(static_cast<Method>(i));
  return out;
}

Simulator::Simulator(SimConfig config, std::vector<PromptRecord> corpus,
                     SimHooks hooks)
    : config_(std::move(config)),
      corpus_(std::move(corpus)),
      hooks_(std::move(hooks)) {
  if (corpus_.empty()) {
    throw std::invalid_argument("simulator requires a nonempty corpus");
  }
  mean_snr_db_.resize(config_.n_users);
  for (int u = 0; u < config_.n_users; ++u) {
    RngStream s = make_stream(config_.master_seed, StreamPurpose::MeanSnr,
                              static_cast<std::uint64_t>(u));
    mean_snr_db_[u] = s.next_range(config_.channel.mean_snr_low_db,
                                   config_.channel.mean_snr_high_db);
  }
}

ChannelDraw Simulator::channel_for(int user, int step, int attempt) const {
  if (hooks_.channel_draw) return hooks_.channel_draw(user, step, attempt);
  RngStream s = make_stream(config_.master_seed, StreamPurpose::Fade,
                            static_cast<std::uint64_t>(user),
                            static_cast<std::uint64_t>(step),
                            static_cast<std::uint64_t>(attempt));
  return draw_channel(config_.channel, mean_snr_db_[user], s);
}

struct Simulator::MethodRun {
  // Decision made at the previous step, waiting for the next state.
  struct Pending {
    StateVector state{};
    int action = 0;
    double reward = 0.0;
  };

  std::unique_ptr<DqnAgent> agent;
  std::shared_ptr<GatePolicy> gate;
  std::vector<std::optional<Pending>> pending;
};

void Simulator::run_method(Method method, std::vector<StepRecord>& records,
                           MethodRunResult& result) {
  const SimConfig& cfg = config_;
  const std::uint64_t method_id = static_cast<std::uint64_t>(method);

  MethodRun run;
  run.pending.resize(cfg.n_users);
  if (is_learned(method)) {
    RngStream init = make_stream(cfg.master_seed, StreamPurpose::NetInit,
                                 method_id);
    run.agent = std::make_unique<DqnAgent>(cfg.dqn, init);
  }
  const bool uses_gate =
      method == Method::LlmGate || method == Method::DrlFallback;
  if (uses_gate) {
    if (hooks_.gate_override) {
      run.gate = hooks_.gate_override;
    } else if (cfg.use_external_llm) {
      run.gate = std::make_shared<ExternalLlmGate>(cfg.llm, cfg.matrix,
                                                   cfg.specs, cfg.channel.slot_ms);
    } else {
      run.gate = std::make_shared<MockLlmGate>(cfg.matrix, cfg.specs,
                                               cfg.channel.slot_ms);
    }
  }
  GreedyPolicy greedy(cfg.matrix);
  RandomPolicy random_policy;
  MockLlmGate gate_fallback(cfg.matrix, cfg.specs, cfg.channel.slot_ms);

  const auto push_and_train = [&](int user, int step,
                                  const StateVector& next_state) {
    if (!run.agent || !run.pending[user]) return;
    const auto& p = *run.pending[user];
    Experience exp;
    exp.state = p.state;
    exp.action = p.action;
    exp.reward = p.reward;
    exp.next_state = next_state;
    exp.done = true;  // each step is an independent episode
    run.agent->observe(exp);
    run.pending[user].reset();
    if (cfg.train) {
      RngStream sample = make_stream(cfg.master_seed, StreamPurpose::Replay,
                                     method_id,
                                     static_cast<std::uint64_t>(step),
                                     static_cast<std::uint64_t>(user));
      run.agent->maybe_train(sample);
    }
  };

  for (int step = 0; step < cfg.n_steps; ++step) {
    const double eps = cfg.dqn.schedule.at(step);
    for (int user = 0; user < cfg.n_users; ++user) {
      RngStream prompt_stream =
          make_stream(cfg.master_seed, StreamPurpose::Prompt,
                      static_cast<std::uint64_t>(step),
                      static_cast<std::uint64_t>(user));
      const PromptRecord& prompt =
          corpus_[prompt_stream.next_below(static_cast<std::uint32_t>(corpus_.size()))];
      RngStream prio_stream =
          make_stream(cfg.master_seed, StreamPurpose::Priority,
                      static_cast<std::uint64_t>(step),
                      static_cast<std::uint64_t>(user));
      TaskContext task;
      task.category = prompt.category;
      task.priority = 1 + static_cast<int>(prio_stream.next_below(3));
      task.latency_tolerance_ms = cfg.latency_tolerance_ms;
      task.bandwidth_requirement_bps = 0.0;
      task.fidelity_threshold = cfg.theta;

      const ChannelDraw observed = channel_for(user, step, 0);
      CommContext comm;
      comm.bandwidth_hz = cfg.channel.bandwidth_hz;
      comm.mean_snr_db = mean_snr_db_[user];
      comm.instantaneous_snr_db = observed.instantaneous_snr_db;
      comm.power_gain = observed.power_gain;

      const StateVector state =
          build_state_vector(task, comm, method == Method::ContextBlind);
      push_and_train(user, step, state);

      RngStream explore = make_stream(cfg.master_seed, StreamPurpose::Explore,
                                      method_id,
                                      static_cast<std::uint64_t>(step),
                                      static_cast<std::uint64_t>(user));
      GatingDecision decision;
      switch (method) {
        case Method::LlmGate: {
          result.llm_calls += 1;
          try {
            decision = run.gate->decide(task, comm, explore);
          } catch (const GateUnavailable&) {
            result.llm_errors += 1;
            decision = gate_fallback.decide(task, comm, explore);
          }
          break;
        }
        case Method::DrlFallback: {
          RngStream outage = make_stream(cfg.master_seed, StreamPurpose::Outage,
                                         method_id,
                                         static_cast<std::uint64_t>(step),
                                         static_cast<std::uint64_t>(user));
          const bool llm_out = outage.next_unit() < cfg.outage_prob;
          bool decided = false;
          if (!llm_out) {
            result.llm_calls += 1;
            try {
              decision = run.gate->decide(task, comm, explore);
              decided = true;
            } catch (const GateUnavailable&) {
              result.llm_errors += 1;
            }
          }
          if (!decided) {
            decision = decode_action_index(
                static_cast<std::uint32_t>(run.agent->act(state, eps, explore)));
          }
          break;
        }
        case Method::PureDqn:
        case Method::ContextBlind:
          decision = decode_action_index(
              static_cast<std::uint32_t>(run.agent->act(state, eps, explore)));
          break;
        case Method::Greedy:
          decision = greedy.decide(task, comm, explore);
          break;
        case Method::Random:
          decision = random_policy.decide(task, comm, explore);
          break;
      }

      const TransmissionOutcome outcome = transmit_with_retransmission(
          task, decision, cfg.specs, cfg.matrix, cfg.channel.slot_ms,
          cfg.k_max_cap, [&](int attempt) {
            return channel_for(user, step, attempt).byte_budget;
          });
      const double r = reward(outcome, cfg.retx_lambda);

      if (run.agent) {
        run.pending[user] = MethodRun::Pending{
            state, static_cast<int>(encode_action_index(decision)), r};
      }

      StepRecord rec;
      rec.method = method;
      rec.step = step;
      rec.user = user;
      rec.category = task.category;
      rec.theta = cfg.theta;
      rec.snr_db = comm.instantaneous_snr_db;
      rec.action_mask = decision.selection_mask;
      rec.fidelity = outcome.fidelity;
      rec.attempts = outcome.attempts;
      rec.reward = r;
      records.push_back(rec);
    }
  }

  // Final-step decisions still enter the pool; the terminal flag makes the
  // zero next-state inert.
  for (int user = 0; user < cfg.n_users; ++user) {
    push_and_train(user, cfg.n_steps, StateVector{});
  }
}

ExperimentResult Simulator::run_experiment() {
  ExperimentResult result;
  for (const Method method : config_.methods) {
    MethodRunResult partial;
    run_method(method, result.records, partial);
    result.by_method[method] = partial;
  }
  const auto metrics =
      collect_metrics(result.records, config_.n_steps, config_.n_users);
  for (auto& [method, res] : result.by_method) {
    const MethodRunResult& m = metrics.at(method);
    res.mean_reward_per_step = m.mean_reward_per_step;
    res.total_retransmissions = m.total_retransmissions;
    res.failures = m.failures;
    res.final50_mean_reward = m.final50_mean_reward;
  }
  return result;
}

std::map<Method, MethodRunResult> collect_metrics(
    std::span<const StepRecord> records, int n_steps, int n_users) {
  if (records.empty()) {
    throw std::invalid_argument("collect_metrics: empty record set");
  }
  std::map<Method, MethodRunResult> out;
  for (const StepRecord& rec : records) {
    MethodRunResult& res = out[rec.method];
    if (res.mean_reward_per_step.empty()) {
      res.mean_reward_per_step.assign(n_steps, 0.0);
    }
    res.mean_reward_per_step[rec.step] += rec.reward;
    res.total_retransmissions += rec.attempts - 1;
    const bool met = rec.fidelity >= rec.theta;
    if (!met) res.failures += 1;
  }
  for (auto& [method, res] : out) {
    for (double& x : res.mean_reward_per_step) x /= n_users;
    const int window = std::min(50, n_steps);
    double sum = 0.0;
    for (int t = n_steps - window; t < n_steps; ++t) {
      sum += res.mean_reward_per_step[t];
    }
    res.final50_mean_reward = sum / window;
  }
  return out;
}

std::vector<SweepRow> threshold_sweep(const SimConfig& config,
                                      std::span<const double> thresholds,
                                      const std::vector<PromptRecord>& corpus,
                                      const SimHooks& hooks) {
  if (thresholds.empty()) {
    throw std::invalid_argument("threshold_sweep: no thresholds given");
  }
  std::vector<SweepRow> rows;
  const double denom =
      static_cast<double>(config.n_steps) * static_cast<double>(config.n_users);
  for (const Method method : config.methods) {
    for (const double theta : thresholds) {
      SimConfig cfg = config;
      cfg.theta = theta;
      cfg.methods = {method};
      Simulator sim(cfg, corpus, hooks);
      const ExperimentResult res = sim.run_experiment();
      const MethodRunResult& m = res.by_method.at(method);
      SweepRow row;
      row.method = method;
      row.theta = theta;
      row.mean_retx_per_step =
          static_cast<double>(m.total_retransmissions) / denom;
      row.failure_rate = static_cast<double>(m.failures) / denom;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace semcom
