#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "semcom/simulator.hpp"

using namespace semcom;

namespace {

std::vector<PromptRecord> tiny_corpus(TaskCategory category, int n = 4) {
  std::vector<PromptRecord> corpus;
  for (int i = 0; i < n; ++i) {
    PromptRecord rec;
    rec.prompt_id = i;
    rec.category = category;
    rec.text = "prompt " + std::to_string(i);
    corpus.push_back(rec);
  }
  return corpus;
}

ChannelDraw pinned_draw(double snr_db) {
  ChannelDraw d;
  d.power_gain = 1.0;
  d.instantaneous_snr_db = snr_db;
  d.rate_bps = shannon_rate(1.4e6, snr_db);
  d.byte_budget = slot_byte_budget(d.rate_bps, 50.0);
  return d;
}

SimConfig small_config() {
  SimConfig config;
  config.n_users = 2;
  config.n_steps = 3;
  config.master_seed = 11;
  return config;
}

struct ThrowingGate final : GatePolicy {
  GatingDecision decide(const TaskContext&, const CommContext&,
                        RngStream&) override {
    throw GateUnavailable("gate is down");
  }
  std::string_view name() const override { return "throwing"; }
};

}  // namespace

TEST_CASE("record counting and field sanity") {
  SimConfig config = small_config();
  Simulator sim(config, generate_prompt_corpus(config.master_seed));
  const ExperimentResult result = sim.run_experiment();

  std::map<Method, int> counts;
  for (const StepRecord& rec : result.records) {
    counts[rec.method] += 1;
    CHECK(rec.reward >= 0.0);
    CHECK(rec.reward <= 1.0);
    CHECK(rec.action_mask >= 1);
    CHECK(rec.action_mask <= 31);
    CHECK(rec.attempts >= 1);
    CHECK(rec.attempts <= 5);
    CHECK(rec.theta == config.theta);
  }
  CHECK(counts.size() == 6);
  for (const auto& [method, count] : counts) CHECK(count == 6);

  for (const auto& [method, res] : result.by_method) {
    CHECK(res.mean_reward_per_step.size() ==
          static_cast<std::size_t>(config.n_steps));
    for (const double r : res.mean_reward_per_step) {
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
  }
}

TEST_CASE("two runs with one seed are identical") {
  SimConfig config = small_config();
  config.n_steps = 12;
  config.n_users = 3;
  const auto corpus = generate_prompt_corpus(config.master_seed);
  const auto run = [&]() {
    Simulator sim(config, corpus);
    return sim.run_experiment();
  };
  const ExperimentResult a = run();
  const ExperimentResult b = run();
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].action_mask == b.records[i].action_mask);
    CHECK(a.records[i].fidelity == b.records[i].fidelity);
    CHECK(a.records[i].reward == b.records[i].reward);
    CHECK(a.records[i].snr_db == b.records[i].snr_db);
    CHECK(a.records[i].attempts == b.records[i].attempts);
  }
}

TEST_CASE("environment randomness is method-invariant") {
  SimConfig config = small_config();
  config.n_steps = 20;
  config.n_users = 4;
  config.methods = {Method::Greedy, Method::Random};
  Simulator sim(config, generate_prompt_corpus(1));
  const ExperimentResult result = sim.run_experiment();

  const int per_method = config.n_steps * config.n_users;
  REQUIRE(result.records.size() == static_cast<std::size_t>(2 * per_method));
  for (int i = 0; i < per_method; ++i) {
    const StepRecord& g = result.records[i];
    const StepRecord& r = result.records[per_method + i];
    CHECK(g.method == Method::Greedy);
    CHECK(r.method == Method::Random);
    CHECK(g.step == r.step);
    CHECK(g.user == r.user);
    CHECK(g.category == r.category);   // same prompt draw
    CHECK(g.snr_db == r.snr_db);       // same decision-time fade
  }
}

TEST_CASE("method isolation: the run of one method does not depend on which "
          "others run") {
  SimConfig config = small_config();
  config.n_steps = 15;
  config.n_users = 2;
  const auto corpus = generate_prompt_corpus(3);

  config.methods = {Method::DrlFallback};
  Simulator solo(config, corpus);
  const auto solo_records = solo.run_experiment().records;

  config.methods = {Method::PureDqn, Method::DrlFallback, Method::Random};
  Simulator mixed(config, corpus);
  const auto mixed_result = mixed.run_experiment();
  std::vector<StepRecord> drl_only;
  for (const StepRecord& rec : mixed_result.records) {
    if (rec.method == Method::DrlFallback) drl_only.push_back(rec);
  }

  REQUIRE(solo_records.size() == drl_only.size());
  for (std::size_t i = 0; i < solo_records.size(); ++i) {
    CHECK(solo_records[i].action_mask == drl_only[i].action_mask);
    CHECK(solo_records[i].reward == drl_only[i].reward);
  }
}

TEST_CASE("fallback degeneracy at the outage extremes") {
  SimConfig config = small_config();
  config.n_steps = 25;
  config.n_users = 3;
  config.methods = {Method::LlmGate, Method::DrlFallback};
  const auto corpus = generate_prompt_corpus(7);

  SUBCASE("outage_prob 0 with training disabled matches llm_gate exactly") {
    config.outage_prob = 0.0;
    config.train = false;
    Simulator sim(config, corpus);
    const ExperimentResult result = sim.run_experiment();
    const int per_method = config.n_steps * config.n_users;
    for (int i = 0; i < per_method; ++i) {
      const StepRecord& llm = result.records[i];
      const StepRecord& drl = result.records[per_method + i];
      CHECK(llm.action_mask == drl.action_mask);
      CHECK(llm.reward == drl.reward);
      CHECK(llm.fidelity == drl.fidelity);
    }
    CHECK(result.by_method.at(Method::DrlFallback).llm_calls ==
          per_method);
  }

  SUBCASE("outage_prob 1 never queries the gate") {
    config.outage_prob = 1.0;
    Simulator sim(config, corpus);
    const ExperimentResult result = sim.run_experiment();
    CHECK(result.by_method.at(Method::DrlFallback).llm_calls == 0);
    CHECK(result.by_method.at(Method::LlmGate).llm_calls ==
          config.n_steps * config.n_users);
  }
}

TEST_CASE("pinned channel and single-category corpus give the greedy "
          "composition") {
  SimConfig config;
  config.n_users = 3;
  config.n_steps = 10;
  config.theta = 0.3;
  config.methods = {Method::Greedy};
  SimHooks hooks;
  hooks.channel_draw = [](int, int, int) { return pinned_draw(30.0); };
  Simulator sim(config, tiny_corpus(TaskCategory::Scenery), hooks);
  const ExperimentResult result = sim.run_experiment();
  REQUIRE(result.records.size() == 30);
  for (const StepRecord& rec : result.records) {
    CHECK(rec.action_mask == ((1u << 3) | (1u << 0) | (1u << 4)));
    CHECK(rec.fidelity == doctest::Approx(0.95));
    CHECK(rec.attempts == 1);
    CHECK(rec.snr_db == 30.0);
  }
}

TEST_CASE("a failing gate falls back and is counted") {
  SimConfig config = small_config();
  config.n_steps = 10;
  config.methods = {Method::LlmGate, Method::DrlFallback};
  config.outage_prob = 0.0;
  SimHooks hooks;
  hooks.gate_override = std::make_shared<ThrowingGate>();
  Simulator sim(config, generate_prompt_corpus(config.master_seed), hooks);
  const ExperimentResult result = sim.run_experiment();

  const int per_method = config.n_steps * config.n_users;
  const auto& llm = result.by_method.at(Method::LlmGate);
  CHECK(llm.llm_calls == per_method);
  CHECK(llm.llm_errors == per_method);
  const auto& drl = result.by_method.at(Method::DrlFallback);
  CHECK(drl.llm_calls == per_method);
  CHECK(drl.llm_errors == per_method);
  // Every step still produced a decision.
  for (const StepRecord& rec : result.records) {
    CHECK(rec.action_mask >= 1);
  }
}

TEST_CASE("collect_metrics aggregation") {
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(collect_metrics({}, 10, 2), std::invalid_argument);
  }

  SUBCASE("constant rewards average to themselves") {
    std::vector<StepRecord> records;
    for (int step = 0; step < 60; ++step) {
      for (int user = 0; user < 2; ++user) {
        StepRecord rec;
        rec.method = Method::Greedy;
        rec.step = step;
        rec.user = user;
        rec.theta = 0.3;
        rec.fidelity = 1.0;
        rec.attempts = 1;
        rec.reward = 1.0;
        records.push_back(rec);
      }
    }
    const auto metrics = collect_metrics(records, 60, 2);
    CHECK(metrics.at(Method::Greedy).final50_mean_reward ==
          doctest::Approx(1.0));
    CHECK(metrics.at(Method::Greedy).total_retransmissions == 0);
    CHECK(metrics.at(Method::Greedy).failures == 0);
  }

  SUBCASE("alternating rewards across users average to one half") {
    std::vector<StepRecord> records;
    for (int step = 0; step < 10; ++step) {
      for (int user = 0; user < 2; ++user) {
        StepRecord rec;
        rec.method = Method::Random;
        rec.step = step;
        rec.user = user;
        rec.theta = 0.5;
        rec.fidelity = user == 0 ? 1.0 : 0.0;
        rec.attempts = user == 0 ? 1 : 3;
        rec.reward = user == 0 ? 1.0 : 0.0;
        records.push_back(rec);
      }
    }
    const auto metrics = collect_metrics(records, 10, 2);
    for (const double r : metrics.at(Method::Random).mean_reward_per_step) {
      CHECK(r == doctest::Approx(0.5));
    }
    // Retransmission total equals an independent fold over the attempts column.
    long long want = 0;
    for (const StepRecord& rec : records) want += rec.attempts - 1;
    CHECK(metrics.at(Method::Random).total_retransmissions == want);
    CHECK(metrics.at(Method::Random).failures == 10);  // user 1 misses 0.5
  }
}

TEST_CASE("threshold sweep trends") {
  SimConfig config;
  config.n_users = 4;
  config.n_steps = 40;
  config.master_seed = 5;
  const auto corpus = generate_prompt_corpus(5);

  SUBCASE("overhead is nondecreasing in theta for every method") {
    const double thetas[] = {0.3, 0.6, 0.9};
    const auto rows = threshold_sweep(config, thetas, corpus);
    REQUIRE(rows.size() == config.methods.size() * 3);
    for (std::size_t i = 0; i < rows.size(); i += 3) {
      CHECK(rows[i].method == rows[i + 2].method);
      CHECK(rows[i].mean_retx_per_step <= rows[i + 1].mean_retx_per_step);
      CHECK(rows[i + 1].mean_retx_per_step <= rows[i + 2].mean_retx_per_step);
      CHECK(rows[i].failure_rate <= rows[i + 2].failure_rate);
    }
  }

  SUBCASE("a vanishing threshold removes all retransmissions") {
    // Holds for policies whose selections always carry positive utility:
    // the SNR clamp floor keeps every budget at 617+ bytes, so such
    // selections score above 0.001. Policies that can pick a zero-utility
    // subset (a random draw of pose-only on a scenery task) score exactly 0
    // and keep failing any positive bar, so they are excluded here.
    SimConfig cfg = config;
    cfg.methods = {Method::LlmGate, Method::Greedy};
    const double thetas[] = {0.001};
    const auto rows = threshold_sweep(cfg, thetas, corpus);
    for (const SweepRow& row : rows) {
      CHECK(row.mean_retx_per_step == 0.0);
      CHECK(row.failure_rate == 0.0);
    }
  }

  SUBCASE("a budget too small for the bar forces the full attempt cap") {
    SimHooks hooks;
    hooks.channel_draw = [](int, int, int) {
      ChannelDraw d;
      d.power_gain = 1.0;
      d.instantaneous_snr_db = 0.0;
      d.rate_bps = 5000.0 * 160.0;
      d.byte_budget = 5000;  // best achievable quality is 0.65 < 0.9
      return d;
    };
    const double thetas[] = {0.9};
    const auto rows = threshold_sweep(config, thetas, corpus, hooks);
    for (const SweepRow& row : rows) {
      CHECK(row.mean_retx_per_step == doctest::Approx(4.0));
      CHECK(row.failure_rate == doctest::Approx(1.0));
    }
  }

  SUBCASE("empty threshold list is rejected") {
    CHECK_THROWS_AS(threshold_sweep(config, {}, corpus),
                    std::invalid_argument);
  }
}

TEST_CASE("learned methods keep training state out of the environment") {
  // Rewards may differ across methods, but the (category, snr) environment
  // columns match pairwise across all six methods.
  SimConfig config;
  config.n_users = 2;
  config.n_steps = 10;
  config.master_seed = 99;
  Simulator sim(config, generate_prompt_corpus(99));
  const ExperimentResult result = sim.run_experiment();
  const int per_method = config.n_steps * config.n_users;
  REQUIRE(result.records.size() ==
          static_cast<std::size_t>(per_method * 6));
  for (int m = 1; m < 6; ++m) {
    for (int i = 0; i < per_method; ++i) {
      CHECK(result.records[i].category ==
            result.records[m * per_method + i].category);
      CHECK(result.records[i].snr_db ==
            result.records[m * per_method + i].snr_db);
    }
  }
}
