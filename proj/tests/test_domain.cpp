#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "semcom/domain.hpp"
#include "semcom/rng.hpp"

using namespace semcom;

TEST_CASE("modality and category enumerations are fixed") {
  CHECK(static_cast<int>(Modality::Edge) == 0);
  CHECK(static_cast<int>(Modality::Pose) == 1);
  CHECK(static_cast<int>(Modality::Segmentation) == 2);
  CHECK(static_cast<int>(Modality::Depth) == 3);
  CHECK(static_cast<int>(Modality::Text) == 4);
  CHECK(static_cast<int>(TaskCategory::Scenery) == 0);
  CHECK(static_cast<int>(TaskCategory::DynamicScene) == 3);
  CHECK(modality_from_name("segmentation") == Modality::Segmentation);
  CHECK_FALSE(modality_from_name("lidar").has_value());
}

TEST_CASE("default payload sizes") {
  const ModalitySpecs specs = default_modality_specs();
  CHECK(specs[0].nominal_payload_bytes == 25000);
  CHECK(specs[1].nominal_payload_bytes == 2000);
  CHECK(specs[2].nominal_payload_bytes == 40000);
  CHECK(specs[3].nominal_payload_bytes == 60000);
  CHECK(specs[4].nominal_payload_bytes == kEmbeddingDim * 4);
  CHECK(specs[4].nominal_payload_bytes == 1536);
}

TEST_CASE("encode and decode action indices") {
  CHECK(encode_action_index(make_decision(1u << 0)) == 1);   // {Edge}
  CHECK(encode_action_index(make_decision(0b10001)) == 17);  // {Edge, Text}
  CHECK(encode_action_index(make_decision(0)) == 0);

  const GatingDecision d = decode_action_index(17);
  CHECK(d.selection_mask == 17);
  CHECK(d.activated_experts ==
        std::vector<Modality>{Modality::Edge, Modality::Text});

  const GatingDecision full = decode_action_index(31);
  CHECK(full.activated_experts.size() == 5);

  CHECK_THROWS_AS(decode_action_index(32), std::out_of_range);

  // Mutually inverse across the whole action space.
  for (std::uint32_t mask = 0; mask <= 31; ++mask) {
    const GatingDecision dec = decode_action_index(mask);
    CHECK(encode_action_index(dec) == mask);
    CHECK(dec.activated_experts == modalities_in_mask(mask));
  }
}

TEST_CASE("state vector layout and normalization") {
  TaskContext task;
  task.category = TaskCategory::HumanCentric;
  task.priority = 3;
  task.fidelity_threshold = 0.6;
  task.latency_tolerance_ms = 250.0;
  CommContext comm;
  comm.bandwidth_hz = 1.4e6;
  comm.instantaneous_snr_db = 30.0;

  const StateVector s = build_state_vector(task, comm, false);
  const StateVector want = {0, 1, 0, 0, 1.0, 0.6, 0.25, 1.0, 1.0};
  for (int i = 0; i < kStateDim; ++i) {
    CHECK(s[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }

  const StateVector blind = build_state_vector(task, comm, true);
  for (int i = 0; i < 7; ++i) CHECK(blind[i] == s[i]);
  CHECK(blind[7] == 0.0);
  CHECK(blind[8] == 0.0);

  comm.instantaneous_snr_db = -13.0;
  CHECK(build_state_vector(task, comm, false)[7] == doctest::Approx(0.0));
}

TEST_CASE("state vector components stay in [0,1] for documented ranges") {
  RngStream stream(9);
  for (int rep = 0; rep < 200; ++rep) {
    TaskContext task;
    task.category =
        static_cast<TaskCategory>(stream.next_below(kNumCategories));
    task.priority = 1 + static_cast<int>(stream.next_below(3));
    task.fidelity_threshold = stream.next_unit();
    task.latency_tolerance_ms = stream.next_range(50.0, 1000.0);
    CommContext comm;
    comm.bandwidth_hz = 1.4e6;
    comm.instantaneous_snr_db = stream.next_range(-13.0, 30.0);
    const StateVector s = build_state_vector(task, comm, false);
    for (const double x : s) {
      CHECK(std::isfinite(x));
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
    }
  }
}

TEST_CASE("pseudo embedding is a deterministic unit vector") {
  const auto v1 = pseudo_embed("a");
  const auto v2 = pseudo_embed("a");
  CHECK(v1 == v2);
  CHECK(v1.size() == 384);

  double norm_sq = 0.0;
  for (const double x : v1) norm_sq += x * x;
  CHECK(std::sqrt(norm_sq) == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(pseudo_embed(""), std::invalid_argument);
}

TEST_CASE("near-identical texts embed nearly orthogonally") {
  // 384-dim random unit vectors have |cos| around 0.04; the sampled mean
  // over 1000 single-character perturbations must stay well under 0.2.
  double sum_abs_cos = 0.0;
  double max_abs_cos = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::string base = "prompt variant number " + std::to_string(i);
    std::string tweaked = base;
    tweaked.back() = tweaked.back() == 'x' ? 'y' : 'x';
    const auto a = pseudo_embed(base);
    const auto b = pseudo_embed(tweaked);
    double dot = 0.0;
    for (int k = 0; k < kEmbeddingDim; ++k) dot += a[k] * b[k];
    sum_abs_cos += std::abs(dot);
    max_abs_cos = std::max(max_abs_cos, std::abs(dot));
  }
  CHECK(sum_abs_cos / 1000.0 < 0.2);
  CHECK(max_abs_cos < 0.5);
}

TEST_CASE("prompt corpus construction") {
  const auto corpus = generate_prompt_corpus(42);
  REQUIRE(corpus.size() == 100);

  const auto again = generate_prompt_corpus(42);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(corpus[i].prompt_id == again[i].prompt_id);
    CHECK(corpus[i].text == again[i].text);
    CHECK(corpus[i].embedding == again[i].embedding);
  }

  std::set<int> ids;
  int per_category[kNumCategories] = {};
  for (const PromptRecord& rec : corpus) {
    ids.insert(rec.prompt_id);
    per_category[static_cast<int>(rec.category)] += 1;
    CHECK(rec.text.find(',') == std::string::npos);
    CHECK(rec.embedding.size() == 384);
  }
  CHECK(ids.size() == 100);
  CHECK(*ids.begin() == 0);
  CHECK(*ids.rbegin() == 99);
  for (int c = 0; c < kNumCategories; ++c) CHECK(per_category[c] == 25);

  // 25 distinct texts per category regardless of seed.
  for (const std::uint64_t seed : {0ull, 7ull, 123456789ull}) {
    const auto other = generate_prompt_corpus(seed);
    std::set<std::string> texts[kNumCategories];
    for (const PromptRecord& rec : other) {
      texts[static_cast<int>(rec.category)].insert(rec.text);
    }
    for (int c = 0; c < kNumCategories; ++c) CHECK(texts[c].size() == 25);
  }
}

TEST_CASE("corpus export schema") {
  const auto corpus = generate_prompt_corpus(1);
  std::ostringstream out;
  export_corpus_csv(corpus, out);
  const std::string text = out.str();

  std::size_t lines = 0;
  for (const char ch : text) lines += ch == '\n';
  CHECK(lines == 100);

  const std::string first = text.substr(0, text.find('\n'));
  // prompt_id, category, text, then 384 embedding values -> 386 commas.
  std::size_t commas = 0;
  for (const char ch : first) commas += ch == ',';
  CHECK(commas == 386);
  CHECK(first.rfind("0,scenery,", 0) == 0);
}
