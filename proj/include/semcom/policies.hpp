#pragma once
// Gating policies: the behavioral contract, the deterministic rule-based
// stand-in for the LLM gate, the channel-blind greedy baseline, the random
// baseline, and the chat-request/response wire format.

#include <stdexcept>
#include <string>

#include "semcom/channel.hpp"
#include "semcom/domain.hpp"
#include "semcom/fidelity.hpp"
#include "semcom/rng.hpp"

namespace semcom {

// Raised when a gate cannot produce a decision (transport failure, timeout,
// malformed or empty reply). The simulator treats it like an outage.
struct GateUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class GatePolicy {
 public:
  virtual ~GatePolicy() = default;
  virtual GatingDecision decide(const TaskContext& task,
                                const CommContext& comm,
                                RngStream& stream) = 0;
  virtual std::string_view name() const = 0;
};

// Margin above the task threshold the rule-based gate aims for, hedging the
// fading redraw between decision time and transmission.
inline constexpr double kMockStopMargin = 0.05;

// Estimates the byte budget from the observed SNR, then greedily adds
// modalities in descending utility density until the predicted quality
// reaches threshold + margin or no remaining addition improves it.
GatingDecision mock_llm_select(const TaskContext& task, const CommContext& comm,
                               const UtilityMatrix& matrix,
                               std::span<const ModalitySpec> specs,
                               double slot_ms);

// Channel-blind: always the three highest-utility modalities for the task
// category, ties broken by lower ordinal.
GatingDecision greedy_select(const TaskContext& task,
                             const UtilityMatrix& matrix);

// Uniform over the 31 nonempty masks.
GatingDecision random_select(RngStream& stream);

// Chat-style request document (serialized JSON, stable bytes for identical
// contexts). The system message names the five modalities, their payload
// sizes, the utility table, and the reply schema; the user message carries
// the serialized task and channel descriptors plus the byte-budget estimate.
std::string llm_request_build(const TaskContext& task, const CommContext& comm,
                              const UtilityMatrix& matrix,
                              std::span<const ModalitySpec> specs,
                              double slot_ms, const std::string& model_name);

// Strict parse of the gate reply: a JSON object
//   {"modalities": [<names>], "rationale": <string>}
// Unknown names, an empty list, or malformed JSON throw GateUnavailable.
GatingDecision llm_response_parse(std::string_view body);

// Well-formed reply for a given decision; llm_response_parse inverts it.
std::string serialize_decision_json(const GatingDecision& decision);

class MockLlmGate final : public GatePolicy {
 public:
  MockLlmGate(UtilityMatrix matrix, ModalitySpecs specs, double slot_ms)
      : matrix_(matrix), specs_(specs), slot_ms_(slot_ms) {}

  GatingDecision decide(const TaskContext& task, const CommContext& comm,
                        RngStream&) override {
    return mock_llm_select(task, comm, matrix_, specs_, slot_ms_);
  }
  std::string_view name() const override { return "mock_llm"; }

 private:
  UtilityMatrix matrix_;
  ModalitySpecs specs_;
  double slot_ms_;
};

class GreedyPolicy final : public GatePolicy {
 public:
  explicit GreedyPolicy(UtilityMatrix matrix) : matrix_(matrix) {}
  GatingDecision decide(const TaskContext& task, const CommContext&,
                        RngStream&) override {
    return greedy_select(task, matrix_);
  }
  std::string_view name() const override { return "greedy"; }

 private:
  UtilityMatrix matrix_;
};

class RandomPolicy final : public GatePolicy {
 public:
  GatingDecision decide(const TaskContext&, const CommContext&,
                        RngStream& stream) override {
    return random_select(stream);
  }
  std::string_view name() const override { return "random"; }
};

}  // namespace semcom
