#pragma once
// Chat-completion client for the external gate. All experiments default to
// the deterministic mock gate; this client is opt-in via config.

#include <string>

#include "semcom/policies.hpp"

namespace semcom {

struct LlmGateConfig {
  std::string endpoint_url = "http://127.0.0.1:8080/v1/chat/completions";
  std::string model_name = "gate-model";
  int timeout_ms = 5000;
  int max_retries = 1;  // additional attempts after the first failure
  std::string api_key_env_var = "SEMCOM_LLM_API_KEY";
};

class ExternalLlmGate final : public GatePolicy {
 public:
  // Throws std::invalid_argument for an unsupported or unparsable URL.
  ExternalLlmGate(LlmGateConfig config, UtilityMatrix matrix,
                  ModalitySpecs specs, double slot_ms);

  // One blocking request per decision (plus configured retries); throws
  // GateUnavailable on timeout, transport failure, or an unusable reply.
  GatingDecision decide(const TaskContext& task, const CommContext& comm,
                        RngStream& stream) override;
  std::string_view name() const override { return "external_llm"; }

 private:
  LlmGateConfig config_;
  UtilityMatrix matrix_;
  ModalitySpecs specs_;
  double slot_ms_;
  std::string host_;  // scheme://host:port
  std::string path_;
};

}  // namespace semcom
