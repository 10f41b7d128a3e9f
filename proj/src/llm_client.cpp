#include "semcom/llm_client.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

namespace semcom {

namespace {

using nlohmann::json;

std::string extract_content(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw GateUnavailable(std::string("gate response is not valid JSON: ") +
                          e.what());
  }
  if (!doc.contains("choices") || !doc["choices"].is_array() ||
      doc["choices"].empty()) {
    throw GateUnavailable("gate response has no choices");
  }
  const json& msg = doc["choices"][0];
  if (!msg.contains("message") || !msg["message"].contains("content") ||
      !msg["message"]["content"].is_string()) {
    throw GateUnavailable("gate response has no message content");
  }
  return msg["message"]["content"].get<std::string>();
}

}  // namespace

ExternalLlmGate::ExternalLlmGate(LlmGateConfig config, UtilityMatrix matrix,
                                 ModalitySpecs specs, double slot_ms)
    : config_(std::move(config)),
      matrix_(matrix),
      specs_(specs),
      slot_ms_(slot_ms) {
  const std::string& url = config_.endpoint_url;
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) {
    throw std::invalid_argument(
        "llm.endpoint_url must start with http:// : " + url);
  }
  const auto path_pos = url.find('/', scheme.size());
  if (path_pos == std::string::npos) {
    host_ = url;
    path_ = "/";
  } else {
    host_ = url.substr(0, path_pos);
    path_ = url.substr(path_pos);
  }
}

GatingDecision ExternalLlmGate::decide(const TaskContext& task,
                                       const CommContext& comm, RngStream&) {
  const std::string request =
      llm_request_build(task, comm, matrix_, specs_, slot_ms_,
                        config_.model_name);

  httplib::Client client(host_);
  const auto timeout_s = config_.timeout_ms / 1000;
  const auto timeout_us = (config_.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(timeout_s, timeout_us);
  client.set_read_timeout(timeout_s, timeout_us);
  client.set_write_timeout(timeout_s, timeout_us);

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env_var.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_error = "no attempt made";
  const int attempts = 1 + std::max(0, config_.max_retries);
  for (int i = 0; i < attempts; ++i) {
    auto res = client.Post(path_, headers, request, "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "http status " + std::to_string(res->status);
      continue;
    }
    return llm_response_parse(extract_content(res->body));
  }
  throw GateUnavailable("gate endpoint unusable after " +
                        std::to_string(attempts) + " attempt(s): " +
                        last_error);
}

}  // namespace semcom
