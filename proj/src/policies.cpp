#include "semcom/policies.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <json.hpp>

namespace semcom {

namespace {

using nlohmann::json;

std::int64_t estimate_budget(const CommContext& comm, double slot_ms) {
  return slot_byte_budget(shannon_rate(comm.bandwidth_hz,
                                       comm.instantaneous_snr_db),
                          slot_ms);
}

// Modalities ordered by descending utility density u/payload, ties by ordinal.
std::array<int, kNumModalities> density_order(TaskCategory category,
                                              const UtilityMatrix& matrix,
                                              std::span<const ModalitySpec> specs) {
  std::array<double, kNumModalities> density{};
  for (const ModalitySpec& spec : specs) {
    const int m = static_cast<int>(spec.modality);
    density[m] = matrix.u[static_cast<int>(category)][m] /
                 static_cast<double>(spec.nominal_payload_bytes);
  }
  std::array<int, kNumModalities> order = {0, 1, 2, 3, 4};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return density[a] > density[b]; });
  return order;
}

}  // namespace

GatingDecision mock_llm_select(const TaskContext& task, const CommContext& comm,
                               const UtilityMatrix& matrix,
                               std::span<const ModalitySpec> specs,
                               double slot_ms) {
  const std::int64_t budget = estimate_budget(comm, slot_ms);
  const double target = task.fidelity_threshold + kMockStopMargin;
  const auto order = density_order(task.category, matrix, specs);

  std::uint32_t mask = 0;
  double predicted = 0.0;
  while (predicted < target) {
    int pick = -1;
    double pick_q = predicted;
    for (const int m : order) {
      if (mask >> m & 1u) continue;
      const double q =
          score_selection(task.category, mask | (1u << m), specs, matrix, budget);
      if (q > pick_q) {
        pick = m;
        pick_q = q;
        break;  // first improving candidate in density order
      }
    }
    if (pick < 0) break;
    mask |= 1u << pick;
    predicted = pick_q;
  }
  if (mask == 0) mask = 1u << order[0];
  return make_decision(mask);
}

GatingDecision greedy_select(const TaskContext& task,
                             const UtilityMatrix& matrix) {
  std::array<int, kNumModalities> order = {0, 1, 2, 3, 4};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return matrix.u[static_cast<int>(task.category)][a] >
           matrix.u[static_cast<int>(task.category)][b];
  });
  std::uint32_t mask = 0;
  for (int k = 0; k < 3; ++k) mask |= 1u << order[k];
  return make_decision(mask);
}

GatingDecision random_select(RngStream& stream) {
  return make_decision(1u + stream.next_below(kFullMask));
}

std::string llm_request_build(const TaskContext& task, const CommContext& comm,
                              const UtilityMatrix& matrix,
                              std::span<const ModalitySpec> specs,
                              double slot_ms, const std::string& model_name) {
  std::string system_text =
      "You pick which semantic modalities a transmitter should encode for "
      "one task. Modalities and nominal payload bytes:";
  for (const ModalitySpec& spec : specs) {
    system_text += " ";
    system_text += modality_name(spec.modality);
    system_text += "=" + std::to_string(spec.nominal_payload_bytes);
  }
  system_text += ". Utility table rows (";
  for (int c = 0; c < kNumCategories; ++c) {
    if (c) system_text += " ";
    system_text += category_name(static_cast<TaskCategory>(c));
  }
  system_text += ") by modality ordinal:";
  char num[32];
  for (int c = 0; c < kNumCategories; ++c) {
    system_text += " [";
    for (int m = 0; m < kNumModalities; ++m) {
      std::snprintf(num, sizeof num, m ? " %.2f" : "%.2f", matrix.u[c][m]);
      system_text += num;
    }
    system_text += "]";
  }
  system_text +=
      ". Reply with exactly one JSON object of the form "
      "{\"modalities\": [<one or more of the names above>], "
      "\"rationale\": <short string>}.";

  json user;
  user["category"] = category_name(task.category);
  user["priority"] = task.priority;
  user["fidelity_threshold"] = task.fidelity_threshold;
  user["latency_tolerance_ms"] = task.latency_tolerance_ms;
  user["snr_db"] = comm.instantaneous_snr_db;
  user["bandwidth_hz"] = comm.bandwidth_hz;
  user["byte_budget"] = estimate_budget(comm, slot_ms);

  json request;
  request["model"] = model_name;
  request["temperature"] = 0;
  request["messages"] = json::array(
      {json{{"role", "system"}, {"content", system_text}},
       json{{"role", "user"}, {"content", user.dump()}}});
  return request.dump();
}

GatingDecision llm_response_parse(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw GateUnavailable(std::string("gate reply is not valid JSON: ") +
                          e.what());
  }
  if (!doc.is_object() || !doc.contains("modalities") ||
      !doc["modalities"].is_array()) {
    throw GateUnavailable("gate reply lacks a modalities array");
  }
  std::uint32_t mask = 0;
  for (const json& entry : doc["modalities"]) {
    if (!entry.is_string()) {
      throw GateUnavailable("gate reply modality entry is not a string");
    }
    const auto m = modality_from_name(entry.get<std::string>());
    if (!m) {
      throw GateUnavailable("gate reply names unknown modality: " +
                            entry.get<std::string>());
    }
    mask |= 1u << static_cast<int>(*m);
  }
  if (mask == 0) {
    throw GateUnavailable("gate reply selected no modalities");
  }
  std::string rationale;
  if (doc.contains("rationale") && doc["rationale"].is_string()) {
    rationale = doc["rationale"].get<std::string>();
  }
  return make_decision(mask, std::move(rationale));
}

std::string serialize_decision_json(const GatingDecision& decision) {
  json names = json::array();
  for (const Modality m : modalities_in_mask(decision.selection_mask)) {
    names.push_back(std::string(modality_name(m)));
  }
  json doc;
  doc["modalities"] = names;
  doc["rationale"] = decision.rationale;
  return doc.dump();
}

}  // namespace semcom
