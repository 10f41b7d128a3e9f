#include "semcom/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace semcom {

UtilityMatrix UtilityMatrix::defaults() {
  UtilityMatrix m;
  const double rows[kNumCategories][kNumModalities] = {
      {0.35, 0.00, 0.15, 0.40, 0.20},
      {0.10, 0.45, 0.30, 0.05, 0.20},
      {0.35, 0.00, 0.40, 0.15, 0.20},
      {0.10, 0.35, 0.15, 0.30, 0.20},
  };
  for (int c = 0; c < kNumCategories; ++c) {
    for (int i = 0; i < kNumModalities; ++i) m.u[c][i] = rows[c][i];
  }
  m.alpha = 0.6;
  return m;
}

double UtilityMatrix::row_sum(TaskCategory c) const {
  double s = 0.0;
  for (int i = 0; i < kNumModalities; ++i) s += u[static_cast<int>(c)][i];
  return s;
}

double compression_ratio(std::uint32_t selection_mask,
                         std::span<const ModalitySpec> specs,
                         std::int64_t byte_budget) {
  if ((selection_mask & kFullMask) == 0) {
    throw std::invalid_argument("compression_ratio: empty selection");
  }
  std::int64_t total = 0;
  for (const ModalitySpec& spec : specs) {
    if (selection_mask >> static_cast<int>(spec.modality) & 1u) {
      total += spec.nominal_payload_bytes;
    }
  }
  if (byte_budget <= 0) return kZeroBudgetRatio;
  return std::min(1.0, static_cast<double>(byte_budget) /
                           static_cast<double>(total));
}

double semantic_quality(TaskCategory category, std::uint32_t selection_mask,
                        double rho, const UtilityMatrix& matrix) {
  if ((selection_mask & kFullMask) == 0) return 0.0;
  double utility_sum = 0.0;
  for (int i = 0; i < kNumModalities; ++i) {
    if (selection_mask >> i & 1u) {
      utility_sum += matrix.u[static_cast<int>(category)][i];
    }
  }
  return std::min(1.0, utility_sum * std::pow(rho, matrix.alpha));
}

double score_selection(TaskCategory category, std::uint32_t selection_mask,
                       std::span<const ModalitySpec> specs,
                       const UtilityMatrix& matrix, std::int64_t byte_budget) {
  if ((selection_mask & kFullMask) == 0) return 0.0;
  const double rho = compression_ratio(selection_mask, specs, byte_budget);
  return semantic_quality(category, selection_mask, rho, matrix);
}

TransmissionOutcome transmit_with_retransmission(
    const TaskContext& task, const GatingDecision& decision,
    std::span<const ModalitySpec> specs, const UtilityMatrix& matrix,
    double slot_ms, int k_max_cap, const BudgetSource& budget_source) {
  const int k_max = std::min(
      k_max_cap,
      static_cast<int>(std::floor(task.latency_tolerance_ms / slot_ms)));
  if (k_max < 1) {
    throw std::invalid_argument(
        "transmit_with_retransmission: latency tolerance below one slot");
  }
  const std::uint32_t mask = decision.selection_mask & kFullMask;
  TransmissionOutcome out;
  for (int attempt = 1; attempt <= k_max; ++attempt) {
    const std::int64_t budget = budget_source(attempt);
    out.attempts = attempt;
    out.byte_budget_last = budget;
    if (mask == 0) {
      out.compression_ratio_last = 1.0;
      out.fidelity = 0.0;
    } else {
      out.compression_ratio_last = compression_ratio(mask, specs, budget);
      out.fidelity =
          semantic_quality(task.category, mask, out.compression_ratio_last,
                           matrix);
    }
    if (out.fidelity >= task.fidelity_threshold) break;
  }
  out.retransmissions = out.attempts - 1;
  out.met_threshold = out.fidelity >= task.fidelity_threshold;
  return out;
}

double reward(const TransmissionOutcome& outcome, double lambda) {
  return std::max(0.0, outcome.fidelity - lambda * outcome.retransmissions);
}

}  // namespace semcom
