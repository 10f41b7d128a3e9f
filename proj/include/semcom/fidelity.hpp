#pragma once
// Surrogate quality model: maps a modality selection, task category, and byte
// budget to a fidelity score in [0,1], plus the threshold-triggered
// retransmission loop and the scalar reward.

#include <cstdint>
#include <functional>
#include <span>

#include "semcom/domain.hpp"

namespace semcom {

struct UtilityMatrix {
  // rows: Scenery, HumanCentric, IndoorObjects, DynamicScene
  // cols: Edge, Pose, Segmentation, Depth, Text
  double u[kNumCategories][kNumModalities] = {};
  double alpha = 0.6;  // compression exponent, in (0, 1]

  static UtilityMatrix defaults();

  double utility(TaskCategory c, Modality m) const {
    return u[static_cast<int>(c)][static_cast<int>(m)];
  }
  double row_sum(TaskCategory c) const;
};

inline constexpr double kDefaultRetxLambda = 0.05;
inline constexpr int kDefaultRetxCap = 5;
inline constexpr double kZeroBudgetRatio = 1e-6;

// rho = min(1, budget / selected payload); a zero budget floors at 1e-6.
// Throws std::invalid_argument on an empty selection.
double compression_ratio(std::uint32_t selection_mask,
                         std::span<const ModalitySpec> specs,
                         std::int64_t byte_budget);

// q = min(1, sum of selected utilities * rho^alpha); empty selection -> 0.
double semantic_quality(TaskCategory category, std::uint32_t selection_mask,
                        double rho, const UtilityMatrix& matrix);

// Convenience composition used by transmission and the policies.
double score_selection(TaskCategory category, std::uint32_t selection_mask,
                       std::span<const ModalitySpec> specs,
                       const UtilityMatrix& matrix, std::int64_t byte_budget);

struct TransmissionOutcome {
  double fidelity = 0.0;
  int attempts = 0;
  int retransmissions = 0;
  bool met_threshold = false;
  double compression_ratio_last = 1.0;
  std::int64_t byte_budget_last = 0;
};

// Fresh byte budget per attempt; attempts are numbered from 1.
using BudgetSource = std::function<std::int64_t(int attempt)>;

// Up to K_max = min(k_max_cap, floor(latency/slot)) attempts, stopping at the
// first one whose quality reaches the task threshold. The outcome reports the
// final attempt's quality (each attempt fully re-sends).
// Throws std::invalid_argument if K_max < 1.
TransmissionOutcome transmit_with_retransmission(
    const TaskContext& task, const GatingDecision& decision,
    std::span<const ModalitySpec> specs, const UtilityMatrix& matrix,
    double slot_ms, int k_max_cap, const BudgetSource& budget_source);

// max(0, fidelity - lambda * retransmissions)
double reward(const TransmissionOutcome& outcome, double lambda);

}  // namespace semcom
