#pragma once
// Shared vocabulary: modalities, task/communication contexts, gating
// decisions, the prompt corpus, and the learner's state-vector layout.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semcom {

enum class Modality : int {
  Edge = 0,
  Pose = 1,
  Segmentation = 2,
  Depth = 3,
  Text = 4,
};

inline constexpr int kNumModalities = 5;
inline constexpr int kEmbeddingDim = 384;
inline constexpr std::uint32_t kNumActions = 32;  // all 5-bit selection masks
inline constexpr std::uint32_t kFullMask = 31;

std::string_view modality_name(Modality m);
std::optional<Modality> modality_from_name(std::string_view name);

enum class TaskCategory : int {
  Scenery = 0,
  HumanCentric = 1,
  IndoorObjects = 2,
  DynamicScene = 3,
};

inline constexpr int kNumCategories = 4;

std::string_view category_name(TaskCategory c);
std::optional<TaskCategory> category_from_name(std::string_view name);

struct ModalitySpec {
  Modality modality;
  std::int64_t nominal_payload_bytes;
};

using ModalitySpecs = std::array<ModalitySpec, kNumModalities>;

// Text payload is fixed by the embedding width: 384 * 4 bytes.
ModalitySpecs default_modality_specs();

struct TaskContext {
  TaskCategory category = TaskCategory::Scenery;
  int priority = 1;                          // 1..3
  double latency_tolerance_ms = 250.0;
  double bandwidth_requirement_bps = 0.0;    // informational only
  double fidelity_threshold = 0.6;           // theta, in (0, 1]
};

struct CommContext {
  double bandwidth_hz = 1.4e6;
  double mean_snr_db = 0.0;
  double instantaneous_snr_db = 0.0;  // post-clamp
  double power_gain = 1.0;            // |h|^2
};

struct GatingDecision {
  std::uint32_t selection_mask = 0;          // bit i selects ordinal i
  std::vector<Modality> activated_experts;   // 1:1 with selected modalities
  std::string rationale;
};

std::vector<Modality> modalities_in_mask(std::uint32_t mask);

// Builds a decision whose expert set mirrors the mask.
GatingDecision make_decision(std::uint32_t mask, std::string rationale = {});

std::uint32_t encode_action_index(const GatingDecision& d);
// Throws std::out_of_range for index > 31.
GatingDecision decode_action_index(std::uint32_t index);

inline constexpr int kStateDim = 9;
using StateVector = std::array<double, kStateDim>;

// Layout: [category one-hot x4, priority/3, theta, latency_ms/1000,
//          (snr_db+13)/43, bandwidth_hz/1.4e6].
// context_blind zeroes the two channel components and nothing else.
StateVector build_state_vector(const TaskContext& task, const CommContext& comm,
                               bool context_blind);

struct PromptRecord {
  int prompt_id = 0;  // 0..99
  TaskCategory category = TaskCategory::Scenery;
  std::string text;
  std::vector<double> embedding;  // 384 values, unit norm
};

// 100 prompts, 25 per category; a pure function of the seed.
std::vector<PromptRecord> generate_prompt_corpus(std::uint64_t seed);

// Deterministic stand-in for a sentence embedding: hash of the bytes seeds a
// stream of 384 normals, normalized to unit length.
// Throws std::invalid_argument on an empty string.
std::vector<double> pseudo_embed(std::string_view text);

// One record per line: prompt_id, category, text, then the 384 embedding
// values, comma separated.
void export_corpus_csv(std::span<const PromptRecord> corpus, std::ostream& out);

}  // namespace semcom
