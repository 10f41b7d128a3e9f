#include "semcom/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "semcom/rng.hpp"

namespace semcom {

namespace {

constexpr std::string_view kModalityNames[kNumModalities] = {
    "edge", "pose", "segmentation", "depth", "text"};

constexpr std::string_view kCategoryNames[kNumCategories] = {
    "scenery", "human_centric", "indoor_objects", "dynamic_scene"};

constexpr double kSnrFloorDb = -13.0;
constexpr double kSnrRangeDb = 43.0;  // [-13, 30]
constexpr double kLatencyNormMs = 1000.0;
constexpr double kBandwidthRefHz = 1.4e6;

struct PromptBank {
  std::array<std::string_view, 5> templates;  // each contains one "{}"
  std::array<std::string_view, 5> fillers;
};

const PromptBank kPromptBanks[kNumCategories] = {
    {{{"a panoramic view of {} at dawn",
       "a wide-angle photograph of {} under a clear sky",
       "an aerial shot of {} in autumn colors",
       "a long-exposure image of {} at dusk",
       "a painting-like vista of {} after rainfall"}},
     {{"snowcapped mountains", "a misty fjord", "rolling vineyard hills",
       "a desert canyon", "a glacial lake"}}},
    {{{"a dancer performing {} on an empty stage",
       "an athlete practicing {} at sunrise",
       "a street performer demonstrating {} to a small crowd",
       "a climber attempting {} on an indoor wall",
       "a yoga instructor holding {} in a quiet studio"}},
     {{"a spinning leap", "a handstand transition", "a slow-motion kick",
       "an arching backbend", "a balancing pose"}}},
    {{{"a product photo of {} on a wooden desk",
       "a close-up of {} beside a window",
       "a studio shot of {} against a gray backdrop",
       "a catalog image of {} under soft lighting",
       "a cluttered shelf holding {} and old books"}},
     {{"a ceramic teapot", "a brass desk lamp", "a mechanical keyboard",
       "a potted succulent", "a vintage film camera"}}},
    {{{"a busy intersection where {} during rush hour",
       "a market square where {} at midday",
       "a harbor scene where {} before a storm",
       "a train platform where {} in the evening",
       "a stadium concourse where {} after the final whistle"}},
     {{"cyclists weave between cars", "vendors wave at passing crowds",
       "workers unload crates quickly", "travelers drag rolling luggage",
       "fans stream toward the exits"}}},
};

std::string expand_template(std::string_view tmpl, std::string_view filler) {
  const auto pos = tmpl.find("{}");
  std::string out;
  out.reserve(tmpl.size() + filler.size());
  out.append(tmpl.substr(0, pos));
  out.append(filler);
  out.append(tmpl.substr(pos + 2));
  return out;
}

}  // namespace

std::string_view modality_name(Modality m) {
  return kModalityNames[static_cast<int>(m)];
}

std::optional<Modality> modality_from_name(std::string_view name) {
  for (int i = 0; i < kNumModalities; ++i) {
    if (kModalityNames[i] == name) return static_cast<Modality>(i);
  }
  return std::nullopt;
}

std::string_view category_name(TaskCategory c) {
  return kCategoryNames[static_cast<int>(c)];
}

std::optional<TaskCategory> category_from_name(std::string_view name) {
  for (int i = 0; i < kNumCategories; ++i) {
    if (kCategoryNames[i] == name) return static_cast<TaskCategory>(i);
  }
  return std::nullopt;
}

ModalitySpecs default_modality_specs() {
  return {{{Modality::Edge, 25000},
           {Modality::Pose, 2000},
           {Modality::Segmentation, 40000},
           {Modality::Depth, 60000},
           {Modality::Text, kEmbeddingDim * 4}}};
}

std::vector<Modality> modalities_in_mask(std::uint32_t mask) {
  std::vector<Modality> out;
  for (int i = 0; i < kNumModalities; ++i) {
    if (mask >> i & 1u) out.push_back(static_cast<Modality>(i));
  }
  return out;
}

GatingDecision make_decision(std::uint32_t mask, std::string rationale) {
  GatingDecision d;
  d.selection_mask = mask;
  d.activated_experts = modalities_in_mask(mask);
  d.rationale = std::move(rationale);
  return d;
}

std::uint32_t encode_action_index(const GatingDecision& d) {
  return d.selection_mask;
}

GatingDecision decode_action_index(std::uint32_t index) {
  if (index > kFullMask) {
    throw std::out_of_range("action index out of range [0, 31]: " +
                            std::to_string(index));
  }
  return make_decision(index);
}

StateVector build_state_vector(const TaskContext& task, const CommContext& comm,
                               bool context_blind) {
  StateVector s{};
  s[static_cast<int>(task.category)] = 1.0;
  s[4] = static_cast<double>(task.priority) / 3.0;
  s[5] = task.fidelity_threshold;
  s[6] = task.latency_tolerance_ms / kLatencyNormMs;
  if (context_blind) {
    s[7] = 0.0;
    s[8] = 0.0;
  } else {
    s[7] = (comm.instantaneous_snr_db - kSnrFloorDb) / kSnrRangeDb;
    s[8] = comm.bandwidth_hz / kBandwidthRefHz;
  }
  return s;
}

std::vector<double> pseudo_embed(std::string_view text) {
  if (text.empty()) {
    throw std::invalid_argument("pseudo_embed: empty string");
  }
  RngStream stream(fnv1a64(text.data(), text.size()));
  std::vector<double> v(kEmbeddingDim);
  double norm_sq = 0.0;
  for (int i = 0; i < kEmbeddingDim; i += 2) {
    const auto [a, b] = stream.next_gauss_pair();
    v[i] = a;
    v[i + 1] = b;
    norm_sq += a * a + b * b;
  }
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& x : v) x *= inv;
  return v;
}

std::vector<PromptRecord> generate_prompt_corpus(std::uint64_t seed) {
  std::vector<PromptRecord> corpus;
  corpus.reserve(100);
  for (int cat = 0; cat < kNumCategories; ++cat) {
    const PromptBank& bank = kPromptBanks[cat];
    for (int t = 0; t < 5; ++t) {
      // Seed only permutes which filler lands on which template slot; the
      // 25 texts per category stay distinct for every seed.
      std::array<int, 5> order = {0, 1, 2, 3, 4};
      RngStream stream = make_stream(seed, StreamPurpose::Corpus,
                                     static_cast<std::uint64_t>(cat),
                                     static_cast<std::uint64_t>(t));
      for (int i = 4; i > 0; --i) {
        const int j = static_cast<int>(stream.next_below(i + 1));
        std::swap(order[i], order[j]);
      }
      for (int k = 0; k < 5; ++k) {
        PromptRecord rec;
        rec.prompt_id = cat * 25 + t * 5 + k;
        rec.category = static_cast<TaskCategory>(cat);
        rec.text = expand_template(bank.templates[t], bank.fillers[order[k]]);
        rec.embedding = pseudo_embed(rec.text);
        corpus.push_back(std::move(rec));
      }
    }
  }
  return corpus;
}

void export_corpus_csv(std::span<const PromptRecord> corpus, std::ostream& out) {
  char buf[32];
  for (const PromptRecord& rec : corpus) {
    out << rec.prompt_id << ',' << category_name(rec.category) << ','
        << rec.text;
    for (const double x : rec.embedding) {
      std::snprintf(buf, sizeof buf, "%.9g", x);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace semcom
