#pragma once
// From-scratch deep Q-learning on the 9 -> 64 -> 64 -> 32 network: forward,
// backprop for the squared TD error on one action, adaptive-moment updates,
// FIFO replay, epsilon-greedy selection over the 31 nonempty masks, and
// hard target-network synchronization.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "semcom/domain.hpp"
#include "semcom/rng.hpp"

namespace semcom {

struct MlpDims {
  static constexpr int in = kStateDim;  // 9
  static constexpr int h1 = 64;
  static constexpr int h2 = 64;
  static constexpr int out = 32;
};

// Weights are input-major: w[i * out_dim + j].
struct MlpParams {
  std::vector<double> w1, b1, w2, b2, w3, b3;

  static MlpParams zeros();
  // Uniform(-sqrt(6/(fan_in+fan_out)), +...) weights, zero biases, drawn from
  // the stream in checkpoint order (w1, w2, w3).
  static MlpParams glorot(RngStream& stream);

  bool same_shape(const MlpParams& other) const;
  bool bitwise_equal(const MlpParams& other) const;
};

// Gradient holder, shaped like MlpParams.
struct MlpGrad {
  std::vector<double> w1, b1, w2, b2, w3, b3;
  static MlpGrad zeros();
  void reset();
};

// q[32] = W3^T relu(W2^T relu(W1^T s + b1) + b2) + b3.
// Throws std::invalid_argument on non-finite input.
void forward(const MlpParams& params, const double* state, double* q_out);

// Accumulates scale * d/dtheta (Q(s)[action] - td_target)^2 into grad and
// returns the unscaled squared error for that sample.
double backward_accum(const MlpParams& params, const double* state, int action,
                      double td_target, double scale, MlpGrad& grad);

struct AdamState {
  MlpGrad m = MlpGrad::zeros();
  MlpGrad v = MlpGrad::zeros();
  std::int64_t step = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
};

void optimizer_step(MlpParams& params, AdamState& opt, const MlpGrad& grad);

struct Experience {
  StateVector state{};
  int action = 0;  // 0..31
  double reward = 0.0;
  StateVector next_state{};
  bool done = true;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 2000) : capacity_(capacity) {}

  void push(const Experience& exp);
  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool ready(std::size_t batch_size) const { return size() >= batch_size; }

  // Oldest surviving element first.
  const Experience& at(std::size_t i) const;

  // Uniform with replacement; throws std::logic_error if size < batch_size.
  std::vector<Experience> sample_batch(std::size_t batch_size,
                                       RngStream& stream) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // insertion point once full
  std::vector<Experience> storage_;
};

struct EpsilonSchedule {
  double eps_start = 1.0;
  double eps_end = 0.01;
  int total_steps = 250;

  double decay_factor() const;     // (eps_end/eps_start)^(1/(total_steps-1))
  double at(int step) const;       // max(eps_end, eps_start * decay^step)
};

// Epsilon-greedy over actions 1..31; the empty mask (action 0) is never
// selected. Exploitation ties break toward the lowest index.
int select_action(const MlpParams& params, const double* state, double epsilon,
                  RngStream& stream);

struct TrainStats {
  double mean_loss = 0.0;
};

// One batch update: td_target = r for terminal transitions, else
// r + gamma * max over nonempty actions of Q_target(next_state).
TrainStats td_train_step(MlpParams& online, const MlpParams& target,
                         std::span<const Experience> batch, double gamma,
                         AdamState& opt);

// Copies online into target whenever train_steps_done is a positive multiple
// of interval_steps.
void target_sync(const MlpParams& online, MlpParams& target, int interval_steps,
                 std::int64_t train_steps_done);

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat little-endian float64 tensors in order w1,b1,w2,b2,w3,b3 behind a
// 16-byte header: magic "CSCQ", version u32, input-dim u32, output-dim u32.
void save_checkpoint(const MlpParams& params, std::ostream& out);
MlpParams load_checkpoint(std::istream& in);
void save_checkpoint_file(const MlpParams& params, const std::string& path);
MlpParams load_checkpoint_file(const std::string& path);

struct DqnConfig {
  double learning_rate = 1e-3;
  double gamma = 0.995;
  std::size_t buffer_capacity = 2000;
  std::size_t batch_size = 32;
  EpsilonSchedule schedule;
  int target_sync_interval = 50;
};

// Owns online/target params, optimizer, and replay; one agent per learned
// policy per run.
class DqnAgent {
 public:
  DqnAgent(const DqnConfig& config, RngStream& init_stream);

  int act(const StateVector& state, double epsilon, RngStream& stream) const;
  void observe(const Experience& exp) { buffer_.push(exp); }

  // Trains once if the buffer has a full batch; returns true if it trained.
  bool maybe_train(RngStream& sample_stream);

  const MlpParams& online() const { return online_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  std::int64_t train_steps() const { return train_steps_; }

 private:
  DqnConfig config_;
  MlpParams online_;
  MlpParams target_;
  AdamState opt_;
  ReplayBuffer buffer_;
  std::int64_t train_steps_ = 0;
};

}  // namespace semcom
