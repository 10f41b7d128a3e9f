#include "semcom/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "semcom/kernels.hpp"

namespace semcom {

namespace {

constexpr int kIn = MlpDims::in;
constexpr int kH1 = MlpDims::h1;
constexpr int kH2 = MlpDims::h2;
constexpr int kOut = MlpDims::out;

void size_like_params(std::vector<double>& w1, std::vector<double>& b1,
                      std::vector<double>& w2, std::vector<double>& b2,
                      std::vector<double>& w3, std::vector<double>& b3) {
  w1.assign(kIn * kH1, 0.0);
  b1.assign(kH1, 0.0);
  w2.assign(kH1 * kH2, 0.0);
  b2.assign(kH2, 0.0);
  w3.assign(kH2 * kOut, 0.0);
  b3.assign(kOut, 0.0);
}

struct ForwardTrace {
  double h1[kH1];
  double h2[kH2];
  double q[kOut];
};

void forward_trace(const MlpParams& p, const double* state, ForwardTrace& t) {
  const auto& k = kernels::active();
  std::memcpy(t.h1, p.b1.data(), sizeof t.h1);
  k.matvec_out_accum(t.h1, p.w1.data(), state, kIn, kH1);
  k.relu_inplace(t.h1, kH1);
  std::memcpy(t.h2, p.b2.data(), sizeof t.h2);
  k.matvec_out_accum(t.h2, p.w2.data(), t.h1, kH1, kH2);
  k.relu_inplace(t.h2, kH2);
  std::memcpy(t.q, p.b3.data(), sizeof t.q);
  k.matvec_out_accum(t.q, p.w3.data(), t.h2, kH2, kOut);
}

int argmax_nonempty(const double* q) {
  int best = 1;
  for (int a = 2; a < kOut; ++a) {
    if (q[a] > q[best]) best = a;
  }
  return best;
}

double max_q_nonempty(const double* q) {
  double best = q[1];
  for (int a = 2; a < kOut; ++a) best = std::max(best, q[a]);
  return best;
}

}  // namespace

MlpParams MlpParams::zeros() {
  MlpParams p;
  size_like_params(p.w1, p.b1, p.w2, p.b2, p.w3, p.b3);
  return p;
}

MlpParams MlpParams::glorot(RngStream& stream) {
  MlpParams p = zeros();
  const auto fill = [&stream](std::vector<double>& w, int fan_in, int fan_out) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& x : w) x = stream.next_range(-bound, bound);
  };
  fill(p.w1, kIn, kH1);
  fill(p.w2, kH1, kH2);
  fill(p.w3, kH2, kOut);
  return p;
}

bool MlpParams::same_shape(const MlpParams& o) const {
  return w1.size() == o.w1.size() && b1.size() == o.b1.size() &&
         w2.size() == o.w2.size() && b2.size() == o.b2.size() &&
         w3.size() == o.w3.size() && b3.size() == o.b3.size();
}

bool MlpParams::bitwise_equal(const MlpParams& o) const {
  const auto eq = [](const std::vector<double>& a,
                     const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
  };
  return eq(w1, o.w1) && eq(b1, o.b1) && eq(w2, o.w2) && eq(b2, o.b2) &&
         eq(w3, o.w3) && eq(b3, o.b3);
}

MlpGrad MlpGrad::zeros() {
  MlpGrad g;
  size_like_params(g.w1, g.b1, g.w2, g.b2, g.w3, g.b3);
  return g;
}

void MlpGrad::reset() {
  const auto zero = [](std::vector<double>& v) {
    std::fill(v.begin(), v.end(), 0.0);
  };
  zero(w1);
  zero(b1);
  zero(w2);
  zero(b2);
  zero(w3);
  zero(b3);
}

void forward(const MlpParams& params, const double* state, double* q_out) {
  for (int i = 0; i < kIn; ++i) {
    if (!std::isfinite(state[i])) {
      throw std::invalid_argument("forward: non-finite state component");
    }
  }
  ForwardTrace t;
  forward_trace(params, state, t);
  std::memcpy(q_out, t.q, sizeof t.q);
}

double backward_accum(const MlpParams& params, const double* state, int action,
                      double td_target, double scale, MlpGrad& grad) {
  const auto& k = kernels::active();
  ForwardTrace t;
  forward_trace(params, state, t);

  const double err = t.q[action] - td_target;
  const double dq = scale * 2.0 * err;

  // Output layer: only the selected action's unit carries gradient.
  grad.b3[action] += dq;
  for (int i = 0; i < kH2; ++i) {
    grad.w3[i * kOut + action] += dq * t.h2[i];
  }

  double dh2[kH2];
  for (int i = 0; i < kH2; ++i) {
    dh2[i] = t.h2[i] > 0.0 ? params.w3[i * kOut + action] * dq : 0.0;
  }
  for (int i = 0; i < kH2; ++i) grad.b2[i] += dh2[i];
  k.outer_accum(grad.w2.data(), t.h1, dh2, 1.0, kH1, kH2);

  double dh1[kH1];
  std::memset(dh1, 0, sizeof dh1);
  k.matvec_in_accum(dh1, params.w2.data(), dh2, kH1, kH2);
  for (int i = 0; i < kH1; ++i) {
    if (t.h1[i] <= 0.0) dh1[i] = 0.0;
  }
  for (int i = 0; i < kH1; ++i) grad.b1[i] += dh1[i];
  k.outer_accum(grad.w1.data(), state, dh1, 1.0, kIn, kH1);

  return err * err;
}

void optimizer_step(MlpParams& params, AdamState& opt, const MlpGrad& grad) {
  opt.step += 1;
  kernels::AdamConsts c;
  c.lr = opt.learning_rate;
  c.beta1 = opt.beta1;
  c.beta2 = opt.beta2;
  c.eps = opt.eps_hat;
  c.bias1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
  c.bias2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
  const auto& k = kernels::active();
  const auto update = [&](std::vector<double>& p, std::vector<double>& m,
                          std::vector<double>& v, const std::vector<double>& g) {
    k.adam_update(p.data(), m.data(), v.data(), g.data(), p.size(), c);
  };
  update(params.w1, opt.m.w1, opt.v.w1, grad.w1);
  update(params.b1, opt.m.b1, opt.v.b1, grad.b1);
  update(params.w2, opt.m.w2, opt.v.w2, grad.w2);
  update(params.b2, opt.m.b2, opt.v.b2, grad.b2);
  update(params.w3, opt.m.w3, opt.v.w3, grad.w3);
  update(params.b3, opt.m.b3, opt.v.b3, grad.b3);
}

void ReplayBuffer::push(const Experience& exp) {
  if (storage_.size() < capacity_) {
    storage_.push_back(exp);
    return;
  }
  storage_[head_] = exp;
  head_ = (head_ + 1) % capacity_;
}

const Experience& ReplayBuffer::at(std::size_t i) const {
  if (storage_.size() < capacity_) return storage_[i];
  return storage_[(head_ + i) % capacity_];
}

std::vector<Experience> ReplayBuffer::sample_batch(std::size_t batch_size,
                                                   RngStream& stream) const {
  if (size() < batch_size) {
    throw std::logic_error("sample_batch: buffer not ready");
  }
  std::vector<Experience> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    batch.push_back(storage_[stream.next_below(
        static_cast<std::uint32_t>(storage_.size()))]);
  }
  return batch;
}

double EpsilonSchedule::decay_factor() const {
  if (total_steps <= 1) return 0.0;
  return std::pow(eps_end / eps_start, 1.0 / (total_steps - 1));
}

double EpsilonSchedule::at(int step) const {
  if (step <= 0) return eps_start;
  const double eps = eps_start * std::pow(decay_factor(), step);
  return std::max(eps_end, eps);
}

int select_action(const MlpParams& params, const double* state, double epsilon,
                  RngStream& stream) {
  const double u = stream.next_unit();
  if (u < epsilon) {
    return 1 + static_cast<int>(stream.next_below(kFullMask));
  }
  double q[kOut];
  forward(params, state, q);
  return argmax_nonempty(q);
}

TrainStats td_train_step(MlpParams& online, const MlpParams& target,
                         std::span<const Experience> batch, double gamma,
                         AdamState& opt) {
  static thread_local MlpGrad grad = MlpGrad::zeros();
  grad.reset();
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss_sum = 0.0;
  double q_next[kOut];
  for (const Experience& exp : batch) {
    double td = exp.reward;
    if (!exp.done) {
      forward(target, exp.next_state.data(), q_next);
      td += gamma * max_q_nonempty(q_next);
    }
    loss_sum +=
        backward_accum(online, exp.state.data(), exp.action, td, scale, grad);
  }
  optimizer_step(online, opt, grad);
  return {loss_sum * scale};
}

void target_sync(const MlpParams& online, MlpParams& target, int interval_steps,
                 std::int64_t train_steps_done) {
  if (interval_steps <= 0) return;
  if (train_steps_done > 0 && train_steps_done % interval_steps == 0) {
    target = online;
  }
}

namespace {

constexpr char kMagic[4] = {'C', 'S', 'C', 'Q'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                        static_cast<unsigned char>(v >> 8 & 0xFF),
                        static_cast<unsigned char>(v >> 16 & 0xFF),
                        static_cast<unsigned char>(v >> 24 & 0xFF)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) |
         static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 |
         static_cast<std::uint32_t>(b[3]) << 24;
}

void put_tensor(std::ostream& out, const std::vector<double>& t) {
  // Little-endian doubles; matches the in-memory layout on every supported
  // target, so a straight byte copy is fine.
  out.write(reinterpret_cast<const char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
}

void get_tensor(std::istream& in, std::vector<double>& t) {
  in.read(reinterpret_cast<char*>(t.data()),
          static_cast<std::streamsize>(t.size() * sizeof(double)));
  if (!in) throw CheckpointError("checkpoint truncated");
}

}  // namespace

void save_checkpoint(const MlpParams& params, std::ostream& out) {
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, kIn);
  put_u32(out, kOut);
  put_tensor(out, params.w1);
  put_tensor(out, params.b1);
  put_tensor(out, params.w2);
  put_tensor(out, params.b2);
  put_tensor(out, params.w3);
  put_tensor(out, params.b3);
}

MlpParams load_checkpoint(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw CheckpointError("checkpoint has bad magic");
  }
  const std::uint32_t version = get_u32(in);
  const std::uint32_t in_dim = get_u32(in);
  const std::uint32_t out_dim = get_u32(in);
  if (!in || version != kVersion) {
    throw CheckpointError("checkpoint has unsupported version");
  }
  if (in_dim != kIn || out_dim != kOut) {
    throw CheckpointError("checkpoint dimensions do not match the network");
  }
  MlpParams p = MlpParams::zeros();
  get_tensor(in, p.w1);
  get_tensor(in, p.b1);
  get_tensor(in, p.w2);
  get_tensor(in, p.b2);
  get_tensor(in, p.w3);
  get_tensor(in, p.b3);
  return p;
}

void save_checkpoint_file(const MlpParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open checkpoint for writing: " + path);
  save_checkpoint(params, out);
  if (!out) throw CheckpointError("checkpoint write failed: " + path);
}

MlpParams load_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  return load_checkpoint(in);
}

DqnAgent::DqnAgent(const DqnConfig& config, RngStream& init_stream)
    : config_(config),
      online_(MlpParams::glorot(init_stream)),
      target_(online_),
      buffer_(config.buffer_capacity) {
  opt_.learning_rate = config.learning_rate;
}

int DqnAgent::act(const StateVector& state, double epsilon,
                  RngStream& stream) const {
  return select_action(online_, state.data(), epsilon, stream);
}

bool DqnAgent::maybe_train(RngStream& sample_stream) {
  if (!buffer_.ready(config_.batch_size)) return false;
  const auto batch = buffer_.sample_batch(config_.batch_size, sample_stream);
  td_train_step(online_, target_, batch, config_.gamma, opt_);
  train_steps_ += 1;
  target_sync(online_, target_, config_.target_sync_interval, train_steps_);
  return true;
}

}  // namespace semcom
