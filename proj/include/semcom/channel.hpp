#pragma once
// Rayleigh-fading link model: unit-mean exponential power gain, clamped
// instantaneous SNR, Shannon rate, and the per-slot byte budget.

#include <cstdint>

#include "semcom/rng.hpp"

namespace semcom {

struct ChannelParams {
  double bandwidth_hz = 1.4e6;
  double snr_clamp_db_min = -13.0;
  double snr_clamp_db_max = 30.0;
  double slot_ms = 50.0;
  // Per-user mean SNR is drawn once at setup, uniformly from this interval.
  double mean_snr_low_db = 0.0;
  double mean_snr_high_db = 20.0;
};

struct ChannelDraw {
  double power_gain = 1.0;
  double instantaneous_snr_db = 0.0;
  double rate_bps = 0.0;
  std::int64_t byte_budget = 0;
};

// Rayleigh amplitude <=> exponential power gain with mean 1: g = -ln(u).
double sample_power_gain(RngStream& stream);

double snr_instantaneous(double mean_snr_db, double power_gain,
                         double clamp_min_db, double clamp_max_db);

// B * log2(1 + 10^(snr_db/10)), in bits/s.
double shannon_rate(double bandwidth_hz, double snr_db);

// floor(rate * slot_ms / 1000 / 8), in bytes.
std::int64_t slot_byte_budget(double rate_bps, double slot_ms);

ChannelDraw draw_channel(const ChannelParams& params, double mean_snr_db,
                         RngStream& stream);

}  // namespace semcom
