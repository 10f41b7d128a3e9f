#include "semcom/channel.hpp"

#include <algorithm>
#include <cmath>

namespace semcom {

double sample_power_gain(RngStream& stream) {
  return -std::log(stream.next_unit());
}

double snr_instantaneous(double mean_snr_db, double power_gain,
                         double clamp_min_db, double clamp_max_db) {
  const double snr = mean_snr_db + 10.0 * std::log10(power_gain);
  return std::clamp(snr, clamp_min_db, clamp_max_db);
}

double shannon_rate(double bandwidth_hz, double snr_db) {
  return bandwidth_hz * std::log2(1.0 + std::pow(10.0, snr_db / 10.0));
}

std::int64_t slot_byte_budget(double rate_bps, double slot_ms) {
  return static_cast<std::int64_t>(std::floor(rate_bps * slot_ms / 1000.0 / 8.0));
}

ChannelDraw draw_channel(const ChannelParams& params, double mean_snr_db,
                         RngStream& stream) {
  ChannelDraw d;
  d.power_gain = sample_power_gain(stream);
  d.instantaneous_snr_db =
      snr_instantaneous(mean_snr_db, d.power_gain, params.snr_clamp_db_min,
                        params.snr_clamp_db_max);
  d.rate_bps = shannon_rate(params.bandwidth_hz, d.instantaneous_snr_db);
  d.byte_budget = slot_byte_budget(d.rate_bps, params.slot_ms);
  return d;
}

}  // namespace semcom
