#include "semcom/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace semcom {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (!s.empty() && s.back() == ',') out.push_back("");
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& why) {
  throw ConfigError("config key " + key + ": " + why + " (got \"" + value +
                    "\")");
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(value, &pos);
    if (pos != value.size()) bad_value(key, value, "not a number");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value, "not a number");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) bad_value(key, value, "not an integer");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value, "not an integer");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) bad_value(key, value, "not an unsigned integer");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value, "not an unsigned integer");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "expected true/false");
}

std::vector<Method> parse_methods(const std::string& key,
                                  const std::string& value) {
  std::vector<Method> out;
  for (const std::string& name : split_csv(value)) {
    const auto m = method_from_name(name);
    if (!m) bad_value(key, value, "unknown method \"" + name + "\"");
    out.push_back(*m);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  for (const std::string& item : split_csv(value)) {
    out.push_back(parse_double(key, item));
  }
  return out;
}

// Shortest decimal rendering that parses back to the same double.
std::string render_double(double v) {
  char buf[40];
  for (const int prec : {6, 9, 12, 15, 17}) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

std::string render_methods(const std::vector<Method>& methods) {
  std::string out;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (i) out += ",";
    out += method_name(methods[i]);
  }
  return out;
}

std::string render_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += render_double(values[i]);
  }
  return out;
}

}  // namespace

void apply_config_kv(SimConfig& c, const std::string& key,
                     const std::string& value) {
  if (key == "sim.n_users") {
    c.n_users = static_cast<int>(parse_int(key, value));
  } else if (key == "sim.n_steps") {
    c.n_steps = static_cast<int>(parse_int(key, value));
  } else if (key == "sim.outage_prob") {
    c.outage_prob = parse_double(key, value);
  } else if (key == "sim.theta") {
    c.theta = parse_double(key, value);
  } else if (key == "sim.thresholds") {
    c.thresholds = parse_double_list(key, value);
  } else if (key == "sim.methods") {
    c.methods = parse_methods(key, value);
  } else if (key == "sim.master_seed") {
    c.master_seed = parse_u64(key, value);
  } else if (key == "sim.train") {
    c.train = parse_bool(key, value);
  } else if (key == "sim.latency_tolerance_ms") {
    c.latency_tolerance_ms = parse_double(key, value);
  } else if (key == "channel.bandwidth_hz") {
    c.channel.bandwidth_hz = parse_double(key, value);
  } else if (key == "channel.slot_ms") {
    c.channel.slot_ms = parse_double(key, value);
  } else if (key == "channel.snr_clamp_db_min") {
    c.channel.snr_clamp_db_min = parse_double(key, value);
  } else if (key == "channel.snr_clamp_db_max") {
    c.channel.snr_clamp_db_max = parse_double(key, value);
  } else if (key == "channel.mean_snr_low_db") {
    c.channel.mean_snr_low_db = parse_double(key, value);
  } else if (key == "channel.mean_snr_high_db") {
    c.channel.mean_snr_high_db = parse_double(key, value);
  } else if (key == "fidelity.alpha") {
    c.matrix.alpha = parse_double(key, value);
  } else if (key == "fidelity.lambda") {
    c.retx_lambda = parse_double(key, value);
  } else if (key == "fidelity.k_max_cap") {
    c.k_max_cap = static_cast<int>(parse_int(key, value));
  } else if (key == "fidelity.payload_bytes") {
    const auto items = split_csv(value);
    if (items.size() != kNumModalities) {
      bad_value(key, value, "expected 5 comma-separated byte counts");
    }
    for (int i = 0; i < kNumModalities; ++i) {
      c.specs[i].nominal_payload_bytes = parse_int(key, items[i]);
    }
  } else if (key == "fidelity.utility_matrix") {
    const auto items = split_csv(value);
    if (items.size() != kNumCategories * kNumModalities) {
      bad_value(key, value, "expected 20 comma-separated values (row-major)");
    }
    int idx = 0;
    for (int cat = 0; cat < kNumCategories; ++cat) {
      for (int m = 0; m < kNumModalities; ++m) {
        c.matrix.u[cat][m] = parse_double(key, items[idx++]);
      }
    }
  } else if (key == "dqn.learning_rate") {
    c.dqn.learning_rate = parse_double(key, value);
  } else if (key == "dqn.gamma") {
    c.dqn.gamma = parse_double(key, value);
  } else if (key == "dqn.buffer_capacity") {
    c.dqn.buffer_capacity = static_cast<std::size_t>(parse_int(key, value));
  } else if (key == "dqn.batch_size") {
    c.dqn.batch_size = static_cast<std::size_t>(parse_int(key, value));
  } else if (key == "dqn.eps_start") {
    c.dqn.schedule.eps_start = parse_double(key, value);
  } else if (key == "dqn.eps_end") {
    c.dqn.schedule.eps_end = parse_double(key, value);
  } else if (key == "dqn.eps_decay_steps") {
    c.dqn.schedule.total_steps = static_cast<int>(parse_int(key, value));
  } else if (key == "dqn.target_sync_interval") {
    c.dqn.target_sync_interval = static_cast<int>(parse_int(key, value));
  } else if (key == "llm.mode") {
    if (value == "mock") {
      c.use_external_llm = false;
    } else if (value == "external") {
      c.use_external_llm = true;
    } else {
      bad_value(key, value, "expected mock or external");
    }
  } else if (key == "llm.endpoint_url") {
    c.llm.endpoint_url = value;
  } else if (key == "llm.model_name") {
    c.llm.model_name = value;
  } else if (key == "llm.timeout_ms") {
    c.llm.timeout_ms = static_cast<int>(parse_int(key, value));
  } else if (key == "llm.max_retries") {
    c.llm.max_retries = static_cast<int>(parse_int(key, value));
  } else if (key == "llm.api_key_env_var") {
    c.llm.api_key_env_var = value;
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

void validate_config(const SimConfig& c) {
  const auto require = [](bool ok, const std::string& key,
                          const std::string& why) {
    if (!ok) throw ConfigError("config key " + key + ": " + why);
  };
  require(c.n_users >= 1, "sim.n_users", "must be at least 1");
  require(c.n_steps >= 1, "sim.n_steps", "must be at least 1");
  require(c.outage_prob >= 0.0 && c.outage_prob <= 1.0, "sim.outage_prob",
          "must lie in [0, 1]");
  require(c.theta > 0.0 && c.theta <= 1.0, "sim.theta",
          "must lie in (0, 1]");
  require(!c.thresholds.empty(), "sim.thresholds", "must be nonempty");
  for (const double t : c.thresholds) {
    require(t > 0.0 && t <= 1.0, "sim.thresholds",
            "every threshold must lie in (0, 1]");
  }
  require(!c.methods.empty(), "sim.methods", "must be nonempty");
  require(c.channel.bandwidth_hz > 0.0, "channel.bandwidth_hz",
          "must be positive");
  require(c.channel.slot_ms > 0.0, "channel.slot_ms", "must be positive");
  require(c.channel.snr_clamp_db_min <= c.channel.snr_clamp_db_max,
          "channel.snr_clamp_db_min", "clamp interval is empty");
  require(c.channel.mean_snr_low_db <= c.channel.mean_snr_high_db,
          "channel.mean_snr_low_db", "mean SNR interval is empty");
  require(c.latency_tolerance_ms >= c.channel.slot_ms,
          "sim.latency_tolerance_ms",
          "must allow at least one slot-length transmission attempt");
  require(c.matrix.alpha > 0.0 && c.matrix.alpha <= 1.0, "fidelity.alpha",
          "must lie in (0, 1]");
  require(c.retx_lambda >= 0.0, "fidelity.lambda", "must be nonnegative");
  require(c.k_max_cap >= 1, "fidelity.k_max_cap", "must be at least 1");
  for (int i = 0; i < kNumModalities; ++i) {
    require(c.specs[i].nominal_payload_bytes > 0, "fidelity.payload_bytes",
            "payload sizes must be positive");
  }
  require(c.specs[static_cast<int>(Modality::Text)].nominal_payload_bytes ==
              kEmbeddingDim * 4,
          "fidelity.payload_bytes",
          "text payload is fixed at embedding_dim * 4 = 1536 bytes");
  for (int cat = 0; cat < kNumCategories; ++cat) {
    for (int m = 0; m < kNumModalities; ++m) {
      require(c.matrix.u[cat][m] >= 0.0 && c.matrix.u[cat][m] <= 1.0,
              "fidelity.utility_matrix", "entries must lie in [0, 1]");
    }
  }
  require(c.dqn.learning_rate > 0.0, "dqn.learning_rate", "must be positive");
  require(c.dqn.gamma >= 0.0 && c.dqn.gamma <= 1.0, "dqn.gamma",
          "must lie in [0, 1]");
  require(c.dqn.buffer_capacity >= 1, "dqn.buffer_capacity",
          "must be at least 1");
  require(c.dqn.batch_size >= 1, "dqn.batch_size", "must be at least 1");
  require(c.dqn.batch_size <= c.dqn.buffer_capacity, "dqn.batch_size",
          "cannot exceed dqn.buffer_capacity");
  require(c.dqn.schedule.eps_start >= 0.0 && c.dqn.schedule.eps_start <= 1.0,
          "dqn.eps_start", "must lie in [0, 1]");
  require(c.dqn.schedule.eps_end >= 0.0 &&
              c.dqn.schedule.eps_end <= c.dqn.schedule.eps_start,
          "dqn.eps_end", "must lie in [0, eps_start]");
  require(c.dqn.schedule.total_steps >= 1, "dqn.eps_decay_steps",
          "must be at least 1");
  require(c.dqn.target_sync_interval >= 1, "dqn.target_sync_interval",
          "must be at least 1");
  require(c.llm.timeout_ms > 0, "llm.timeout_ms", "must be positive");
  require(c.llm.max_retries >= 0, "llm.max_retries", "must be nonnegative");
}

SimConfig load_config(
    const std::optional<std::string>& path,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  SimConfig config;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open config file: " + *path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string stripped = trim(line);
      if (stripped.empty() || stripped[0] == '#') continue;
      const auto eq = stripped.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(*path + ":" + std::to_string(line_no) +
                          ": expected key=value");
      }
      apply_config_kv(config, trim(stripped.substr(0, eq)),
                      trim(stripped.substr(eq + 1)));
    }
  }
  for (const auto& [key, value] : overrides) {
    apply_config_kv(config, key, value);
  }
  validate_config(config);
  return config;
}

std::vector<std::pair<std::string, std::string>> echo_config(
    const SimConfig& c) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto add = [&out](const std::string& k, const std::string& v) {
    out.emplace_back(k, v);
  };
  add("sim.n_users", std::to_string(c.n_users));
  add("sim.n_steps", std::to_string(c.n_steps));
  add("sim.outage_prob", render_double(c.outage_prob));
  add("sim.theta", render_double(c.theta));
  add("sim.thresholds", render_doubles(c.thresholds));
  add("sim.methods", render_methods(c.methods));
  add("sim.master_seed", std::to_string(c.master_seed));
  add("sim.train", c.train ? "true" : "false");
  add("sim.latency_tolerance_ms", render_double(c.latency_tolerance_ms));
  add("channel.bandwidth_hz", render_double(c.channel.bandwidth_hz));
  add("channel.slot_ms", render_double(c.channel.slot_ms));
  add("channel.snr_clamp_db_min", render_double(c.channel.snr_clamp_db_min));
  add("channel.snr_clamp_db_max", render_double(c.channel.snr_clamp_db_max));
  add("channel.mean_snr_low_db", render_double(c.channel.mean_snr_low_db));
  add("channel.mean_snr_high_db", render_double(c.channel.mean_snr_high_db));
  add("fidelity.alpha", render_double(c.matrix.alpha));
  add("fidelity.lambda", render_double(c.retx_lambda));
  add("fidelity.k_max_cap", std::to_string(c.k_max_cap));
  {
    std::string payloads;
    for (int i = 0; i < kNumModalities; ++i) {
      if (i) payloads += ",";
      payloads += std::to_string(c.specs[i].nominal_payload_bytes);
    }
    add("fidelity.payload_bytes", payloads);
  }
  {
    std::string matrix;
    for (int cat = 0; cat < kNumCategories; ++cat) {
      for (int m = 0; m < kNumModalities; ++m) {
        if (cat || m) matrix += ",";
        matrix += render_double(c.matrix.u[cat][m]);
      }
    }
    add("fidelity.utility_matrix", matrix);
  }
  add("dqn.learning_rate", render_double(c.dqn.learning_rate));
  add("dqn.gamma", render_double(c.dqn.gamma));
  add("dqn.buffer_capacity", std::to_string(c.dqn.buffer_capacity));
  add("dqn.batch_size", std::to_string(c.dqn.batch_size));
  add("dqn.eps_start", render_double(c.dqn.schedule.eps_start));
  add("dqn.eps_end", render_double(c.dqn.schedule.eps_end));
  add("dqn.eps_decay_steps", std::to_string(c.dqn.schedule.total_steps));
  add("dqn.target_sync_interval", std::to_string(c.dqn.target_sync_interval));
  add("llm.mode", c.use_external_llm ? "external" : "mock");
  add("llm.endpoint_url", c.llm.endpoint_url);
  add("llm.model_name", c.llm.model_name);
  add("llm.timeout_ms", std::to_string(c.llm.timeout_ms));
  add("llm.max_retries", std::to_string(c.llm.max_retries));
  add("llm.api_key_env_var", c.llm.api_key_env_var);
  return out;
}

}  // namespace semcom
