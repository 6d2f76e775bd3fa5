// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#include "feelsim/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace feelsim {

bool SimConfig::has_bound_params() const {
  return mu || L || G2 || Gamma || Z2 || init_gap;
}

std::size_t SimConfig::model_dim() const {
  if (model == "softmax")
    return static_cast<std::size_t>(dataset_classes) * (dataset_features + 1);
  return dataset_features;
}

const char* to_string(DownlinkMode m) {
  switch (m) {
    case DownlinkMode::kDigital: return "digital";
    case DownlinkMode::kAnalog: return "analog";
    case DownlinkMode::kErrorFree: return "errorfree";
  }
  return "?";
}

const char* to_string(UplinkMode m) {
  return m == UplinkMode::kAnalog ? "analog" : "errorfree";
}

const char* to_string(PartitionMode m) {
  return m == PartitionMode::kIid ? "iid" : "noniid";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_u64(const std::string& raw, std::uint64_t& out) {
  const std::string v = trim(raw);
  if (v.empty() || v[0] == '-' || v[0] == '+') return false;
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (errno != 0 || end != v.c_str() + v.size()) return false;
  out = static_cast<std::uint64_t>(x);
  return true;
}

bool parse_double(const std::string& raw, double& out) {
  const std::string v = trim(raw);
  if (v.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (errno != 0 || end != v.c_str() + v.size() || !std::isfinite(x))
    return false;
  out = x;
  return true;
}

template <typename T>
bool parse_uint_field(const std::string& raw, T& field) {
  std::uint64_t x = 0;
  if (!parse_u64(raw, x) || x > static_cast<std::uint64_t>(
                                    std::numeric_limits<T>::max()))
    return false;
  field = static_cast<T>(x);
  return true;
}

// Applies one key; returns false (with a message appended) on failure.
bool set_key(SimConfig& cfg, const std::string& key, const std::string& value,
             const std::string& pos, Diagnostics& diag) {
  auto fail = [&](const std::string& why) {
    diag.errors.push_back(pos + ": " + why);
    return false;
  };
  auto need_u32 = [&](std::uint32_t& f) {
    return parse_uint_field(value, f) ||
           fail("value for '" + key + "' must be a nonnegative integer, got '" +
                value + "'");
  };
  auto need_u64 = [&](std::uint64_t& f) {
    return parse_uint_field(value, f) ||
           fail("value for '" + key + "' must be a nonnegative integer, got '" +
                value + "'");
  };
  auto need_size = [&](std::size_t& f) {
    return parse_uint_field(value, f) ||
           fail("value for '" + key + "' must be a nonnegative integer, got '" +
                value + "'");
  };
  auto need_real = [&](double& f) {
    return parse_double(value, f) ||
           fail("value for '" + key + "' must be a finite number, got '" +
                value + "'");
  };
  auto need_opt_real = [&](std::optional<double>& f) {
    double x = 0.0;
    if (!parse_double(value, x))
      return fail("value for '" + key + "' must be a finite number, got '" +
                  value + "'");
    f = x;
    return true;
  };

  if (key == "downlink") {
    if (value == "digital") cfg.downlink = DownlinkMode::kDigital;
    else if (value == "analog") cfg.downlink = DownlinkMode::kAnalog;
    else if (value == "errorfree") cfg.downlink = DownlinkMode::kErrorFree;
    else return fail("downlink must be digital, analog, or errorfree, got '" +
                     value + "'");
    return true;
  }
  if (key == "uplink") {
    if (value == "analog") cfg.uplink = UplinkMode::kAnalog;
    else if (value == "errorfree") cfg.uplink = UplinkMode::kErrorFree;
    else return fail("uplink must be analog or errorfree, got '" + value +
                     "'");
    return true;
  }
  if (key == "partition") {
    if (value == "iid") cfg.partition = PartitionMode::kIid;
    else if (value == "noniid") cfg.partition = PartitionMode::kNonIid;
    else return fail("partition must be iid or noniid, got '" + value + "'");
    return true;
  }
  if (key == "model") {
    if (value != "least_squares" && value != "softmax")
      return fail("model must be least_squares or softmax, got '" + value +
                  "'");
    cfg.model = value;
    return true;
  }
  if (key == "dataset_path") {
    cfg.dataset_path = value;
    return true;
  }
  if (key == "M") return need_u32(cfg.M);
  if (key == "T") return need_u64(cfg.T);
  if (key == "tau") return need_u32(cfg.tau);
  if (key == "batch_size") return need_u32(cfg.batch_size);
  if (key == "s") return need_u32(cfg.s);
  if (key == "n_dl") return need_size(cfg.n_dl);
  if (key == "n_ul") return need_size(cfg.n_ul);
  if (key == "dataset_samples") return need_size(cfg.dataset_samples);
  if (key == "dataset_features") return need_size(cfg.dataset_features);
  if (key == "dataset_classes") return need_u32(cfg.dataset_classes);
  if (key == "seed") return need_u64(cfg.seed);
  if (key == "eta0") return need_real(cfg.eta0);
  if (key == "eta_decay") return need_real(cfg.eta_decay);
  if (key == "P_dl") return need_real(cfg.P_dl);
  if (key == "P_ul") return need_real(cfg.P_ul);
  if (key == "sigma_dl") return need_real(cfg.sigma_dl);
  if (key == "sigma_ul") return need_real(cfg.sigma_ul);
  if (key == "lambda_thr") return need_real(cfg.lambda_thr);
  if (key == "test_fraction") return need_real(cfg.test_fraction);
  if (key == "mu") return need_opt_real(cfg.mu);
  if (key == "L") return need_opt_real(cfg.L);
  if (key == "G2") return need_opt_real(cfg.G2);
  if (key == "Gamma") return need_opt_real(cfg.Gamma);
  if (key == "Z2") return need_opt_real(cfg.Z2);
  if (key == "init_gap") return need_opt_real(cfg.init_gap);
  return fail("unknown key '" + key + "'");
}

}  // namespace

SimConfig parse_config_text(const std::string& text, const std::string& name,
                            Diagnostics& diag) {
  SimConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string pos = name + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      diag.errors.push_back(pos + ": expected 'key = value', got '" +
                            stripped + "'");
      continue;
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      diag.errors.push_back(pos + ": missing key before '='");
      continue;
    }
    if (!seen.insert(key).second) {
      diag.errors.push_back(pos + ": duplicate key '" + key + "'");
      continue;
    }
    set_key(cfg, key, value, pos, diag);
  }
  return cfg;
}

SimConfig load_config(const std::string& path, Diagnostics& diag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    diag.errors.push_back(path + ": cannot open config file");
    return SimConfig{};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path, diag);
}

void apply_override(SimConfig& cfg, const std::string& kv, Diagnostics& diag) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) {
    diag.errors.push_back("--set " + kv + ": expected key=value");
    return;
  }
  const std::string key = trim(kv.substr(0, eq));
  const std::string value = trim(kv.substr(eq + 1));
  if (key.empty()) {
    diag.errors.push_back("--set " + kv + ": missing key");
    return;
  }
  set_key(cfg, key, value, "--set " + key, diag);
}

void validate_config(const SimConfig& cfg, Diagnostics& diag) {
  auto err = [&](const std::string& m) { diag.errors.push_back(m); };

  if (cfg.M == 0) err("M must be >= 1");
  if (cfg.T == 0) err("T must be >= 1");
  if (cfg.tau == 0) err("tau must be >= 1");
  if (!(cfg.eta0 > 0.0)) err("eta0 must be > 0");
  if (!(cfg.eta_decay >= 0.0)) err("eta_decay must be >= 0");
  if (!(cfg.P_dl > 0.0)) err("P_dl must be > 0");
  if (!(cfg.P_ul > 0.0)) err("P_ul must be > 0");
  if (!(cfg.sigma_dl > 0.0)) err("sigma_dl must be > 0");
  if (!(cfg.sigma_ul > 0.0)) err("sigma_ul must be > 0");
  if (!(cfg.lambda_thr >= 0.0)) err("lambda_thr must be >= 0");
  if (!(cfg.test_fraction >= 0.0 && cfg.test_fraction < 1.0))
    err("test_fraction must be in [0, 1)");
  if (cfg.model == "softmax" && cfg.dataset_classes < 2)
    err("softmax model needs dataset_classes >= 2");

  const bool synthetic = cfg.dataset_path.empty();
  if (synthetic) {
    if (cfg.dataset_samples == 0) err("dataset_samples must be >= 1");
    if (cfg.dataset_features == 0) err("dataset_features must be >= 1");
    if (cfg.dataset_classes == 0) err("dataset_classes must be >= 1");
  }

  if (cfg.downlink == DownlinkMode::kDigital) {
    if (cfg.s == 0) {
      err("digital downlink requires sparsity s >= 1");
    } else if (synthetic && cfg.s > cfg.model_dim()) {
      err("s = " + std::to_string(cfg.s) + " exceeds the model dimension " +
          std::to_string(cfg.model_dim()));
    }
  }

  if (cfg.partition == PartitionMode::kNonIid && synthetic) {
    const std::uint64_t classes = cfg.dataset_classes;
    if (classes < 2) {
      err("noniid partition needs at least 2 classes");
    } else {
      if (classes == 10 && cfg.M % 5 != 0)
        err("noniid partition with 10 classes requires M divisible by 5 "
            "(each device takes two of the 2M class shards), got M = " +
            std::to_string(cfg.M));
      if ((2ull * cfg.M) % classes != 0)
        err("noniid partition requires 2*M divisible by dataset_classes, "
            "got M = " + std::to_string(cfg.M) + ", classes = " +
            std::to_string(classes));
    }
  }

  if (cfg.mu && !(*cfg.mu > 0.0)) err("mu must be > 0");
  if (cfg.L && !(*cfg.L > 0.0)) err("L must be > 0");
  if (cfg.G2 && !(*cfg.G2 >= 0.0)) err("G2 must be >= 0");
  if (cfg.Gamma && !(*cfg.Gamma >= 0.0)) err("Gamma must be >= 0");
  if (cfg.Z2 && !(*cfg.Z2 >= 0.0)) err("Z2 must be >= 0");
  if (cfg.init_gap && !(*cfg.init_gap >= 0.0)) err("init_gap must be >= 0");

  if (cfg.mu && *cfg.mu > 0.0 && cfg.tau >= 1 && cfg.eta0 > 0.0) {
    const double mu = *cfg.mu;
    const double cap =
        std::min(mu / (mu + 1.0), 1.0 / (mu * static_cast<double>(cfg.tau)));
    if (cfg.eta0 > cap) {
      std::ostringstream w;
      w << "eta0 = " << cfg.eta0
        << " violates the convergence-bound step-size precondition "
           "0 < eta(t) <= min{mu/(mu+1), 1/(mu*tau)} = "
        << cap << " (mu = " << mu << ", tau = " << cfg.tau
        << "); the analytic bound does not apply to this run";
      diag.warnings.push_back(w.str());
    }
  }
}

}  // namespace feelsim
