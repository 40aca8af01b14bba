// SPDX-License-Identifier: Apache-2.0
//
// lrsim - uplink simulator for reflecting-surface channels with non-ideal hardware
// Copyright (C) 2026 the lrsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "lrsim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lrsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
  }
  if (pos != value.size()) {
    throw std::invalid_argument("config: trailing characters in value for '" + key + "': " + value);
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  if (!value.empty() && value[0] == '-') {
    throw std::invalid_argument("config: '" + key + "' must be non-negative, got " + value);
  }
  std::size_t pos = 0;
  std::uint64_t out = 0;
  try {
    out = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer value for '" + key + "': " + value);
  }
  if (pos != value.size()) {
    throw std::invalid_argument("config: trailing characters in value for '" + key + "': " + value);
  }
  return out;
}

} // namespace

SignalParams SignalParams::from_power(double p) {
  SignalParams sig;
  sig.pilot_power = p;
  sig.pilot_symbol = {std::sqrt(p), 0.0};
  return sig;
}

std::string ValidationReport::joined() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v;
  }
  return out;
}

ValidationReport validate_config(const SystemDims& dims, const ImpairmentParams& imp,
                                 const SignalParams& sig) {
  ValidationReport report;
  auto fail = [&report](const char* msg) { report.violations.emplace_back(msg); };

  if (dims.bs_antennas < 1) fail("bs_antennas >= 1");

  // Written so that NaN trips the violation too.
  if (!(imp.kappa_ue >= 0.0 && imp.kappa_ue < 1.0)) fail("kappa_ue in [0,1)");
  if (!(imp.kappa_bs >= 0.0 && imp.kappa_bs < 1.0)) fail("kappa_bs in [0,1)");
  if (!(imp.noise_power > 0.0) || !std::isfinite(imp.noise_power)) fail("noise_power > 0");

  if (!(imp.phase_noise.spread >= 0.0) || !std::isfinite(imp.phase_noise.spread)) {
    fail("phase_noise_spread >= 0");
  } else if (imp.phase_noise.family == PhaseNoiseFamily::uniform &&
             imp.phase_noise.spread > kPi) {
    fail("uniform phase_noise_spread <= pi (support must stay inside [-pi, pi))");
  }

  if (!(sig.pilot_power > 0.0) || !std::isfinite(sig.pilot_power)) fail("pilot_power > 0");
  const double sym_power = std::norm(sig.pilot_symbol);
  if (sig.pilot_power > 0.0 && std::isfinite(sig.pilot_power) &&
      !(std::abs(sym_power - sig.pilot_power) <= 1e-9 * sig.pilot_power)) {
    fail("|pilot_symbol|^2 == pilot_power");
  }
  return report;
}

ValidationReport validate_config(const SimConfig& cfg) {
  ValidationReport report = validate_config(cfg.dims, cfg.impairments, cfg.signal);
  if (cfg.trials < 1) report.violations.emplace_back("trials >= 1");
  return report;
}

const char* to_string(PhaseNoiseFamily family) {
  switch (family) {
    case PhaseNoiseFamily::none: return "none";
    case PhaseNoiseFamily::uniform: return "uniform";
    case PhaseNoiseFamily::von_mises: return "von-mises";
  }
  return "none";
}

PhaseNoiseFamily phase_noise_family_from_string(const std::string& name) {
  if (name == "none") return PhaseNoiseFamily::none;
  if (name == "uniform") return PhaseNoiseFamily::uniform;
  if (name == "von-mises" || name == "von_mises") return PhaseNoiseFamily::von_mises;
  throw std::invalid_argument("config: unknown phase_noise_family '" + name + "'");
}

SimConfig parse_config_text(const std::string& text) {
  SimConfig cfg;
  double pilot_power = cfg.signal.pilot_power;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "m") {
      cfg.dims.bs_antennas = parse_u64(key, value);
    } else if (key == "n") {
      cfg.dims.lrs_elements = parse_u64(key, value);
    } else if (key == "kappa_ue") {
      cfg.impairments.kappa_ue = parse_double(key, value);
    } else if (key == "kappa_bs") {
      cfg.impairments.kappa_bs = parse_double(key, value);
    } else if (key == "noise_power") {
      cfg.impairments.noise_power = parse_double(key, value);
    } else if (key == "pilot_power") {
      pilot_power = parse_double(key, value);
    } else if (key == "phase_noise_family") {
      cfg.impairments.phase_noise.family = phase_noise_family_from_string(value);
    } else if (key == "phase_noise_spread") {
      cfg.impairments.phase_noise.spread = parse_double(key, value);
    } else if (key == "seed") {
      cfg.rng.master_seed = parse_u64(key, value);
    } else if (key == "trials") {
      cfg.trials = parse_u64(key, value);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  cfg.signal = SignalParams::from_power(pilot_power);
  return cfg;
}

SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string to_config_text(const SimConfig& cfg) {
  std::ostringstream out;
  out << "m = " << cfg.dims.bs_antennas << "\n";
  out << "n = " << cfg.dims.lrs_elements << "\n";
  out << "kappa_ue = " << cfg.impairments.kappa_ue << "\n";
  out << "kappa_bs = " << cfg.impairments.kappa_bs << "\n";
  out << "noise_power = " << cfg.impairments.noise_power << "\n";
  out << "pilot_power = " << cfg.signal.pilot_power << "\n";
  out << "phase_noise_family = " << to_string(cfg.impairments.phase_noise.family) << "\n";
  out << "phase_noise_spread = " << cfg.impairments.phase_noise.spread << "\n";
  out << "seed = " << cfg.rng.master_seed << "\n";
  out << "trials = " << cfg.trials << "\n";
  return out.str();
}

} // namespace lrsim
