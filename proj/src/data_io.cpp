// Copyright 2026 The vacaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vacaug/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>

#include "vacaug/errors.hpp"
#include "vacaug/parallel.hpp"
#include "vacaug/physics.hpp"
#include "vacaug/rng.hpp"

namespace fs = std::filesystem;

namespace vacaug {

void GroundTruthSet::validate(std::size_t min_events) const {
  if (curves.size() < min_events) {
    throw ValidationError("ground truth '" + label + "' has " + std::to_string(curves.size()) +
                          " events, need at least " + std::to_string(min_events));
  }
  for (const auto& c : curves) {
    c.validate();
    if (c.chamber.volume_m3 != curves.front().chamber.volume_m3) {
      throw ValidationError("events in '" + label + "' do not share one chamber volume");
    }
  }
}

void SyntheticCorpusSpec::validate() const {
  if (n_events == 0) throw ValidationError("synthetic corpus needs at least one event");
  if (!(p0_mean > 0.0)) throw ValidationError("p0_mean must be positive");
  if (!(p0_std >= 0.0)) throw ValidationError("p0_std must be non-negative");
  if (!(t_mean > 0.0)) throw ValidationError("t_mean must be positive");
  if (!(t_std >= 0.0)) throw ValidationError("t_std must be non-negative");
  if (speed_archetypes == 0) throw ValidationError("speed_archetypes must be positive");
  if (!(noise_rel >= 0.0 && noise_rel < 0.1)) throw ValidationError("noise_rel must lie in [0, 0.1)");
  if (!(sample_interval_s > 0.0)) throw ValidationError("sample_interval_s must be positive");
  chamber.validate();
}

void to_json(nlohmann::json& j, const ChamberSpec& c) {
  j = {{"volume_m3", c.volume_m3}, {"leak_flow", c.leak_flow}, {"surface_flow", c.surface_flow}};
}

void from_json(const nlohmann::json& j, ChamberSpec& c) {
  c.volume_m3 = j.at("volume_m3").get<double>();
  c.leak_flow = j.value("leak_flow", 0.0);
  c.surface_flow = j.value("surface_flow", 0.0);
}

void to_json(nlohmann::json& j, const SyntheticCorpusSpec& s) {
  j = {{"n_events", s.n_events},
       {"p0_mean", s.p0_mean},
       {"p0_std", s.p0_std},
       {"t_mean", s.t_mean},
       {"t_std", s.t_std},
       {"chamber", s.chamber},
       {"speed_archetypes", s.speed_archetypes},
       {"noise_rel", s.noise_rel},
       {"sample_interval_s", s.sample_interval_s},
       {"seed", s.seed},
       {"label", s.label}};
}

namespace {

struct Archetype {
  double rate;      // initial speed per unit volume, 1/s
  double floor;     // late speed as a fraction of the initial one
  double center;    // normalized time of the decay midpoint
  double steepness;
};

Archetype archetype_params(std::size_t index) {
  static constexpr Archetype kTable[] = {
      {0.030, 0.06, 0.20, 18.0}, {0.045, 0.10, 0.30, 12.0}, {0.060, 0.04, 0.15, 24.0},
      {0.038, 0.08, 0.25, 15.0}, {0.052, 0.12, 0.35, 10.0}, {0.068, 0.05, 0.18, 20.0},
  };
  constexpr std::size_t kCount = std::size(kTable);
  Archetype a = kTable[index % kCount];
  a.rate *= 1.0 + 0.07 * static_cast<double>(index / kCount);
  return a;
}

// Draws N(mean, std) until the value is >= lower. Zero spread clamps instead.
double draw_truncated_below(Rng& rng, double mean, double std, double lower) {
  if (std == 0.0) return std::max(mean, lower);
  std::normal_distribution<double> normal(mean, std);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double v = normal(rng);
    if (v >= lower) return v;
  }
  throw ValidationError("synthetic draw: truncation bound unreachable");
}

}  // namespace

std::vector<double> synthetic_archetype(std::size_t index, std::span<const double> u,
                                        const ChamberSpec& chamber) {
  const Archetype a = archetype_params(index);
  std::vector<double> speed(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double decay = 1.0 / (1.0 + std::exp(a.steepness * (u[k] - a.center)));
    speed[k] = chamber.volume_m3 * a.rate * (a.floor + (1.0 - a.floor) * decay);
  }
  return speed;
}

GroundTruthSet generate_synthetic(const SyntheticCorpusSpec& spec) {
  spec.validate();
  GroundTruthSet set;
  set.label = spec.label;
  set.curves.resize(spec.n_events);
  for (std::size_t i = 0; i < spec.n_events; ++i) {
    Rng rng = make_stream(spec.seed, i);
    const double p0 = draw_truncated_below(rng, spec.p0_mean, spec.p0_std,
                                           std::numeric_limits<double>::min());
    const double t = draw_truncated_below(rng, spec.t_mean, spec.t_std, kMinSyntheticPumpDownTime);
    std::uniform_int_distribution<std::size_t> pick(0, spec.speed_archetypes - 1);
    const std::size_t archetype = pick(rng);

    const auto steps = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(t / spec.sample_interval_s)));
    std::vector<double> u(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      u[k] = (static_cast<double>(k) + 0.5) / static_cast<double>(steps);
    }
    const auto profile = synthetic_archetype(archetype, u, spec.chamber);
    PumpDownCurve curve =
        physics::reconstruct_curve(spec.chamber, quantize_decimal(p0), profile, spec.sample_interval_s);

    if (spec.noise_rel > 0.0) {
      std::uniform_real_distribution<double> jitter(-spec.noise_rel, spec.noise_rel);
      for (std::size_t k = 1; k < curve.pressures_mbar.size(); ++k) {
        curve.pressures_mbar[k] *= 1.0 + jitter(rng);
      }
      // The recorded minimum is the end-of-event value.
      curve.pressures_mbar.back() = curve.min_pressure();
    }
    for (auto& t_k : curve.times_s) t_k = quantize_decimal(t_k);
    for (auto& p : curve.pressures_mbar) p = quantize_decimal(p);

    char id[32];
    std::snprintf(id, sizeof id, "event_%05zu", i);
    curve.event_id = id;
    set.curves[i] = std::move(curve);
  }
  return set;
}

std::string format_decimal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

double quantize_decimal(double value) {
  const std::string s = format_decimal(value);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

void write_curve_csv(const fs::path& path, const PumpDownCurve& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "time_s,pressure_mbar\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << format_decimal(curve.times_s[i]) << ',' << format_decimal(curve.pressures_mbar[i]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

PumpDownCurve read_curve_csv(const fs::path& path, const ChamberSpec& chamber) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  const std::string where = path.string() + ":";
  PumpDownCurve curve;
  curve.event_id = path.stem().string();
  curve.chamber = chamber;

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    if (!header_seen) {
      if (row != "time_s,pressure_mbar") {
        throw ParseError(where + std::to_string(line_no) + ": expected header 'time_s,pressure_mbar'");
      }
      header_seen = true;
      continue;
    }
    const auto comma = row.find(',');
    double t = 0.0;
    double p = 0.0;
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos ||
        !parse_double(row.substr(0, comma), t) || !parse_double(row.substr(comma + 1), p)) {
      throw ParseError(where + std::to_string(line_no) + ": malformed row '" + std::string(row) + "'");
    }
    if (!(p > 0.0)) {
      throw ValidationError(where + std::to_string(line_no) + ": non-positive pressure");
    }
    if (curve.times_s.empty() ? t != 0.0 : !(t > curve.times_s.back())) {
      throw ValidationError(where + std::to_string(line_no) +
                            (curve.times_s.empty() ? ": first timestamp must be 0"
                                                   : ": timestamps not strictly increasing"));
    }
    curve.times_s.push_back(t);
    curve.pressures_mbar.push_back(p);
  }
  if (!header_seen) throw ParseError(where + " empty file");
  if (curve.size() < 2) throw ValidationError(where + " needs at least two samples");
  curve.validate();
  return curve;
}

GroundTruthSet load_ground_truth(const fs::path& dir, const ChamberSpec& chamber,
                                 std::size_t workers) {
  chamber.validate();
  if (!fs::is_directory(dir)) throw ParseError(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  if (files.empty()) throw ValidationError(dir.string() + ": no events found");
  std::sort(files.begin(), files.end());

  GroundTruthSet set;
  set.label = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
  set.curves.resize(files.size());
  std::vector<std::exception_ptr> errors(files.size());
  parallel_for(files.size(), workers, [&](std::size_t i) {
    try {
      set.curves[i] = read_curve_csv(files[i], chamber);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  // Report the first failing file in name order, independent of scheduling.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return set;
}

void write_curves(const fs::path& dir, std::span<const PumpDownCurve> curves) {
  fs::create_directories(dir);
  for (const auto& c : curves) write_curve_csv(dir / (c.event_id + ".csv"), c);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace vacaug
