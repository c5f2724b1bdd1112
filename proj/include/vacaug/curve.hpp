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

#pragma once

#include <string>
#include <vector>

namespace vacaug {

/// Fixed chamber properties. Leak and surface outgassing flows are lumped
/// scalars in mbar*m^3/s.
struct ChamberSpec {
  double volume_m3 = 1.0;
  double leak_flow = 0.0;
  double surface_flow = 0.0;

  [[nodiscard]] double total_flow() const { return leak_flow + surface_flow; }
  /// Throws ValidationError when volume <= 0 or a flow is negative.
  void validate() const;
};

/// One pumping event. times_s starts at 0 and strictly increases.
struct PumpDownCurve {
  std::string event_id;
  std::vector<double> times_s;
  std::vector<double> pressures_mbar;
  ChamberSpec chamber;

  [[nodiscard]] std::size_t size() const { return times_s.size(); }
  [[nodiscard]] double initial_pressure() const { return pressures_mbar.front(); }
  [[nodiscard]] double pump_down_time() const { return times_s.back(); }
  [[nodiscard]] double min_pressure() const;

  /// Pressure at an arbitrary time, log-linear between samples (exact for
  /// piecewise-exponential curves). Times past the end hold the last value.
  [[nodiscard]] double pressure_at_time(double t) const;

  /// Throws ValidationError describing the first violated invariant.
  void validate() const;
};

}  // namespace vacaug
