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

#include "vacaug/curve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vacaug/errors.hpp"

namespace vacaug {

void ChamberSpec::validate() const {
  if (!(volume_m3 > 0.0) || !std::isfinite(volume_m3)) {
    throw ValidationError("chamber volume must be positive");
  }
  if (!(leak_flow >= 0.0) || !(surface_flow >= 0.0)) {
    throw ValidationError("chamber leak/surface flows must be non-negative");
  }
}

double PumpDownCurve::min_pressure() const {
  return *std::min_element(pressures_mbar.begin(), pressures_mbar.end());
}

double PumpDownCurve::pressure_at_time(double t) const {
  if (t <= times_s.front()) return pressures_mbar.front();
  if (t >= times_s.back()) return pressures_mbar.back();
  auto it = std::upper_bound(times_s.begin(), times_s.end(), t);
  const auto hi = static_cast<std::size_t>(it - times_s.begin());
  const auto lo = hi - 1;
  const double w = (t - times_s[lo]) / (times_s[hi] - times_s[lo]);
  const double log_p = (1.0 - w) * std::log(pressures_mbar[lo]) + w * std::log(pressures_mbar[hi]);
  return std::exp(log_p);
}

void PumpDownCurve::validate() const {
  auto fail = [this](const std::string& what) {
    throw ValidationError("event '" + event_id + "': " + what);
  };
  chamber.validate();
  if (times_s.size() != pressures_mbar.size()) fail("times and pressures differ in length");
  if (times_s.size() < 2) fail("needs at least two samples");
  if (times_s.front() != 0.0) fail("first timestamp must be 0");
  for (std::size_t i = 0; i < times_s.size(); ++i) {
    if (!std::isfinite(times_s[i]) || !std::isfinite(pressures_mbar[i])) {
      std::ostringstream os;
      os << "non-finite value at sample " << i;
      fail(os.str());
    }
    if (i > 0 && !(times_s[i] > times_s[i - 1])) {
      std::ostringstream os;
      os << "timestamps not strictly increasing at sample " << i;
      fail(os.str());
    }
    if (!(pressures_mbar[i] > 0.0)) {
      std::ostringstream os;
      os << "non-positive pressure at sample " << i;
      fail(os.str());
    }
  }
}

}  // namespace vacaug
