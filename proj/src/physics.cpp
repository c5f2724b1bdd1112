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

#include "vacaug/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vacaug::physics {

double pressure_at(const ChamberSpec& chamber, double p0, double speed, double t) {
  if (!(speed > 0.0)) throw std::domain_error("pressure_at: speed must be positive");
  if (!(p0 > 0.0)) throw std::domain_error("pressure_at: p0 must be positive");
  if (!(t >= 0.0)) throw std::domain_error("pressure_at: t must be non-negative");
  if (t == 0.0) return p0;
  const double floor = chamber.total_flow() / speed;
  return floor + (p0 - floor) * std::exp(-t * speed / chamber.volume_m3);
}

double effective_speed(const ChamberSpec& chamber, double p0, double p_t, double t) {
  if (!(t > 0.0)) throw std::domain_error("effective_speed: t must be positive");
  if (!(p0 > 0.0)) throw std::domain_error("effective_speed: p0 must be positive");
  if (!(p_t > 0.0)) throw std::domain_error("effective_speed: p_t must be positive");
  return chamber.volume_m3 / t * std::log(p0 / p_t);
}

PumpDownCurve reconstruct_curve(const ChamberSpec& chamber, double p0,
                                std::span<const double> speed_profile, double dt) {
  if (!(p0 > 0.0)) throw std::domain_error("reconstruct_curve: p0 must be positive");
  if (!(dt > 0.0)) throw std::domain_error("reconstruct_curve: dt must be positive");
  if (speed_profile.empty()) throw std::domain_error("reconstruct_curve: empty speed profile");

  PumpDownCurve curve;
  curve.chamber = chamber;
  const std::size_t n = speed_profile.size();
  curve.times_s.resize(n + 1);
  curve.pressures_mbar.resize(n + 1);
  curve.times_s[0] = 0.0;
  curve.pressures_mbar[0] = p0;
  // Accumulate the exponent rather than the pressure so long profiles do not
  // compound rounding in the product.
  double exponent = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = speed_profile[k];
    if (!(s >= 0.0)) throw std::domain_error("reconstruct_curve: negative speed entry");
    exponent += s * dt / chamber.volume_m3;
    curve.times_s[k + 1] = static_cast<double>(k + 1) * dt;
    // Underflow is clamped so the curve stays strictly positive.
    curve.pressures_mbar[k + 1] =
        std::max(p0 * std::exp(-exponent), std::numeric_limits<double>::min());
  }
  return curve;
}

}  // namespace vacaug::physics
