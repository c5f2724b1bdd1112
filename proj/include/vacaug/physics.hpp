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

#include <span>

#include "vacaug/curve.hpp"

namespace vacaug::physics {

/// Total chamber pressure after pumping for `t` seconds at constant speed:
///   P(t) = Q/S + (P0 - Q/S) * exp(-t*S/V)
/// with Q the lumped leak + surface flow. Throws std::domain_error on
/// non-positive speed or p0, or negative t.
double pressure_at(const ChamberSpec& chamber, double p0, double speed, double t);

/// Effective pumping speed that explains a drop from p0 to p_t over t seconds,
/// (V/t) * ln(p0/p_t). Positive for falling pressure.
double effective_speed(const ChamberSpec& chamber, double p0, double p_t, double t);

/// Integrates a speed profile as piecewise exponential decay,
///   P[k+1] = P[k] * exp(-speed[k] * dt / V),
/// returning speed.size() + 1 samples at times k*dt.
PumpDownCurve reconstruct_curve(const ChamberSpec& chamber, double p0,
                                std::span<const double> speed_profile, double dt);

}  // namespace vacaug::physics
