// Copyright 2026 The cotdrive Authors
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

#ifndef COTDRIVE__SIM__IDM_HPP_
#define COTDRIVE__SIM__IDM_HPP_

#include <algorithm>
#include <cmath>
#include <optional>

namespace cotdrive
{

struct IdmParams
{
  double a_max{1.5};         // [m/s^2]
  double b_comfort{2.0};     // [m/s^2]
  double min_gap{2.0};       // s0 [m]
  double time_headway{1.5};  // T [s]
  double exponent{4.0};
};

/// Intelligent Driver Model acceleration. A missing gap means free road.
inline double idm_acceleration(
  double v, double v0, std::optional<double> gap, double closing, const IdmParams & p = {})
{
  const double desired = std::max(v0, 1e-3);
  const double free_term = 1.0 - std::pow(v / desired, p.exponent);
  if (!gap) {
    return p.a_max * free_term;
  }
  const double s_star =
    p.min_gap + std::max(0.0, v * p.time_headway + v * closing / (2.0 * std::sqrt(p.a_max * p.b_comfort)));
  const double s = std::max(*gap, 1e-3);
  return p.a_max * (free_term - (s_star / s) * (s_star / s));
}

}  // namespace cotdrive

#endif  // COTDRIVE__SIM__IDM_HPP_
