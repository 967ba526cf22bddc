/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>

namespace hapsisac {

template <typename Scalar>
Scalar dbm_to_watts(Scalar dbm) {
  using std::pow;
  return pow(Scalar(10), (dbm - Scalar(30)) / Scalar(10));
}

template <typename Scalar>
Scalar watts_to_dbm(Scalar watts) {
  using std::log10;
  return Scalar(10) * log10(watts) + Scalar(30);
}

template <typename Scalar>
Scalar db_to_linear(Scalar db) {
  using std::pow;
  return pow(Scalar(10), db / Scalar(10));
}

/// Power-like quantities only (10 log10). Zero maps to -inf.
template <typename Scalar>
Scalar linear_to_db(Scalar linear) {
  using std::log10;
  return Scalar(10) * log10(linear);
}

template <typename Scalar>
constexpr Scalar deg_to_rad(Scalar deg) {
  return deg * Scalar(3.14159265358979323846) / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad_to_deg(Scalar rad) {
  return rad * Scalar(180) / Scalar(3.14159265358979323846);
}

}  // namespace hapsisac
