// Copyright 2026 The qbnsl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qbnsl {

struct CobylaOptions {
  double rhobeg = 0.5;
  double rhoend = 1e-3;
  std::size_t max_evaluations = 500;
};

struct CobylaResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  /// True when the trust radius reached rhoend; false when the evaluation
  /// budget ran out first.
  bool converged = false;
  double final_rho = 0.0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Derivative-free minimisation by linear approximation (Powell's COBYLA
/// without constraints).
///
/// Keeps a simplex of n+1 evaluated points and the inverse of its edge
/// matrix. Each iteration either minimises the linear interpolation model
/// over a trust region of radius rho, or, when the simplex has become too
/// flat or too long relative to rho, replaces one vertex to restore its
/// geometry. rho is halved whenever a step fails to achieve a tenth of the
/// predicted reduction on an acceptable simplex, down to rhoend.
CobylaResult cobyla_minimize(const Objective& f, std::vector<double> x0, const CobylaOptions& opt);

}  // namespace qbnsl
