// Copyright 2026 The uatrack Authors
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


#ifndef UATRACK__LOSS_CHECKS_HPP_
#define UATRACK__LOSS_CHECKS_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace uatrack
{

struct CheckResult
{
  std::string name;
  bool passed{false};
  std::string detail;
};

/// Minimizes a unimodal function on [lo, hi] by golden-section search.
double golden_section_minimize(const std::function<double(double)> & f, double lo, double hi, double tol = 1e-10);

/// Numeric argmin over s in [-10, 10] of the Gaussian NLL for a squared residual d2.
double gaussian_argmin_numeric(double d2, double lambda_g);

/// Numeric argmin over s in [-10, 10] of the von-Mises NLL for a given cos(theta - theta_t).
double von_mises_argmin_numeric(double cos_delta, double lambda_v, double s0);

/// Gradient, minimum-location and regularizer-trend checks of the regression losses.
/// Gradients are compared with central differences (h = 1e-5) on n_points random points.
std::vector<CheckResult> run_loss_checks(std::uint64_t seed, int n_points = 1000);

}  // namespace uatrack

#endif  // UATRACK__LOSS_CHECKS_HPP_
