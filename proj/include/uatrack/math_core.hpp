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

#ifndef UATRACK__MATH_CORE_HPP_
#define UATRACK__MATH_CORE_HPP_

#include <numbers>

namespace uatrack
{

inline constexpr double kPi = std::numbers::pi;

// Below this concentration I0 and I1 are summed as power series, above it the
// large-argument asymptotic expansion is used.
inline constexpr double kBesselCrossover = 15.0;

// Log-variances are clamped to this range inside the losses so exp(-s) stays finite.
inline constexpr double kLogVarClamp = 10.0;

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

/// Modified Bessel function of the first kind, order 0. Throws std::domain_error for kappa < 0.
double bessel_i0(double kappa);

/// log I0(kappa), finite for any finite kappa >= 0.
double log_bessel_i0(double kappa);

/// I1(kappa) / I0(kappa), the derivative of log I0. Lies in [0, 1).
double bessel_ratio_i1_i0(double kappa);

double elu(double x);
// Right-limit convention at 0, so the derivative is 1 there.
double elu_derivative(double x);

struct GaussianNllConfig
{
  double lambda_g{1.0};
};

struct VonMisesNllConfig
{
  double lambda_v{1.0};
  double s0{1.0};
};

/// A scalar loss with its partials w.r.t. the regressed value and the log-variance.
struct LossValueGrad
{
  double value{0.0};
  double d_value{0.0};
  double d_s{0.0};
};

struct SmoothL1
{
  double value{0.0};
  double derivative{0.0};
};

struct LossWeights
{
  double alpha_cls{1.0};
  double alpha_reg{2.0};
  double alpha_angle{1.0};
  double alpha_var{1.0};
};

/// Heteroscedastic Gaussian NLL: 0.5 * (exp(-s) (v - v_t)^2 + lambda_g * s).
/// s is clamped to [-kLogVarClamp, kLogVarClamp]; outside that range d_s is 0.
LossValueGrad gaussian_nll(double v, double v_target, double s, const GaussianNllConfig & cfg);

/// von-Mises NLL with concentration kappa = exp(-s) and an ELU penalty on s:
/// log I0(kappa) - kappa cos(theta - theta_t) + lambda_v * ELU(s - s0).
LossValueGrad von_mises_nll(
  double theta, double theta_target, double s, const VonMisesNllConfig & cfg);

/// SmoothL1 with transition at |d| = 1.
SmoothL1 smooth_l1(double d);

/// SmoothL1 of sin(theta - theta_t). d_s is always 0.
LossValueGrad sine_error_loss(double theta, double theta_target);

double assemble_loss(
  double l_cls, double l_reg, double l_reg_theta, double l_var, double l_var_theta,
  const LossWeights & weights);

}  // namespace uatrack

#endif  // UATRACK__MATH_CORE_HPP_
