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

#include "uatrack/math_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace uatrack
{
namespace
{

void require_nonnegative(double kappa, const char * what)
{
  if (!(kappa >= 0.0)) {
    throw std::domain_error(std::string(what) + ": argument must be non-negative");
  }
}

// sum_k (kappa^2/4)^k / (k!)^2
double series_i0(double kappa)
{
  const double q = 0.25 * kappa * kappa;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) {
      break;
    }
  }
  return sum;
}

// (kappa/2) sum_k (kappa^2/4)^k / (k! (k+1)!)
double series_i1(double kappa)
{
  const double q = 0.25 * kappa * kappa;
  double term = 0.5 * kappa;
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (term < 1e-17 * sum) {
      break;
    }
  }
  return sum;
}

// Tail of the Hankel expansion I_nu(k) ~ e^k / sqrt(2 pi k) * (1 + tail).
// Summation stops at the smallest term, where the asymptotic series is most accurate.
double asymptotic_tail(int order, double kappa)
{
  const double mu = 4.0 * order * order;
  double term = 1.0;
  double tail = 0.0;
  double prev_abs = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * -(mu - odd * odd) / (8.0 * k * kappa);
    if (std::abs(next) >= prev_abs) {
      break;
    }
    term = next;
    tail += term;
    prev_abs = std::abs(term);
    if (prev_abs < 1e-18) {
      break;
    }
  }
  return tail;
}

}  // namespace

double wrap_angle(double angle)
{
  double wrapped = std::remainder(angle, 2.0 * kPi);
  if (wrapped <= -kPi) {
    wrapped += 2.0 * kPi;
  } else if (wrapped > kPi) {
    wrapped -= 2.0 * kPi;
  }
  return wrapped;
}

double bessel_i0(double kappa)
{
  require_nonnegative(kappa, "bessel_i0");
  if (kappa < kBesselCrossover) {
    return series_i0(kappa);
  }
  return std::exp(kappa) / std::sqrt(2.0 * kPi * kappa) * (1.0 + asymptotic_tail(0, kappa));
}

double log_bessel_i0(double kappa)
{
  require_nonnegative(kappa, "log_bessel_i0");
  if (kappa < kBesselCrossover) {
    return std::log(series_i0(kappa));
  }
  return kappa - 0.5 * std::log(2.0 * kPi * kappa) + std::log1p(asymptotic_tail(0, kappa));
}

double bessel_ratio_i1_i0(double kappa)
{
  require_nonnegative(kappa, "bessel_ratio_i1_i0");
  if (kappa < kBesselCrossover) {
    return series_i1(kappa) / series_i0(kappa);
  }
  return (1.0 + asymptotic_tail(1, kappa)) / (1.0 + asymptotic_tail(0, kappa));
}

double elu(double x) { return x >= 0.0 ? x : std::expm1(x); }

double elu_derivative(double x) { return x >= 0.0 ? 1.0 : std::exp(x); }

LossValueGrad gaussian_nll(double v, double v_target, double s, const GaussianNllConfig & cfg)
{
  const bool clamped = s < -kLogVarClamp || s > kLogVarClamp;
  const double sc = std::clamp(s, -kLogVarClamp, kLogVarClamp);
  const double residual = v - v_target;
  const double precision = std::exp(-sc);
  const double weighted = precision * residual * residual;

  LossValueGrad out;
  out.value = 0.5 * (weighted + cfg.lambda_g * sc);
  out.d_value = precision * residual;
  out.d_s = clamped ? 0.0 : 0.5 * (cfg.lambda_g - weighted);
  return out;
}

LossValueGrad von_mises_nll(
  double theta, double theta_target, double s, const VonMisesNllConfig & cfg)
{
  const bool clamped = s < -kLogVarClamp || s > kLogVarClamp;
  const double sc = std::clamp(s, -kLogVarClamp, kLogVarClamp);
  const double kappa = std::exp(-sc);
  const double delta = theta - theta_target;
  const double c = std::cos(delta);

  LossValueGrad out;
  out.value = log_bessel_i0(kappa) - kappa * c + cfg.lambda_v * elu(sc - cfg.s0);
  out.d_value = kappa * std::sin(delta);
  if (!clamped) {
    // d kappa / d s = -kappa
    out.d_s = -kappa * (bessel_ratio_i1_i0(kappa) - c) +
              cfg.lambda_v * elu_derivative(sc - cfg.s0);
  }
  return out;
}

SmoothL1 smooth_l1(double d)
{
  const double ad = std::abs(d);
  if (ad < 1.0) {
    return {0.5 * d * d, d};
  }
  return {ad - 0.5, d > 0.0 ? 1.0 : -1.0};
}

LossValueGrad sine_error_loss(double theta, double theta_target)
{
  const double delta = theta - theta_target;
  const SmoothL1 inner = smooth_l1(std::sin(delta));
  return {inner.value, inner.derivative * std::cos(delta), 0.0};
}

double assemble_loss(
  double l_cls, double l_reg, double l_reg_theta, double l_var, double l_var_theta,
  const LossWeights & w)
{
  return w.alpha_cls * l_cls + w.alpha_reg * (l_reg + w.alpha_angle * l_reg_theta) +
         w.alpha_var * (l_var + w.alpha_angle * l_var_theta);
}

}  // namespace uatrack
