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


#include "uatrack/loss_checks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "uatrack/math_core.hpp"
#include "uatrack/random.hpp"

namespace uatrack
{
namespace
{

constexpr double kStep = 1e-5;
constexpr double kRelTol = 1e-6;
// absolute floor for partials that are themselves near zero
constexpr double kAbsTol = 1e-8;

struct GradError
{
  double worst_rel{0.0};
  double worst_abs{0.0};
  int failures{0};
};

void compare(double analytic, double numeric, GradError & err)
{
  const double diff = std::abs(analytic - numeric);
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  err.worst_abs = std::max(err.worst_abs, diff);
  if (scale > 1e-2) {
    err.worst_rel = std::max(err.worst_rel, diff / scale);
  }
  if (diff > kRelTol * scale && diff > kAbsTol) {
    err.failures += 1;
  }
}

std::string format(const char * fmt, double a, double b = 0.0)
{
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return buf;
}

CheckResult gradient_check(
  const std::string & name, Rng & rng, int n_points,
  const std::function<LossValueGrad(double, double, double, double, double)> & loss, double value_span)
{
  GradError err;
  for (int i = 0; i < n_points; ++i) {
    const double v = rng.uniform(-value_span, value_span);
    const double vt = rng.uniform(-value_span, value_span);
    const double lambda = rng.uniform(0.5, 2.0);
    const double s0 = rng.uniform(-1.0, 2.0);
    double s = rng.uniform(-4.0, 4.0);
    // keep the stencil off s0, where the ELU second derivative jumps
    while (std::abs(s - s0) < 1e3 * kStep) {
      s = rng.uniform(-4.0, 4.0);
    }
    auto f = [&](double vv, double ss) { return loss(vv, vt, ss, lambda, s0).value; };
    const LossValueGrad g = loss(v, vt, s, lambda, s0);
    const double num_v = (f(v + kStep, s) - f(v - kStep, s)) / (2.0 * kStep);
    const double num_s = (f(v, s + kStep) - f(v, s - kStep)) / (2.0 * kStep);
    compare(g.d_value, num_v, err);
    compare(g.d_s, num_s, err);
  }
  CheckResult r;
  r.name = name;
  r.passed = err.failures == 0;
  r.detail = format("worst relative error %.3g, worst absolute error %.3g", err.worst_rel, err.worst_abs);
  return r;
}

}  // namespace

double golden_section_minimize(const std::function<double(double)> & f, double lo, double hi, double tol)
{
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double gaussian_argmin_numeric(double d2, double lambda_g)
{
  const double d = std::sqrt(d2);
  const GaussianNllConfig cfg{lambda_g};
  return golden_section_minimize(
    [&](double s) { return gaussian_nll(d, 0.0, s, cfg).value; }, -kLogVarClamp, kLogVarClamp);
}

double von_mises_argmin_numeric(double cos_delta, double lambda_v, double s0)
{
  const double theta = std::acos(std::clamp(cos_delta, -1.0, 1.0));
  const VonMisesNllConfig cfg{lambda_v, s0};
  return golden_section_minimize(
    [&](double s) { return von_mises_nll(theta, 0.0, s, cfg).value; }, -kLogVarClamp, kLogVarClamp);
}

std::vector<CheckResult> run_loss_checks(std::uint64_t seed, int n_points)
{
  std::vector<CheckResult> out;
  Rng rng(seed);

  out.push_back(gradient_check(
    "gaussian_nll gradient", rng, n_points,
    [](double v, double vt, double s, double lambda, double) { return gaussian_nll(v, vt, s, {lambda}); }, 2.0));
  out.push_back(gradient_check(
    "von_mises_nll gradient", rng, n_points,
    [](double v, double vt, double s, double lambda, double s0) { return von_mises_nll(v, vt, s, {lambda, s0}); },
    kPi));

  {
    CheckResult r{"gaussian argmin = log(d^2 / lambda_g)", true, ""};
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double lambda = rng.uniform(0.25, 4.0);
      const double target = rng.uniform(-7.0, 7.0);
      const double d2 = lambda * std::exp(target);
      worst = std::max(worst, std::abs(gaussian_argmin_numeric(d2, lambda) - std::log(d2 / lambda)));
    }
    r.passed = worst < 1e-6;
    r.detail = format("worst |s* - log(d^2/lambda)| = %.3g", worst);
    out.push_back(r);
  }

  {
    CheckResult r{"von-mises stationarity A(kappa*) = cos", true, ""};
    double worst = 0.0;
    for (double c : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double s = von_mises_argmin_numeric(c, 0.0, 1.0);
      worst = std::max(worst, std::abs(bessel_ratio_i1_i0(std::exp(-s)) - c));
    }
    r.passed = worst < 1e-5;
    r.detail = format("worst |A(kappa*) - cos| = %.3g", worst);
    out.push_back(r);
  }

  {
    CheckResult r{"gaussian lambda doubling shifts argmin by -log 2", true, ""};
    double worst = 0.0;
    for (double d2 : {0.1, 1.0, 4.0}) {
      for (double lambda : {0.5, 1.0, 2.0}) {
        const double shift = gaussian_argmin_numeric(d2, 2.0 * lambda) - gaussian_argmin_numeric(d2, lambda);
        worst = std::max(worst, std::abs(shift + std::log(2.0)));
      }
    }
    r.passed = worst < 1e-6;
    r.detail = format("worst |shift + log 2| = %.3g", worst);
    out.push_back(r);
  }

  {
    CheckResult r{"von-mises argmin decreases with lambda_v", true, ""};
    double smallest_gap = 1e300;
    for (double c : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const std::array<double, 3> lambdas{0.5, 1.0, 2.0};
      double prev = 0.0;
      for (std::size_t k = 0; k < lambdas.size(); ++k) {
        const double s = von_mises_argmin_numeric(c, lambdas[k], 1.0);
        if (k > 0) {
          smallest_gap = std::min(smallest_gap, prev - s);
        }
        prev = s;
      }
    }
    r.passed = smallest_gap > 0.0;
    r.detail = format("smallest decrease %.3g", smallest_gap);
    out.push_back(r);
  }
  return out;
}

}  // namespace uatrack
