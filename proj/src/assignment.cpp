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

#include "uatrack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uatrack
{
namespace
{

// Requires rows <= cols. Index 0 is a virtual column/row used by the augmenting search.
std::vector<Assignment> solve_wide(const Eigen::MatrixXd & a)
{
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(m + 1, 0.0);
  std::vector<int> match_of_col(m + 1, 0);
  std::vector<int> way(m + 1, 0);

  for (int i = 1; i <= n; ++i) {
    match_of_col[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = match_of_col[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) {
          continue;
        }
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_of_col[j0] != 0);
    // flip the augmenting path
    do {
      const int j1 = way[j0];
      match_of_col[j0] = match_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<Assignment> out;
  out.reserve(n);
  for (int j = 1; j <= m; ++j) {
    if (match_of_col[j] != 0) {
      out.push_back({match_of_col[j] - 1, j - 1});
    }
  }
  std::sort(out.begin(), out.end(), [](const Assignment & x, const Assignment & y) {
    return x.row < y.row;
  });
  return out;
}

}  // namespace

std::vector<Assignment> hungarian_assign(const Eigen::MatrixXd & cost)
{
  if (cost.rows() == 0 || cost.cols() == 0) {
    return {};
  }
  if (!cost.allFinite()) {
    throw std::invalid_argument("hungarian_assign: costs must be finite");
  }
  if (cost.rows() <= cost.cols()) {
    return solve_wide(cost);
  }
  std::vector<Assignment> out = solve_wide(cost.transpose());
  for (Assignment & p : out) {
    std::swap(p.row, p.col);
  }
  std::sort(out.begin(), out.end(), [](const Assignment & x, const Assignment & y) {
    return x.row < y.row;
  });
  return out;
}

}  // namespace uatrack
