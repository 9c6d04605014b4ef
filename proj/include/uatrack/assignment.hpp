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

#ifndef UATRACK__ASSIGNMENT_HPP_
#define UATRACK__ASSIGNMENT_HPP_

#include <Eigen/Core>

#include <vector>

namespace uatrack
{

struct Assignment
{
  int row{0};
  int col{0};
};

/// Minimum-cost one-to-one assignment (Hungarian method, shortest augmenting paths
/// with dual potentials, O(n^2 m)). Returns min(rows, cols) pairs sorted by row.
/// Costs must be finite; forbid pairs with a large sentinel and filter afterwards.
std::vector<Assignment> hungarian_assign(const Eigen::MatrixXd & cost);

}  // namespace uatrack

#endif  // UATRACK__ASSIGNMENT_HPP_
