/* Copyright 2026 The camforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef CAMFORGE_SET_DISTANCE_HPP_
#define CAMFORGE_SET_DISTANCE_HPP_

// Kernel Inception Distance over externally computed feature vectors.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace camforge {

struct FeatureSet {
  int n = 0;
  int d = 0;
  std::vector<double> vectors;  // row-major n x d
  std::string source_name;

  std::span<const double> row(int i) const {
    return {vectors.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d)};
  }

  void validate() const;
};

/// (x.y / d + 1)^3
double poly_kernel(std::span<const double> x, std::span<const double> y, int d_dim);

struct KidResult {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation across blocks
  int blocks = 0;
  int dropped_a = 0;
  int dropped_b = 0;
};

/// Each set is shuffled with a permutation that depends only on (seed, set
/// size), both are cut into blocks of block_size (remainders dropped), and
/// block k of A is compared with block k of B by the unbiased MMD^2
/// U-statistic:
///   mean_{i!=j} k(a_i,a_j) + mean_{i!=j} k(b_i,b_j) - 2 mean_{i!=j} k(a_i,b_j).
/// Every sum is taken over sorted terms, so kid(a, b) == kid(b, a) exactly.
KidResult kid(const FeatureSet& a, const FeatureSet& b, int block_size, std::uint64_t seed);

/// Seeded Fisher-Yates permutation of [0, n).
std::vector<int> seeded_permutation(int n, std::uint64_t seed);

/// One vector per row; a first row that is not numeric is taken as a header.
FeatureSet load_features(const std::filesystem::path& path);

std::string format_kid(const KidResult& result);

}  // namespace camforge

#endif  // CAMFORGE_SET_DISTANCE_HPP_
