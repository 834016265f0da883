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
#include "camforge/set_distance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "camforge/error.hpp"
#include "camforge/rng.hpp"
#include "camforge/text.hpp"

namespace camforge {

void FeatureSet::validate() const {
  if (n < 2) fail(ErrorCode::kInvalidArgument, "feature set '" + source_name + "' needs at least 2 vectors");
  if (d < 1) fail(ErrorCode::kInvalidArgument, "feature set '" + source_name + "' has zero dimensions");
  if (vectors.size() != static_cast<std::size_t>(n) * d) {
    fail(ErrorCode::kDimensionMismatch, "feature set '" + source_name + "' has the wrong number of values");
  }
  for (double v : vectors) {
    if (!std::isfinite(v)) fail(ErrorCode::kInvalidData, "feature set '" + source_name + "' has a non-finite entry");
  }
}

double poly_kernel(std::span<const double> x, std::span<const double> y, int d_dim) {
  if (x.size() != y.size()) fail(ErrorCode::kDimensionMismatch, "kernel arguments differ in dimension");
  if (d_dim < 1) fail(ErrorCode::kInvalidArgument, "kernel dimension must be >= 1");
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
  const double base = dot / d_dim + 1.0;
  return base * base * base;
}

std::vector<int> seeded_permutation(int n, std::uint64_t seed) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  CounterStream stream(seed, static_cast<std::uint64_t>(n), 0x4B4944u);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(stream.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

namespace {

// Pairwise summation of an already ordered sequence.
double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double sorted_mean(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  return pairwise_sum(terms) / static_cast<double>(terms.size());
}

}  // namespace

KidResult kid(const FeatureSet& a, const FeatureSet& b, int block_size, std::uint64_t seed) {
  a.validate();
  b.validate();
  if (a.d != b.d) fail(ErrorCode::kDimensionMismatch, "feature sets differ in dimension");
  if (block_size < 2) fail(ErrorCode::kInvalidArgument, "KID block size must be >= 2");
  const int blocks = std::min(a.n / block_size, b.n / block_size);
  if (blocks < 1) {
    fail(ErrorCode::kInvalidArgument, "KID needs at least one full block of " + std::to_string(block_size) +
                                          " vectors in each set");
  }
  const auto perm_a = seeded_permutation(a.n, seed);
  const auto perm_b = seeded_permutation(b.n, seed);
  const int m = block_size;

  std::vector<double> estimates(static_cast<std::size_t>(blocks));
  std::vector<double> aa, bb, ab;
  for (int blk = 0; blk < blocks; ++blk) {
    auto ra = [&](int i) { return a.row(perm_a[static_cast<std::size_t>(blk * m + i)]); };
    auto rb = [&](int i) { return b.row(perm_b[static_cast<std::size_t>(blk * m + i)]); };
    aa.clear();
    bb.clear();
    ab.clear();
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        aa.push_back(poly_kernel(ra(i), ra(j), a.d));
        bb.push_back(poly_kernel(rb(i), rb(j), a.d));
        ab.push_back(poly_kernel(ra(i), rb(j), a.d));
      }
    }
    const double within = sorted_mean(aa) + sorted_mean(bb);
    estimates[static_cast<std::size_t>(blk)] = within - 2.0 * sorted_mean(ab);
  }

  KidResult result;
  result.blocks = blocks;
  result.dropped_a = a.n - blocks * m;
  result.dropped_b = b.n - blocks * m;
  result.mean = pairwise_sum(estimates) / blocks;
  double var = 0.0;
  for (double e : estimates) var += (e - result.mean) * (e - result.mean);
  result.std = std::sqrt(var / blocks);
  return result;
}

FeatureSet load_features(const std::filesystem::path& path) {
  std::istringstream in(text::read_file(path));
  FeatureSet fs;
  fs.source_name = path.filename().string();
  std::string line;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = text::split(t, ',');
    std::vector<double> row;
    bool numeric = true;
    for (const auto& f : fields) {
      double v = 0;
      if (!text::parse_double(f, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      fail(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": non-numeric feature value");
    }
    first = false;
    if (fs.d == 0) fs.d = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != fs.d) {
      fail(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(fs.d) + " values, got " + std::to_string(row.size()));
    }
    fs.vectors.insert(fs.vectors.end(), row.begin(), row.end());
    ++fs.n;
  }
  fs.validate();
  return fs;
}

std::string format_kid(const KidResult& r) {
  return "kid_mean=" + text::format_double(r.mean) + " kid_std=" + text::format_double(r.std) +
         " blocks=" + std::to_string(r.blocks) + "\n";
}

}  // namespace camforge
