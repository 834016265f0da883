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
#ifndef CAMFORGE_DETECTION_EVAL_HPP_
#define CAMFORGE_DETECTION_EVAL_HPP_

// Detection metrics: IoU, greedy score-ordered matching, all-points
// interpolated AP, distance-binned AP and train/eval generalization matrices.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "camforge/scene_io.hpp"

namespace camforge {

double iou(const BoundingBox& a, const BoundingBox& b);

struct DetectionOutcome {
  std::size_t image = 0;       // index into the evaluated image list
  std::size_t detection = 0;   // index within that image's detections
  std::optional<std::size_t> matched_gt;
  bool is_tp = false;
  double score = 0.0;

  friend bool operator==(const DetectionOutcome&, const DetectionOutcome&) = default;
};

struct MatchResult {
  std::vector<DetectionOutcome> detections;  // descending score, ties by input order
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double iou_threshold = 0.5;

  int num_gt() const { return tp + fn; }
};

/// One image's detections and ground truth.
struct EvalImage {
  const DetectionSet* detections = nullptr;
  const LabelSet* ground_truth = nullptr;
};

/// Each detection, in descending score order, takes the unmatched
/// same-class ground-truth box of highest IoU (lowest index on ties) when
/// that IoU is >= threshold; otherwise it is a false positive.
MatchResult match(const DetectionSet& dets, const LabelSet& gts, double threshold = 0.5);

/// Matches every image independently and pools the outcomes, sorted by
/// descending score with ties broken by (image, detection) order.
MatchResult match_dataset(std::span<const EvalImage> images, double threshold = 0.5);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;

  friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

struct PrCurve {
  std::vector<PrPoint> points;
  double ap = 0.0;
};

/// All-points interpolated AP: sum over the sweep of (r_i - r_{i-1}) times
/// the maximum precision at recall >= r_i. No ground truth and no detections
/// gives 1; no ground truth with detections gives 0.
PrCurve average_precision(const MatchResult& match);

struct DistanceBinAp {
  double lo_m = 0.0;
  double hi_m = 0.0;  // bin is [lo, hi)
  int gt_count = 0;
  int detection_count = 0;
  double ap = 0.0;
};

struct DistanceApReport {
  std::vector<DistanceBinAp> bins;  // bins without ground truth are omitted
  int unassignable_detections = 0;  // zero IoU with every ground-truth box
};

/// Every detection is attributed to a distance bin: a true positive to its
/// matched box's bin, any other detection to the bin of the ground-truth box
/// (any class) it overlaps most. Each bin is then re-evaluated with match()
/// and average_precision() on its own boxes and detections.
DistanceApReport ap_by_distance(std::span<const EvalImage> images,
                                std::span<const double> bin_edges_m,
                                double threshold = 0.5);

struct MatrixCell {
  std::string train;
  std::string eval;
  std::optional<double> ap;  // absent when the value was not reported
  std::optional<long long> count;  // object count of the training set

  friend bool operator==(const MatrixCell&, const MatrixCell&) = default;
};

struct Asymmetry {
  std::string a;
  std::string b;
  double ap_train_a_eval_b = 0.0;
  double ap_train_b_eval_a = 0.0;
  double gap = 0.0;
};

struct GeneralizationMatrix {
  std::vector<std::string> train_sets;
  std::vector<std::string> eval_sets;
  std::map<std::pair<std::string, std::string>, std::optional<double>> ap;  // key (eval, train)
  std::map<std::string, long long> object_counts;
  std::vector<Asymmetry> asymmetries;

  std::optional<double> cell(const std::string& eval, const std::string& train) const;
};

GeneralizationMatrix build_matrix(std::span<const MatrixCell> cells,
                                  double asymmetry_threshold = 0.05);

/// CSV with header train,eval,ap,count; "na" or an empty field marks an
/// unreported AP, an empty count an unknown one.
std::vector<MatrixCell> load_matrix_cells(const std::filesystem::path& path);

/// Plain-text table: eval sets as rows, train sets as columns, object counts
/// in parentheses, followed by the asymmetry report.
std::string render_matrix(const GeneralizationMatrix& matrix);
std::string matrix_to_csv(const GeneralizationMatrix& matrix);

}  // namespace camforge

#endif  // CAMFORGE_DETECTION_EVAL_HPP_
