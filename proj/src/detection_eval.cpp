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
#include "camforge/detection_eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "camforge/error.hpp"
#include "camforge/text.hpp"

namespace camforge {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.width() * a.height() + b.width() * b.height() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

namespace {

std::vector<std::size_t> score_order(const DetectionSet& dets) {
  std::vector<std::size_t> order(dets.boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return *dets.boxes[a].score > *dets.boxes[b].score;
  });
  return order;
}

void sort_outcomes(std::vector<DetectionOutcome>& outcomes) {
  std::stable_sort(outcomes.begin(), outcomes.end(), [](const DetectionOutcome& a, const DetectionOutcome& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.image != b.image) return a.image < b.image;
    return a.detection < b.detection;
  });
}

}  // namespace

MatchResult match(const DetectionSet& dets, const LabelSet& gts, double threshold) {
  for (std::size_t i = 0; i < dets.boxes.size(); ++i) {
    if (!dets.boxes[i].score) {
      fail(ErrorCode::kInvalidArgument, "detection " + std::to_string(i) + " of scene '" +
                                            dets.scene_id + "' has no score");
    }
  }
  MatchResult result;
  result.iou_threshold = threshold;
  std::vector<char> taken(gts.boxes.size(), 0);
  for (std::size_t d : score_order(dets)) {
    const BoundingBox& det = dets.boxes[d];
    std::optional<std::size_t> best;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gts.boxes.size(); ++g) {
      if (taken[g] || gts.boxes[g].cls != det.cls) continue;
      const double o = iou(det, gts.boxes[g]);
      if (o > best_iou) {
        best_iou = o;
        best = g;
      }
    }
    DetectionOutcome outcome{0, d, std::nullopt, false, *det.score};
    if (best && best_iou >= threshold) {
      taken[*best] = 1;
      outcome.matched_gt = best;
      outcome.is_tp = true;
      ++result.tp;
    } else {
      ++result.fp;
    }
    result.detections.push_back(outcome);
  }
  result.fn = static_cast<int>(gts.boxes.size()) - result.tp;
  return result;
}

MatchResult match_dataset(std::span<const EvalImage> images, double threshold) {
  MatchResult pooled;
  pooled.iou_threshold = threshold;
  for (std::size_t i = 0; i < images.size(); ++i) {
    MatchResult r = match(*images[i].detections, *images[i].ground_truth, threshold);
    for (auto& o : r.detections) {
      o.image = i;
      pooled.detections.push_back(o);
    }
    pooled.tp += r.tp;
    pooled.fp += r.fp;
    pooled.fn += r.fn;
  }
  sort_outcomes(pooled.detections);
  return pooled;
}

PrCurve average_precision(const MatchResult& match) {
  PrCurve curve;
  const int total_gt = match.num_gt();
  if (total_gt == 0) {
    curve.ap = match.detections.empty() ? 1.0 : 0.0;
    return curve;
  }
  std::vector<DetectionOutcome> sweep = match.detections;
  sort_outcomes(sweep);
  int tp = 0;
  int fp = 0;
  for (const auto& o : sweep) {
    (o.is_tp ? tp : fp) += 1;
    curve.points.push_back({static_cast<double>(tp) / total_gt, static_cast<double>(tp) / (tp + fp)});
  }
  // Interpolated precision: running maximum from the end of the sweep.
  std::vector<double> interp(curve.points.size());
  double running = 0.0;
  for (std::size_t i = curve.points.size(); i-- > 0;) {
    running = std::max(running, curve.points[i].precision);
    interp[i] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    ap += (curve.points[i].recall - prev_recall) * interp[i];
    prev_recall = curve.points[i].recall;
  }
  curve.ap = ap;
  return curve;
}

DistanceApReport ap_by_distance(std::span<const EvalImage> images, std::span<const double> bin_edges_m,
                                double threshold) {
  if (bin_edges_m.size() < 2) fail(ErrorCode::kInvalidArgument, "distance binning needs at least two edges");
  for (std::size_t i = 1; i < bin_edges_m.size(); ++i) {
    if (!(bin_edges_m[i] > bin_edges_m[i - 1])) {
      fail(ErrorCode::kInvalidArgument, "distance bin edges must be strictly ascending");
    }
  }
  const std::size_t n_bins = bin_edges_m.size() - 1;
  auto bin_of = [&](double d) -> std::optional<std::size_t> {
    for (std::size_t b = 0; b < n_bins; ++b) {
      if (d >= bin_edges_m[b] && d < bin_edges_m[b + 1]) return b;
    }
    return std::nullopt;
  };

  std::vector<std::string> missing;
  for (const auto& img : images) {
    for (const auto& g : img.ground_truth->boxes) {
      if (!g.distance_m) {
        missing.push_back(img.ground_truth->scene_id);
        break;
      }
    }
  }
  if (!missing.empty()) {
    fail(ErrorCode::kInvalidData, "ground truth lacks distance_m in scenes: " + text::join(missing, ","));
  }

  DistanceApReport report;
  // Per bin, per image: filtered ground truth and detections.
  std::vector<std::vector<LabelSet>> bin_gts(n_bins, std::vector<LabelSet>(images.size()));
  std::vector<std::vector<DetectionSet>> bin_dets(n_bins, std::vector<DetectionSet>(images.size()));

  for (std::size_t i = 0; i < images.size(); ++i) {
    const LabelSet& gts = *images[i].ground_truth;
    const DetectionSet& dets = *images[i].detections;
    for (std::size_t b = 0; b < n_bins; ++b) {
      bin_gts[b][i].scene_id = gts.scene_id;
      bin_dets[b][i].scene_id = dets.scene_id;
    }
    std::vector<std::optional<std::size_t>> gt_bin(gts.boxes.size());
    for (std::size_t g = 0; g < gts.boxes.size(); ++g) {
      gt_bin[g] = bin_of(*gts.boxes[g].distance_m);
      if (gt_bin[g]) bin_gts[*gt_bin[g]][i].boxes.push_back(gts.boxes[g]);
    }

    const MatchResult m = match(dets, gts, threshold);
    std::vector<std::optional<std::size_t>> det_gt(dets.boxes.size());
    for (const auto& o : m.detections) det_gt[o.detection] = o.matched_gt;

    for (std::size_t d = 0; d < dets.boxes.size(); ++d) {
      std::optional<std::size_t> owner = det_gt[d];
      if (!owner) {
        double best = 0.0;
        for (std::size_t g = 0; g < gts.boxes.size(); ++g) {
          const double o = iou(dets.boxes[d], gts.boxes[g]);
          if (o > best) {
            best = o;
            owner = g;
          }
        }
      }
      if (!owner) {
        ++report.unassignable_detections;
        continue;
      }
      if (gt_bin[*owner]) bin_dets[*gt_bin[*owner]][i].boxes.push_back(dets.boxes[d]);
    }
  }

  for (std::size_t b = 0; b < n_bins; ++b) {
    std::vector<EvalImage> subset;
    int gt_count = 0;
    int det_count = 0;
    for (std::size_t i = 0; i < images.size(); ++i) {
      subset.push_back({&bin_dets[b][i], &bin_gts[b][i]});
      gt_count += static_cast<int>(bin_gts[b][i].boxes.size());
      det_count += static_cast<int>(bin_dets[b][i].boxes.size());
    }
    if (gt_count == 0) continue;
    const double ap = average_precision(match_dataset(subset, threshold)).ap;
    report.bins.push_back({bin_edges_m[b], bin_edges_m[b + 1], gt_count, det_count, ap});
  }
  return report;
}

std::optional<double> GeneralizationMatrix::cell(const std::string& eval, const std::string& train) const {
  const auto it = ap.find({eval, train});
  if (it == ap.end()) return std::nullopt;
  return it->second;
}

GeneralizationMatrix build_matrix(std::span<const MatrixCell> cells, double asymmetry_threshold) {
  GeneralizationMatrix m;
  auto remember = [](std::vector<std::string>& names, const std::string& n) {
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  };
  for (const auto& c : cells) {
    if (c.train.empty() || c.eval.empty()) fail(ErrorCode::kInvalidArgument, "matrix cell with empty set name");
    if (c.ap && !(*c.ap >= 0.0 && *c.ap <= 1.0)) {
      fail(ErrorCode::kInvalidArgument, "AP for train=" + c.train + " eval=" + c.eval + " outside [0,1]");
    }
    remember(m.train_sets, c.train);
    remember(m.eval_sets, c.eval);
    if (!m.ap.emplace(std::pair{c.eval, c.train}, c.ap).second) {
      fail(ErrorCode::kInvalidArgument, "duplicate matrix cell train=" + c.train + " eval=" + c.eval);
    }
    if (c.count) {
      const auto [it, inserted] = m.object_counts.emplace(c.train, *c.count);
      if (!inserted && it->second != *c.count) {
        fail(ErrorCode::kInvalidArgument, "conflicting object counts for set '" + c.train + "'");
      }
    }
  }
  std::vector<std::string> missing;
  for (const auto& e : m.eval_sets) {
    for (const auto& t : m.train_sets) {
      if (!m.ap.count({e, t})) missing.push_back("train=" + t + " eval=" + e);
    }
  }
  if (!missing.empty()) fail(ErrorCode::kInvalidArgument, "missing matrix cells: " + text::join(missing, "; "));

  for (std::size_t i = 0; i < m.train_sets.size(); ++i) {
    for (std::size_t j = i + 1; j < m.train_sets.size(); ++j) {
      const auto& a = m.train_sets[i];
      const auto& b = m.train_sets[j];
      const auto ab = m.cell(b, a);  // train a, eval b
      const auto ba = m.cell(a, b);
      if (!ab || !ba) continue;
      const double gap = std::abs(*ab - *ba);
      if (gap > asymmetry_threshold) m.asymmetries.push_back({a, b, *ab, *ba, gap});
    }
  }
  return m;
}

std::vector<MatrixCell> load_matrix_cells(const std::filesystem::path& path) {
  std::istringstream in(text::read_file(path));
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  std::vector<MatrixCell> cells;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    if (!saw_header) {
      if (t != "train,eval,ap,count") fail(ErrorCode::kParse, where + "expected header 'train,eval,ap,count'");
      saw_header = true;
      continue;
    }
    const auto f = text::split(t, ',');
    if (f.size() != 4) fail(ErrorCode::kParse, where + "expected 4 fields");
    MatrixCell c{std::string(text::trim(f[0])), std::string(text::trim(f[1])), std::nullopt, std::nullopt};
    const auto ap_field = text::trim(f[2]);
    if (!ap_field.empty() && ap_field != "na") {
      double v = 0;
      if (!text::parse_double(ap_field, v)) fail(ErrorCode::kParse, where + "bad AP '" + f[2] + "'");
      c.ap = v;
    }
    if (!text::trim(f[3]).empty()) {
      long long n = 0;
      if (!text::parse_int(f[3], n) || n < 0) fail(ErrorCode::kParse, where + "bad count '" + f[3] + "'");
      c.count = n;
    }
    cells.push_back(std::move(c));
  }
  if (!saw_header) fail(ErrorCode::kParse, path.string() + ": empty cells file");
  return cells;
}

namespace {

std::string set_label(const GeneralizationMatrix& m, const std::string& name) {
  const auto it = m.object_counts.find(name);
  return it == m.object_counts.end() ? name : name + " (" + std::to_string(it->second) + ")";
}

std::string ap_text(const std::optional<double>& ap) { return ap ? text::format_fixed(*ap, 4) : "na"; }

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string render_matrix(const GeneralizationMatrix& m) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"Eval \\ Train"};
  for (const auto& t : m.train_sets) header.push_back(set_label(m, t));
  rows.push_back(header);
  for (const auto& e : m.eval_sets) {
    std::vector<std::string> row{set_label(m, e)};
    for (const auto& t : m.train_sets) row.push_back(ap_text(m.cell(e, t)));
    rows.push_back(row);
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) widths[i] = std::max(widths[i], r[i].size());
  }
  std::string out;
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    std::string line;
    for (std::size_t i = 0; i < rows[ri].size(); ++i) {
      if (i) line += " | ";
      line += pad(rows[ri][i], widths[i]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (ri == 0) {
      std::size_t total = 0;
      for (auto w : widths) total += w;
      out += std::string(total + 3 * (widths.size() - 1), '-') + "\n";
    }
  }
  out += "\n";
  if (m.asymmetries.empty()) {
    out += "asymmetries: none\n";
  } else {
    for (const auto& a : m.asymmetries) {
      out += "asymmetry: " + a.a + "->" + a.b + "=" + text::format_fixed(a.ap_train_a_eval_b, 4) + " " + a.b +
             "->" + a.a + "=" + text::format_fixed(a.ap_train_b_eval_a, 4) +
             " gap=" + text::format_fixed(a.gap, 4) + "\n";
    }
  }
  return out;
}

std::string matrix_to_csv(const GeneralizationMatrix& m) {
  std::string out = "eval";
  for (const auto& t : m.train_sets) out += "," + t;
  out += "\n";
  for (const auto& e : m.eval_sets) {
    out += e;
    for (const auto& t : m.train_sets) {
      const auto v = m.cell(e, t);
      out += "," + (v ? text::format_double(*v) : std::string("na"));
    }
    out += "\n";
  }
  return out;
}

}  // namespace camforge
