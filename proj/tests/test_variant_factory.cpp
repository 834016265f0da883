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
#include <filesystem>

#include "camforge/error.hpp"
#include "camforge/raw_io.hpp"
#include "camforge/variant_factory.hpp"
#include "doctest.h"
#include "support.hpp"

namespace camforge {
namespace {

namespace fs = std::filesystem;
using testing::box;

LabelSet tall_and_short() {
  return {"s",
          {box("car", 0, 0, 10, 25, std::nullopt, 149.9), box("car", 0, 0, 10, 25.5, std::nullopt, 150.0),
           box("car", 0, 0, 10, 40, std::nullopt, 150.1)}};
}

TEST_CASE("kitti policy keeps boxes strictly taller than the minimum") {
  LabelingPolicy p;
  p.kind = LabelingKind::kKittiMinBox;
  const LabelSet out = apply_policy(tall_and_short(), p);
  REQUIRE(out.boxes.size() == 2);
  CHECK(out.boxes[0].y_max == 25.5);
  CHECK(out.boxes[1].y_max == 40);
}

TEST_CASE("distance policy keeps boxes at or inside the cutoff") {
  LabelingPolicy p;
  p.kind = LabelingKind::kDistanceCutoff;
  const LabelSet out = apply_policy(tall_and_short(), p);
  REQUIRE(out.boxes.size() == 2);
  CHECK(*out.boxes[0].distance_m == 149.9);
  CHECK(*out.boxes[1].distance_m == 150.0);
}

TEST_CASE("distance policy names every scene without distances") {
  LabelingPolicy p;
  p.kind = LabelingKind::kDistanceCutoff;
  const std::vector<LabelSet> sets{{"alpha", {box("car", 0, 0, 1, 1)}}, {"beta", {box("car", 0, 0, 1, 1, {}, 3.0)}},
                                   {"gamma", {box("car", 0, 0, 1, 1)}}};
  try {
    apply_policy(sets, p);
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("alpha") != std::string::npos);
    CHECK(msg.find("gamma") != std::string::npos);
    CHECK(msg.find("beta") == std::string::npos);
  }
}

TEST_CASE("none policy and name round trip") {
  CHECK(apply_policy(tall_and_short(), LabelingPolicy{}).boxes.size() == 3);
  for (auto k : {LabelingKind::kNone, LabelingKind::kKittiMinBox, LabelingKind::kDistanceCutoff}) {
    CHECK(parse_labeling_kind(labeling_kind_name(k)) == k);
  }
  CHECK_THROWS_AS(parse_labeling_kind("coco"), Error);
}

TEST_CASE("label scaling") {
  const LabelSet out = scale_labels({"s", {box("car", 2, 4, 6, 8, 0.5, 12.0)}}, 0.5);
  CHECK(out.boxes[0].x_min == 1);
  CHECK(out.boxes[0].y_max == 4);
  CHECK(*out.boxes[0].distance_m == 12.0);
  CHECK(*out.boxes[0].score == 0.5);
}

TEST_CASE("axis names and values") {
  for (auto a : {VariantAxis::kPixelPitch, VariantAxis::kBitDepth, VariantAxis::kCfa, VariantAxis::kExposurePolicy,
                 VariantAxis::kGamma, VariantAxis::kDemosaic}) {
    CHECK(parse_axis(axis_name(a)) == a);
  }
  CHECK(axis_is_geometric(VariantAxis::kPixelPitch));
  CHECK_FALSE(axis_is_geometric(VariantAxis::kBitDepth));
  PipelineSettings base;
  CHECK(apply_axis_value(base, VariantAxis::kBitDepth, "12").first.sensor.bit_depth == 12);
  CHECK_THROWS_AS(apply_axis_value(base, VariantAxis::kBitDepth, "twelve"), Error);
  CHECK(apply_axis_value(base, VariantAxis::kDemosaic, "on").first.demosaic);
}

TEST_CASE("settings digest tracks every field") {
  PipelineSettings a;
  PipelineSettings b = a;
  CHECK(a.digest() == b.digest());
  CHECK(a.digest().size() == 16);
  b.sensor.read_noise_e = 11.0;
  CHECK(a.digest() != b.digest());
  b = a;
  b.labeling.max_distance_m = 100.0;
  CHECK(a.digest() != b.digest());
}

// A small base dataset on disk: scenes at 3 um with labels carrying distances.
struct BaseDataset {
  testing::TempDir dir;
  DatasetManifest manifest;
  fs::path manifest_path;

  BaseDataset(int w, int h, int count) {
    manifest.name = "base";
    for (int i = 0; i < count; ++i) {
      const std::string id = "scene" + std::to_string(i);
      const SceneIrradiance s = testing::random_scene(w, h, 1, 100 + i, 3.0, id);
      save_scene(s, dir / id);
      save_labels({id, {box("car", 10, 10, 30, 40, std::nullopt, 20.0 + i), box("person", 40, 12, 44, 20, {}, 200.0)}},
                  dir / (id + ".csv"));
      manifest.entries.push_back({id, id, id + ".csv"});
    }
    manifest_path = dir / "manifest.txt";
    save_manifest(manifest, manifest_path);
  }
};

PipelineSettings small_custom() {
  PipelineSettings p;
  p.sensor.name = "custom";
  p.sensor.bit_depth = 12;
  p.exposure.kind = ExposureKind::kGlobal;
  return p;
}

TEST_CASE("bit depth variants nest exactly") {
  BaseDataset base(48, 32, 2);
  VariantSpec spec{base.manifest, base.manifest_path, VariantAxis::kBitDepth, {"8", "10", "12"}, small_custom(), 5};
  const fs::path out = base.dir / "out";
  const auto manifests = generate_variants(spec, out, 2);
  REQUIRE(manifests.size() == 3);
  for (const auto& e : base.manifest.entries) {
    const RawFrame f8 = load_raw_frame(out / "bit_depth=8" / "scenes" / (e.scene_id + ".raw.png"));
    const RawFrame f10 = load_raw_frame(out / "bit_depth=10" / "scenes" / (e.scene_id + ".raw.png"));
    const RawFrame f12 = load_raw_frame(out / "bit_depth=12" / "scenes" / (e.scene_id + ".raw.png"));
    REQUIRE(f8.dn.size() == f12.dn.size());
    CHECK(f8.bit_depth == 8);
    CHECK(f12.bit_depth == 12);
    for (std::size_t i = 0; i < f12.dn.size(); ++i) {
      REQUIRE(f8.dn[i] == (f12.dn[i] >> 4));
      REQUIRE(f10.dn[i] == (f12.dn[i] >> 2));
    }
    // Non-geometric axes leave labels untouched.
    const std::string l8 = testing::slurp(out / "bit_depth=8" / "labels" / (e.scene_id + ".csv"));
    CHECK(l8 == testing::slurp(out / "bit_depth=12" / "labels" / (e.scene_id + ".csv")));
  }
}

TEST_CASE("variant provenance holds exactly the generating parameters") {
  BaseDataset base(24, 16, 1);
  VariantSpec spec{base.manifest, base.manifest_path, VariantAxis::kGamma, {"none", "2.2", "adaptive"}, small_custom(),
                   9};
  const fs::path out = base.dir / "out";
  generate_variants(spec, out, 1);
  std::string digest;
  for (const auto& d : fs::directory_iterator(out)) {
    const DatasetManifest m = load_manifest(d.path() / "manifest.txt");
    std::vector<std::string> keys;
    for (const auto& [k, v] : m.provenance) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"axis", "value", "seed_base", "fixed_digest", "labeling_policy",
                                           "base_manifest"});
    CHECK(*m.provenance_value("axis") == "gamma");
    CHECK(*m.provenance_value("seed_base") == "9");
    if (digest.empty()) digest = *m.provenance_value("fixed_digest");
    CHECK(*m.provenance_value("fixed_digest") == digest);
    CHECK(d.path().filename().string() == "gamma=" + *m.provenance_value("value"));
  }
}

TEST_CASE("pixel pitch variants use the preset array sizes") {
  BaseDataset base(1272, 600, 1);
  PipelineSettings fixed;
  fixed.sensor = make_preset("mt9v024-mono", 3.0);
  fixed.exposure.kind = ExposureKind::kGlobal;
  VariantSpec spec{base.manifest, base.manifest_path, VariantAxis::kPixelPitch, {"3", "6"}, fixed, 1};
  const fs::path out = base.dir / "out";
  generate_variants(spec, out, 1);
  const RawFrame f3 = load_raw_frame(out / "pixel_pitch=3" / "scenes" / "scene0.raw.png");
  const RawFrame f6 = load_raw_frame(out / "pixel_pitch=6" / "scenes" / "scene0.raw.png");
  CHECK(f3.width == 1268);
  CHECK(f3.height == 594);
  CHECK(f6.width == 634);
  CHECK(f6.height == 298);
  // 3 um: 1272x600 cropped to 1268x594 at offset (2,3).
  const LabelSet l3 = load_labels(out / "pixel_pitch=3" / "labels" / "scene0.csv");
  CHECK(l3.boxes[0].x_min == 8);
  CHECK(l3.boxes[0].y_max == 37);
  // 6 um: 636x300 binned, cropped to 634x298 at offset (1,1).
  const LabelSet l6 = load_labels(out / "pixel_pitch=6" / "labels" / "scene0.csv");
  CHECK(l6.boxes[0].x_min == 4);
  CHECK(l6.boxes[0].y_max == 19);
}

TEST_CASE("failed generation leaves no variant directories") {
  BaseDataset base(24, 16, 1);
  PipelineSettings fixed = small_custom();
  VariantSpec spec{base.manifest, base.manifest_path, VariantAxis::kPixelPitch, {"3", "4.5"}, fixed, 1};
  const fs::path out = base.dir / "out";
  CHECK_THROWS_AS(generate_variants(spec, out, 1), Error);
  bool any = false;
  if (fs::exists(out)) {
    for (const auto& d : fs::directory_iterator(out)) {
      (void)d;
      any = true;
    }
  }
  CHECK_FALSE(any);
}

TEST_CASE("duplicate values are rejected") {
  BaseDataset base(8, 8, 1);
  VariantSpec spec{base.manifest, base.manifest_path, VariantAxis::kBitDepth, {"8", "08"}, small_custom(), 0};
  CHECK_THROWS_AS(generate_variants(spec, base.dir / "out", 1), Error);
}

TEST_CASE("render_scene applies the labeling policy after geometry") {
  PipelineSettings p = small_custom();
  p.labeling.kind = LabelingKind::kDistanceCutoff;
  const SceneIrradiance s = testing::random_scene(48, 32, 1, 3);
  const RenderedScene r = render_scene(s, {"s", {box("car", 1, 1, 5, 5, {}, 10.0), box("car", 1, 1, 5, 5, {}, 151.0)}}, p, 7);
  CHECK(r.labels.boxes.size() == 1);
  CHECK(r.raw.width == 48);
  const RenderedScene again = render_scene(s, {"s", {}}, p, 7);
  CHECK(again.raw.dn == r.raw.dn);
}

}  // namespace
}  // namespace camforge
