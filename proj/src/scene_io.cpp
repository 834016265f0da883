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
#include "camforge/scene_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <set>
#include <sstream>

#include "camforge/error.hpp"
#include "camforge/text.hpp"

namespace camforge {
namespace fs = std::filesystem;

namespace {

std::string cell(int band, int row, int col) {
  return "band " + std::to_string(band) + ", (" + std::to_string(row) + "," +
         std::to_string(col) + ")";
}

float byteswap_float(float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  bits = ((bits & 0x000000FFu) << 24) | ((bits & 0x0000FF00u) << 8) |
         ((bits & 0x00FF0000u) >> 8) | ((bits & 0xFF000000u) >> 24);
  std::memcpy(&v, &bits, sizeof bits);
  return v;
}

struct PfmImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> interleaved;  // top-to-bottom rows
};

std::string encode_pfm(const PfmImage& img) {
  std::string out = img.channels == 3 ? "PF\n" : "Pf\n";
  out += std::to_string(img.width) + " " + std::to_string(img.height) + "\n-1.0\n";
  const std::size_t row_len = static_cast<std::size_t>(img.width) * img.channels;
  const std::size_t header = out.size();
  out.resize(header + row_len * img.height * sizeof(float));
  char* dst = out.data() + header;
  // PFM stores rows bottom to top.
  for (int r = img.height - 1; r >= 0; --r) {
    for (std::size_t i = 0; i < row_len; ++i) {
      float v = img.interleaved[static_cast<std::size_t>(r) * row_len + i];
      if constexpr (std::endian::native == std::endian::big) v = byteswap_float(v);
      std::memcpy(dst, &v, sizeof v);
      dst += sizeof v;
    }
  }
  return out;
}

PfmImage decode_pfm(const std::string& bytes, const std::string& origin) {
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  PfmImage img;
  const std::string magic = token();
  if (magic == "PF") {
    img.channels = 3;
  } else if (magic == "Pf") {
    img.channels = 1;
  } else {
    fail(ErrorCode::kParse, origin + ": not a PFM file");
  }
  long long w = 0, h = 0;
  double scale = 0;
  if (!text::parse_int(token(), w) || !text::parse_int(token(), h) ||
      !text::parse_double(token(), scale) || w <= 0 || h <= 0 || scale == 0) {
    fail(ErrorCode::kParse, origin + ": malformed PFM header");
  }
  ++pos;  // single whitespace byte ends the header
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  const std::size_t row_len = static_cast<std::size_t>(w) * img.channels;
  const std::size_t need = row_len * static_cast<std::size_t>(h) * sizeof(float);
  if (bytes.size() < pos || bytes.size() - pos != need) {
    fail(ErrorCode::kDimensionMismatch,
         origin + ": PFM payload size does not match header dimensions");
  }
  const bool file_big_endian = scale > 0;
  const bool swap = file_big_endian != (std::endian::native == std::endian::big);
  img.interleaved.resize(row_len * static_cast<std::size_t>(h));
  const char* src = bytes.data() + pos;
  for (int r = img.height - 1; r >= 0; --r) {
    for (std::size_t i = 0; i < row_len; ++i) {
      float v;
      std::memcpy(&v, src, sizeof v);
      src += sizeof v;
      if (swap) v = byteswap_float(v);
      img.interleaved[static_cast<std::size_t>(r) * row_len + i] = v;
    }
  }
  return img;
}

std::map<std::string, std::string> parse_key_values(const std::string& contents,
                                                    const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::istringstream in(contents);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::kParse, origin + ":" + std::to_string(line_no) +
                                  ": expected key=value");
    }
    kv[std::string(text::trim(t.substr(0, eq)))] = std::string(text::trim(t.substr(eq + 1)));
  }
  return kv;
}

fs::path band_file(const fs::path& base, int band) {
  auto p = base;
  p += ".b" + std::to_string(band) + ".pfm";
  return p;
}

fs::path with_suffix(const fs::path& base, const std::string& suffix) {
  auto p = base;
  p += suffix;
  return p;
}

}  // namespace

SceneIrradiance SceneIrradiance::zeros(int width, int height, int bands,
                                       double pixel_pitch_um,
                                       std::string scene_id) {
  SceneIrradiance s;
  s.width_px = width;
  s.height_px = height;
  s.bands = bands;
  s.pixel_pitch_um = pixel_pitch_um;
  s.scene_id = std::move(scene_id);
  s.data.assign(static_cast<std::size_t>(bands) * s.plane_size(), 0.0f);
  if (bands == 3) {
    s.band_names = {"R", "G", "B"};
  } else {
    for (int b = 0; b < bands; ++b) s.band_names.push_back("band" + std::to_string(b));
  }
  return s;
}

void validate_scene(const SceneIrradiance& scene) {
  if (scene.width_px <= 0 || scene.height_px <= 0 || scene.bands < 1) {
    fail(ErrorCode::kInvalidData, "scene '" + scene.scene_id +
                                      "' must have positive width, height and bands");
  }
  if (!(scene.pixel_pitch_um > 0) || !std::isfinite(scene.pixel_pitch_um)) {
    fail(ErrorCode::kInvalidData, "scene pixel_pitch_um must be positive");
  }
  if (scene.data.size() != static_cast<std::size_t>(scene.bands) * scene.plane_size()) {
    fail(ErrorCode::kDimensionMismatch,
         "scene data length does not equal bands x width x height");
  }
  if (scene.band_names.size() != static_cast<std::size_t>(scene.bands)) {
    fail(ErrorCode::kDimensionMismatch, "scene band_names count differs from bands");
  }
  for (int b = 0; b < scene.bands; ++b) {
    for (int r = 0; r < scene.height_px; ++r) {
      for (int c = 0; c < scene.width_px; ++c) {
        const float v = scene.at(b, r, c);
        if (!std::isfinite(v)) fail(ErrorCode::kInvalidData, "non-finite sample at " + cell(b, r, c));
        if (v < 0) fail(ErrorCode::kInvalidData, "negative sample at " + cell(b, r, c));
      }
    }
  }
}

fs::path scene_bundle_base(const fs::path& path) {
  if (path.extension() == ".meta") {
    auto base = path;
    base.replace_extension();
    return base;
  }
  return path;
}

SceneIrradiance load_scene(const fs::path& path) {
  const fs::path base = scene_bundle_base(path);
  const fs::path meta_path = with_suffix(base, ".meta");
  if (!fs::exists(meta_path)) {
    fail(ErrorCode::kIo, "missing scene metadata '" + meta_path.string() + "'");
  }
  const auto kv = parse_key_values(text::read_file(meta_path), meta_path.string());
  auto require = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      fail(ErrorCode::kParse, meta_path.string() + ": missing key '" + key + "'");
    }
    return it->second;
  };
  long long w = 0, h = 0, bands = 0;
  double pitch = 0;
  if (!text::parse_int(require("width"), w) || !text::parse_int(require("height"), h) ||
      !text::parse_int(require("bands"), bands) ||
      !text::parse_double(require("pixel_pitch_um"), pitch)) {
    fail(ErrorCode::kParse, meta_path.string() + ": malformed numeric field");
  }
  if (w <= 0 || h <= 0 || bands < 1) {
    fail(ErrorCode::kInvalidData, meta_path.string() + ": non-positive dimensions");
  }

  SceneIrradiance scene;
  scene.width_px = static_cast<int>(w);
  scene.height_px = static_cast<int>(h);
  scene.bands = static_cast<int>(bands);
  scene.pixel_pitch_um = pitch;
  scene.scene_id = require("scene_id");
  scene.band_names = text::split(require("band_names"), ',');
  scene.data.resize(static_cast<std::size_t>(bands) * scene.plane_size());

  auto check_dims = [&](const PfmImage& img, const fs::path& file) {
    if (img.width != scene.width_px || img.height != scene.height_px) {
      fail(ErrorCode::kDimensionMismatch,
           file.string() + ": plane is " + std::to_string(img.width) + "x" +
               std::to_string(img.height) + ", metadata says " + std::to_string(w) +
               "x" + std::to_string(h));
    }
  };

  const fs::path color_file = with_suffix(base, ".pfm");
  if (bands == 3 && fs::exists(color_file)) {
    const PfmImage img = decode_pfm(text::read_file(color_file), color_file.string());
    if (img.channels != 3) {
      fail(ErrorCode::kDimensionMismatch, color_file.string() + ": expected a color PFM");
    }
    check_dims(img, color_file);
    for (std::size_t p = 0; p < scene.plane_size(); ++p) {
      for (int b = 0; b < 3; ++b) {
        scene.data[static_cast<std::size_t>(b) * scene.plane_size() + p] =
            img.interleaved[p * 3 + b];
      }
    }
  } else {
    for (int b = 0; b < scene.bands; ++b) {
      const fs::path file = band_file(base, b);
      if (!fs::exists(file)) fail(ErrorCode::kIo, "missing band file '" + file.string() + "'");
      const PfmImage img = decode_pfm(text::read_file(file), file.string());
      if (img.channels != 1) {
        fail(ErrorCode::kDimensionMismatch, file.string() + ": expected a grayscale PFM");
      }
      check_dims(img, file);
      std::copy(img.interleaved.begin(), img.interleaved.end(),
                scene.data.begin() + static_cast<std::ptrdiff_t>(b * scene.plane_size()));
    }
  }
  validate_scene(scene);
  return scene;
}

void save_scene(const SceneIrradiance& scene, const fs::path& path) {
  validate_scene(scene);
  const fs::path base = scene_bundle_base(path);

  std::vector<std::pair<fs::path, std::string>> files;
  if (scene.bands == 3) {
    PfmImage img{scene.width_px, scene.height_px, 3, {}};
    img.interleaved.resize(scene.plane_size() * 3);
    for (std::size_t p = 0; p < scene.plane_size(); ++p) {
      for (int b = 0; b < 3; ++b) {
        img.interleaved[p * 3 + b] =
            scene.data[static_cast<std::size_t>(b) * scene.plane_size() + p];
      }
    }
    files.emplace_back(with_suffix(base, ".pfm"), encode_pfm(img));
  } else {
    for (int b = 0; b < scene.bands; ++b) {
      const auto first = scene.data.begin() + static_cast<std::ptrdiff_t>(b * scene.plane_size());
      PfmImage img{scene.width_px, scene.height_px, 1,
                   std::vector<float>(first, first + static_cast<std::ptrdiff_t>(scene.plane_size()))};
      files.emplace_back(band_file(base, b), encode_pfm(img));
    }
  }
  std::string meta;
  meta += "width=" + std::to_string(scene.width_px) + "\n";
  meta += "height=" + std::to_string(scene.height_px) + "\n";
  meta += "bands=" + std::to_string(scene.bands) + "\n";
  meta += "pixel_pitch_um=" + text::format_double(scene.pixel_pitch_um) + "\n";
  meta += "band_names=" + text::join(scene.band_names, ",") + "\n";
  meta += "scene_id=" + scene.scene_id + "\n";
  files.emplace_back(with_suffix(base, ".meta"), std::move(meta));

  std::vector<fs::path> written;
  try {
    for (const auto& [file, contents] : files) {
      text::write_file_atomic(file, contents);
      written.push_back(file);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& f : written) fs::remove(f, ec);
    throw;
  }
}

void validate_box(const BoundingBox& box) {
  if (!std::isfinite(box.x_min) || !std::isfinite(box.y_min) ||
      !std::isfinite(box.x_max) || !std::isfinite(box.y_max)) {
    fail(ErrorCode::kInvalidData, "box coordinates must be finite");
  }
  if (!(box.x_min < box.x_max) || !(box.y_min < box.y_max)) {
    fail(ErrorCode::kInvalidData, "box requires x_min < x_max and y_min < y_max");
  }
  if (box.cls.empty() || box.cls.find_first_of(",\n\r") != std::string::npos) {
    fail(ErrorCode::kInvalidData, "box class must be non-empty and contain no comma");
  }
  if (box.distance_m && !(*box.distance_m >= 0 && std::isfinite(*box.distance_m))) {
    fail(ErrorCode::kInvalidData, "distance_m must be finite and >= 0");
  }
  if (box.score && !(*box.score >= 0 && *box.score <= 1)) {
    fail(ErrorCode::kInvalidData, "score must lie in [0,1]");
  }
}

namespace {
constexpr const char* kLabelHeader = "class,x_min,y_min,x_max,y_max,distance_m,score";
}

LabelSet load_labels(const fs::path& path, std::optional<std::string> scene_id) {
  const std::string contents = text::read_file(path);
  LabelSet labels;
  labels.scene_id = scene_id ? *scene_id : path.stem().string();
  std::istringstream in(contents);
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    if (!saw_header) {
      if (t != kLabelHeader) fail(ErrorCode::kParse, where + "expected header '" + kLabelHeader + "'");
      saw_header = true;
      continue;
    }
    const auto fields = text::split(t, ',');
    if (fields.size() != 7) {
      fail(ErrorCode::kParse, where + "expected 7 fields, got " + std::to_string(fields.size()));
    }
    BoundingBox box;
    box.cls = std::string(text::trim(fields[0]));
    double* coords[] = {&box.x_min, &box.y_min, &box.x_max, &box.y_max};
    for (int i = 0; i < 4; ++i) {
      if (!text::parse_double(fields[1 + i], *coords[i])) {
        fail(ErrorCode::kParse, where + "bad coordinate '" + fields[1 + i] + "'");
      }
    }
    for (int i = 5; i < 7; ++i) {
      if (text::trim(fields[i]).empty()) continue;
      double v = 0;
      if (!text::parse_double(fields[i], v)) {
        fail(ErrorCode::kParse, where + "bad numeric field '" + fields[i] + "'");
      }
      (i == 5 ? box.distance_m : box.score) = v;
    }
    try {
      validate_box(box);
    } catch (const Error& e) {
      fail(ErrorCode::kParse, where + e.what());
    }
    labels.boxes.push_back(std::move(box));
  }
  if (!saw_header) fail(ErrorCode::kParse, path.string() + ": empty label file (no header)");
  return labels;
}

std::string labels_to_csv(const LabelSet& labels) {
  std::string out = std::string(kLabelHeader) + "\n";
  for (const auto& b : labels.boxes) {
    validate_box(b);
    out += b.cls + "," + text::format_double(b.x_min) + "," + text::format_double(b.y_min) +
           "," + text::format_double(b.x_max) + "," + text::format_double(b.y_max) + ",";
    if (b.distance_m) out += text::format_double(*b.distance_m);
    out += ",";
    if (b.score) out += text::format_double(*b.score);
    out += "\n";
  }
  return out;
}

void save_labels(const LabelSet& labels, const fs::path& path) {
  text::write_file_atomic(path, labels_to_csv(labels));
}

const std::string* DatasetManifest::provenance_value(const std::string& key) const {
  for (const auto& [k, v] : provenance) {
    if (k == key) return &v;
  }
  return nullptr;
}

namespace {
constexpr const char* kManifestHeader = "# camforge-manifest v1";
constexpr const char* kManifestColumns = "scene_id,scene_file,label_file";
}  // namespace

fs::path resolve_manifest_path(const fs::path& manifest_path, const std::string& entry_path) {
  const fs::path p(entry_path);
  if (p.is_absolute()) return p;
  return manifest_path.parent_path() / p;
}

DatasetManifest load_manifest(const fs::path& path) {
  const std::string contents = text::read_file(path);
  std::istringstream in(contents);
  std::string line;
  int line_no = 0;
  DatasetManifest m;
  std::set<std::string> ids;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    if (!saw_header) {
      if (t != kManifestHeader) fail(ErrorCode::kParse, where + "missing '" + kManifestHeader + "' header");
      saw_header = true;
      continue;
    }
    if (text::starts_with(t, "# name:")) {
      m.name = std::string(text::trim(t.substr(7)));
      continue;
    }
    if (text::starts_with(t, "# provenance:")) {
      const auto kv = text::trim(t.substr(13));
      const auto eq = kv.find('=');
      if (eq == std::string_view::npos) fail(ErrorCode::kParse, where + "provenance line needs key=value");
      m.provenance.emplace_back(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
      continue;
    }
    if (t.front() == '#' || t == kManifestColumns) continue;
    if (!m.provenance.empty()) fail(ErrorCode::kParse, where + "entry after provenance trailer");
    const auto fields = text::split(t, ',');
    if (fields.size() != 3) fail(ErrorCode::kParse, where + "expected scene_id,scene_file,label_file");
    ManifestEntry e{std::string(text::trim(fields[0])), std::string(text::trim(fields[1])),
                    std::string(text::trim(fields[2]))};
    if (e.scene_id.empty()) fail(ErrorCode::kParse, where + "empty scene_id");
    if (!ids.insert(e.scene_id).second) {
      fail(ErrorCode::kInvalidData, where + "duplicate scene_id '" + e.scene_id + "'");
    }
    for (const auto* f : {&e.scene_file, &e.label_file}) {
      const fs::path resolved = resolve_manifest_path(path, *f);
      const bool exists = fs::exists(resolved) ||
                          fs::exists(fs::path(resolved.string() + ".meta"));
      if (!exists) fail(ErrorCode::kIo, where + "referenced file '" + resolved.string() + "' does not exist");
    }
    m.entries.push_back(std::move(e));
  }
  if (!saw_header) fail(ErrorCode::kParse, path.string() + ": empty manifest");
  return m;
}

std::string manifest_to_text(const DatasetManifest& manifest) {
  std::set<std::string> ids;
  std::string out = std::string(kManifestHeader) + "\n";
  out += "# name: " + manifest.name + "\n";
  out += std::string(kManifestColumns) + "\n";
  for (const auto& e : manifest.entries) {
    if (!ids.insert(e.scene_id).second) {
      fail(ErrorCode::kInvalidData, "duplicate scene_id '" + e.scene_id + "' in manifest");
    }
    out += e.scene_id + "," + e.scene_file + "," + e.label_file + "\n";
  }
  for (const auto& [k, v] : manifest.provenance) out += "# provenance: " + k + "=" + v + "\n";
  return out;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  text::write_file_atomic(path, manifest_to_text(manifest));
}

}  // namespace camforge
