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
#include "camforge/raw_io.hpp"

#include <csetjmp>
#include <cstdio>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include <png.h>

#include "camforge/error.hpp"
#include "camforge/text.hpp"

namespace camforge {
namespace fs = std::filesystem;

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

int png_color_type(int channels) {
  switch (channels) {
    case 1: return PNG_COLOR_TYPE_GRAY;
    case 2: return PNG_COLOR_TYPE_GRAY_ALPHA;
    case 3: return PNG_COLOR_TYPE_RGB;
    default: fail(ErrorCode::kUnsupported, "PNG supports 1, 2 or 3 channels here");
  }
}

struct PngErrorState {
  std::string message;
};

void png_error_handler(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  if (state) state->message = msg;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

// libpng reports errors by longjmp; these helpers keep everything with a
// destructor outside the setjmp scope.
bool write_png_rows(std::FILE* fp, const PngImage& image, int color_type,
                    const png_byte* buffer, std::size_t stride, PngErrorState* state) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, state,
                                            png_error_handler, png_warning_handler);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), image.bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < image.height; ++r) {
    png_write_row(png, buffer + static_cast<std::size_t>(r) * stride);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

struct PngHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::size_t stride = 0;
};

bool read_png_rows(std::FILE* fp, PngHeader* header, std::vector<png_byte>* pixels,
                   PngErrorState* state) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, state,
                                           png_error_handler, png_warning_handler);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  header->width = png_get_image_width(png, info);
  header->height = png_get_image_height(png, info);
  header->bit_depth = png_get_bit_depth(png, info);
  header->color_type = png_get_color_type(png, info);
  header->stride = png_get_rowbytes(png, info);
  pixels->resize(header->stride * header->height);
  for (png_uint_32 r = 0; r < header->height; ++r) {
    png_read_row(png, pixels->data() + r * header->stride, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

}  // namespace

void write_png(const fs::path& path, const PngImage& image) {
  if (image.bit_depth != 8 && image.bit_depth != 16) {
    fail(ErrorCode::kUnsupported, "PNG bit depth must be 8 or 16");
  }
  const int color_type = png_color_type(image.channels);
  const std::size_t row_samples = static_cast<std::size_t>(image.width) * image.channels;
  if (image.samples.size() != row_samples * image.height) {
    fail(ErrorCode::kDimensionMismatch, "PNG sample count does not match dimensions");
  }
  const int bytes_per_sample = image.bit_depth / 8;
  std::vector<png_byte> buffer(row_samples * image.height * bytes_per_sample);
  for (std::size_t i = 0; i < image.samples.size(); ++i) {
    const std::uint16_t s = image.samples[i];
    if (bytes_per_sample == 2) {
      buffer[2 * i] = static_cast<png_byte>(s >> 8);
      buffer[2 * i + 1] = static_cast<png_byte>(s & 0xFF);
    } else {
      buffer[i] = static_cast<png_byte>(s);
    }
  }

  fs::path tmp = path;
  tmp += ".tmp";
  PngErrorState state;
  bool ok = false;
  {
    FilePtr fp(std::fopen(tmp.c_str(), "wb"));
    if (!fp) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
    ok = write_png_rows(fp.get(), image, color_type, buffer.data(),
                        row_samples * bytes_per_sample, &state) &&
         std::fflush(fp.get()) == 0;
  }
  std::error_code ec;
  if (!ok) {
    fs::remove(tmp, ec);
    fail(ErrorCode::kIo, "write failed on '" + path.string() + "'" +
                             (state.message.empty() ? "" : ": " + state.message));
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::kIo, "cannot rename into '" + path.string() + "'");
  }
}

PngImage read_png(const fs::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  PngErrorState state;
  PngHeader header;
  std::vector<png_byte> pixels;
  if (!read_png_rows(fp.get(), &header, &pixels, &state)) {
    fail(ErrorCode::kIo, path.string() + ": " + (state.message.empty() ? "PNG decode failed" : state.message));
  }
  PngImage image;
  image.width = static_cast<int>(header.width);
  image.height = static_cast<int>(header.height);
  image.bit_depth = header.bit_depth;
  if (image.bit_depth != 8 && image.bit_depth != 16) {
    fail(ErrorCode::kUnsupported, path.string() + ": only 8/16-bit PNGs are supported");
  }
  switch (header.color_type) {
    case PNG_COLOR_TYPE_GRAY: image.channels = 1; break;
    case PNG_COLOR_TYPE_GRAY_ALPHA: image.channels = 2; break;
    case PNG_COLOR_TYPE_RGB: image.channels = 3; break;
    default: fail(ErrorCode::kUnsupported, path.string() + ": unsupported PNG color type");
  }
  const std::size_t n = static_cast<std::size_t>(image.width) * image.channels;
  image.samples.reserve(n * image.height);
  for (int r = 0; r < image.height; ++r) {
    const png_byte* row = pixels.data() + static_cast<std::size_t>(r) * header.stride;
    for (std::size_t i = 0; i < n; ++i) {
      image.samples.push_back(image.bit_depth == 16
                                  ? static_cast<std::uint16_t>((row[2 * i] << 8) | row[2 * i + 1])
                                  : row[i]);
    }
  }
  return image;
}

fs::path raw_frame_base(const fs::path& path) {
  std::string s = path.string();
  for (const char* suffix : {".raw.png", ".raw.meta"}) {
    const std::string suf(suffix);
    if (s.size() > suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0) {
      return fs::path(s.substr(0, s.size() - suf.size()));
    }
  }
  return path;
}

void save_raw_frame(const RawFrame& frame, const fs::path& base) {
  PngImage img{frame.width, frame.height, 1, 16, frame.dn};
  const fs::path png_path = fs::path(base.string() + ".raw.png");
  const fs::path meta_path = fs::path(base.string() + ".raw.meta");
  std::vector<std::string> brackets;
  for (double t : frame.bracket_exposures_s) brackets.push_back(text::format_double(t));
  std::string meta;
  meta += "width=" + std::to_string(frame.width) + "\n";
  meta += "height=" + std::to_string(frame.height) + "\n";
  meta += "bit_depth=" + std::to_string(frame.bit_depth) + "\n";
  meta += "cfa=" + frame.cfa.name + "\n";
  if (!frame.cfa.filter_classes.empty()) {
    meta += "cfa_bands=" + std::to_string(frame.cfa.filter_classes.front().band_weights.size()) + "\n";
  }
  meta += "exposure_s=" + text::format_double(frame.exposure_s) + "\n";
  meta += "brackets_s=" + text::join(brackets, ",") + "\n";
  meta += "sensor_name=" + frame.sensor_name + "\n";
  meta += "rng_seed=" + std::to_string(frame.rng_seed) + "\n";
  meta += "pixel_pitch_um=" + text::format_double(frame.pixel_pitch_um) + "\n";
  write_png(png_path, img);
  try {
    text::write_file_atomic(meta_path, meta);
  } catch (...) {
    std::error_code ec;
    fs::remove(png_path, ec);
    throw;
  }
}

RawFrame load_raw_frame(const fs::path& path) {
  const fs::path base = raw_frame_base(path);
  const fs::path png_path = fs::path(base.string() + ".raw.png");
  const fs::path meta_path = fs::path(base.string() + ".raw.meta");
  std::map<std::string, std::string> kv;
  {
    std::istringstream in(text::read_file(meta_path));
    std::string line;
    while (std::getline(in, line)) {
      const auto t = text::trim(line);
      if (t.empty() || t.front() == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string_view::npos) fail(ErrorCode::kParse, meta_path.string() + ": expected key=value");
      kv[std::string(t.substr(0, eq))] = std::string(t.substr(eq + 1));
    }
  }
  auto get = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) fail(ErrorCode::kParse, meta_path.string() + ": missing key '" + key + "'");
    return it->second;
  };
  RawFrame frame;
  long long depth = 0;
  if (!text::parse_int(get("bit_depth"), depth) || !text::parse_double(get("exposure_s"), frame.exposure_s) ||
      !text::parse_u64(get("rng_seed"), frame.rng_seed) ||
      !text::parse_double(get("pixel_pitch_um"), frame.pixel_pitch_um)) {
    fail(ErrorCode::kParse, meta_path.string() + ": malformed numeric field");
  }
  frame.bit_depth = static_cast<int>(depth);
  long long cfa_bands = 3;
  if (const auto it = kv.find("cfa_bands"); it != kv.end() && (!text::parse_int(it->second, cfa_bands) || cfa_bands < 1)) {
    fail(ErrorCode::kParse, meta_path.string() + ": bad cfa_bands");
  }
  frame.cfa = CfaPattern::from_name(get("cfa"), static_cast<int>(cfa_bands));
  frame.sensor_name = get("sensor_name");
  if (const auto it = kv.find("brackets_s"); it != kv.end() && !text::trim(it->second).empty()) {
    for (const auto& f : text::split(it->second, ',')) {
      double t = 0;
      if (!text::parse_double(f, t)) fail(ErrorCode::kParse, meta_path.string() + ": bad brackets_s");
      frame.bracket_exposures_s.push_back(t);
    }
  }
  const PngImage img = read_png(png_path);
  if (img.channels != 1 || img.bit_depth != 16) {
    fail(ErrorCode::kInvalidData, png_path.string() + ": raw frames are 16-bit grayscale");
  }
  frame.width = img.width;
  frame.height = img.height;
  frame.dn = img.samples;
  for (auto v : frame.dn) {
    if (v > frame.max_dn()) {
      fail(ErrorCode::kInvalidData, png_path.string() + ": dn exceeds bit depth");
    }
  }
  return frame;
}

}  // namespace camforge
