#include "plvton/io.hpp"

#include <png.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "plvton/error.hpp"

namespace plvton {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return bytes;
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create '" + tmp.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for '" + path.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename onto '" + path.string() + "'");
  }
}

void write_file_atomic(const fs::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                    text.size()));
}

std::uint8_t quantize_unit(double v) noexcept {
  if (!(v > 0.0)) return 0;
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

namespace {

std::vector<std::uint8_t> write_simplified(png_image& image, const void* buffer,
                                           const void* colormap) {
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(image, size, 0, buffer, 0, colormap)) {
    throw FormatError(std::string("png encode failed: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, buffer, 0, colormap)) {
    throw FormatError(std::string("png encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const ImageTensor& image) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw DimensionError("encode_png: expected 1 or 3 channels, got " + image.shape_string());
  }
  const int c = image.channels();
  std::vector<std::uint8_t> buf(image.size());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int k = 0; k < c; ++k) {
        buf[(static_cast<std::size_t>(y) * image.width() + x) * c + k] =
            quantize_unit(image(k, y, x));
      }
    }
  }
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = c == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  return write_simplified(img, buf.data(), nullptr);
}

ImageTensor decode_png(std::span<const std::uint8_t> bytes, bool gray) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw FormatError(std::string("png decode failed: ") + img.message);
  }
  img.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const int c = gray ? 1 : 3;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&img);
    throw FormatError(std::string("png decode failed: ") + img.message);
  }
  const int h = static_cast<int>(img.height);
  const int w = static_cast<int>(img.width);
  ImageTensor out(c, h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int k = 0; k < c; ++k) {
        out(k, y, x) = buf[(static_cast<std::size_t>(y) * w + x) * c + k] / 255.0;
      }
    }
  }
  return out;
}

void write_png(const fs::path& path, const ImageTensor& image) {
  write_file_atomic(path, encode_png(image));
}

ImageTensor read_png(const fs::path& path, bool gray) {
  try {
    return decode_png(read_file_bytes(path), gray);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_mask_png(const fs::path& path, const BinaryMask& mask) {
  write_png(path, mask.to_tensor());
}

BinaryMask read_mask_png(const fs::path& path) {
  return BinaryMask::from_threshold(read_png(path, true), 128.0 / 255.0);
}

namespace {

// Distinct colors so parsing PNGs are viewable; the pixel values are the ids.
constexpr std::uint8_t kPalette[kParsingClasses][3] = {
    {0, 0, 0}, {128, 64, 0}, {255, 200, 160}, {220, 40, 40},
    {40, 160, 40}, {40, 80, 220}, {200, 200, 60},
};

struct MemoryReader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t n) {
  auto* r = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (r->bytes.size() - r->pos < n) png_error(png, "truncated data");
  std::memcpy(out, r->bytes.data() + r->pos, n);
  r->pos += n;
}

void on_png_error(png_structp png, png_const_charp msg) {
  auto* buf = static_cast<char*>(png_get_error_ptr(png));
  std::strncpy(buf, msg, 255);
  buf[255] = '\0';
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

// Reads raw 8-bit sample values of a palette or gray PNG. Returns false with
// `message` set on failure. Only trivially destructible state crosses setjmp.
bool read_indexed(std::span<const std::uint8_t> bytes, std::uint8_t* dest, std::size_t capacity,
                  png_uint_32* width, png_uint_32* height, char* message) {
  MemoryReader reader{bytes, 0};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, message, on_png_error,
                                           on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &reader, read_from_memory);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if ((color != PNG_COLOR_TYPE_PALETTE && color != PNG_COLOR_TYPE_GRAY) || depth > 8) {
    png_error(png, "parsing map must be an 8-bit indexed or gray PNG");
  }
  if (depth < 8) png_set_packing(png);
  png_read_update_info(png, info);
  *width = png_get_image_width(png, info);
  *height = png_get_image_height(png, info);
  if (dest == nullptr || static_cast<std::size_t>(*width) * *height > capacity) {
    png_destroy_read_struct(&png, &info, nullptr);
    return true;  // caller retries with a buffer
  }
  for (png_uint_32 y = 0; y < *height; ++y) {
    png_bytep row = dest + static_cast<std::size_t>(y) * *width;
    png_read_row(png, row, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

}  // namespace

std::vector<std::uint8_t> encode_parsing_png(const ParsingMap& parsing) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(parsing.width());
  img.height = static_cast<png_uint_32>(parsing.height());
  img.format = PNG_FORMAT_RGB_COLORMAP;
  img.colormap_entries = kParsingClasses;
  return write_simplified(img, parsing.labels().data(), kPalette);
}

ParsingMap decode_parsing_png(std::span<const std::uint8_t> bytes) {
  char message[256] = "malformed png";
  png_uint_32 w = 0;
  png_uint_32 h = 0;
  if (!read_indexed(bytes, nullptr, 0, &w, &h, message)) {
    throw FormatError(std::string("parsing png: ") + message);
  }
  if (w == 0 || h == 0) throw FormatError("parsing png: empty image");
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(w) * h);
  if (!read_indexed(bytes, labels.data(), labels.size(), &w, &h, message)) {
    throw FormatError(std::string("parsing png: ") + message);
  }
  for (std::uint8_t v : labels) {
    if (v >= kParsingClasses) {
      throw FormatError("parsing png: class id " + std::to_string(v) + " outside 0..6");
    }
  }
  return ParsingMap(static_cast<int>(h), static_cast<int>(w), std::move(labels));
}

void write_parsing_png(const fs::path& path, const ParsingMap& parsing) {
  write_file_atomic(path, encode_parsing_png(parsing));
}

ParsingMap read_parsing_png(const fs::path& path) {
  try {
    return decode_parsing_png(read_file_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string keypoints_to_json(std::span<const Keypoint> points) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Keypoint& p : points) arr.push_back({{"id", p.id}, {"x", p.x}, {"y", p.y}});
  return arr.dump(2) + "\n";
}

std::vector<Keypoint> keypoints_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("keypoints: ") + e.what());
  }
  if (!doc.is_array()) throw FormatError("keypoints: expected a JSON array");
  std::vector<Keypoint> points;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("id") || !item.contains("x") || !item.contains("y") ||
        !item["id"].is_number_integer() || !item["x"].is_number() || !item["y"].is_number()) {
      throw FormatError("keypoints: each entry needs integer id and numeric x, y");
    }
    points.push_back({item["id"].get<int>(), item["x"].get<double>(), item["y"].get<double>()});
  }
  return points;
}

void write_keypoints(const fs::path& path, std::span<const Keypoint> points) {
  write_file_atomic(path, keypoints_to_json(points));
}

std::vector<Keypoint> read_keypoints(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return keypoints_from_json(
        std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace plvton
