#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "plvton/person.hpp"
#include "plvton/tensor.hpp"

namespace plvton {

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

/// 8-bit quantization used for every PNG: round(clamp(v, 0, 1) * 255).
std::uint8_t quantize_unit(double v) noexcept;

/// 1- or 3-channel tensor to an 8-bit gray or RGB PNG.
std::vector<std::uint8_t> encode_png(const ImageTensor& image);
/// Decodes any PNG to 3 x H x W (or 1 x H x W with `gray`) values k / 255.
ImageTensor decode_png(std::span<const std::uint8_t> bytes, bool gray = false);

void write_png(const std::filesystem::path& path, const ImageTensor& image);
ImageTensor read_png(const std::filesystem::path& path, bool gray = false);

/// Masks are gray PNGs of 0 and 255; reading thresholds at 128.
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);
BinaryMask read_mask_png(const std::filesystem::path& path);

/// Indexed PNG whose pixel values are class ids 0..6. Gray 8-bit files with
/// the same values are accepted on read.
std::vector<std::uint8_t> encode_parsing_png(const ParsingMap& parsing);
ParsingMap decode_parsing_png(std::span<const std::uint8_t> bytes);
void write_parsing_png(const std::filesystem::path& path, const ParsingMap& parsing);
ParsingMap read_parsing_png(const std::filesystem::path& path);

/// JSON array of {"id", "x", "y"} objects.
std::string keypoints_to_json(std::span<const Keypoint> points);
std::vector<Keypoint> keypoints_from_json(std::string_view text);
void write_keypoints(const std::filesystem::path& path, std::span<const Keypoint> points);
std::vector<Keypoint> read_keypoints(const std::filesystem::path& path);

}  // namespace plvton
