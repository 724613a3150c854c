#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "plvton/person.hpp"
#include "plvton/tensor.hpp"

namespace plvton {

/// Procedurally drawn person and in-shop clothing item.
struct FixturePair {
  ImageTensor person;               // I, 3 x H x W
  ParsingMap parsing;               // P^s
  std::vector<Keypoint> keypoints;  // 18, COCO order
  ImageTensor cloth;                // C, black background
  BinaryMask cloth_mask;            // M_c
};

/// Deterministic in (seed, height, width). Requires height >= 32 and width >= 24;
/// both clothing regions are at least 8 rows tall.
FixturePair make_fixture(std::uint64_t seed, int height = 96, int width = 64);

/// Writes I.png, P_s.png, K.json, C.png and M_c.png into `dir`.
void write_fixture(const std::filesystem::path& dir, const FixturePair& pair);
FixturePair read_fixture(const std::filesystem::path& dir);

}  // namespace plvton
