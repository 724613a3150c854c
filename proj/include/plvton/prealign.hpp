#pragma once

#include <utility>

#include "plvton/person.hpp"
#include "plvton/tensor.hpp"

namespace plvton {

/// Inclusive pixel bounds of a region.
struct Rect {
  int x_min = 0;
  int x_max = 0;
  int y_min = 0;
  int y_max = 0;

  int height() const noexcept { return y_max - y_min + 1; }
  int width() const noexcept { return x_max - x_min + 1; }

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Location-and-size alignment of in-shop clothing to the person.
struct PreAlignResult {
  ImageTensor shifted;        // C translated so the clothing centers coincide
  BinaryMask shifted_mask;
  ImageTensor scaled;         // shifted image rescaled about the shared center
  BinaryMask scaled_mask;
  int shift_x = 0;
  int shift_y = 0;
  double ratio = 1.0;         // h_s / h_t
  int source_height = 0;      // h_s
  int target_height = 0;      // h_t
};

Rect circumscribed_rect(const BinaryMask& mask);
Point2 rect_center(const Rect& r);
int clothing_height(const BinaryMask& mask);

PreAlignResult prealign(const ImageTensor& cloth, const BinaryMask& cloth_mask,
                        const ParsingMap& source);

}  // namespace plvton
