#pragma once

#include <array>

#include "plvton/pipeline.hpp"

namespace plvton::testing {

struct Summary {
  double sum = 0.0;
  double sum_sq = 0.0;
};

inline Summary summarize(const ImageTensor& t) {
  Summary s;
  for (double v : t.values()) {
    s.sum += v;
    s.sum_sq += v * v;
  }
  return s;
}

struct Golden {
  const char* name;
  double sum;
  double sum_sq;
};

// Fixture seed 7, model seed 42, 96x64, eval mode. Captured on the first run.
inline constexpr std::array<Golden, 5> kGolden = {{
    {"f_a", -1203.7643756997102, 871.37858658930679},
    {"C_w", 1309.7626827332524, 903.3765621427732},
    {"parsing probabilities", 6144.0000000000109, 2301.6882022357004},
    {"I_c", 9446.464238076509, 4845.9495848808783},
    {"I_f", 9321.2838560609889, 4715.9257934147008},
}};

inline std::array<Summary, 5> golden_summaries(const TryOnBundle& b) {
  return {summarize(b.mcw.flow.tensor()), summarize(b.mcw.warped), summarize(b.hpe.probabilities),
          summarize(b.ltf.coarse), summarize(b.ltf.final_image)};
}

}  // namespace plvton::testing
