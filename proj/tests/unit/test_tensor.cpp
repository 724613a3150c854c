#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "plvton/error.hpp"
#include "plvton/tensor.hpp"
#include "test_util.hpp"

using namespace plvton;
using plvton::testing::random_tensor;

namespace {

// Plain bilinear interpolation without the zero-padding rule.
double bilinear_oracle(const ImageTensor& t, int c, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, t.width() - 1);
  const int y1 = std::min(y0 + 1, t.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  return (1 - fy) * ((1 - fx) * t(c, y0, x0) + fx * t(c, y0, x1)) +
         fy * ((1 - fx) * t(c, y1, x0) + fx * t(c, y1, x1));
}

double conv3_replicate(const ImageTensor& t, int c, int y, int x, const double k[3][3]) {
  double acc = 0.0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int yy = std::clamp(y + dy, 0, t.height() - 1);
      const int xx = std::clamp(x + dx, 0, t.width() - 1);
      acc += k[dy + 1][dx + 1] * t(c, yy, xx);
    }
  }
  return acc;
}

}  // namespace

TEST(ImageTensorTest, RejectsNonPositiveDimensions) {
  EXPECT_THROW(ImageTensor(0, 2, 2), DimensionError);
  EXPECT_THROW(ImageTensor(1, 0, 2), DimensionError);
  EXPECT_THROW(ImageTensor(1, 2, 2, std::vector<double>(3)), DimensionError);
  ImageTensor t(2, 3, 4, 0.5);
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(t.plane(1).size(), 12u);
}

TEST(BinaryMaskTest, ThresholdIsInclusive) {
  ImageTensor t(1, 1, 3, std::vector<double>{0.49, 0.5, 0.9});
  const BinaryMask m = BinaryMask::from_threshold(t, 0.5);
  EXPECT_FALSE(m.at(0, 0));
  EXPECT_TRUE(m.at(0, 1));
  EXPECT_TRUE(m.at(0, 2));
  EXPECT_EQ(m.count(), 2u);
}

TEST(BilinearSampleTest, IntegerCoordinatesAreExactLookups) {
  std::mt19937_64 rng(1);
  const ImageTensor t = random_tensor(rng, 3, 6, 7);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 7; ++x) {
      const auto v = bilinear_sample(t, x, y);
      for (int c = 0; c < 3; ++c) EXPECT_EQ(v[c], t(c, y, x));
    }
  }
}

TEST(BilinearSampleTest, MidpointAndPadding) {
  ImageTensor t(1, 1, 2, std::vector<double>{0.0, 1.0});
  EXPECT_DOUBLE_EQ(bilinear_sample(t, 0.5, 0.0)[0], 0.5);
  EXPECT_EQ(bilinear_sample(t, -5.0, 0.0)[0], 0.0);
  EXPECT_EQ(bilinear_sample(t, 0.0, 1.5)[0], 0.0);
  EXPECT_EQ(bilinear_sample(t, 1.01, 0.0)[0], 0.0);
}

TEST(BilinearSampleTest, InteriorMatchesOracle) {
  std::mt19937_64 rng(2);
  const ImageTensor t = random_tensor(rng, 2, 9, 8);
  std::uniform_real_distribution<double> ux(0.0, 6.99), uy(0.0, 7.99);
  for (int i = 0; i < 200; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    const auto v = bilinear_sample(t, x, y);
    for (int c = 0; c < 2; ++c) EXPECT_NEAR(v[c], bilinear_oracle(t, c, x, y), 1e-12);
  }
}

TEST(ResizeBilinearTest, IdentityAndConstant) {
  std::mt19937_64 rng(3);
  const ImageTensor t = random_tensor(rng, 3, 5, 7);
  EXPECT_EQ(max_abs_diff(resize_bilinear(t, 5, 7), t), 0.0);
  const ImageTensor k(2, 4, 3, 0.37);
  const ImageTensor r = resize_bilinear(k, 9, 11);
  for (double v : r.values()) EXPECT_NEAR(v, 0.37, 1e-15);
}

TEST(ResizeBilinearTest, RampUpscaleMatchesPerPixelOracle) {
  const ImageTensor t(1, 2, 2, std::vector<double>{0.0, 1.0, 2.0, 3.0});
  const ImageTensor r = resize_bilinear(t, 4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double sy = std::clamp((i + 0.5) * 2.0 / 4.0 - 0.5, 0.0, 1.0);
      const double sx = std::clamp((j + 0.5) * 2.0 / 4.0 - 0.5, 0.0, 1.0);
      // value = x + 2 y on the 2x2 grid is bilinear itself.
      EXPECT_NEAR(r(0, i, j), sx + 2.0 * sy, 1e-12);
    }
  }
}

TEST(ResizeBilinearTest, StaysWithinInputRange) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const ImageTensor t = random_tensor(rng, 1, 7, 5, -2.0, 3.0);
    const auto [lo, hi] = std::minmax_element(t.values().begin(), t.values().end());
    const ImageTensor r = resize_bilinear(t, 3 + trial, 13 - trial);
    for (double v : r.values()) {
      EXPECT_GE(v, *lo - 1e-12);
      EXPECT_LE(v, *hi + 1e-12);
    }
  }
}

TEST(SobelTest, RampsGiveEightInside) {
  ImageTensor hx(1, 6, 7), vy(1, 6, 7);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 7; ++x) {
      hx(0, y, x) = x;
      vy(0, y, x) = y;
    }
  }
  const ImageTensor gh = sobel_gradients(hx);
  const ImageTensor gv = sobel_gradients(vy);
  ASSERT_EQ(gh.channels(), 2);
  for (int y = 1; y < 5; ++y) {
    for (int x = 1; x < 6; ++x) {
      EXPECT_EQ(gh(0, y, x), 8.0);
      EXPECT_EQ(gh(1, y, x), 0.0);
      EXPECT_EQ(gv(0, y, x), 0.0);
      EXPECT_EQ(gv(1, y, x), 8.0);
    }
  }
  const ImageTensor gc = sobel_gradients(ImageTensor(2, 4, 4, 0.3));
  for (double v : gc.values()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(sobel_gradients(ImageTensor(1, 2, 5)), DimensionError);
}

TEST(SobelTest, MatchesDirectConvolutionWithReplicatePadding) {
  const double kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  const double ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  std::mt19937_64 rng(5);
  const ImageTensor t = random_tensor(rng, 2, 5, 6);
  const ImageTensor g = sobel_gradients(t);
  for (int c = 0; c < 2; ++c) {
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 6; ++x) {
        EXPECT_NEAR(g(2 * c, y, x), conv3_replicate(t, c, y, x, kx), 1e-12);
        EXPECT_NEAR(g(2 * c + 1, y, x), conv3_replicate(t, c, y, x, ky), 1e-12);
      }
    }
  }
}

TEST(SobelTest, IsLinear) {
  std::mt19937_64 rng(6);
  const ImageTensor a = random_tensor(rng, 3, 6, 5);
  const ImageTensor b = random_tensor(rng, 3, 6, 5);
  const double alpha = 0.7, beta = -1.3;
  ImageTensor mix(3, 6, 5);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    mix.values()[i] = alpha * a.values()[i] + beta * b.values()[i];
  }
  const ImageTensor gm = sobel_gradients(mix);
  const ImageTensor ga = sobel_gradients(a);
  const ImageTensor gb = sobel_gradients(b);
  for (std::size_t i = 0; i < gm.size(); ++i) {
    EXPECT_NEAR(gm.values()[i], alpha * ga.values()[i] + beta * gb.values()[i], 1e-9);
  }
}

TEST(SobelTest, AdjointSatisfiesInnerProductIdentity) {
  std::mt19937_64 rng(7);
  const ImageTensor x = random_tensor(rng, 2, 5, 6, -1, 1);
  const ImageTensor g = random_tensor(rng, 4, 5, 6, -1, 1);
  const ImageTensor sx = sobel_gradients(x);
  const ImageTensor atg = sobel_gradients_adjoint(g, 2);
  const double lhs = std::inner_product(sx.values().begin(), sx.values().end(), g.values().begin(), 0.0);
  const double rhs = std::inner_product(x.values().begin(), x.values().end(), atg.values().begin(), 0.0);
  EXPECT_NEAR(lhs, rhs, 1e-10);
}

TEST(GaussianBlurTest, KernelAndErrors) {
  EXPECT_THROW(gaussian_kernel(0.0), ParameterError);
  EXPECT_THROW(gaussian_blur(ImageTensor(1, 3, 3), -1.0), ParameterError);
  const auto k = gaussian_kernel(1.2);
  EXPECT_EQ(k.size(), 2u * 4u + 1u);
  EXPECT_NEAR(std::accumulate(k.begin(), k.end(), 0.0), 1.0, 1e-15);
}

TEST(GaussianBlurTest, ConstantImageUnchanged) {
  const ImageTensor t(3, 10, 9, 0.42);
  const ImageTensor b = gaussian_blur(t, 3.0);
  for (double v : b.values()) EXPECT_NEAR(v, 0.42, 1e-9);
}

TEST(GaussianBlurTest, ImpulseGivesOuterProductOfTabulatedKernel) {
  const double sigma = 1.5;
  const int r = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> k;
  double s = 0.0;
  for (int i = -r; i <= r; ++i) {
    k.push_back(std::exp(-i * i / (2 * sigma * sigma)));
    s += k.back();
  }
  for (double& v : k) v /= s;
  ImageTensor t(1, 21, 21);
  t(0, 10, 10) = 1.0;
  const ImageTensor b = gaussian_blur(t, sigma);
  double total = 0.0;
  for (int y = 0; y < 21; ++y) {
    for (int x = 0; x < 21; ++x) {
      const int dy = y - 10, dx = x - 10;
      const double expect = std::abs(dy) <= r && std::abs(dx) <= r ? k[dy + r] * k[dx + r] : 0.0;
      EXPECT_NEAR(b(0, y, x), expect, 1e-12);
      total += b(0, y, x);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(GaussianBlurTest, TinySigmaIsIdentity) {
  std::mt19937_64 rng(8);
  const ImageTensor t = random_tensor(rng, 3, 8, 8);
  EXPECT_LE(max_abs_diff(gaussian_blur(t, 0.1), t), 1e-6);
}

TEST(GaussianBlurTest, MeanDriftIsSmallOnTestRasters) {
  std::mt19937_64 rng(9);
  for (double sigma : {0.5, 1.0, 2.0, 3.0}) {
    const ImageTensor t = random_tensor(rng, 1, 64, 48);
    const ImageTensor b = gaussian_blur(t, sigma);
    const double m0 = std::accumulate(t.values().begin(), t.values().end(), 0.0) / t.size();
    const double m1 = std::accumulate(b.values().begin(), b.values().end(), 0.0) / b.size();
    EXPECT_LT(std::abs(m1 - m0) / m0, 0.02) << "sigma " << sigma;
  }
}

TEST(PatchTest, FourByFourGrid) {
  ImageTensor t(1, 4, 4);
  for (int i = 0; i < 16; ++i) t.values()[i] = i;
  const PatchSet p = extract_patches(t, 2);
  ASSERT_EQ(p.patches.size(), 4u);
  const std::vector<std::vector<double>> expect = {
      {0, 1, 4, 5}, {2, 3, 6, 7}, {8, 9, 12, 13}, {10, 11, 14, 15}};
  for (int i = 0; i < 4; ++i) {
    const auto v = p.patches[i].values();
    EXPECT_EQ(std::vector<double>(v.begin(), v.end()), expect[i]);
  }
}

TEST(PatchTest, ScaleOneAndErrors) {
  std::mt19937_64 rng(10);
  const ImageTensor t = random_tensor(rng, 1, 5, 3);
  const PatchSet p = extract_patches(t, 1);
  ASSERT_EQ(p.patches.size(), 1u);
  EXPECT_EQ(p.patches[0], t);
  EXPECT_THROW(extract_patches(t, 4), ParameterError);
  EXPECT_THROW(extract_patches(ImageTensor(3, 4, 4), 2), DimensionError);
}

TEST(PatchTest, ZeroPaddedTilesAndRoundTrip) {
  std::mt19937_64 rng(11);
  for (int s = 1; s <= 5; ++s) {
    const ImageTensor t = random_tensor(rng, 1, 11, 7);
    const PatchSet p = extract_patches(t, s);
    const int ph = (11 + s - 1) / s, pw = (7 + s - 1) / s;
    ASSERT_EQ(p.patches.size(), static_cast<std::size_t>(s * s));
    for (int gy = 0; gy < s; ++gy) {
      for (int gx = 0; gx < s; ++gx) {
        const ImageTensor& tile = p.patches[gy * s + gx];
        ASSERT_EQ(tile.height(), ph);
        ASSERT_EQ(tile.width(), pw);
        for (int y = 0; y < ph; ++y) {
          for (int x = 0; x < pw; ++x) {
            const int sy = gy * ph + y, sx = gx * pw + x;
            const double expect = sy < 11 && sx < 7 ? t(0, sy, sx) : 0.0;
            EXPECT_EQ(tile(0, y, x), expect);
          }
        }
      }
    }
    EXPECT_EQ(reassemble_patches(p, 11, 7), t);
  }
}

TEST(L1MeanTest, ValuesAndErrors) {
  EXPECT_EQ(l1_mean(ImageTensor(2, 3, 3, 0.2), ImageTensor(2, 3, 3, 0.2)), 0.0);
  EXPECT_EQ(l1_mean(ImageTensor(1, 3, 3, 0.0), ImageTensor(1, 3, 3, 1.0)), 1.0);
  EXPECT_THROW(l1_mean(ImageTensor(1, 3, 3), ImageTensor(1, 3, 4)), DimensionError);
  std::mt19937_64 rng(12);
  const ImageTensor a = random_tensor(rng, 3, 5, 4), b = random_tensor(rng, 3, 5, 4);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a.values()[i] - b.values()[i]);
  EXPECT_NEAR(l1_mean(a, b), acc / a.size(), 1e-12);
}

TEST(TensorHelpersTest, TranslatePadCropConcat) {
  std::mt19937_64 rng(13);
  const ImageTensor t = random_tensor(rng, 2, 4, 5);
  const ImageTensor s = translate(t, 2, -1);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x) {
      const int sy = y + 1, sx = x - 2;
      const double expect = sy < 4 && sx >= 0 ? t(1, sy, sx) : 0.0;
      EXPECT_EQ(s(1, y, x), expect);
    }
  }
  const ImageTensor p = pad_bottom_right(t, 7, 8);
  EXPECT_EQ(crop_top_left(p, 4, 5), t);
  EXPECT_EQ(p(0, 6, 7), 0.0);
  const ImageTensor c = concat_channels({&t, &s});
  EXPECT_EQ(c.channels(), 4);
  EXPECT_EQ(select_channels(c, 2, 2), s);
  EXPECT_THROW(concat_channels({&t, &p}), DimensionError);
}
