#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "plvton/error.hpp"
#include "plvton/fixtures.hpp"
#include "plvton/toynet.hpp"
#include "test_util.hpp"

using namespace plvton;
using plvton::testing::random_tensor;

namespace {

ImageTensor conv_oracle(const Conv2D& l, const ImageTensor& x) {
  const int oh = (x.height() - 1) / l.stride + 1;
  const int ow = (x.width() - 1) / l.stride + 1;
  ImageTensor out(l.out_channels, oh, ow);
  for (int o = 0; o < l.out_channels; ++o) {
    for (int y = 0; y < oh; ++y) {
      for (int xx = 0; xx < ow; ++xx) {
        double s = l.bias[o];
        for (int i = 0; i < l.in_channels; ++i) {
          for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
              const int sy = y * l.stride + ky - 1, sx = xx * l.stride + kx - 1;
              if (sy < 0 || sx < 0 || sy >= x.height() || sx >= x.width()) continue;
              s += l.w(o, i, ky, kx) * x(i, sy, sx);
            }
          }
        }
        out(o, y, xx) = s;
      }
    }
  }
  return out;
}

double dot(const ImageTensor& a, const ImageTensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.values()[i] * b.values()[i];
  return s;
}

double apply(double v, CandidateActivation a) { return a == CandidateActivation::kTanh ? std::tanh(v) : v; }

}  // namespace

TEST(CounterRngTest, DeterministicAndStreamSeparated) {
  CounterRng a(7, "layer"), b(7, "layer"), c(7, "other"), d(8, "layer");
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t va = a.next_u64();
    EXPECT_EQ(va, b.next_u64());
    differs_c |= va != c.next_u64();
    differs_d |= va != d.next_u64();
  }
  EXPECT_TRUE(differs_c);
  EXPECT_TRUE(differs_d);
  CounterRng u(1, "unit");
  for (int i = 0; i < 1000; ++i) {
    const double v = u.next_unit();
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  // splitmix64 reference value for input 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Conv2DTest, IdentityKernelAndStrideShape) {
  Conv2D id = Conv2D::zeros(1, 1);
  id.w(0, 0, 1, 1) = 1.0;
  std::mt19937_64 rng(1);
  const ImageTensor x = random_tensor(rng, 1, 5, 6);
  EXPECT_EQ(conv_forward(id, x), x);
  const Conv2D s2 = Conv2D::seeded(2, 3, 2, 1, "s2");
  const ImageTensor y = conv_forward(s2, random_tensor(rng, 2, 8, 8));
  EXPECT_EQ(y.channels(), 3);
  EXPECT_EQ(y.height(), 4);
  EXPECT_EQ(y.width(), 4);
  EXPECT_THROW(conv_forward(s2, ImageTensor(3, 8, 8)), DimensionError);
}

TEST(Conv2DTest, SeededLayerMatchesNestedLoops) {
  const FixturePair f = make_fixture(3);
  for (int stride : {1, 2}) {
    const Conv2D l = Conv2D::seeded(3, 5, stride, 11, "oracle");
    EXPECT_LE(max_abs_diff(conv_forward(l, f.person), conv_oracle(l, f.person)), 1e-9);
  }
  std::mt19937_64 rng(2);
  const Conv2D odd = Conv2D::seeded(4, 2, 2, 12, "odd");
  const ImageTensor x = random_tensor(rng, 4, 7, 5, -1, 1);
  EXPECT_LE(max_abs_diff(conv_forward(odd, x), conv_oracle(odd, x)), 1e-9);
}

TEST(Conv2DTest, SeedingIsPureAndBounded) {
  const Conv2D a = Conv2D::seeded(4, 6, 1, 99, "x");
  const Conv2D b = Conv2D::seeded(4, 6, 1, 99, "x");
  EXPECT_EQ(a.weight, b.weight);
  EXPECT_EQ(a.bias, b.bias);
  EXPECT_NE(a.weight, Conv2D::seeded(4, 6, 1, 99, "y").weight);
  const double bound = std::sqrt(1.0 / (4 * 9));
  for (double v : a.weight) {
    EXPECT_LE(std::abs(v), bound);
    EXPECT_EQ(v, static_cast<double>(static_cast<float>(v)));
  }
}

TEST(Conv2DTest, BackwardIsAdjointOfLinearPart) {
  std::mt19937_64 rng(3);
  for (int stride : {1, 2}) {
    Conv2D l = Conv2D::seeded(3, 4, stride, 5, "adj");
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
    const ImageTensor x = random_tensor(rng, 3, 9, 7, -1, 1);
    const ImageTensor y = conv_forward(l, x);
    const ImageTensor g = random_tensor(rng, 4, y.height(), y.width(), -1, 1);
    const ImageTensor gx = l.backward_input(g, 9, 7);
    EXPECT_NEAR(dot(y, g), dot(x, gx), 1e-10);
  }
}

TEST(SEBlockTest, ForcedGatesAndZeroChannel) {
  SEBlock open = SEBlock::seeded(4, 4, 1, "se");
  std::fill(open.w2.begin(), open.w2.end(), 0.0);
  std::fill(open.b2.begin(), open.b2.end(), 1000.0);
  std::mt19937_64 rng(4);
  const ImageTensor x = random_tensor(rng, 4, 5, 5, -1, 1);
  EXPECT_EQ(se_forward(open, x), x);

  const SEBlock seeded = SEBlock::seeded(4, 4, 2, "se");
  ImageTensor z = x;
  for (double& v : z.plane(2)) v = 0.0;
  const ImageTensor out = se_forward(seeded, z);
  for (double v : out.plane(2)) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(se_forward(seeded, ImageTensor(3, 2, 2)), DimensionError);
}

TEST(SEBlockTest, MatchesPoolAffineSigmoidOracle) {
  const FixturePair f = make_fixture(5);
  const SEBlock b = SEBlock::seeded(3, 4, 7, "se");
  ASSERT_EQ(b.reduced, 1);
  std::vector<double> pooled(3);
  for (int c = 0; c < 3; ++c) {
    double s = 0.0;
    for (int y = 0; y < f.person.height(); ++y) {
      for (int x = 0; x < f.person.width(); ++x) s += f.person(c, y, x);
    }
    pooled[c] = s / (f.person.height() * f.person.width());
  }
  double hidden = b.b1[0];
  for (int c = 0; c < 3; ++c) hidden += b.w1[c] * pooled[c];
  hidden = std::max(hidden, 0.0);
  const ImageTensor out = se_forward(b, f.person);
  for (int c = 0; c < 3; ++c) {
    const double gate = 1.0 / (1.0 + std::exp(-(b.b2[c] + b.w2[c] * hidden)));
    EXPECT_GT(gate, 0.0);
    EXPECT_LT(gate, 1.0);
    for (int y = 0; y < f.person.height(); y += 7) {
      for (int x = 0; x < f.person.width(); x += 5) {
        EXPECT_NEAR(out(c, y, x), gate * f.person(c, y, x), 1e-9);
        EXPECT_LE(std::abs(out(c, y, x)), std::abs(f.person(c, y, x)));
      }
    }
  }
}

TEST(ConvGRUTest, GatingLimits) {
  std::mt19937_64 rng(6);
  const ImageTensor h = random_tensor(rng, 2, 6, 5, -3, 3);
  const ImageTensor x = random_tensor(rng, 2, 6, 5, -3, 3);
  EXPECT_EQ(gru_step(ConvGRUCell::forced(GateLimit::kAlwaysUpdate), h, x), x);
  EXPECT_EQ(gru_step(ConvGRUCell::forced(GateLimit::kNeverUpdate), h, x), h);
  EXPECT_THROW(gru_step(ConvGRUCell::seeded(1), h, ImageTensor(2, 6, 4)), DimensionError);
  EXPECT_THROW(gru_step(ConvGRUCell::seeded(1), ImageTensor(3, 2, 2), ImageTensor(3, 2, 2)),
               DimensionError);
}

TEST(ConvGRUTest, SeededCellMatchesGateOracle) {
  std::mt19937_64 rng(7);
  const ConvGRUCell cell = ConvGRUCell::seeded(17);
  for (int trial = 0; trial < 3; ++trial) {
    const ImageTensor h = random_tensor(rng, 2, 8, 6, -2, 2);
    const ImageTensor x = random_tensor(rng, 2, 8, 6, -2, 2);
    const ImageTensor hx = concat_channels({&h, &x});
    ImageTensor z = conv_oracle(cell.update_gate, hx);
    ImageTensor r = conv_oracle(cell.reset_gate, hx);
    ImageTensor rh = h;
    for (std::size_t i = 0; i < rh.size(); ++i) {
      z.values()[i] = 1.0 / (1.0 + std::exp(-z.values()[i]));
      rh.values()[i] *= 1.0 / (1.0 + std::exp(-r.values()[i]));
    }
    ImageTensor cand = conv_oracle(cell.candidate, concat_channels({&rh, &x}));
    const GruTrace t = gru_step_trace(cell, h, x);
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double c = apply(cand.values()[i], cell.activation);
      const double zz = z.values()[i];
      const double expect = (1.0 - zz) * h.values()[i] + zz * c;
      EXPECT_NEAR(t.next.values()[i], expect, 1e-9);
      EXPECT_GT(zz, 0.0);
      EXPECT_LT(zz, 1.0);
      EXPECT_GE(t.next.values()[i], std::min(h.values()[i], c) - 1e-9);
      EXPECT_LE(t.next.values()[i], std::max(h.values()[i], c) + 1e-9);
    }
  }
}

TEST(EncoderDecoderTest, ShapesAndDecoderMaps) {
  EncoderDecoder net({3, 7, 8, false, 5, "net"});
  const FixturePair f = make_fixture(1);
  const EncoderDecoderOutput out = encdec_forward(net, f.person);
  EXPECT_EQ(out.output.channels(), 7);
  EXPECT_EQ(out.output.height(), 96);
  EXPECT_EQ(out.output.width(), 64);
  ASSERT_EQ(out.decoder_maps.size(), 5u);
  for (int k = 1; k <= 5; ++k) {
    EXPECT_EQ(out.decoder_maps[k - 1].height(), 96 >> (5 - k));
    EXPECT_EQ(out.decoder_maps[k - 1].width(), 64 >> (5 - k));
  }
}

TEST(EncoderDecoderTest, RandomAlignedSizes) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> mult(1, 3);
  EncoderDecoder net({2, 3, 4, true, 9, "prop"});
  for (int i = 0; i < 4; ++i) {
    const int h = 32 * mult(rng), w = 32 * mult(rng);
    const EncoderDecoderOutput out = net.forward(random_tensor(rng, 2, h, w));
    EXPECT_EQ(out.output.channels(), 3);
    EXPECT_EQ(out.output.height(), h);
    EXPECT_EQ(out.output.width(), w);
  }
}

TEST(EncoderDecoderTest, DivisibilityErrorNamesPaddedSize) {
  EncoderDecoder net({3, 3, 8, false, 1, "div"});
  try {
    net.forward(ImageTensor(3, 64, 48));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("64x64"), std::string::npos) << e.what();
  }
  EXPECT_THROW(net.forward(ImageTensor(4, 64, 64)), DimensionError);
}

TEST(EncoderDecoderTest, SeededConstructionIsDeterministic) {
  EncoderDecoder a({3, 2, 8, true, 77, "det"});
  EncoderDecoder b({3, 2, 8, true, 77, "det"});
  const FixturePair f = make_fixture(2);
  EXPECT_EQ(a.forward(f.person).output, b.forward(f.person).output);
}

TEST(PerceptualTest, LevelsDeterministicAndSensitive) {
  const FixturePair f = make_fixture(4, 50, 37);
  const auto a = toy_perceptual_features(f.person);
  const auto b = toy_perceptual_features(f.person);
  ASSERT_EQ(a.size(), 5u);
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(a[k], b[k]);
    EXPECT_EQ(a[k].height(), (50 + (1 << k) - 1) >> k);
    EXPECT_EQ(a[k].width(), (37 + (1 << k) - 1) >> k);
  }
  ImageTensor poked = f.person;
  poked(1, 20, 20) += 0.25;
  EXPECT_NE(toy_perceptual_features(poked)[0], a[0]);
  EXPECT_THROW(toy_perceptual_features(ImageTensor(1, 8, 8)), DimensionError);
}

TEST(PerceptualTest, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  const PerceptualExtractor ex;
  const ImageTensor x = random_tensor(rng, 3, 11, 9);
  const auto feats = ex.features(x);
  std::vector<ImageTensor> g;
  for (const auto& lvl : feats) g.push_back(random_tensor(rng, lvl.channels(), lvl.height(), lvl.width(), -1, 1));
  const ImageTensor grad = ex.backward(x, g);
  auto objective = [&](const ImageTensor& in) {
    const auto fs = ex.features(in);
    double s = 0.0;
    for (std::size_t k = 0; k < fs.size(); ++k) s += dot(fs[k], g[k]);
    return s;
  };
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  for (int i = 0; i < 20; ++i) {
    const std::size_t idx = pick(rng);
    const double eps = 1e-6;
    ImageTensor p = x, m = x;
    p.values()[idx] += eps;
    m.values()[idx] -= eps;
    const double fd = (objective(p) - objective(m)) / (2 * eps);
    EXPECT_NEAR(grad.values()[idx], fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(AvgPoolTest, PartialWindowsAndAdjoint) {
  ImageTensor x(1, 3, 3);
  for (int i = 0; i < 9; ++i) x.values()[i] = i;
  const ImageTensor p = avg_pool2(x);
  ASSERT_EQ(p.height(), 2);
  EXPECT_DOUBLE_EQ(p(0, 0, 0), (0 + 1 + 3 + 4) / 4.0);
  EXPECT_DOUBLE_EQ(p(0, 0, 1), (2 + 5) / 2.0);
  EXPECT_DOUBLE_EQ(p(0, 1, 1), 8.0);
  std::mt19937_64 rng(10);
  const ImageTensor a = random_tensor(rng, 2, 7, 6);
  const ImageTensor g = random_tensor(rng, 2, 4, 3);
  EXPECT_NEAR(dot(avg_pool2(a), g), dot(a, avg_pool2_adjoint(g, 7, 6)), 1e-12);
}

TEST(WeightsTest, RoundTripAndMismatch) {
  EncoderDecoder net({3, 2, 4, true, 3, "w"});
  std::vector<ParamRef> params;
  net.collect("w", params);
  ASSERT_FALSE(params.empty());
  const auto path = std::filesystem::temp_directory_path() / "plvton_weights_test.plvw";
  write_weights(path, params);
  const std::vector<WeightRecord> records = read_weights(path);
  std::filesystem::remove(path);
  ASSERT_EQ(records.size(), params.size());

  EncoderDecoder other({3, 2, 4, true, 4, "w"});
  std::vector<ParamRef> other_params;
  other.collect("w", other_params);
  const FixturePair f = make_fixture(6);
  EXPECT_NE(other.forward(f.person).output, net.forward(f.person).output);
  load_weights(records, other_params);
  EXPECT_EQ(other.forward(f.person).output, net.forward(f.person).output);

  std::vector<WeightRecord> bad = records;
  bad[0].name = "nope";
  EXPECT_THROW(load_weights(bad, other_params), StructureError);
  std::vector<std::uint8_t> bytes = encode_weights(params);
  bytes[1] = 'X';
  EXPECT_THROW(decode_weights(bytes), FormatError);
}
