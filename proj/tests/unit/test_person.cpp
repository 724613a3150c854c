#include <gtest/gtest.h>

#include <random>

#include "plvton/error.hpp"
#include "plvton/fixtures.hpp"
#include "plvton/person.hpp"
#include "test_util.hpp"

using namespace plvton;
using plvton::testing::random_tensor;

namespace {

ParsingMap random_parsing(std::mt19937_64& rng, int h, int w) {
  std::uniform_int_distribution<int> cls(0, kParsingClasses - 1);
  ParsingMap p(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) p.set(y, x, static_cast<std::uint8_t>(cls(rng)));
  }
  return p;
}

}  // namespace

TEST(ParsingMapTest, OneHotRoundTripAndPartition) {
  std::mt19937_64 rng(1);
  const ParsingMap p = random_parsing(rng, 6, 5);
  const ImageTensor oh = p.to_one_hot();
  ASSERT_EQ(oh.channels(), 7);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 5; ++x) {
      double s = 0.0;
      for (int c = 0; c < 7; ++c) s += oh(c, y, x);
      EXPECT_EQ(s, 1.0);
    }
  }
  EXPECT_EQ(ParsingMap::from_one_hot(oh), p);
}

TEST(ParsingMapTest, RejectsInvalidPlanes) {
  ImageTensor bad(7, 2, 2);
  EXPECT_THROW(ParsingMap::from_one_hot(bad), ValidationError);
  bad(0, 0, 0) = bad(1, 0, 0) = 1.0;
  EXPECT_THROW(ParsingMap::from_one_hot(bad), ValidationError);
  EXPECT_THROW(ParsingMap::from_one_hot(ImageTensor(6, 2, 2)), DimensionError);
  EXPECT_THROW(ParsingMap(2, 2, std::vector<std::uint8_t>{0, 1, 7, 2}), ValidationError);
}

TEST(ParsingMapTest, ArgmaxTakesFirstMaximum) {
  ImageTensor s(7, 1, 2);
  s(2, 0, 0) = 1.0;
  s(5, 0, 0) = 1.0;
  s(6, 0, 1) = 0.1;
  const ParsingMap p = ParsingMap::from_argmax(s);
  EXPECT_EQ(p.at(0, 0), 2);
  EXPECT_EQ(p.at(0, 1), 6);
}

TEST(ClassMaskTest, AllNoneAndHandBuilt) {
  std::mt19937_64 rng(2);
  const ParsingMap p = random_parsing(rng, 5, 5);
  EXPECT_EQ(class_mask(p, {0, 1, 2, 3, 4, 5, 6}).count(), 25u);
  EXPECT_EQ(class_mask(p, std::span<const int>{}).count(), 0u);
  EXPECT_THROW(class_mask(p, {7}), ParameterError);
  EXPECT_THROW(class_mask(p, {-1}), ParameterError);

  ParsingMap q(4, 4);
  q.set(1, 1, 3);
  q.set(2, 3, 3);
  q.set(0, 0, 4);
  const BinaryMask m = class_mask(q, {3});
  EXPECT_EQ(m.count(), 2u);
  EXPECT_TRUE(m.at(1, 1));
  EXPECT_TRUE(m.at(2, 3));
}

TEST(AgnosticMaskTest, RectangleFromExtremes) {
  ParsingMap p(8, 6);
  for (int y = 2; y <= 5; ++y) {
    for (int x = 1; x <= 3; ++x) {
      if ((x + y) % 2 == 0 || y == 2 || y == 5 || x == 1 || x == 3) p.set(y, x, 3);
    }
  }
  const BinaryMask m = build_agnostic_mask(p);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 6; ++x) {
      EXPECT_EQ(m.at(y, x), y >= 2 && y <= 5 && x >= 1 && x <= 3) << y << "," << x;
    }
  }
}

TEST(AgnosticMaskTest, ArmsJoinAndErrors) {
  ParsingMap p(6, 6);
  p.set(2, 2, 3);
  p.set(5, 5, 4);
  p.set(0, 5, 5);
  const BinaryMask m = build_agnostic_mask(p);
  EXPECT_EQ(m.count(), 3u);
  EXPECT_TRUE(m.at(5, 5));
  EXPECT_TRUE(m.at(0, 5));
  EXPECT_THROW(build_agnostic_mask(ParsingMap(4, 4)), EmptyRegionError);
  EXPECT_EQ(build_agnostic_mask(ParsingMap(3, 3, 3)).count(), 9u);
}

TEST(AgnosticMaskTest, ContainsClothingAndMaskingIsIdempotent) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const FixturePair f = make_fixture(seed);
    const BinaryMask m = build_agnostic_mask(f.parsing);
    const BinaryMask cloth = class_mask(f.parsing, {3});
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) {
        if (cloth.at(y, x)) {
          EXPECT_TRUE(m.at(y, x));
        }
      }
    }
    const MaskedPerson once = apply_agnostic_mask(f.person, f.parsing, m);
    const MaskedPerson twice = apply_agnostic_mask(once.image, once.parsing, m);
    EXPECT_EQ(once.image, twice.image);
    EXPECT_EQ(once.parsing, twice.parsing);
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) {
        for (int c = 0; c < 3; ++c) {
          EXPECT_EQ(once.image(c, y, x), m.at(y, x) ? 0.0 : f.person(c, y, x));
        }
        EXPECT_EQ(once.parsing.at(y, x), m.at(y, x) ? 0 : f.parsing.at(y, x));
      }
    }
  }
}

TEST(AgnosticMaskTest, ExtremeMasks) {
  std::mt19937_64 rng(3);
  const ImageTensor img = random_tensor(rng, 3, 4, 5);
  const ParsingMap p = random_parsing(rng, 4, 5);
  const MaskedPerson none = apply_agnostic_mask(img, p, BinaryMask(4, 5, false));
  EXPECT_EQ(none.image, img);
  EXPECT_EQ(none.parsing, p);
  const MaskedPerson all = apply_agnostic_mask(img, p, BinaryMask(4, 5, true));
  for (double v : all.image.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(all.parsing, ParsingMap(4, 5, 0));
  EXPECT_THROW(apply_agnostic_mask(img, p, BinaryMask(4, 4)), DimensionError);
}

TEST(LimbMapTest, MasksToArmClasses) {
  std::mt19937_64 rng(4);
  const ImageTensor img = random_tensor(rng, 3, 6, 7);
  const ParsingMap p = random_parsing(rng, 6, 7);
  const LimbMap l = extract_limb_map(p, img);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 7; ++x) {
      const bool arm = p.at(y, x) == 4 || p.at(y, x) == 5;
      for (int c = 0; c < 3; ++c) EXPECT_EQ(l.image(c, y, x), arm ? img(c, y, x) : 0.0);
    }
  }
  const LimbMap none = extract_limb_map(ParsingMap(6, 7, 2), img);
  for (double v : none.image.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(extract_limb_map(ParsingMap(6, 7, 4), img).image, img);
  EXPECT_THROW(extract_limb_map(ParsingMap(5, 7), img), DimensionError);
}

TEST(LimbPatchTest, ChannelOrderIsColorMajor) {
  ImageTensor img(3, 4, 4);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 16; ++i) img.plane(c)[i] = 100 * c + i;
  }
  const LimbMap l{img};
  const ImageTensor p = limb_patches(l, 2);
  ASSERT_EQ(p.channels(), 12);
  ASSERT_EQ(p.height(), 2);
  for (int c = 0; c < 3; ++c) {
    for (int gy = 0; gy < 2; ++gy) {
      for (int gx = 0; gx < 2; ++gx) {
        const int ch = c * 4 + gy * 2 + gx;
        for (int y = 0; y < 2; ++y) {
          for (int x = 0; x < 2; ++x) {
            EXPECT_EQ(p(ch, y, x), 100 * c + (gy * 2 + y) * 4 + gx * 2 + x);
          }
        }
      }
    }
  }
  EXPECT_EQ(limb_patches(l, 1), img);
}

TEST(LimbPatchTest, ReassemblyThenMaskingReproducesLimbMap) {
  std::mt19937_64 rng(5);
  for (int s : {1, 2, 3, 4}) {
    const ImageTensor img = random_tensor(rng, 3, 10, 9);
    const ParsingMap p = random_parsing(rng, 10, 9);
    const LimbMap l = extract_limb_map(p, img);
    const ImageTensor back = reassemble_limb_patches(limb_patches(l, s), s, 10, 9);
    EXPECT_EQ(apply_mask(back, class_mask(p, {4, 5})), l.image);
  }
  const ImageTensor blank = limb_patches(LimbMap{ImageTensor(3, 8, 8)}, 4);
  for (double v : blank.values()) EXPECT_EQ(v, 0.0);
}

TEST(KeypointTest, EmptyAndDegenerate) {
  const KeypointMap empty = render_keypoints({}, 10, 8);
  ASSERT_EQ(empty.planes.channels(), 18);
  for (double v : empty.planes.values()) EXPECT_EQ(v, 0.0);
  const std::vector<Keypoint> one = {{5, 4.0, 5.0}};
  const KeypointMap k = render_keypoints(one, 10, 8, 0.0);
  double s = 0.0;
  for (double v : k.planes.values()) s += v;
  EXPECT_EQ(s, 1.0);
  EXPECT_EQ(k.planes(5, 5, 4), 1.0);
}

TEST(KeypointTest, CornerQuarterDiskMatchesDistanceScan) {
  const std::vector<Keypoint> pts = {{0, 0.0, 0.0}};
  const KeypointMap k = render_keypoints(pts, 20, 20, 4.0);
  int expect = 0;
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      const bool in = x * x + y * y <= 16;
      expect += in;
      EXPECT_EQ(k.planes(0, y, x), in ? 1.0 : 0.0);
    }
  }
  double s = 0.0;
  for (double v : k.planes.plane(0)) s += v;
  EXPECT_EQ(s, expect);
}

TEST(KeypointTest, RadiusScalesAndIdsValidated) {
  EXPECT_DOUBLE_EQ(default_keypoint_radius(256), 4.0);
  EXPECT_DOUBLE_EQ(default_keypoint_radius(96), 1.5);
  const std::vector<Keypoint> dup = {{3, 1, 1}, {3, 2, 2}};
  EXPECT_THROW(render_keypoints(dup, 8, 8), ParameterError);
  const std::vector<Keypoint> bad = {{18, 1, 1}};
  EXPECT_THROW(render_keypoints(bad, 8, 8), ParameterError);
}
