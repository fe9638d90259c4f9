#include <gtest/gtest.h>

#include <cmath>

#include "lbt/geometry.hpp"
#include "lbt/rng.hpp"

using namespace lbt;

TEST(Iou, IdenticalBoxes) {
  const GlobalBox a{10, 10, 4, 4};
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
}

TEST(Iou, DisjointBoxes) {
  EXPECT_DOUBLE_EQ(iou(GlobalBox{0, 0, 2, 2}, GlobalBox{10, 10, 2, 2}), 0.0);
}

// Axis-aligned area arithmetic: intersection 1x2 = 2, union 4 + 4 - 2 = 6.
TEST(Iou, PartialOverlapOneThird) {
  EXPECT_NEAR(iou(GlobalBox{1, 1, 2, 2}, GlobalBox{2, 1, 2, 2}), 1.0 / 3.0, 1e-15);
}

TEST(Iou, SymmetricAndBounded) {
  Rng rng(11);
  for (int k = 0; k < 2000; ++k) {
    const GlobalBox a{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(0.1, 40),
                      rng.uniform(0.1, 40)};
    const GlobalBox b{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(0.1, 40),
                      rng.uniform(0.1, 40)};
    const double ab = iou(a, b);
    EXPECT_DOUBLE_EQ(ab, iou(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  }
}

TEST(Iou, TouchingEdgesCountAsDisjoint) {
  // shared edge, zero-area intersection
  EXPECT_DOUBLE_EQ(iou(GlobalBox{0, 0, 2, 2}, GlobalBox{2, 0, 2, 2}), 0.0);
}

TEST(CenterDistance, Identity) {
  const GlobalBox a{3.5, -2, 7, 9};
  EXPECT_DOUBLE_EQ(center_distance(a, a), 0.0);
}

TEST(CenterDistance, ThreeFourFive) {
  EXPECT_DOUBLE_EQ(center_distance(GlobalBox{0, 0, 1, 1}, GlobalBox{3, 4, 1, 1}), 5.0);
}

TEST(CenterDistance, AxisDisplacement) {
  EXPECT_DOUBLE_EQ(center_distance(GlobalBox{1, 1, 2, 2}, GlobalBox{1, 6, 2, 2}), 5.0);
}

TEST(MakeCrop, ExpandsLargestSide) {
  EXPECT_EQ(make_crop(GlobalBox{50, 50, 100, 60}, 2.0), (Crop{50, 50, 200}));
  EXPECT_EQ(make_crop(GlobalBox{0, 0, 10, 10}, 1.0), (Crop{0, 0, 10}));
  EXPECT_EQ(make_crop(GlobalBox{5, 5, 3, 9}, 1.5), (Crop{5, 5, 13.5}));
}

TEST(MakeCrop, ContainsBoxWhenBetaAtLeastOne) {
  Rng rng(12);
  for (int k = 0; k < 2000; ++k) {
    const GlobalBox box{rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(0.5, 80),
                        rng.uniform(0.5, 80)};
    const double beta = rng.uniform(1.0, 4.0);
    const Crop crop = make_crop(box, beta);
    EXPECT_TRUE(box_contains(crop_region(crop), box))
        << "beta=" << beta << " w=" << box.w << " h=" << box.h;
  }
}

TEST(LocalToGlobal, CropCenterOrigin) {
  // a local box at the origin lands on the crop center; w scales by s/C
  for (double c : {32.0, 100.0, 224.0}) {
    const double s = 80.0;
    const GlobalBox g = local_to_global(LocalBox{0, 0, c / 2, c / 2}, Crop{100, 100, s}, c);
    EXPECT_DOUBLE_EQ(g.x, 100.0);
    EXPECT_DOUBLE_EQ(g.y, 100.0);
    EXPECT_DOUBLE_EQ(g.w, s / 2.0);
    EXPECT_DOUBLE_EQ(g.h, s / 2.0);
  }
}

TEST(LocalToGlobal, IdentityWhenScaleMatches) {
  const double c = 128.0;
  const GlobalBox g = local_to_global(LocalBox{c / 4, 0, c / 4, c / 4}, Crop{0, 0, c}, c);
  EXPECT_DOUBLE_EQ(g.x, c / 4);
  EXPECT_DOUBLE_EQ(g.y, 0.0);
  EXPECT_DOUBLE_EQ(g.w, c / 4);
  EXPECT_DOUBLE_EQ(g.h, c / 4);
}

TEST(GlobalToLocal, CenteredBoxMapsToOrigin) {
  const LocalBox lb = global_to_local(GlobalBox{100, 100, 40, 30}, Crop{100, 100, 200}, 64);
  EXPECT_DOUBLE_EQ(lb.x, 0.0);
  EXPECT_DOUBLE_EQ(lb.y, 0.0);
}

TEST(GlobalToLocal, HalfScaleExample) {
  // C/s = 100/200 = 0.5
  const LocalBox lb = global_to_local(GlobalBox{150, 100, 50, 50}, Crop{100, 100, 200}, 100);
  EXPECT_DOUBLE_EQ(lb.x, 25.0);
  EXPECT_DOUBLE_EQ(lb.y, 0.0);
  EXPECT_DOUBLE_EQ(lb.w, 25.0);
  EXPECT_DOUBLE_EQ(lb.h, 25.0);
}

TEST(Transforms, RoundTripWithinTolerance) {
  Rng rng(13);
  for (int k = 0; k < 20000; ++k) {
    const GlobalBox box{rng.uniform(0, 2000), rng.uniform(0, 2000), rng.uniform(0.1, 500),
                        rng.uniform(0.1, 500)};
    const Crop crop{rng.uniform(0, 2000), rng.uniform(0, 2000), rng.uniform(1, 1e4)};
    const double c = rng.uniform(1, 1e4);
    const GlobalBox back = local_to_global(global_to_local(box, crop, c), crop, c);
    EXPECT_NEAR(back.x, box.x, 1e-9);
    EXPECT_NEAR(back.y, box.y, 1e-9);
    EXPECT_NEAR(back.w, box.w, 1e-9);
    EXPECT_NEAR(back.h, box.h, 1e-9);
  }
}

TEST(ClipCrop, InsideFrameUnchanged) {
  const Crop crop{500, 400, 100};
  EXPECT_EQ(clip_crop(crop, FrameDims{1000, 800}), crop);
}

TEST(ClipCrop, TranslatedAtCorner) {
  EXPECT_EQ(clip_crop(Crop{0, 0, 100}, FrameDims{1000, 1000}), (Crop{50, 50, 100}));
}

TEST(ClipCrop, ShrunkThenTranslated) {
  EXPECT_EQ(clip_crop(Crop{500, 500, 3000}, FrameDims{1000, 800}), (Crop{500, 400, 800}));
}

TEST(ClipCrop, AlwaysInsideFrame) {
  Rng rng(14);
  const FrameDims dims{1920, 1080};
  for (int k = 0; k < 5000; ++k) {
    const Crop crop{rng.uniform(-500, 2500), rng.uniform(-500, 1600), rng.uniform(1, 4000)};
    const Crop clipped = clip_crop(crop, dims);
    EXPECT_GE(clipped.cx - clipped.s / 2, -1e-12);
    EXPECT_GE(clipped.cy - clipped.s / 2, -1e-12);
    EXPECT_LE(clipped.cx + clipped.s / 2, dims.width + 1e-12);
    EXPECT_LE(clipped.cy + clipped.s / 2, dims.height + 1e-12);
    EXPECT_GT(clipped.s, 0.0);
  }
}
