#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "vinstruct/animation.hpp"
#include "vinstruct/error.hpp"

namespace vinstruct {
namespace {

using testing::cn;

double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

// Rotation distance that treats q and -q as the same orientation.
// Rotation angle between two unit quaternions. The atan2 form keeps full
// precision for nearly equal inputs, where acos of the dot product does not.
double angle_between(const Quaternion& a, const Quaternion& b) {
  const double sign = (a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z) < 0.0 ? -1.0 : 1.0;
  const double dw = a.w - sign * b.w, dx = a.x - sign * b.x, dy = a.y - sign * b.y, dz = a.z - sign * b.z;
  const double sw = a.w + sign * b.w, sx = a.x + sign * b.x, sy = a.y + sign * b.y, sz = a.z + sign * b.z;
  const double diff = std::sqrt(dw * dw + dx * dx + dy * dy + dz * dz);
  const double sum = std::sqrt(sw * sw + sx * sx + sy * sy + sz * sz);
  return 4.0 * std::atan2(diff, sum);
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

AnimationClip random_clip(testing::Rng& rng, bool looping) {
  return AnimationClip{cn("a"), cn("b"), 1, testing::random_pose(rng), testing::random_pose(rng),
                       testing::uniform(rng, 0.1, 5.0), looping, {Vec3{}}};
}

TEST(MakeAnimation, CylinderPistonApproachesAlongAnchorZ) {
  const auto& db = *testing::pneumatic_db();
  const auto clip = make_animation(db, cn("cylinder"), cn("piston"), AnimationParams{});
  EXPECT_EQ(clip.target, cn("piston"));
  EXPECT_EQ(clip.anchor, cn("cylinder"));
  EXPECT_EQ(clip.end_pose, *db.find(cn("cylinder_piston"))->mating);
  const Vec3 delta = clip.start_pose.position() - clip.end_pose.position();
  EXPECT_NEAR(delta.x, 0.0, 1e-12);
  EXPECT_NEAR(delta.y, 0.0, 1e-12);
  EXPECT_NEAR(delta.z, 0.2, 1e-12);
  EXPECT_EQ(clip.start_pose.orientation(), clip.end_pose.orientation());
  EXPECT_DOUBLE_EQ(clip.duration, 2.0);
  EXPECT_TRUE(clip.looping);
}

TEST(MakeAnimation, ZeroApproachGivesStaticClip) {
  AnimationParams params;
  params.approach_distance = 0.0;
  const auto clip = make_animation(*testing::pneumatic_db(), cn("cylinder"), cn("piston"), params);
  EXPECT_EQ(clip.start_pose, clip.end_pose);
}

TEST(MakeAnimation, AxisIsNormalized) {
  AnimationParams params;
  params.approach_axis = {3.0, 0.0, 4.0};
  params.approach_distance = 0.5;
  const auto clip = make_animation(*testing::pneumatic_db(), cn("cylinder"), cn("piston"), params);
  const Vec3 delta = clip.start_pose.position() - clip.end_pose.position();
  EXPECT_NEAR(delta.x, 0.3, 1e-12);
  EXPECT_NEAR(delta.z, 0.4, 1e-12);
}

TEST(MakeAnimation, MissingMatingPoseEndsAtIdentity) {
  // base_top is not in the manifest, so the clip ends at the anchor origin.
  const auto clip = make_animation(*testing::pneumatic_db(), cn("base"), cn("top"), AnimationParams{});
  EXPECT_EQ(clip.end_pose, Pose());
}

TEST(MakeAnimation, MultiInstanceOffsetsFollowManifestLayout) {
  const auto& db = *testing::pneumatic_db();
  const auto clip = make_animation(db, cn("fixture"), cn("small_screw"), AnimationParams{}, 4);
  ASSERT_EQ(clip.instance_offsets.size(), 4u);
  const auto& screws = db.find(cn("small_screw"))->instances;
  for (int k = 0; k < 4; ++k) {
    const auto pose = sample_instance(clip, k, 0.0);
    const Vec3 expected = clip.start_pose.position() + (screws[k].position() - screws[0].position());
    EXPECT_LT(distance(pose.position(), expected), 1e-12);
  }
  EXPECT_EQ(code_of([&] { sample_instance(clip, 4, 0.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { sample_instance(clip, -1, 0.0); }), ErrorCode::InvalidArgument);
}

TEST(MakeAnimation, Errors) {
  const auto& db = *testing::pneumatic_db();
  AnimationParams bad;
  bad.duration = 0.0;
  EXPECT_EQ(code_of([&] { make_animation(db, cn("cylinder"), cn("piston"), bad); }), ErrorCode::InvalidArgument);
  bad.duration = -1.0;
  EXPECT_EQ(code_of([&] { make_animation(db, cn("cylinder"), cn("piston"), bad); }), ErrorCode::InvalidArgument);
  AnimationParams no_axis;
  no_axis.approach_axis = {0, 0, 0};
  EXPECT_EQ(code_of([&] { make_animation(db, cn("cylinder"), cn("piston"), no_axis); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { make_animation(db, cn("widget"), cn("piston"), {}); }), ErrorCode::UnknownComponent);
  EXPECT_EQ(code_of([&] { make_animation(db, cn("cylinder"), cn("widget"), {}); }), ErrorCode::UnknownComponent);
  EXPECT_EQ(code_of([&] { make_animation(db, cn("cylinder"), cn("piston"), {}, 2); }),
            ErrorCode::InsufficientInstances);
}

TEST(SampleAnimation, EndpointsAndMidpoint) {
  testing::Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    auto clip = random_clip(rng, false);
    EXPECT_EQ(sample_animation(clip, 0.0), clip.start_pose);
    const auto end = sample_animation(clip, clip.duration);
    EXPECT_LT(distance(end.position(), clip.end_pose.position()), 1e-9);
    EXPECT_LT(angle_between(end.orientation(), clip.end_pose.orientation()), 1e-9);
    EXPECT_EQ(sample_animation(clip, clip.duration * 3.0), clip.end_pose);

    const auto mid = sample_animation(clip, clip.duration / 2.0);
    const Vec3 expected = (clip.start_pose.position() + clip.end_pose.position()) * 0.5;
    EXPECT_LT(distance(mid.position(), expected), 1e-9);
    // The orientation midpoint is equidistant from both ends.
    EXPECT_NEAR(angle_between(mid.orientation(), clip.start_pose.orientation()),
                angle_between(mid.orientation(), clip.end_pose.orientation()), 1e-9);
  }
}

TEST(SampleAnimation, LoopingWrapsAround) {
  testing::Rng rng(22);
  const auto clip = random_clip(rng, true);
  const double t = 0.3 * clip.duration;
  const auto a = sample_animation(clip, t);
  const auto b = sample_animation(clip, t + 2.0 * clip.duration);
  EXPECT_LT(distance(a.position(), b.position()), 1e-9);
  EXPECT_EQ(sample_animation(clip, clip.duration), clip.start_pose);
}

TEST(SampleAnimation, ContinuityAtRandomTimes) {
  testing::Rng rng(23);
  const double eps = 1e-6;
  for (int i = 0; i < 1000; ++i) {
    const bool looping = testing::coin(rng);
    const auto clip = random_clip(rng, looping);
    // A looping clip restarts at each period; the seam is a deliberate jump.
    const double t = looping ? testing::uniform(rng, 0.0, clip.duration - 2 * eps) +
                                   clip.duration * static_cast<double>(testing::draw(rng, 3))
                             : testing::uniform(rng, 0.0, 2.0 * clip.duration);
    const auto a = sample_animation(clip, t);
    const auto b = sample_animation(clip, t + eps);
    EXPECT_LT(distance(a.position(), b.position()), 1e-3);
    EXPECT_LT(angle_between(a.orientation(), b.orientation()), 1e-3);
  }
}

TEST(SampleAnimation, RejectsNegativeOrNonFiniteTime) {
  testing::Rng rng(24);
  const auto clip = random_clip(rng, true);
  EXPECT_EQ(code_of([&] { sample_animation(clip, -0.1); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { sample_animation(clip, std::nan("")); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { sample_animation(clip, INFINITY); }), ErrorCode::InvalidArgument);
}

TEST(Slerp, UnitNormEndpointsAndShortArc) {
  testing::Rng rng(25);
  for (int i = 0; i < 500; ++i) {
    const auto a = testing::random_unit_quaternion(rng);
    const auto b = testing::random_unit_quaternion(rng);
    EXPECT_EQ(slerp(a, b, 0.0), a);
    EXPECT_EQ(slerp(a, b, 1.0), b);
    const double u = testing::uniform(rng, 0.0, 1.0);
    const auto q = slerp(a, b, u);
    EXPECT_NEAR(norm(q), 1.0, 1e-12);
    // On the short arc the travelled angle is proportional to u.
    const double total = angle_between(a, b);
    EXPECT_NEAR(angle_between(a, q), u * total, 1e-6);
  }
}

TEST(Slerp, NearlyIdenticalInputsStayUnit) {
  const Quaternion a{1, 0, 0, 0};
  const double s = std::sin(1e-5);
  const Quaternion b{std::cos(1e-5), s, 0, 0};
  const auto q = slerp(a, b, 0.5);
  EXPECT_NEAR(norm(q), 1.0, 1e-12);
  EXPECT_NEAR(q.x, std::sin(0.5e-5), 1e-9);
}

}  // namespace
}  // namespace vinstruct
