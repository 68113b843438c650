#include "vinstruct/animation.hpp"

#include <algorithm>
#include <cmath>

#include "vinstruct/database.hpp"
#include "vinstruct/error.hpp"

namespace vinstruct {

namespace {

Quaternion normalized(Quaternion q) {
  const double n = norm(q);
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

double phase(const AnimationClip& clip, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidArgument, "sample time must be finite and >= 0");
  }
  if (clip.looping) return std::fmod(t, clip.duration) / clip.duration;
  return std::min(t / clip.duration, 1.0);
}

}  // namespace

Quaternion slerp(const Quaternion& from, const Quaternion& to, double u) {
  if (u <= 0.0) return from;
  if (u >= 1.0) return to;
  Quaternion target = to;
  double cos_theta = from.w * to.w + from.x * to.x + from.y * to.y + from.z * to.z;
  if (cos_theta < 0.0) {
    // Take the short arc.
    target = {-to.w, -to.x, -to.y, -to.z};
    cos_theta = -cos_theta;
  }
  double a = 1.0 - u;
  double b = u;
  if (cos_theta < 0.9995) {
    const double theta = std::acos(std::min(cos_theta, 1.0));
    const double sin_theta = std::sin(theta);
    a = std::sin((1.0 - u) * theta) / sin_theta;
    b = std::sin(u * theta) / sin_theta;
  }
  return normalized({a * from.w + b * target.w, a * from.x + b * target.x,
                     a * from.y + b * target.y, a * from.z + b * target.z});
}

AnimationClip make_animation(const Database& db, const CanonicalName& predecessor,
                             const CanonicalName& successor, const AnimationParams& params,
                             int instance_count) {
  if (!(params.duration > 0.0) || !std::isfinite(params.duration)) {
    throw Error(ErrorCode::InvalidArgument, "animation duration must be > 0");
  }
  const double axis_length = norm(params.approach_axis);
  if (!(axis_length > 0.0) || !std::isfinite(axis_length)) {
    throw Error(ErrorCode::InvalidArgument, "approach axis must be a non-zero vector");
  }
  if (!std::isfinite(params.approach_distance)) {
    throw Error(ErrorCode::InvalidArgument, "approach distance must be finite");
  }
  if (!db.find(predecessor)) {
    throw Error(ErrorCode::UnknownComponent, "unknown component \"" + predecessor.str() + "\"");
  }
  const auto* target = db.find(successor);
  if (!target) {
    throw Error(ErrorCode::UnknownComponent, "unknown component \"" + successor.str() + "\"");
  }
  if (instance_count < 1 || static_cast<std::size_t>(instance_count) > target->instances.size()) {
    throw Error(ErrorCode::InsufficientInstances,
                "\"" + successor.str() + "\" has " + std::to_string(target->instances.size()) +
                    " instance(s), " + std::to_string(instance_count) + " requested");
  }

  Pose end;
  if (const auto* assembled = db.find(combined_name(predecessor, successor));
      assembled && assembled->mating) {
    end = *assembled->mating;
  }
  const Vec3 approach = params.approach_axis * (params.approach_distance / axis_length);
  const Pose start(end.position() + approach, end.orientation());

  std::vector<Vec3> offsets;
  const Vec3 origin = target->instances.front().position();
  for (int k = 0; k < instance_count; ++k) {
    offsets.push_back(target->instances[static_cast<std::size_t>(k)].position() - origin);
  }
  return AnimationClip{successor, predecessor, instance_count, start, end,
                       params.duration, true, std::move(offsets)};
}

Pose sample_animation(const AnimationClip& clip, double t) {
  const double u = phase(clip, t);
  if (u <= 0.0) return clip.start_pose;
  if (u >= 1.0) return clip.end_pose;
  const Vec3& a = clip.start_pose.position();
  const Vec3& b = clip.end_pose.position();
  return Pose(a + (b - a) * u, slerp(clip.start_pose.orientation(), clip.end_pose.orientation(), u));
}

Pose sample_instance(const AnimationClip& clip, int instance, double t) {
  const auto pose = sample_animation(clip, t);
  if (instance < 0 || static_cast<std::size_t>(instance) >= clip.instance_offsets.size()) {
    throw Error(ErrorCode::InvalidArgument, "clip has no instance " + std::to_string(instance));
  }
  return Pose(pose.position() + clip.instance_offsets[static_cast<std::size_t>(instance)],
              pose.orientation());
}

}  // namespace vinstruct
