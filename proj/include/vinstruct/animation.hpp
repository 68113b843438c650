#pragma once

#include "vinstruct/types.hpp"

namespace vinstruct {

struct AnimationParams {
  double approach_distance = 0.2;  // meters
  Vec3 approach_axis{0.0, 0.0, 1.0};  // anchor-local
  double duration = 2.0;  // seconds
};

/// Clip moving `successor` onto its rest pose in the `predecessor` frame.
/// The rest pose is the `mating` pose of the assembled record named
/// predecessor_successor (identity when there is none); the clip starts
/// `approach_distance` away along `approach_axis`.
///
/// Throws Error{UnknownComponent} if either record is missing,
/// Error{InvalidArgument} for a non-positive duration or zero axis and
/// Error{InsufficientInstances} when instance_count exceeds the successor's
/// instances.
AnimationClip make_animation(const Database& db, const CanonicalName& predecessor,
                             const CanonicalName& successor, const AnimationParams& params,
                             int instance_count = 1);

/// Pose of the clip's primary instance at time t >= 0. Looping clips wrap
/// with period `duration`; others clamp at the end pose.
Pose sample_animation(const AnimationClip& clip, double t);

/// Same trajectory shifted by the instance's offset.
Pose sample_instance(const AnimationClip& clip, int instance, double t);

Quaternion slerp(const Quaternion& from, const Quaternion& to, double u);

}  // namespace vinstruct
