#include "vinstruct/snapshot.hpp"

#include <algorithm>
#include <cstdio>

namespace vinstruct {

namespace {

std::string triple(const Vec3& v) {
  return "(" + format_fixed(v.x) + "," + format_fixed(v.y) + "," + format_fixed(v.z) + ")";
}

std::string quad(double a, double b, double c, double d) {
  return "(" + format_fixed(a) + "," + format_fixed(b) + "," + format_fixed(c) + "," +
         format_fixed(d) + ")";
}

std::string pose(const Pose& p) {
  const auto& q = p.orientation();
  return "position=" + triple(p.position()) + " orientation=" + quad(q.w, q.x, q.y, q.z);
}

const char* flag(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string format_fixed(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.9f", value);
  std::string out(buffer);
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

std::string snapshot(const SceneState& scene) {
  std::string out = "step_cursor " + std::to_string(scene.step_cursor) + "\n";
  if (const auto& clip = scene.current_clip) {
    out += "clip target=" + clip->target.str() + " anchor=" + clip->anchor.str() +
           " instances=" + std::to_string(clip->instance_count) +
           " duration=" + format_fixed(clip->duration) + " looping=" + flag(clip->looping) + "\n";
    out += "clip.start " + pose(clip->start_pose) + "\n";
    out += "clip.end " + pose(clip->end_pose) + "\n";
    for (std::size_t k = 0; k < clip->instance_offsets.size(); ++k) {
      out += "clip.offset#" + std::to_string(k) + " " + triple(clip->instance_offsets[k]) + "\n";
    }
  } else {
    out += "clip none\n";
  }
  for (const auto& [key, state] : scene.instances) {
    const auto& c = state.color;
    out += key.name + "#" + std::to_string(key.index) + " active=" + flag(state.active) +
           " animating=" + flag(state.animating) + " color=" + quad(c.r, c.g, c.b, c.a) + " " +
           pose(state.pose) + "\n";
  }
  return out;
}

std::optional<ByteDiff> differing_range(const std::string& expected, const std::string& actual) {
  if (expected == actual) return std::nullopt;
  const std::size_t shorter = std::min(expected.size(), actual.size());
  std::size_t prefix = 0;
  while (prefix < shorter && expected[prefix] == actual[prefix]) ++prefix;
  std::size_t suffix = 0;
  while (suffix < shorter - prefix &&
         expected[expected.size() - 1 - suffix] == actual[actual.size() - 1 - suffix]) {
    ++suffix;
  }
  return ByteDiff{prefix, expected.size() - suffix, actual.size() - suffix};
}

}  // namespace vinstruct
