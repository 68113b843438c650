#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vinstruct {

/// Lowercase tokens joined by single underscores, e.g. `small_screw`.
/// This is the naming space shared by extractor output and the database.
class CanonicalName {
 public:
  /// Throws Error{InvalidName} when `value` is not canonical.
  explicit CanonicalName(std::string value);

  static bool is_valid(std::string_view value);

  const std::string& str() const noexcept { return value_; }

  friend bool operator==(const CanonicalName&, const CanonicalName&) = default;
  friend auto operator<=>(const CanonicalName&, const CanonicalName&) = default;

 private:
  std::string value_;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
Vec3 operator*(const Vec3& v, double s);
double norm(const Vec3& v);

/// (w, x, y, z) quaternion. Unit length is enforced by Pose, not here.
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Quaternion identity() { return {}; }

  friend bool operator==(const Quaternion&, const Quaternion&) = default;
};

double norm(const Quaternion& q);

inline constexpr double kUnitQuaternionTolerance = 1e-9;

/// Right-handed frame, meters.
class Pose {
 public:
  Pose() = default;
  /// Throws Error{InvalidPose} unless |orientation| = 1 within 1e-9.
  Pose(Vec3 position, Quaternion orientation);

  const Vec3& position() const noexcept { return position_; }
  const Quaternion& orientation() const noexcept { return orientation_; }

  friend bool operator==(const Pose&, const Pose&) = default;

 private:
  Vec3 position_;
  Quaternion orientation_;
};

struct Rgba {
  double r = 1.0;
  double g = 1.0;
  double b = 1.0;
  double a = 1.0;

  bool in_unit_range() const;

  friend bool operator==(const Rgba&, const Rgba&) = default;
};

/// Highlight color applied by the instruction generator.
inline constexpr Rgba kHighlightGreen{0.0, 1.0, 0.0, 1.0};

enum class ShapeType { Box, Cylinder, Mesh };

/// Box dimensions are (x, y, z) extents, cylinder dimensions (radius, height).
/// Mesh paths are opaque to the engine.
struct Shape {
  ShapeType type = ShapeType::Box;
  std::vector<double> dimensions;
  std::string mesh_path;

  friend bool operator==(const Shape&, const Shape&) = default;
};

enum class ComponentKind { Atomic, Assembled };

std::string_view to_string(ShapeType type);
std::string_view to_string(ComponentKind kind);

struct ComponentRecord {
  CanonicalName name;
  ComponentKind kind = ComponentKind::Atomic;
  Shape shape;
  Rgba default_color;
  std::vector<Pose> instances;
  // Assembled records only: [predecessor, successor].
  std::vector<CanonicalName> constituents;
  // Assembled records only: rest pose of the successor in the predecessor frame.
  std::optional<Pose> mating;

  friend bool operator==(const ComponentRecord&, const ComponentRecord&) = default;
};

/// Ordered component list plus a name index. Construction never rejects
/// data; run validate_database to check invariants. With duplicate names the
/// index points at the earliest record.
class Database {
 public:
  Database() = default;
  explicit Database(std::vector<ComponentRecord> components);

  const std::vector<ComponentRecord>& components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }

  const ComponentRecord* find(const CanonicalName& name) const;
  std::optional<std::size_t> position(const CanonicalName& name) const;

  friend bool operator==(const Database& a, const Database& b) {
    return a.components_ == b.components_;
  }

 private:
  std::vector<ComponentRecord> components_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Predecessor (already assembled part), successor (part being added) and
/// number of successor parts.
class ExtractionResult {
 public:
  /// Throws Error{BadCount} for count < 1 and Error{SameComponent} when
  /// predecessor equals successor.
  ExtractionResult(CanonicalName predecessor, CanonicalName successor, int count);

  const CanonicalName& predecessor() const noexcept { return predecessor_; }
  const CanonicalName& successor() const noexcept { return successor_; }
  int count() const noexcept { return count_; }

  friend bool operator==(const ExtractionResult&, const ExtractionResult&) = default;

 private:
  CanonicalName predecessor_;
  CanonicalName successor_;
  int count_;
};

struct InstanceState {
  bool active = false;
  Rgba color;
  Pose pose;
  bool animating = false;

  friend bool operator==(const InstanceState&, const InstanceState&) = default;
};

struct InstanceKey {
  std::string name;
  std::size_t index = 0;

  friend bool operator==(const InstanceKey&, const InstanceKey&) = default;
  friend auto operator<=>(const InstanceKey&, const InstanceKey&) = default;
};

/// Straight-line approach of `target` toward its rest pose, both poses in
/// the `anchor` frame. Instance k of the target follows the same path
/// shifted by instance_offsets[k].
struct AnimationClip {
  CanonicalName target;
  CanonicalName anchor;
  int instance_count = 1;
  Pose start_pose;
  Pose end_pose;
  double duration = 2.0;
  bool looping = true;
  std::vector<Vec3> instance_offsets;

  friend bool operator==(const AnimationClip&, const AnimationClip&) = default;
};

struct SceneState {
  std::map<InstanceKey, InstanceState> instances;
  std::optional<AnimationClip> current_clip;
  int step_cursor = 0;

  friend bool operator==(const SceneState&, const SceneState&) = default;
};

struct AssemblyStep {
  int index = 1;
  std::string text;

  friend bool operator==(const AssemblyStep&, const AssemblyStep&) = default;
};

struct SftRecord {
  std::string instruction;
  std::string input;
  std::string output;

  friend bool operator==(const SftRecord&, const SftRecord&) = default;
};

}  // namespace vinstruct
