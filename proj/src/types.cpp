#include "vinstruct/types.hpp"

#include <cmath>

#include "vinstruct/error.hpp"

namespace vinstruct {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidName: return "InvalidName";
    case ErrorCode::InvalidPose: return "InvalidPose";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoComponentsFound: return "NoComponentsFound";
    case ErrorCode::AmbiguousRoles: return "AmbiguousRoles";
    case ErrorCode::SingleComponent: return "SingleComponent";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::BadCount: return "BadCount";
    case ErrorCode::BadName: return "BadName";
    case ErrorCode::SameComponent: return "SameComponent";
    case ErrorCode::UnknownComponent: return "UnknownComponent";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::InsufficientInstances: return "InsufficientInstances";
    case ErrorCode::EndOfSteps: return "EndOfSteps";
    case ErrorCode::AtBeginning: return "AtBeginning";
    case ErrorCode::QueueFull: return "QueueFull";
    case ErrorCode::NotReady: return "NotReady";
  }
  return "Unknown";
}

namespace {

bool is_token_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

}  // namespace

bool CanonicalName::is_valid(std::string_view value) {
  // ^[a-z0-9]+(_[a-z0-9]+)*$
  if (value.empty()) return false;
  bool token_open = false;
  for (char c : value) {
    if (is_token_char(c)) {
      token_open = true;
    } else if (c == '_' && token_open) {
      token_open = false;
    } else {
      return false;
    }
  }
  return token_open;
}

CanonicalName::CanonicalName(std::string value) : value_(std::move(value)) {
  if (!is_valid(value_)) {
    throw Error(ErrorCode::InvalidName, "not a canonical component name: \"" + value_ + "\"");
  }
}

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator*(const Vec3& v, double s) { return {v.x * s, v.y * s, v.z * s}; }
double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

double norm(const Quaternion& q) {
  return std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
}

Pose::Pose(Vec3 position, Quaternion orientation)
    : position_(position), orientation_(orientation) {
  const double n = norm(orientation_);
  if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitQuaternionTolerance) {
    throw Error(ErrorCode::InvalidPose, "orientation is not a unit quaternion (norm " +
                                            std::to_string(n) + ")");
  }
  if (!std::isfinite(position_.x) || !std::isfinite(position_.y) ||
      !std::isfinite(position_.z)) {
    throw Error(ErrorCode::InvalidPose, "position is not finite");
  }
}

bool Rgba::in_unit_range() const {
  for (double c : {r, g, b, a}) {
    if (!(c >= 0.0 && c <= 1.0)) return false;
  }
  return true;
}

std::string_view to_string(ShapeType type) {
  switch (type) {
    case ShapeType::Box: return "box";
    case ShapeType::Cylinder: return "cylinder";
    case ShapeType::Mesh: return "mesh";
  }
  return "box";
}

std::string_view to_string(ComponentKind kind) {
  return kind == ComponentKind::Atomic ? "atomic" : "assembled";
}

Database::Database(std::vector<ComponentRecord> components) : components_(std::move(components)) {
  for (std::size_t i = 0; i < components_.size(); ++i) {
    index_.emplace(components_[i].name.str(), i);
  }
}

const ComponentRecord* Database::find(const CanonicalName& name) const {
  auto pos = position(name);
  return pos ? &components_[*pos] : nullptr;
}

std::optional<std::size_t> Database::position(const CanonicalName& name) const {
  auto it = index_.find(name.str());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ExtractionResult::ExtractionResult(CanonicalName predecessor, CanonicalName successor, int count)
    : predecessor_(std::move(predecessor)), successor_(std::move(successor)), count_(count) {
  if (count_ < 1) {
    throw Error(ErrorCode::BadCount, "count must be >= 1, got " + std::to_string(count_));
  }
  if (predecessor_ == successor_) {
    throw Error(ErrorCode::SameComponent,
                "predecessor and successor are both \"" + predecessor_.str() + "\"");
  }
}

}  // namespace vinstruct
