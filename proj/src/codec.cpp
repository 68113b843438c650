#include "vinstruct/codec.hpp"

#include "vinstruct/error.hpp"

namespace vinstruct::codec {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaError, path + ": " + what);
}

const json& field(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing field");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

CanonicalName name(const json& j, const std::string& path) {
  auto value = text(j, path);
  if (!CanonicalName::is_valid(value)) fail(path, "\"" + value + "\" is not a canonical name");
  return CanonicalName(std::move(value));
}

std::vector<double> numbers(const json& j, const std::string& path, std::size_t expected) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  if (expected != 0 && j.size() != expected) {
    fail(path, "expected " + std::to_string(expected) + " numbers, got " + std::to_string(j.size()));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

}  // namespace

json encode(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json encode(const Quaternion& q) { return json::array({q.w, q.x, q.y, q.z}); }

json encode(const Pose& pose) {
  return {{"position", encode(pose.position())}, {"orientation", encode(pose.orientation())}};
}

json encode(const Rgba& c) { return json::array({c.r, c.g, c.b, c.a}); }

json encode(const Shape& shape) {
  json j{{"type", std::string(to_string(shape.type))}};
  if (shape.type == ShapeType::Mesh) {
    j["path"] = shape.mesh_path;
  }
  if (shape.type != ShapeType::Mesh || !shape.dimensions.empty()) {
    j["dimensions"] = shape.dimensions;
  }
  return j;
}

json encode(const ComponentRecord& r) {
  json j{{"name", r.name.str()},
         {"kind", std::string(to_string(r.kind))},
         {"shape", encode(r.shape)},
         {"color", encode(r.default_color)}};
  json instances = json::array();
  for (const auto& p : r.instances) instances.push_back(encode(p));
  j["instances"] = std::move(instances);
  json constituents = json::array();
  for (const auto& c : r.constituents) constituents.push_back(c.str());
  j["constituents"] = std::move(constituents);
  if (r.mating) j["mating"] = encode(*r.mating);
  return j;
}

json encode(const Database& db) {
  json components = json::array();
  for (const auto& r : db.components()) components.push_back(encode(r));
  return {{"components", std::move(components)}};
}

json encode(const ExtractionResult& r) {
  return {{"predecessor", r.predecessor().str()},
          {"successor", r.successor().str()},
          {"count", r.count()}};
}

json encode(const InstanceState& s) {
  return {{"active", s.active},
          {"color", encode(s.color)},
          {"pose", encode(s.pose)},
          {"animating", s.animating}};
}

json encode_instance(const InstanceKey& key, const InstanceState& state) {
  json j = encode(state);
  j["name"] = key.name;
  j["instance"] = key.index;
  return j;
}

json encode(const AnimationClip& c) {
  json offsets = json::array();
  for (const auto& o : c.instance_offsets) offsets.push_back(encode(o));
  return {{"target", c.target.str()},
          {"anchor", c.anchor.str()},
          {"instance_count", c.instance_count},
          {"start_pose", encode(c.start_pose)},
          {"end_pose", encode(c.end_pose)},
          {"duration", c.duration},
          {"looping", c.looping},
          {"instance_offsets", std::move(offsets)}};
}

json encode(const SceneState& scene) {
  json instances = json::array();
  for (const auto& [key, state] : scene.instances) instances.push_back(encode_instance(key, state));
  return {{"step_cursor", scene.step_cursor},
          {"instances", std::move(instances)},
          {"clip", scene.current_clip ? encode(*scene.current_clip) : json(nullptr)}};
}

json encode(const AssemblyStep& step) { return {{"index", step.index}, {"text", step.text}}; }

json encode(const SftRecord& r) {
  return {{"instruction", r.instruction}, {"input", r.input}, {"output", r.output}};
}

template <>
Vec3 decode<Vec3>(const json& j, const std::string& path) {
  auto v = numbers(j, path, 3);
  return {v[0], v[1], v[2]};
}

template <>
Quaternion decode<Quaternion>(const json& j, const std::string& path) {
  auto v = numbers(j, path, 4);
  return {v[0], v[1], v[2], v[3]};
}

template <>
Pose decode<Pose>(const json& j, const std::string& path) {
  auto position = decode<Vec3>(field(j, path, "position"), path + ".position");
  Quaternion orientation;
  if (j.contains("orientation")) {
    orientation = decode<Quaternion>(j["orientation"], path + ".orientation");
  }
  try {
    return Pose(position, orientation);
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

template <>
Rgba decode<Rgba>(const json& j, const std::string& path) {
  auto v = numbers(j, path, 4);
  return {v[0], v[1], v[2], v[3]};
}

template <>
Shape decode<Shape>(const json& j, const std::string& path) {
  Shape shape;
  const auto type = text(field(j, path, "type"), path + ".type");
  if (type == "box") {
    shape.type = ShapeType::Box;
    shape.dimensions = numbers(field(j, path, "dimensions"), path + ".dimensions", 3);
  } else if (type == "cylinder") {
    shape.type = ShapeType::Cylinder;
    shape.dimensions = numbers(field(j, path, "dimensions"), path + ".dimensions", 2);
  } else if (type == "mesh") {
    shape.type = ShapeType::Mesh;
    shape.mesh_path = text(field(j, path, "path"), path + ".path");
    if (j.contains("dimensions")) {
      shape.dimensions = numbers(j["dimensions"], path + ".dimensions", 0);
    }
  } else {
    fail(path + ".type", "unknown shape type \"" + type + "\"");
  }
  for (std::size_t i = 0; i < shape.dimensions.size(); ++i) {
    if (!(shape.dimensions[i] > 0.0)) fail(at(path + ".dimensions", i), "dimension must be > 0");
  }
  return shape;
}

template <>
ComponentRecord decode<ComponentRecord>(const json& j, const std::string& path) {
  auto record_name = name(field(j, path, "name"), path + ".name");
  const auto kind_text = text(field(j, path, "kind"), path + ".kind");
  ComponentKind kind;
  if (kind_text == "atomic") {
    kind = ComponentKind::Atomic;
  } else if (kind_text == "assembled") {
    kind = ComponentKind::Assembled;
  } else {
    fail(path + ".kind", "expected \"atomic\" or \"assembled\", got \"" + kind_text + "\"");
  }
  auto shape = decode<Shape>(field(j, path, "shape"), path + ".shape");
  auto color = decode<Rgba>(field(j, path, "color"), path + ".color");

  const auto& instances_json = field(j, path, "instances");
  if (!instances_json.is_array()) fail(path + ".instances", "expected an array of poses");
  std::vector<Pose> instances;
  for (std::size_t i = 0; i < instances_json.size(); ++i) {
    instances.push_back(decode<Pose>(instances_json[i], at(path + ".instances", i)));
  }

  std::vector<CanonicalName> constituents;
  if (j.contains("constituents")) {
    const auto& cj = j["constituents"];
    if (!cj.is_array()) fail(path + ".constituents", "expected an array of names");
    for (std::size_t i = 0; i < cj.size(); ++i) {
      constituents.push_back(name(cj[i], at(path + ".constituents", i)));
    }
  }
  std::optional<Pose> mating;
  if (j.contains("mating")) mating = decode<Pose>(j["mating"], path + ".mating");

  return ComponentRecord{std::move(record_name), kind,         std::move(shape),
                         color,                  std::move(instances), std::move(constituents),
                         mating};
}

template <>
Database decode<Database>(const json& j, const std::string& path) {
  const auto& components = field(j, path, "components");
  if (!components.is_array()) fail(path + ".components", "expected an array");
  std::vector<ComponentRecord> records;
  std::string problems;
  for (std::size_t i = 0; i < components.size(); ++i) {
    try {
      records.push_back(decode<ComponentRecord>(components[i], at(path + ".components", i)));
    } catch (const Error& e) {
      if (!problems.empty()) problems += "\n";
      problems += e.what();
    }
  }
  if (!problems.empty()) throw Error(ErrorCode::SchemaError, problems);
  return Database(std::move(records));
}

template <>
ExtractionResult decode<ExtractionResult>(const json& j, const std::string& path) {
  auto predecessor = name(field(j, path, "predecessor"), path + ".predecessor");
  auto successor = name(field(j, path, "successor"), path + ".successor");
  const int count = integer(field(j, path, "count"), path + ".count");
  return ExtractionResult(std::move(predecessor), std::move(successor), count);
}

template <>
InstanceState decode<InstanceState>(const json& j, const std::string& path) {
  InstanceState s;
  s.active = boolean(field(j, path, "active"), path + ".active");
  s.color = decode<Rgba>(field(j, path, "color"), path + ".color");
  s.pose = decode<Pose>(field(j, path, "pose"), path + ".pose");
  s.animating = boolean(field(j, path, "animating"), path + ".animating");
  return s;
}

template <>
AnimationClip decode<AnimationClip>(const json& j, const std::string& path) {
  std::vector<Vec3> offsets;
  if (j.contains("instance_offsets")) {
    const auto& oj = j["instance_offsets"];
    if (!oj.is_array()) fail(path + ".instance_offsets", "expected an array");
    for (std::size_t i = 0; i < oj.size(); ++i) {
      offsets.push_back(decode<Vec3>(oj[i], at(path + ".instance_offsets", i)));
    }
  }
  AnimationClip clip{name(field(j, path, "target"), path + ".target"),
                     name(field(j, path, "anchor"), path + ".anchor"),
                     integer(field(j, path, "instance_count"), path + ".instance_count"),
                     decode<Pose>(field(j, path, "start_pose"), path + ".start_pose"),
                     decode<Pose>(field(j, path, "end_pose"), path + ".end_pose"),
                     number(field(j, path, "duration"), path + ".duration"),
                     boolean(field(j, path, "looping"), path + ".looping"),
                     std::move(offsets)};
  if (!(clip.duration > 0.0)) fail(path + ".duration", "must be > 0");
  if (clip.instance_count < 1) fail(path + ".instance_count", "must be >= 1");
  return clip;
}

template <>
SceneState decode<SceneState>(const json& j, const std::string& path) {
  SceneState scene;
  scene.step_cursor = integer(field(j, path, "step_cursor"), path + ".step_cursor");
  const auto& instances = field(j, path, "instances");
  if (!instances.is_array()) fail(path + ".instances", "expected an array");
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto p = at(path + ".instances", i);
    InstanceKey key{text(field(instances[i], p, "name"), p + ".name"),
                    static_cast<std::size_t>(integer(field(instances[i], p, "instance"), p + ".instance"))};
    scene.instances.insert_or_assign(std::move(key), decode<InstanceState>(instances[i], p));
  }
  if (j.contains("clip") && !j["clip"].is_null()) {
    scene.current_clip = decode<AnimationClip>(j["clip"], path + ".clip");
  }
  return scene;
}

template <>
AssemblyStep decode<AssemblyStep>(const json& j, const std::string& path) {
  return {integer(field(j, path, "index"), path + ".index"),
          text(field(j, path, "text"), path + ".text")};
}

template <>
SftRecord decode<SftRecord>(const json& j, const std::string& path) {
  return {text(field(j, path, "instruction"), path + ".instruction"),
          text(field(j, path, "input"), path + ".input"),
          text(field(j, path, "output"), path + ".output")};
}

}  // namespace vinstruct::codec
