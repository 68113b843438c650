#pragma once

// JSON encoding of the domain types. Decoders throw Error{SchemaError}
// whose message starts with the JSON path of the offending field.

#include <string>

#include <json.hpp>

#include "vinstruct/types.hpp"

namespace vinstruct::codec {

using json = nlohmann::json;

json encode(const Vec3& v);
json encode(const Quaternion& q);
json encode(const Pose& pose);
json encode(const Rgba& color);
json encode(const Shape& shape);
json encode(const ComponentRecord& record);
json encode(const Database& db);
json encode(const ExtractionResult& result);
json encode(const InstanceState& state);
json encode(const AnimationClip& clip);
json encode(const SceneState& scene);
json encode(const AssemblyStep& step);
json encode(const SftRecord& record);

/// One element of the `instances` array of an encoded scene.
json encode_instance(const InstanceKey& key, const InstanceState& state);

template <typename T>
T decode(const json& j, const std::string& path = "$");

template <> Vec3 decode<Vec3>(const json& j, const std::string& path);
template <> Quaternion decode<Quaternion>(const json& j, const std::string& path);
template <> Pose decode<Pose>(const json& j, const std::string& path);
template <> Rgba decode<Rgba>(const json& j, const std::string& path);
template <> Shape decode<Shape>(const json& j, const std::string& path);
template <> ComponentRecord decode<ComponentRecord>(const json& j, const std::string& path);
template <> Database decode<Database>(const json& j, const std::string& path);
template <> ExtractionResult decode<ExtractionResult>(const json& j, const std::string& path);
template <> InstanceState decode<InstanceState>(const json& j, const std::string& path);
template <> AnimationClip decode<AnimationClip>(const json& j, const std::string& path);
template <> SceneState decode<SceneState>(const json& j, const std::string& path);
template <> AssemblyStep decode<AssemblyStep>(const json& j, const std::string& path);
template <> SftRecord decode<SftRecord>(const json& j, const std::string& path);

}  // namespace vinstruct::codec
