#include "vinstruct/engine.hpp"

#include "vinstruct/database.hpp"
#include "vinstruct/error.hpp"

namespace vinstruct {

namespace {

InstanceState& state_of(SceneState& scene, const ComponentRecord& record, std::size_t k) {
  auto [it, inserted] = scene.instances.try_emplace(InstanceKey{record.name.str(), k});
  if (inserted) {
    it->second.color = record.default_color;
    it->second.pose = record.instances[k];
  }
  return it->second;
}

}  // namespace

SceneState initial_scene(const Database& db) {
  SceneState scene;
  std::set<std::string> seen;
  for (const auto& record : db.components()) {
    if (!seen.insert(record.name.str()).second) continue;
    for (std::size_t k = 0; k < record.instances.size(); ++k) {
      scene.instances.emplace(InstanceKey{record.name.str(), k},
                              InstanceState{record.kind == ComponentKind::Atomic,
                                            record.default_color, record.instances[k], false});
    }
  }
  return scene;
}

SceneState clear_instruction(const Database& db, const SceneState& scene) {
  SceneState out = scene;
  out.current_clip.reset();
  for (auto& [key, state] : out.instances) {
    state.animating = false;
    if (!CanonicalName::is_valid(key.name)) continue;
    if (const auto* record = db.find(CanonicalName(key.name))) {
      state.color = record->default_color;
    }
  }
  return out;
}

SceneState generate_instruction(const Database& db, const SceneState& scene,
                                const ExtractionResult& result, const AnimationParams& params) {
  const auto& a = result.predecessor();
  const auto& b = result.successor();
  const auto* predecessor = db.find(a);
  const auto* successor = db.find(b);
  if (!predecessor && !successor) {
    throw Error(ErrorCode::UnknownComponent,
                "neither \"" + a.str() + "\" nor \"" + b.str() + "\" is in the database");
  }
  if (successor && static_cast<std::size_t>(result.count()) > successor->instances.size()) {
    throw Error(ErrorCode::InsufficientInstances,
                "step needs " + std::to_string(result.count()) + " \"" + b.str() + "\", database has " +
                    std::to_string(successor->instances.size()));
  }

  SceneState out = clear_instruction(db, scene);

  for (const auto& record : db.components()) {
    if (record.name != a && record.name != b) continue;
    for (std::size_t k = 0; k < record.instances.size(); ++k) {
      auto& state = state_of(out, record, k);
      state.active = true;
      state.color = kHighlightGreen;
    }
  }

  const auto combined = combined_name(a, b);
  for (const auto& record : db.components()) {
    if (record.name != combined) continue;
    for (std::size_t k = 0; k < record.instances.size(); ++k) {
      auto& state = state_of(out, record, k);
      state.active = true;
      state.color = kHighlightGreen;
      state.animating = true;
    }
    if (predecessor && successor) {
      out.current_clip = make_animation(db, a, b, params, result.count());
    }
    break;
  }
  return out;
}

SceneState commit_assembly(const Database& db, const SceneState& scene) {
  SceneState out = clear_instruction(db, scene);
  if (!scene.current_clip) return out;

  const auto& clip = *scene.current_clip;
  const auto* assembled = db.find(combined_name(clip.anchor, clip.target));
  if (!assembled) return out;

  for (std::size_t k = 0; k < assembled->instances.size(); ++k) {
    auto& state = state_of(out, *assembled, k);
    state.active = true;
    state.pose = assembled->instances[k];
  }
  if (const auto* anchor = db.find(clip.anchor)) {
    for (std::size_t k = 0; k < anchor->instances.size(); ++k) {
      state_of(out, *anchor, k).active = false;
    }
  }
  if (const auto* target = db.find(clip.target)) {
    const auto used = std::min<std::size_t>(static_cast<std::size_t>(clip.instance_count),
                                            target->instances.size());
    for (std::size_t k = 0; k < used; ++k) {
      state_of(out, *target, k).active = false;
    }
  }
  return out;
}

std::set<std::string> highlighted_records(const Database& db, const SceneState& scene) {
  std::set<std::string> out;
  for (const auto& [key, state] : scene.instances) {
    if (!CanonicalName::is_valid(key.name)) continue;
    const auto* record = db.find(CanonicalName(key.name));
    if (record && state.color != record->default_color) out.insert(key.name);
  }
  return out;
}

}  // namespace vinstruct
