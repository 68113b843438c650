#pragma once

#include <set>
#include <string>

#include "vinstruct/animation.hpp"
#include "vinstruct/types.hpp"

namespace vinstruct {

/// Scene before the first step: atomic records active at their manifest
/// poses, assembled records inactive, default colors everywhere.
SceneState initial_scene(const Database& db);

/// Restores default colors, drops the current clip and stops all
/// animation. Activation is left as is, so completed assemblies survive.
SceneState clear_instruction(const Database& db, const SceneState& scene);

/// Turns one extraction triple into a virtual instruction:
///  1. clear the previous instruction;
///  2. in manifest order, activate every record named like the predecessor
///     or successor and paint all of its instances green;
///  3. in manifest order, activate the first record named
///     predecessor_successor, paint it green, mark it animating, bind the
///     approach clip and stop scanning.
///
/// Throws Error{UnknownComponent} when neither name is in the database and
/// Error{InsufficientInstances} when the count exceeds the successor's
/// instances.
SceneState generate_instruction(const Database& db, const SceneState& scene,
                                const ExtractionResult& result,
                                const AnimationParams& params = {});

/// Finalizes the assembly shown by the current clip: the assembled record
/// stays active at rest, the predecessor and the animated successor
/// instances are hidden, and the instruction is cleared. Without a clip
/// this is clear_instruction.
SceneState commit_assembly(const Database& db, const SceneState& scene);

/// Names of records with at least one instance whose color differs from
/// the record's default color.
std::set<std::string> highlighted_records(const Database& db, const SceneState& scene);

}  // namespace vinstruct
