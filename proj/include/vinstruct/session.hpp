#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "vinstruct/animation.hpp"
#include "vinstruct/extraction.hpp"
#include "vinstruct/types.hpp"

namespace vinstruct {

/// One step per non-blank line, trimmed, numbered from 1. A UTF-8 BOM and
/// CRLF line endings are accepted.
std::vector<AssemblyStep> parse_steps(const std::string& content);
std::vector<AssemblyStep> load_steps(const std::filesystem::path& path);

/// Next/Previous state machine over a step script. Every completed `next`
/// pushes the scene it started from, so `previous` is an exact undo.
class TrainingSession {
 public:
  struct StepOutcome {
    AssemblyStep step;
    ExtractionResult triple;
  };

  TrainingSession(std::shared_ptr<const Database> db, std::vector<AssemblyStep> steps,
                  AnimationParams params = {});

  /// Extracts the triple for the step under the cursor (lazily, at call
  /// time), commits the previous step's assembly and generates the new
  /// instruction. Throws Error{EndOfSteps}; extraction and engine errors
  /// carry the 1-based step index. The session is unchanged on failure.
  StepOutcome next(const Extractor& extractor);

  /// Throws Error{AtBeginning}.
  void previous();

  /// Applies a triple pushed from outside (e.g. by a remote model) to the
  /// current scene without moving the cursor.
  void apply(const ExtractionResult& triple);

  const Database& database() const noexcept { return *db_; }
  const std::vector<AssemblyStep>& steps() const noexcept { return steps_; }
  std::size_t cursor() const noexcept { return cursor_; }
  const SceneState& scene() const noexcept { return scene_; }
  const SceneState& initial() const noexcept { return initial_; }
  std::size_t history_depth() const noexcept { return state_stack_.size(); }
  const AnimationParams& params() const noexcept { return params_; }

 private:
  std::shared_ptr<const Database> db_;
  std::vector<AssemblyStep> steps_;
  AnimationParams params_;
  std::size_t cursor_ = 0;
  SceneState initial_;
  SceneState scene_;
  std::vector<SceneState> state_stack_;
};

}  // namespace vinstruct
