#include "vinstruct/session.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "vinstruct/engine.hpp"
#include "vinstruct/error.hpp"

namespace vinstruct {

std::vector<AssemblyStep> parse_steps(const std::string& content) {
  std::string_view rest(content);
  if (rest.rfind("\xEF\xBB\xBF", 0) == 0) rest.remove_prefix(3);

  std::vector<AssemblyStep> steps;
  while (!rest.empty()) {
    const auto eol = rest.find('\n');
    auto line = rest.substr(0, eol);
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);

    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    if (line.empty()) continue;
    steps.push_back({static_cast<int>(steps.size()) + 1, std::string(line)});
  }
  return steps;
}

std::vector<AssemblyStep> load_steps(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open step script " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_steps(buffer.str());
}

TrainingSession::TrainingSession(std::shared_ptr<const Database> db,
                                 std::vector<AssemblyStep> steps, AnimationParams params)
    : db_(std::move(db)), steps_(std::move(steps)), params_(params) {
  if (!db_) throw Error(ErrorCode::InvalidArgument, "session needs a database");
  initial_ = initial_scene(*db_);
  scene_ = initial_;
}

TrainingSession::StepOutcome TrainingSession::next(const Extractor& extractor) {
  if (cursor_ >= steps_.size()) {
    throw Error(ErrorCode::EndOfSteps, "no step after step " + std::to_string(steps_.size()));
  }
  const auto& step = steps_[cursor_];
  try {
    auto triple = extractor.extract(step.text);
    auto scene = generate_instruction(*db_, commit_assembly(*db_, scene_), triple, params_);
    scene.step_cursor = static_cast<int>(cursor_ + 1);

    state_stack_.push_back(std::move(scene_));
    scene_ = std::move(scene);
    ++cursor_;
    return {step, std::move(triple)};
  } catch (Error& e) {
    e.with_step(step.index);
    throw;
  }
}

void TrainingSession::previous() {
  if (cursor_ == 0) throw Error(ErrorCode::AtBeginning, "already at the first step");
  scene_ = std::move(state_stack_.back());
  state_stack_.pop_back();
  --cursor_;
}

void TrainingSession::apply(const ExtractionResult& triple) {
  auto scene = generate_instruction(*db_, scene_, triple, params_);
  scene.step_cursor = static_cast<int>(cursor_);
  scene_ = std::move(scene);
}

}  // namespace vinstruct
