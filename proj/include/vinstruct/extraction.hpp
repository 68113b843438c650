#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vinstruct/types.hpp"

namespace vinstruct {

/// Lowercase, trim and collapse internal whitespace runs to one space.
std::string normalize_surface(std::string_view text);

/// Surface form (normalized, may contain spaces or plurals) -> canonical name.
class Lexicon {
 public:
  Lexicon() = default;
  /// Keys are normalized on insertion. Throws Error{InvalidArgument} when
  /// two surface forms normalize to the same key but different names.
  explicit Lexicon(const std::map<std::string, std::string>& entries);

  void add(std::string_view surface, const CanonicalName& name);

  std::optional<CanonicalName> find(std::string_view surface) const;
  bool has_name(const CanonicalName& name) const;

  bool empty() const noexcept { return entries_.empty(); }
  const std::map<std::string, CanonicalName>& entries() const noexcept { return entries_; }

  /// Surface forms of one canonical name, in key order.
  std::vector<std::string> surfaces_of(const CanonicalName& name) const;
  /// Distinct canonical names, sorted.
  std::vector<CanonicalName> names() const;

 private:
  std::map<std::string, CanonicalName> entries_;
};

Lexicon load_lexicon(const std::filesystem::path& path);

/// Word lists and templates that drive rule extraction and corpus
/// generation. Loaded from JSON so new domains need no rebuild.
struct ExtractionRules {
  std::vector<std::string> verbs;
  std::vector<std::string> prepositions;
  // Words skipped when looking left of a mention for a preposition.
  std::vector<std::string> determiners;
  std::string instruction;
  // Sentences with {pred}, {succ} and optional {count} slots.
  std::vector<std::string> templates;

  static ExtractionRules defaults();
};

ExtractionRules load_rules(const std::filesystem::path& path);

inline constexpr std::string_view kDefaultInstruction =
    "List all the components mentioned in the procedural step.";

/// Deterministic stand-in for the fine-tuned extractor. The successor is the
/// direct object of the first assembly verb, the predecessor the other
/// component (preferring one introduced by a preposition), and the count the
/// numeral directly in front of the successor mention (default 1).
///
/// Throws Error{NoComponentsFound}, Error{SingleComponent} or
/// Error{AmbiguousRoles}.
ExtractionResult rule_extract(std::string_view text, const Lexicon& lexicon,
                              const ExtractionRules& rules = ExtractionRules::defaults());

/// Parses "predecessor, successor, count". Names are normalized with spaces
/// turned into underscores but not looked up in any lexicon.
///
/// Throws Error{WrongArity}, Error{BadName}, Error{BadCount} or
/// Error{SameComponent}, each carrying the raw text.
ExtractionResult parse_llm_output(std::string_view raw);

/// Maps both names through the lexicon. Throws Error{UnknownComponent}.
ExtractionResult resolve_names(const ExtractionResult& result, const Lexicon& lexicon);

enum class NameStyle {
  Canonical,  // small_screw
  Surface,    // small screw
};

std::string serialize_extraction(const ExtractionResult& result,
                                 NameStyle style = NameStyle::Canonical);

/// Cardinal value of "one".."ten" or a decimal literal.
std::optional<int> parse_numeral(std::string_view token);
std::string_view numeral_word(int value);

class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual ExtractionResult extract(const std::string& step_text) const = 0;
};

class RuleExtractor final : public Extractor {
 public:
  RuleExtractor(Lexicon lexicon, ExtractionRules rules = ExtractionRules::defaults())
      : lexicon_(std::move(lexicon)), rules_(std::move(rules)) {}

  ExtractionResult extract(const std::string& step_text) const override {
    return rule_extract(step_text, lexicon_, rules_);
  }

 private:
  Lexicon lexicon_;
  ExtractionRules rules_;
};

}  // namespace vinstruct
