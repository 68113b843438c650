#include "vinstruct/extraction.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vinstruct/error.hpp"

namespace vinstruct {

namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 11> kNumeralWords = {
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"};

std::vector<std::string> tokenize(std::string_view normalized) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : normalized) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string trim(std::string_view s) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

bool matches_verb(const std::string& token, const std::string& verb) {
  if (verb.empty()) return false;
  if (token == verb) return true;
  if (token.size() <= verb.size() || token.compare(0, verb.size(), verb) != 0) {
    // place -> placing / placed
    if (verb.back() == 'e') {
      const auto stem = verb.substr(0, verb.size() - 1);
      return token == stem + "ing";
    }
    return false;
  }
  const auto suffix = token.substr(verb.size());
  if (suffix == "s" || suffix == "es" || suffix == "ed" || suffix == "d" || suffix == "ing") {
    return true;
  }
  // put -> putting
  const std::string doubled(1, verb.back());
  return suffix == doubled + "ing" || suffix == doubled + "ed";
}

struct Mention {
  CanonicalName name;
  std::size_t begin;  // token index
  std::size_t end;    // one past the last token
};

std::vector<std::string> string_list(const json& doc, const char* key,
                                     const std::filesystem::path& path) {
  std::vector<std::string> out;
  if (!doc.contains(key)) return out;
  const auto& list = doc[key];
  if (!list.is_array()) {
    throw Error(ErrorCode::SchemaError, path.string() + ": \"" + key + "\" must be an array");
  }
  for (const auto& item : list) {
    if (!item.is_string()) {
      throw Error(ErrorCode::SchemaError,
                  path.string() + ": \"" + key + "\" must contain only strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, path.string() + ": invalid JSON: " + e.what());
  }
}

}  // namespace

std::string normalize_surface(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

Lexicon::Lexicon(const std::map<std::string, std::string>& entries) {
  for (const auto& [surface, name] : entries) add(surface, CanonicalName(name));
}

void Lexicon::add(std::string_view surface, const CanonicalName& name) {
  auto key = normalize_surface(surface);
  if (key.empty()) throw Error(ErrorCode::InvalidArgument, "empty lexicon surface form");
  auto [it, inserted] = entries_.emplace(key, name);
  if (!inserted && it->second != name) {
    throw Error(ErrorCode::InvalidArgument, "surface form \"" + key + "\" maps to both \"" +
                                                it->second.str() + "\" and \"" + name.str() + "\"");
  }
}

std::optional<CanonicalName> Lexicon::find(std::string_view surface) const {
  auto it = entries_.find(normalize_surface(surface));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool Lexicon::has_name(const CanonicalName& name) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& entry) { return entry.second == name; });
}

std::vector<std::string> Lexicon::surfaces_of(const CanonicalName& name) const {
  std::vector<std::string> out;
  for (const auto& [surface, n] : entries_) {
    if (n == name) out.push_back(surface);
  }
  return out;
}

std::vector<CanonicalName> Lexicon::names() const {
  std::set<CanonicalName> unique;
  for (const auto& entry : entries_) unique.insert(entry.second);
  return {unique.begin(), unique.end()};
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  const auto doc = read_json_file(path);
  if (!doc.is_object()) {
    throw Error(ErrorCode::SchemaError, path.string() + ": lexicon must be a JSON object");
  }
  Lexicon lexicon;
  for (const auto& [surface, name] : doc.items()) {
    if (!name.is_string()) {
      throw Error(ErrorCode::SchemaError,
                  path.string() + ": value for \"" + surface + "\" must be a string");
    }
    try {
      lexicon.add(surface, CanonicalName(name.get<std::string>()));
    } catch (const Error& e) {
      throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
    }
  }
  return lexicon;
}

ExtractionRules ExtractionRules::defaults() {
  ExtractionRules rules;
  rules.verbs = {"fasten", "attach", "insert", "place", "screw", "mount", "put", "fix"};
  rules.prepositions = {"onto", "into", "on",      "in",   "to",    "with",
                        "through", "inside", "over", "under", "against", "upon"};
  rules.determiners = {"the", "a", "an", "each", "every", "all", "both", "its", "their",
                       "this", "that", "these", "those", "assembled", "remaining"};
  rules.instruction = std::string(kDefaultInstruction);
  rules.templates = {"Insert the {succ} into the {pred}.",
                     "Place {count} {succ} onto the {pred}.",
                     "Attach the {succ} to the {pred}."};
  return rules;
}

ExtractionRules load_rules(const std::filesystem::path& path) {
  const auto doc = read_json_file(path);
  if (!doc.is_object()) {
    throw Error(ErrorCode::SchemaError, path.string() + ": rules file must be a JSON object");
  }
  auto rules = ExtractionRules::defaults();
  if (doc.contains("verbs")) rules.verbs = string_list(doc, "verbs", path);
  if (doc.contains("prepositions")) rules.prepositions = string_list(doc, "prepositions", path);
  if (doc.contains("determiners")) rules.determiners = string_list(doc, "determiners", path);
  if (doc.contains("templates")) rules.templates = string_list(doc, "templates", path);
  if (doc.contains("instruction")) {
    if (!doc["instruction"].is_string()) {
      throw Error(ErrorCode::SchemaError, path.string() + ": \"instruction\" must be a string");
    }
    rules.instruction = doc["instruction"].get<std::string>();
  }
  for (auto* list : {&rules.verbs, &rules.prepositions, &rules.determiners}) {
    for (auto& word : *list) word = normalize_surface(word);
  }
  return rules;
}

std::optional<int> parse_numeral(std::string_view token) {
  for (std::size_t i = 0; i < kNumeralWords.size(); ++i) {
    if (token == kNumeralWords[i]) return static_cast<int>(i);
  }
  if (token.empty()) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value, 10);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

std::string_view numeral_word(int value) {
  if (value < 0 || value >= static_cast<int>(kNumeralWords.size())) return {};
  return kNumeralWords[static_cast<std::size_t>(value)];
}

ExtractionResult rule_extract(std::string_view text, const Lexicon& lexicon,
                              const ExtractionRules& rules) {
  if (lexicon.empty()) throw Error(ErrorCode::InvalidArgument, "lexicon is empty");

  const auto tokens = tokenize(normalize_surface(text));

  // Surface forms are matched on token boundaries, longest first.
  std::vector<std::pair<std::vector<std::string>, CanonicalName>> forms;
  std::size_t longest = 0;
  for (const auto& [surface, name] : lexicon.entries()) {
    auto form = tokenize(surface);
    if (form.empty()) continue;
    longest = std::max(longest, form.size());
    forms.emplace_back(std::move(form), name);
  }

  std::vector<Mention> mentions;
  std::vector<bool> covered(tokens.size(), false);
  for (std::size_t i = 0; i < tokens.size();) {
    std::optional<Mention> best;
    for (std::size_t len = std::min(longest, tokens.size() - i); len > 0 && !best; --len) {
      for (const auto& [form, name] : forms) {
        if (form.size() == len && std::equal(form.begin(), form.end(), tokens.begin() + i)) {
          best = Mention{name, i, i + len};
          break;
        }
      }
    }
    if (best) {
      for (std::size_t k = best->begin; k < best->end; ++k) covered[k] = true;
      i = best->end;
      mentions.push_back(*best);
    } else {
      ++i;
    }
  }

  if (mentions.empty()) {
    throw Error(ErrorCode::NoComponentsFound, "no known component in \"" + std::string(text) + "\"");
  }
  std::vector<CanonicalName> distinct;
  for (const auto& m : mentions) {
    if (std::find(distinct.begin(), distinct.end(), m.name) == distinct.end()) {
      distinct.push_back(m.name);
    }
  }
  if (distinct.size() == 1) {
    throw Error(ErrorCode::SingleComponent,
                "only \"" + distinct.front().str() + "\" is mentioned; no predecessor");
  }

  auto in_list = [](const std::vector<std::string>& list, const std::string& token) {
    return std::find(list.begin(), list.end(), token) != list.end();
  };
  auto is_preposition = [&](std::size_t i) {
    return !covered[i] && in_list(rules.prepositions, tokens[i]);
  };
  auto is_prepositional = [&](const Mention& m) {
    std::size_t j = m.begin;
    while (j > 0) {
      --j;
      if (covered[j]) return false;
      if (in_list(rules.determiners, tokens[j]) || parse_numeral(tokens[j])) continue;
      return is_preposition(j);
    }
    return false;
  };

  std::optional<std::size_t> verb_at;
  for (std::size_t i = 0; i < tokens.size() && !verb_at; ++i) {
    if (covered[i]) continue;
    for (const auto& verb : rules.verbs) {
      if (matches_verb(tokens[i], verb)) {
        verb_at = i;
        break;
      }
    }
  }

  const Mention* successor = nullptr;
  if (verb_at) {
    // Direct object: first mention after the verb with no preposition in between.
    for (const auto& m : mentions) {
      if (m.begin <= *verb_at) continue;
      bool blocked = false;
      for (std::size_t k = *verb_at + 1; k < m.begin; ++k) blocked = blocked || is_preposition(k);
      if (!blocked) {
        successor = &m;
        break;
      }
    }
    if (!successor) {
      auto it = std::find_if(mentions.begin(), mentions.end(),
                             [&](const Mention& m) { return m.begin > *verb_at; });
      if (it != mentions.end()) successor = &*it;
    }
  }

  const Mention* predecessor = nullptr;
  if (successor) {
    for (const auto& m : mentions) {
      if (m.name != successor->name && is_prepositional(m)) {
        predecessor = &m;
        break;
      }
    }
    if (!predecessor && distinct.size() == 2) {
      for (const auto& m : mentions) {
        if (m.name != successor->name) {
          predecessor = &m;
          break;
        }
      }
    }
  } else if (distinct.size() == 2) {
    // No assembly verb: a prepositional mention is the predecessor,
    // otherwise the first mention is, as in the "pred, succ" output order.
    for (const auto& m : mentions) {
      if (is_prepositional(m)) {
        predecessor = &m;
        break;
      }
    }
    if (!predecessor) predecessor = &mentions.front();
    for (const auto& m : mentions) {
      if (m.name != predecessor->name) {
        successor = &m;
        break;
      }
    }
  }

  if (!successor || !predecessor) {
    throw Error(ErrorCode::AmbiguousRoles,
                std::to_string(distinct.size()) + " components mentioned and no verb pattern "
                                                   "assigns predecessor and successor");
  }

  int count = 1;
  if (successor->begin > 0 && !covered[successor->begin - 1]) {
    if (auto n = parse_numeral(tokens[successor->begin - 1]); n && *n >= 1) count = *n;
  }
  return ExtractionResult(predecessor->name, successor->name, count);
}

ExtractionResult parse_llm_output(std::string_view raw) {
  const std::string raw_text(raw);
  std::vector<std::string> fields;
  std::string current;
  for (char c : raw) {
    if (c == ',') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(trim(current));

  if (fields.size() != 3) {
    throw Error(ErrorCode::WrongArity,
                "expected 3 comma-separated fields, got " + std::to_string(fields.size()))
        .with_raw(raw_text);
  }

  auto to_name = [&](const std::string& field, const char* role) {
    auto normalized = normalize_surface(field);
    std::replace(normalized.begin(), normalized.end(), ' ', '_');
    if (normalized.empty()) {
      throw Error(ErrorCode::BadName, std::string(role) + " name is empty").with_raw(raw_text);
    }
    if (!CanonicalName::is_valid(normalized)) {
      throw Error(ErrorCode::BadName,
                  std::string(role) + " name \"" + field + "\" is not a component name")
          .with_raw(raw_text);
    }
    return CanonicalName(std::move(normalized));
  };
  auto predecessor = to_name(fields[0], "predecessor");
  auto successor = to_name(fields[1], "successor");

  const auto& count_text = fields[2];
  int count = 0;
  auto [ptr, ec] =
      std::from_chars(count_text.data(), count_text.data() + count_text.size(), count, 10);
  if (count_text.empty() || ec != std::errc() || ptr != count_text.data() + count_text.size() ||
      count < 1) {
    throw Error(ErrorCode::BadCount, "count \"" + count_text + "\" is not an integer >= 1")
        .with_raw(raw_text);
  }
  try {
    return ExtractionResult(std::move(predecessor), std::move(successor), count);
  } catch (Error& e) {
    e.with_raw(raw_text);
    throw;
  }
}

ExtractionResult resolve_names(const ExtractionResult& result, const Lexicon& lexicon) {
  if (lexicon.empty()) throw Error(ErrorCode::InvalidArgument, "lexicon is empty");
  auto resolve = [&](const CanonicalName& name) {
    auto surface = name.str();
    std::replace(surface.begin(), surface.end(), '_', ' ');
    if (auto found = lexicon.find(surface)) return *found;
    if (lexicon.has_name(name)) return name;
    throw Error(ErrorCode::UnknownComponent, "unknown component \"" + name.str() + "\"");
  };
  return ExtractionResult(resolve(result.predecessor()), resolve(result.successor()),
                          result.count());
}

std::string serialize_extraction(const ExtractionResult& result, NameStyle style) {
  auto render = [&](const CanonicalName& name) {
    auto out = name.str();
    if (style == NameStyle::Surface) std::replace(out.begin(), out.end(), '_', ' ');
    return out;
  };
  return render(result.predecessor()) + ", " + render(result.successor()) + ", " +
         std::to_string(result.count());
}

}  // namespace vinstruct
