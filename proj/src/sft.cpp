#include "vinstruct/sft.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "vinstruct/error.hpp"

namespace vinstruct {

namespace {

using ordered_json = nlohmann::ordered_json;

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

void replace_all(std::string& text, std::string_view slot, const std::string& value) {
  for (auto pos = text.find(slot); pos != std::string::npos; pos = text.find(slot, pos + value.size())) {
    text.replace(pos, slot.size(), value);
  }
}

// mt19937_64 output is fixed by the standard; the distributions are not,
// so bounded draws are done by hand to keep corpora identical across
// standard libraries.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

std::optional<std::string> check_sft_record(const SftRecord& record) {
  if (blank(record.instruction)) return "instruction is empty";
  if (blank(record.input)) return "input is empty";
  if (blank(record.output)) return "output is empty";
  try {
    parse_llm_output(record.output);
  } catch (const Error& e) {
    return "output does not parse (" + std::string(to_string(e.code())) + "): " + e.what();
  }
  return std::nullopt;
}

std::string render_sft_dataset(const std::vector<SftRecord>& records) {
  ordered_json doc = ordered_json::array();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (auto problem = check_sft_record(records[i])) {
      throw Error(ErrorCode::InvalidArgument,
                  "record " + std::to_string(i) + ": " + *problem);
    }
    ordered_json item;
    item["instruction"] = records[i].instruction;
    item["input"] = records[i].input;
    item["output"] = records[i].output;
    doc.push_back(std::move(item));
  }
  return (records.empty() ? std::string("[]") : doc.dump(2)) + "\n";
}

void emit_sft_dataset(const std::vector<SftRecord>& records, const std::filesystem::path& path) {
  const auto content = render_sft_dataset(records);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write dataset " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<SftRecord> parse_sft_dataset(const std::string& content, const std::string& origin) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(content);
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, origin + ": invalid JSON: " + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::SchemaError, origin + ": expected a JSON array");

  std::vector<SftRecord> records;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto where = origin + "[" + std::to_string(i) + "]";
    const auto& item = doc[i];
    if (!item.is_object() || item.size() != 3) {
      throw Error(ErrorCode::SchemaError,
                  where + ": expected an object with exactly instruction, input, output");
    }
    SftRecord record;
    for (auto [key, target] : {std::pair{"instruction", &record.instruction},
                               std::pair{"input", &record.input},
                               std::pair{"output", &record.output}}) {
      auto it = item.find(key);
      if (it == item.end() || !it->is_string()) {
        throw Error(ErrorCode::SchemaError, where + ": \"" + key + "\" must be a string");
      }
      *target = it->get<std::string>();
    }
    if (auto problem = check_sft_record(record)) {
      throw Error(ErrorCode::SchemaError, where + ": " + *problem);
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<SftRecord> load_sft_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open dataset " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_sft_dataset(buffer.str(), path.string());
}

std::vector<SftRecord> generate_sft_corpus(const Lexicon& lexicon, const ExtractionRules& rules,
                                           int n, std::uint64_t seed, const CountLimit& limit) {
  if (n <= 0) throw Error(ErrorCode::InvalidArgument, "corpus size must be > 0");
  if (rules.templates.empty()) throw Error(ErrorCode::InvalidArgument, "no templates");
  const auto names = lexicon.names();
  if (names.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "lexicon needs at least two components");
  }

  Draw draw(seed);
  std::vector<SftRecord> records;
  records.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto text = rules.templates[draw.below(rules.templates.size())];
    const auto pred_index = draw.below(names.size());
    auto succ_index = draw.below(names.size() - 1);
    if (succ_index >= pred_index) ++succ_index;
    const auto& predecessor = names[pred_index];
    const auto& successor = names[succ_index];

    const auto pred_forms = lexicon.surfaces_of(predecessor);
    const auto succ_forms = lexicon.surfaces_of(successor);
    const auto& pred_surface = pred_forms[draw.below(pred_forms.size())];
    const auto& succ_surface = succ_forms[draw.below(succ_forms.size())];

    int count = 1;
    if (text.find("{count}") != std::string::npos) {
      int max_count = 10;
      if (limit) max_count = std::clamp(limit(successor), 1, 10);
      count = 1 + static_cast<int>(draw.below(static_cast<std::size_t>(max_count)));
      const bool as_word = draw.below(2) == 0;
      replace_all(text, "{count}",
                  as_word ? std::string(numeral_word(count)) : std::to_string(count));
    }
    replace_all(text, "{pred}", pred_surface);
    replace_all(text, "{succ}", succ_surface);
    // Sentence-initial capital, as a person would write it.
    if (!text.empty() && text[0] >= 'a' && text[0] <= 'z') text[0] = static_cast<char>(text[0] - 'a' + 'A');

    records.push_back({rules.instruction, std::move(text),
                       pred_surface + ", " + succ_surface + ", " + std::to_string(count)});
  }
  return records;
}

std::vector<OracleMismatch> check_oracle_consistency(const std::vector<SftRecord>& records,
                                                     const Lexicon& lexicon,
                                                     const ExtractionRules& rules) {
  std::vector<OracleMismatch> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    std::string expected;
    std::string actual;
    bool match = false;
    try {
      const auto truth = resolve_names(parse_llm_output(r.output), lexicon);
      expected = serialize_extraction(truth);
      try {
        const auto got = rule_extract(r.input, lexicon, rules);
        actual = serialize_extraction(got);
        match = got == truth;
      } catch (const Error& e) {
        actual = std::string(to_string(e.code()));
      }
    } catch (const Error& e) {
      expected = std::string("unresolvable output: ") + e.what();
    }
    if (!match) out.push_back({i, r.input, expected, actual});
  }
  return out;
}

}  // namespace vinstruct
