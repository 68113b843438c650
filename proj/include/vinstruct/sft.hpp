#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vinstruct/extraction.hpp"

namespace vinstruct {

/// Reason the record is invalid, or nullopt. Checks non-empty fields and
/// that `output` parses as an extraction triple.
std::optional<std::string> check_sft_record(const SftRecord& record);

/// Writes a JSON array of {"instruction", "input", "output"} objects in
/// input order. Throws Error{InvalidArgument} for an invalid record and
/// Error{IoError} when the file cannot be written.
void emit_sft_dataset(const std::vector<SftRecord>& records, const std::filesystem::path& path);
std::string render_sft_dataset(const std::vector<SftRecord>& records);

/// Reads a dataset back. Throws Error{SchemaError} naming the first bad
/// element (extra or missing keys, empty fields, unparsable output).
std::vector<SftRecord> load_sft_dataset(const std::filesystem::path& path);
std::vector<SftRecord> parse_sft_dataset(const std::string& content,
                                         const std::string& origin = "<dataset>");

/// Upper bound on the count drawn for a successor, e.g. its instance count.
using CountLimit = std::function<int(const CanonicalName&)>;

/// Fills role-labeled templates ({pred}, {succ}, optional {count}) with
/// lexicon surface forms. Each output is the ground-truth triple written
/// with the surface forms used in the input, like "small screws, base, 1".
/// Deterministic for a given seed. Throws Error{InvalidArgument} for n <= 0,
/// no templates or fewer than two components.
std::vector<SftRecord> generate_sft_corpus(const Lexicon& lexicon, const ExtractionRules& rules,
                                           int n, std::uint64_t seed,
                                           const CountLimit& limit = {});

struct OracleMismatch {
  std::size_t index;
  std::string input;
  std::string expected;
  std::string actual;
};

/// Records whose rule_extract(input) differs from resolve(parse(output)).
std::vector<OracleMismatch> check_oracle_consistency(const std::vector<SftRecord>& records,
                                                     const Lexicon& lexicon,
                                                     const ExtractionRules& rules);

}  // namespace vinstruct
