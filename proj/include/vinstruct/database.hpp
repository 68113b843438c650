#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vinstruct/types.hpp"

namespace vinstruct {

struct Violation {
  std::string record;  // offending record name
  std::string rule;    // uniqueness, naming, arity, kind, dangling_reference, instances, color, collision
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Empty iff every Database invariant holds. Violations are reported in
/// manifest order.
std::vector<Violation> validate_database(const Database& db);

std::string format_violation(const Violation& v);

/// Reads a `{"components": [...]}` manifest. Throws Error{IoError} when the
/// file cannot be read, Error{SchemaError} with field paths for malformed
/// content and Error{ValidationError} listing every invariant violation.
Database load_manifest(const std::filesystem::path& path);
Database parse_manifest(const std::string& content, const std::string& origin = "<manifest>");

void save_manifest(const Database& db, const std::filesystem::path& path);

/// First record in manifest order with this name, or nullptr.
const ComponentRecord* lookup(const Database& db, const CanonicalName& name);

/// `a + "_" + b`: the lookup key of the assembled record for a step.
CanonicalName combined_name(const CanonicalName& a, const CanonicalName& b);

}  // namespace vinstruct
