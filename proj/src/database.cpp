#include "vinstruct/database.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "vinstruct/codec.hpp"
#include "vinstruct/error.hpp"

namespace vinstruct {

std::vector<Violation> validate_database(const Database& db) {
  std::vector<Violation> out;
  std::set<std::string> names;
  for (const auto& r : db.components()) names.insert(r.name.str());

  std::set<std::string> seen;
  for (const auto& r : db.components()) {
    const auto& n = r.name.str();
    if (!seen.insert(n).second) {
      out.push_back({n, "uniqueness", "duplicate component name"});
    }
    if (r.instances.empty()) {
      out.push_back({n, "instances", "record has no instances"});
    }
    if (!r.default_color.in_unit_range()) {
      out.push_back({n, "color", "color channel outside [0, 1]"});
    }

    if (r.kind == ComponentKind::Atomic) {
      if (!r.constituents.empty()) {
        out.push_back({n, "kind", "atomic record lists constituents"});
      }
      if (r.mating) {
        out.push_back({n, "kind", "atomic record has a mating pose"});
      }
      // An atomic name must not read as the combined name of two records.
      for (std::size_t pos = n.find('_'); pos != std::string::npos; pos = n.find('_', pos + 1)) {
        const auto left = n.substr(0, pos);
        const auto right = n.substr(pos + 1);
        if (names.count(left) && names.count(right)) {
          out.push_back({n, "collision",
                         "atomic name equals combined name of \"" + left + "\" and \"" + right + "\""});
        }
      }
      continue;
    }

    if (r.constituents.size() != 2) {
      out.push_back({n, "arity",
                     "assembled record needs exactly 2 constituents, has " +
                         std::to_string(r.constituents.size())});
      continue;
    }
    const auto& first = r.constituents[0].str();
    const auto& second = r.constituents[1].str();
    if (first == second) {
      out.push_back({n, "arity", "constituents are identical"});
    }
    if (n != first + "_" + second) {
      out.push_back({n, "naming", "assembled name must be \"" + first + "_" + second + "\""});
    }
    for (const auto& c : r.constituents) {
      if (!names.count(c.str())) {
        out.push_back({n, "dangling_reference", "constituent \"" + c.str() + "\" does not exist"});
      }
    }
  }
  return out;
}

std::string format_violation(const Violation& v) {
  return v.record + ": [" + v.rule + "] " + v.message;
}

Database parse_manifest(const std::string& content, const std::string& origin) {
  codec::json doc;
  try {
    doc = codec::json::parse(content);
  } catch (const codec::json::parse_error& e) {
    // nlohmann reports a byte offset; translate it to a line number.
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < content.size(); ++i) {
      if (content[i] == '\n') ++line;
    }
    throw Error(ErrorCode::SchemaError,
                origin + ":" + std::to_string(line) + ": invalid JSON: " + e.what());
  }
  Database db;
  try {
    db = codec::decode<Database>(doc, "$");
  } catch (const Error& e) {
    throw Error(ErrorCode::SchemaError, origin + ": " + e.what());
  }
  const auto violations = validate_database(db);
  if (!violations.empty()) {
    std::string message = origin + ": " + std::to_string(violations.size()) + " violation(s)";
    for (const auto& v : violations) message += "\n  " + format_violation(v);
    throw Error(ErrorCode::ValidationError, message);
  }
  return db;
}

Database load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open manifest " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_manifest(buffer.str(), path.string());
}

void save_manifest(const Database& db, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write manifest " + path.string());
  out << codec::encode(db).dump(2) << "\n";
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

const ComponentRecord* lookup(const Database& db, const CanonicalName& name) {
  return db.find(name);
}

CanonicalName combined_name(const CanonicalName& a, const CanonicalName& b) {
  return CanonicalName(a.str() + "_" + b.str());
}

}  // namespace vinstruct
