#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace inflap {

using Json = nlohmann::ordered_json;

/// One verification verdict with the quantities it was decided on.
struct Check {
  std::string name;
  std::string tag;  // which structural property of the problem the check exercises
  bool passed = false;
  Json measured = Json::object();

  Json to_json() const;
};

bool all_passed(const std::vector<Check>& checks);

/// Two-space indented JSON with every floating-point number printed with 17
/// significant digits and non-finite numbers as null. Key order is insertion
/// order, so equal inputs give byte-identical text.
std::string dump_json(const Json& value);
void write_json(const std::filesystem::path& path, const Json& value);
Json read_json(const std::filesystem::path& path);

}  // namespace inflap
