#pragma once

// Problem files: JSON documents of the form
//   { "dimension": d, "root": id,
//     "nodes": [ { "id": id, "rows": [[...], ...], "b": [...] }, ... ],
//     "edges": [ { "parent": id, "child": id, "weight": w }, ... ],
//     "reference": [...] }
// Node ids are any distinct non-negative integers; they are mapped to dense
// indices in ascending order. "weight" and "reference" are optional.

#include <filesystem>
#include <optional>
#include <string>

#include "treekz/system.hpp"

namespace treekz {

struct ProblemFile {
  TreeSystem system;
  /// Known solution, when the file carries one.
  std::optional<Vector> reference;
};

/// Throws ParseError on malformed JSON or missing fields and ValidationError
/// (naming nodes and edges) on invariant violations.
ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::filesystem::path& path);

std::string serialize_problem(const TreeSystem& system, const std::optional<Vector>& reference = std::nullopt);
void save_problem(const std::filesystem::path& path, const TreeSystem& system,
                  const std::optional<Vector>& reference = std::nullopt);

}  // namespace treekz
