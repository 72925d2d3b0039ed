#include "treekz/problem_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace treekz {

using json = nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) parse_fail(where + ": missing \"" + key + "\"");
  return obj.at(key);
}

std::int64_t as_id(const json& v, const std::string& where) {
  if (!v.is_number_integer()) parse_fail(where + ": expected an integer id");
  const auto id = v.get<std::int64_t>();
  if (id < 0) parse_fail(where + ": ids must be non-negative");
  return id;
}

double as_real(const json& v, const std::string& where) {
  if (!v.is_number()) parse_fail(where + ": expected a number");
  return v.get<double>();
}

Vector as_vector(const json& v, const std::string& where) {
  if (!v.is_array()) parse_fail(where + ": expected an array");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = as_real(v[i], where);
  return out;
}

}  // namespace

ProblemFile parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("invalid JSON: ") + e.what());
  }
  const json& dim_field = field(doc, "dimension", "problem");
  if (!dim_field.is_number_integer() || dim_field.get<std::int64_t>() < 1) {
    parse_fail("problem: \"dimension\" must be a positive integer");
  }
  const auto dimension = dim_field.get<Eigen::Index>();
  const auto root_label = as_id(field(doc, "root", "problem"), "root");
  const json& nodes = field(doc, "nodes", "problem");
  if (!nodes.is_array() || nodes.empty()) parse_fail("problem: \"nodes\" must be a non-empty array");

  std::vector<Violation> problems;
  std::map<std::int64_t, std::size_t> first_seen;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto id = as_id(field(nodes[i], "id", "nodes[" + std::to_string(i) + "]"), "node id");
    if (!first_seen.emplace(id, i).second) {
      problems.push_back({ErrorCode::InvalidArgument, "node " + std::to_string(id) + " is listed twice"});
    }
  }

  // Dense indices follow ascending ids.
  std::map<std::int64_t, NodeId> index_of;
  std::vector<std::int64_t> labels;
  for (const auto& [id, pos] : first_seen) {
    index_of.emplace(id, node(labels.size()));
    labels.push_back(id);
  }

  std::vector<std::vector<RowEquation>> equations(labels.size());
  for (const auto& [id, pos] : first_seen) {
    const json& n = nodes[pos];
    const std::string where = "node " + std::to_string(id);
    const json& rows = field(n, "rows", where);
    const Vector b = as_vector(field(n, "b", where), where + " b");
    if (!rows.is_array()) parse_fail(where + ": \"rows\" must be an array");
    if (rows.empty()) {
      problems.push_back({ErrorCode::MissingEquation, where + " holds no equation"});
      continue;
    }
    if (static_cast<Eigen::Index>(rows.size()) != b.size()) {
      problems.push_back({ErrorCode::SizeMismatch, where + " has " + std::to_string(rows.size()) +
                                                            " rows but " + std::to_string(b.size()) +
                                                            " right-hand sides"});
      continue;
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Vector a = as_vector(rows[r], where + " row " + std::to_string(r));
      if (a.size() != dimension) {
        problems.push_back({ErrorCode::DimensionMismatch, where + " row " + std::to_string(r) + " has " +
                                                              std::to_string(a.size()) + " entries, expected " +
                                                              std::to_string(dimension)});
        continue;
      }
      try {
        equations[index_of.at(id).index()].emplace_back(a, b[static_cast<Eigen::Index>(r)]);
      } catch (const Error& e) {
        problems.push_back({e.code(), where + " row " + std::to_string(r) + ": " + e.what()});
      }
    }
  }

  TreeSpec spec;
  spec.node_count = labels.size();
  spec.labels = labels;
  const auto root_it = index_of.find(root_label);
  const bool root_known = root_it != index_of.end();
  if (root_known) {
    spec.root = root_it->second;
  } else {
    problems.push_back({ErrorCode::UnknownNode, "root " + std::to_string(root_label) + " is not a listed node"});
  }
  const json edges = doc.contains("edges") ? doc.at("edges") : json::array();
  if (!edges.is_array()) parse_fail("problem: \"edges\" must be an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const auto parent = as_id(field(edges[i], "parent", where), where + " parent");
    const auto child = as_id(field(edges[i], "child", where), where + " child");
    std::optional<double> weight;
    if (edges[i].contains("weight") && !edges[i].at("weight").is_null()) {
      weight = as_real(edges[i].at("weight"), where + " weight");
    }
    const auto p = index_of.find(parent);
    const auto c = index_of.find(child);
    if (p == index_of.end() || c == index_of.end()) {
      problems.push_back({ErrorCode::UnknownNode, "edge (" + std::to_string(parent) + "->" +
                                                      std::to_string(child) + ") references an unknown node"});
      continue;
    }
    spec.edges.push_back({p->second, c->second, weight});
  }
  if (root_known) {
    auto tree_problems = validate(spec);
    problems.insert(problems.end(), tree_problems.begin(), tree_problems.end());
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));

  std::optional<Vector> reference;
  if (doc.contains("reference") && !doc.at("reference").is_null()) {
    reference = as_vector(doc.at("reference"), "reference");
    if (reference->size() != dimension) {
      throw ValidationError({{ErrorCode::DimensionMismatch, "reference has the wrong dimension"}});
    }
  }
  return {TreeSystem(TreeTopology::build(spec), std::move(equations)), std::move(reference)};
}

ProblemFile load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

std::string serialize_problem(const TreeSystem& system, const std::optional<Vector>& reference) {
  const auto& tree = system.tree();
  json doc;
  doc["dimension"] = system.dimension();
  doc["root"] = tree.label(tree.root());
  json nodes = json::array();
  for (std::size_t v = 0; v < tree.node_count(); ++v) {
    json rows = json::array();
    json b = json::array();
    for (const auto& eq : system.equations(node(v))) {
      rows.push_back(std::vector<double>(eq.a().data(), eq.a().data() + eq.a().size()));
      b.push_back(eq.b());
    }
    nodes.push_back({{"id", tree.label(node(v))}, {"rows", rows}, {"b", b}});
  }
  doc["nodes"] = nodes;
  json edges = json::array();
  for (const auto& e : tree.to_spec().edges) {
    edges.push_back({{"parent", tree.label(e.parent)}, {"child", tree.label(e.child)}, {"weight", *e.weight}});
  }
  doc["edges"] = edges;
  if (reference) doc["reference"] = std::vector<double>(reference->data(), reference->data() + reference->size());
  return doc.dump(2) + "\n";
}

void save_problem(const std::filesystem::path& path, const TreeSystem& system, const std::optional<Vector>& reference) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << serialize_problem(system, reference);
}

}  // namespace treekz
