#include "gg/model_document.hpp"

#include <array>
#include <cmath>

#include <openssl/evp.h>

#include "gg/error.hpp"
#include "json.hpp"

namespace gg {

using json = nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error(Errc::StoreFailure, "sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

namespace {

Role parse_role(const std::string& s) {
  if (s == "feature") return Role::Feature;
  if (s == "class") return Role::ClassLabel;
  if (s == "identifier") return Role::Identifier;
  if (s == "ignored") return Role::Ignored;
  throw Error(Errc::CorruptDocument, "unknown role '" + s + "'");
}

json schema_to_json(const Schema& schema) {
  json attrs = json::array();
  for (const auto& a : schema.attributes()) {
    json j;
    j["name"] = a.name;
    j["role"] = std::string(to_string(a.role));
    j["aliases"] = a.aliases;
    if (const auto* cat = std::get_if<Categorical>(&a.kind)) {
      j["kind"] = "categorical";
      j["domain"] = cat->domain;
    } else if (const auto* cont = std::get_if<Continuous>(&a.kind)) {
      j["kind"] = "continuous";
      j["unit"] = cont->unit;
    } else {
      j["kind"] = "text";
    }
    attrs.push_back(std::move(j));
  }
  return json{{"attributes", std::move(attrs)}};
}

Schema schema_from_json(const json& j) {
  std::vector<AttributeSchema> attrs;
  for (const auto& a : j.at("attributes")) {
    AttributeSchema s;
    s.name = a.at("name").get<std::string>();
    s.role = parse_role(a.at("role").get<std::string>());
    s.aliases = a.at("aliases").get<std::vector<std::string>>();
    const auto kind = a.at("kind").get<std::string>();
    if (kind == "categorical")
      s.kind = Categorical{a.at("domain").get<std::vector<std::string>>()};
    else if (kind == "continuous")
      s.kind = Continuous{a.at("unit").get<std::string>()};
    else if (kind == "text")
      s.kind = Text{};
    else
      throw Error(Errc::CorruptDocument, "unknown attribute kind '" + kind + "'");
    attrs.push_back(std::move(s));
  }
  return Schema(std::move(attrs));
}

json distribution_to_json(const ClassDistribution& d) {
  json j = json::object();
  for (const auto& [label, c] : d.counts()) j[label] = c;
  return j;
}

ClassDistribution distribution_from_json(const json& j) {
  ClassDistribution::Counts counts;
  for (const auto& [label, c] : j.items()) {
    const double v = c.get<double>();
    if (!std::isfinite(v) || v < 0.0) throw Error(Errc::CorruptDocument, "bad count for '" + label + "'");
    counts.emplace(label, v);
  }
  return ClassDistribution(std::move(counts));
}

json test_to_json(const SplitTest& t) {
  if (const auto* c = std::get_if<ContinuousSplit>(&t))
    return json{{"type", "continuous"}, {"attribute", c->attribute}, {"threshold", c->threshold}};
  return json{{"type", "categorical"}, {"attribute", attribute_of(t)}};
}

json tree_to_json(const TreeNode& n) {
  json j;
  j["label"] = n.label;
  j["distribution"] = distribution_to_json(n.distribution);
  if (n.is_leaf()) {
    j["kind"] = "leaf";
    return j;
  }
  j["kind"] = "internal";
  j["test"] = test_to_json(*n.test);
  json branches = json::array();
  for (const auto& b : n.branches) branches.push_back(json{{"key", b.key}, {"child", tree_to_json(b.child)}});
  j["branches"] = std::move(branches);
  return j;
}

TreeNode tree_from_json(const json& j, const Schema& schema, int depth) {
  if (depth > 10000) throw Error(Errc::CorruptDocument, "tree too deep");
  TreeNode n;
  n.label = j.at("label").get<std::string>();
  n.distribution = distribution_from_json(j.at("distribution"));
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "leaf") return n;
  if (kind != "internal") throw Error(Errc::CorruptDocument, "unknown node kind '" + kind + "'");

  const auto& t = j.at("test");
  const auto type = t.at("type").get<std::string>();
  const auto attribute = t.at("attribute").get<std::string>();
  const auto idx = schema.find(attribute);
  if (!idx) throw Error(Errc::CorruptDocument, "test on unknown attribute '" + attribute + "'");
  if (type == "continuous") {
    const double threshold = t.at("threshold").get<double>();
    if (!std::isfinite(threshold) || !schema[*idx].is_continuous())
      throw Error(Errc::CorruptDocument, "bad continuous test on '" + attribute + "'");
    n.test = ContinuousSplit{attribute, threshold};
  } else if (type == "categorical") {
    if (!schema[*idx].is_categorical()) throw Error(Errc::CorruptDocument, "bad categorical test on '" + attribute + "'");
    n.test = CategoricalSplit{attribute};
  } else {
    throw Error(Errc::CorruptDocument, "unknown test type '" + type + "'");
  }
  for (const auto& b : j.at("branches"))
    n.branches.push_back({b.at("key").get<std::string>(), tree_from_json(b.at("child"), schema, depth + 1)});

  if (type == "continuous") {
    if (n.branches.size() != 2 || n.branches[0].key != kLessEqual || n.branches[1].key != kGreater)
      throw Error(Errc::CorruptDocument, "continuous node needs exactly '<=' and '>' branches");
  } else if (n.branches.empty()) {
    throw Error(Errc::CorruptDocument, "categorical node without branches");
  }
  return n;
}

json document_body(const TrainedModel& m) {
  json j;
  j["version"] = kModelDocumentVersion;
  j["algorithm"] = std::string(to_string(m.algorithm));
  j["schema"] = schema_to_json(m.schema);
  j["features"] = m.features;
  j["tree"] = tree_to_json(m.root);
  j["config"] = json{{"min_leaf_size", m.config.min_leaf_size},
                     {"prune", m.config.prune},
                     {"confidence_factor", m.config.confidence_factor}};
  j["stats"] = json{{"training_rows", m.stats.training_rows},
                    {"node_count", m.stats.node_count},
                    {"leaf_count", m.stats.leaf_count}};
  return j;
}

}  // namespace

std::string serialize_model(const TrainedModel& model) {
  auto body = document_body(model);
  body["checksum"] = sha256_hex(body.dump());
  return body.dump();
}

TrainedModel deserialize_model(std::string_view document) {
  try {
    auto j = json::parse(document);
    if (!j.is_object()) throw Error(Errc::CorruptDocument, "model document is not an object");
    const auto checksum = j.at("checksum").get<std::string>();
    j.erase("checksum");
    if (sha256_hex(j.dump()) != checksum) throw Error(Errc::CorruptDocument, "checksum mismatch");
    if (j.at("version").get<int>() != kModelDocumentVersion)
      throw Error(Errc::CorruptDocument, "unsupported document version");

    const auto algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    if (!algorithm) throw Error(Errc::CorruptDocument, "unknown algorithm");
    auto schema = schema_from_json(j.at("schema"));
    auto features = j.at("features").get<std::vector<std::string>>();
    for (const auto& f : features)
      if (!schema.find(f)) throw Error(Errc::CorruptDocument, "unknown feature '" + f + "'");
    auto root = tree_from_json(j.at("tree"), schema, 0);

    const auto& c = j.at("config");
    TrainConfig config{c.at("min_leaf_size").get<std::size_t>(), c.at("prune").get<bool>(),
                       c.at("confidence_factor").get<double>()};
    config.validate();
    const auto& s = j.at("stats");
    TrainStats stats{s.at("training_rows").get<std::size_t>(), s.at("node_count").get<std::size_t>(),
                     s.at("leaf_count").get<std::size_t>()};
    if (stats.node_count != node_count(root) || stats.leaf_count != leaf_count(root))
      throw Error(Errc::CorruptDocument, "stats disagree with the tree");
    return TrainedModel{*algorithm, std::move(root), std::move(schema), std::move(features), config, stats};
  } catch (const json::exception& e) {
    throw Error(Errc::CorruptDocument, std::string("malformed model document: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::CorruptDocument) throw;
    throw Error(Errc::CorruptDocument, std::string("invalid model document: ") + e.what());
  }
}

}  // namespace gg
