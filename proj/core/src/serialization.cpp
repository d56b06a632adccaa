#include "igb/serialization.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "igb/error.hpp"

namespace igb {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "igb-model";
constexpr int kVersion = 1;

json tree_to_json(const TreeFunction& tree) {
  json nodes = json::array();
  for (const auto& rule : tree.scheme().nodes()) {
    nodes.push_back({{"j", rule.feature + 1}, {"u", rule.u}});
  }
  const auto leaves = tree.leaf_values();
  return {{"depth", tree.depth()},
          {"nodes", std::move(nodes)},
          {"leaves", std::vector<double>(leaves.begin(), leaves.end())}};
}

TreeFunction tree_from_json(const json& j, std::size_t features) {
  const auto depth = j.at("depth").get<std::size_t>();
  std::vector<SplitRule> rules;
  for (const auto& node : j.at("nodes")) {
    const auto feature = node.at("j").get<std::size_t>();
    if (feature < 1) throw InputError("model JSON: feature indices are 1-based");
    rules.push_back({feature - 1, node.at("u").get<double>()});
  }
  return TreeFunction(SplittingScheme(depth, features, std::move(rules)),
                      j.at("leaves").get<std::vector<double>>());
}

}  // namespace

std::string model_to_json(const EnsembleModel& model, int indent) {
  std::size_t features = 0;
  json increments = json::array();
  for (const auto& inc : model.increments()) {
    json trees = json::array();
    for (const auto& t : inc.trees) {
      features = t.scheme().features();
      trees.push_back(tree_to_json(t));
    }
    increments.push_back({{"step", inc.step}, {"trees", std::move(trees)}});
  }
  json doc = {{"format", kFormat},
              {"version", kVersion},
              {"features", features},
              {"base", model.base()},
              {"increments", std::move(increments)}};
  return doc.dump(indent);
}

EnsembleModel model_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != kFormat) throw InputError("not an igb model dump");
    if (doc.at("version").get<int>() != kVersion) throw InputError("unsupported model dump version");
    const auto features = doc.at("features").get<std::size_t>();
    EnsembleModel model(doc.at("base").get<double>());
    for (const auto& inc : doc.at("increments")) {
      std::vector<TreeFunction> trees;
      for (const auto& t : inc.at("trees")) trees.push_back(tree_from_json(t, features));
      model.append(inc.at("step").get<double>(), std::move(trees));
    }
    return model;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model JSON: ") + e.what());
  }
}

void save_model(const EnsembleModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << model_to_json(model) << '\n';
}

EnsembleModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

std::string tree_trace_to_json(const TreeTrace& trace, int indent) {
  json nodes = json::array();
  for (const auto& n : trace.nodes) {
    json props = json::array();
    for (const auto& p : n.proposals) {
      props.push_back({{"j", p.feature + 1}, {"u", p.u}, {"score", p.score}});
    }
    nodes.push_back({{"node", n.node},
                     {"proposals", std::move(props)},
                     {"probabilities", n.probabilities},
                     {"selected", n.selected}});
  }
  return json{{"nodes", std::move(nodes)}}.dump(indent);
}

}  // namespace igb
