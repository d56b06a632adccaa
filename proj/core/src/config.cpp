#include "igb/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "igb/error.hpp"

#ifndef IGB_VERSION
#define IGB_VERSION "0.0.0"
#endif

namespace igb {

using nlohmann::json;

const char* version() { return IGB_VERSION; }

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {
      "flow", "operator-convergence", "trajectory-convergence", "pi0",
      "project", "critical", "gc", "beta0-operator"};
  return kinds;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// ---- TOML subset -----------------------------------------------------------

json parse_value(const std::string& raw, const std::string& where);

std::vector<std::string> split_array(const std::string& body, const std::string& where) {
  std::vector<std::string> items;
  std::string cur;
  bool quoted = false;
  int depth = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (quoted) {
      cur += c;
      if (c == '\\' && i + 1 < body.size()) {
        cur += body[++i];
      } else if (c == '"') {
        quoted = false;
      }
      continue;
    }
    if (c == '"') quoted = true;
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == ',' && depth == 0) {
      items.push_back(trim(cur));
      cur.clear();
      continue;
    }
    cur += c;
  }
  if (quoted || depth != 0) throw ConfigError(where + ": unbalanced array");
  if (!trim(cur).empty()) items.push_back(trim(cur));
  for (const auto& it : items) {
    if (it.empty()) throw ConfigError(where + ": empty array element");
  }
  return items;
}

json parse_number(const std::string& raw, const std::string& where) {
  std::string s;
  for (char c : raw) {
    if (c != '_') s += c;
  }
  const bool integral = s.find_first_of(".eE") == std::string::npos && s != "inf" && s != "nan";
  if (integral) {
    if (!s.empty() && s[0] != '-') {
      std::uint64_t u = 0;
      const auto* first = s.data() + (s[0] == '+' ? 1 : 0);
      const auto res = std::from_chars(first, s.data() + s.size(), u);
      if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return u;
    } else {
      std::int64_t i = 0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), i);
      if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return i;
    }
  } else {
    double d = 0.0;
    const auto* first = s.data() + (!s.empty() && s[0] == '+' ? 1 : 0);
    const auto res = std::from_chars(first, s.data() + s.size(), d);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return d;
  }
  throw ConfigError(where + ": cannot parse value '" + raw + "'");
}

json parse_value(const std::string& raw, const std::string& where) {
  const std::string v = trim(raw);
  if (v.empty()) throw ConfigError(where + ": missing value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw ConfigError(where + ": unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) {
        const char e = v[++i];
        out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
      } else {
        out += v[i];
      }
    }
    return out;
  }
  if (v.front() == '[') {
    if (v.back() != ']') throw ConfigError(where + ": unterminated array");
    json arr = json::array();
    for (const auto& item : split_array(v.substr(1, v.size() - 2), where)) {
      arr.push_back(parse_value(item, where));
    }
    return arr;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  return parse_number(v, where);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

// ---- typed setters ---------------------------------------------------------

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key + " must be a string");
  return v.get<std::string>();
}

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key + " must be a number");
  return v.get<double>();
}

std::uint64_t as_u64(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d < 1.8e19 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
  }
  throw ConfigError(key + " must be a non-negative integer");
}

std::size_t as_size(const json& v, const std::string& key) {
  return static_cast<std::size_t>(as_u64(v, key));
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError(key + " must be true or false");
  return v.get<bool>();
}

template <typename T, typename F>
std::vector<T> as_vector(const json& v, const std::string& key, F convert) {
  std::vector<T> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(convert(e, key));
  } else {
    out.push_back(convert(v, key));
  }
  return out;
}

void set_field(ExperimentConfig& c, const std::string& section, const std::string& key,
               const json& v) {
  const std::string name = section.empty() ? key : section + "." + key;
  if (section.empty() || section == "experiment") {
    if (key == "kind") return void(c.kind = as_string(v, name));
    if (key == "loss") return void(c.loss = parse_loss(as_string(v, name)));
    if (key == "seed") return void(c.seed = as_u64(v, name));
  } else if (section == "tree") {
    if (key == "depth") return void(c.tree.depth = as_size(v, name));
    if (key == "proposals") return void(c.tree.proposals = as_size(v, name));
    if (key == "beta") return void(c.tree.beta = as_double(v, name));
  } else if (section == "flow") {
    if (key == "step") return void(c.flow.step = as_double(v, name));
    if (key == "horizon") return void(c.flow.horizon = as_double(v, name));
    if (key == "trees_per_step" || key == "mc_trees") return void(c.flow.trees_per_step = as_size(v, name));
    if (key == "grid_resolution") return void(c.flow.grid_resolution = as_size(v, name));
    if (key == "checkpoint_every") return void(c.flow.checkpoint_every = as_size(v, name));
    if (key == "checkpoint_times") return void(c.flow.checkpoint_times = as_vector<double>(v, name, as_double));
    if (key == "max_total_trees") return void(c.flow.max_total_trees = as_size(v, name));
    if (key == "init_const") {
      if (v.is_null()) return void(c.flow.init_const.reset());
      return void(c.flow.init_const = as_double(v, name));
    }
  } else if (section == "data") {
    if (key == "generator") return void(c.data.name = as_string(v, name));
    if (key == "p") return void(c.data.p = as_size(v, name));
    if (key == "n") return void(c.n = as_size(v, name));
    if (key == "test_n") return void(c.test_n = as_size(v, name));
    if (key == "noise") return void(c.data.noise = as_double(v, name));
    if (key == "probability") return void(c.data.probability = as_string(v, name));
    if (key == "path") {
      if (v.is_null()) return void(c.data_path.reset());
      return void(c.data_path = as_string(v, name));
    }
  } else if (section == "sweep") {
    if (key == "sizes") return void(c.sweep.sizes = as_vector<std::size_t>(v, name, as_size));
    if (key == "reference_n") return void(c.sweep.reference_n = as_size(v, name));
    if (key == "replicates") return void(c.sweep.replicates = as_size(v, name));
  } else if (section == "population") {
    auto& pp = c.population;
    if (key == "schemes") return void(pp.schemes = as_size(v, name));
    if (key == "draws") return void(pp.draws = as_size(v, name));
    if (key == "tail_depths") return void(pp.tail_depths = as_vector<std::size_t>(v, name, as_size));
    if (key == "eps") return void(pp.eps = as_vector<double>(v, name, as_double));
    if (key == "slice_min_power") return void(pp.slice_min_power = as_size(v, name));
    if (key == "slice_max_power") return void(pp.slice_max_power = as_size(v, name));
    if (key == "family_resolution") return void(pp.family_resolution = as_size(v, name));
    if (key == "order") return void(pp.order = as_size(v, name));
  } else if (section == "output") {
    if (key == "dir") return void(c.out_dir = as_string(v, name));
    if (key == "timing") return void(c.flow.record_wall_time = as_bool(v, name));
    if (key == "save_model") return void(c.save_model = as_bool(v, name));
  }
  throw ConfigError("unknown config key '" + name + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
    throw ConfigError("unknown experiment kind '" + kind + "'");
  }
  tree.validate();
  flow.validate();
  if (!data_path) data.validate(loss);
  if (n < 1) throw ConfigError("data.n must be >= 1");
  if (test_n < 1) throw ConfigError("data.test_n must be >= 1");
  if (sweep.sizes.empty()) throw ConfigError("sweep.sizes must not be empty");
  for (auto s : sweep.sizes) {
    if (s < 1) throw ConfigError("sweep.sizes entries must be >= 1");
  }
  if (sweep.reference_n < 1) throw ConfigError("sweep.reference_n must be >= 1");
  if (sweep.replicates < 1) throw ConfigError("sweep.replicates must be >= 1");
  const auto& pp = population;
  if (pp.schemes < 1) throw ConfigError("population.schemes must be >= 1");
  if (pp.draws < 1) throw ConfigError("population.draws must be >= 1");
  for (auto d : pp.tail_depths) {
    if (d < 1) throw ConfigError("population.tail_depths entries must be >= 1");
  }
  for (double e : pp.eps) {
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError("population.eps entries must be in (0, 1]");
  }
  if (pp.slice_min_power > pp.slice_max_power || pp.slice_max_power > 30) {
    throw ConfigError("population slice powers must satisfy min <= max <= 30");
  }
  if (pp.family_resolution < 1) throw ConfigError("population.family_resolution must be >= 1");
  if (out_dir.empty()) throw ConfigError("output.dir must not be empty");
}

ExperimentConfig parse_config_toml(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  json seen = json::object();
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "config line " + std::to_string(lineno);
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    const std::string full = section + "." + key;
    if (seen.contains(full)) throw ConfigError(where + ": duplicate key '" + key + "'");
    seen[full] = true;
    set_field(base, section, key, parse_value(line.substr(eq + 1), where));
  }
  return base;
}

ExperimentConfig parse_config_json(const std::string& text, ExperimentConfig base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("JSON config must be an object");
  // A manifest nests the config under "config".
  if (doc.contains("config") && doc["config"].is_object()) doc = doc["config"];
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object()) {
      for (const auto& [k, v] : value.items()) set_field(base, key, k, v);
    } else {
      set_field(base, "", key, value);
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  if (path.extension() == ".json") return parse_config_json(ss.str(), std::move(base));
  return parse_config_toml(ss.str(), std::move(base));
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto dot = key.find('.');
  const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
  const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
  json v;
  try {
    v = parse_value(value, "--" + key);
  } catch (const ConfigError&) {
    v = trim(value);
  }
  set_field(cfg, section, name, v);
}

std::string config_to_json(const ExperimentConfig& c, int indent) {
  json flow = {{"step", c.flow.step},
               {"horizon", c.flow.horizon},
               {"trees_per_step", c.flow.trees_per_step},
               {"grid_resolution", c.flow.grid_resolution},
               {"checkpoint_every", c.flow.checkpoint_every},
               {"checkpoint_times", c.flow.checkpoint_times},
               {"max_total_trees", c.flow.max_total_trees},
               {"init_const", c.flow.init_const ? json(*c.flow.init_const) : json(nullptr)}};
  json data = {{"generator", c.data.name},
               {"p", c.data.p},
               {"n", c.n},
               {"test_n", c.test_n},
               {"noise", c.data.noise},
               {"probability", c.data.probability},
               {"path", c.data_path ? json(*c.data_path) : json(nullptr)}};
  const auto& pp = c.population;
  json doc = {
      {"kind", c.kind},
      {"loss", loss_name(c.loss)},
      {"seed", c.seed},
      {"tree", {{"depth", c.tree.depth}, {"proposals", c.tree.proposals}, {"beta", c.tree.beta}}},
      {"flow", std::move(flow)},
      {"data", std::move(data)},
      {"sweep",
       {{"sizes", c.sweep.sizes},
        {"reference_n", c.sweep.reference_n},
        {"replicates", c.sweep.replicates}}},
      {"population",
       {{"schemes", pp.schemes},
        {"draws", pp.draws},
        {"tail_depths", pp.tail_depths},
        {"eps", pp.eps},
        {"slice_min_power", pp.slice_min_power},
        {"slice_max_power", pp.slice_max_power},
        {"family_resolution", pp.family_resolution},
        {"order", pp.order}}},
      {"output",
       {{"dir", c.out_dir}, {"timing", c.flow.record_wall_time}, {"save_model", c.save_model}}}};
  return doc.dump(indent);
}

}  // namespace igb
