// Copyright 2026 The privfed Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privfed/config.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "privfed/error.h"
#include "privfed/rng.h"

namespace privfed {
namespace {

using nlohmann::json;

// Internal: a schema violation at a dotted key path.
struct KeyError {
  std::string path;
  std::string message;
};

class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw KeyError{path_, "expected an object"};
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    const json* v = get(key);
    if (v == nullptr) return;
    out = as<T>(*v, sub(key));
  }

  Obj child(const std::string& key) {
    const json* v = get(key);
    return Obj(*v, sub(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw KeyError{sub(it.key()), "unknown key"};
    }
  }

  template <typename T>
  static T as(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw KeyError{path, "expected a boolean"};
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_unsigned()) throw KeyError{path, "expected a non-negative integer"};
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw KeyError{path, "expected a number"};
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw KeyError{path, "expected a string"};
    }
    return v.get<T>();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T>
T parse_enum(const std::string& text, const std::string& path,
             std::initializer_list<std::pair<const char*, T>> options) {
  std::string names;
  for (const auto& [name, value] : options) {
    if (text == name) return value;
    names += names.empty() ? name : std::string(", ") + name;
  }
  throw KeyError{path, "expected one of: " + names};
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw KeyError{path, message};
}

SvtConfig parse_dp(Obj o) {
  SvtConfig c;
  o.read("fraction", c.fraction);
  o.read("epsilon", c.epsilon);
  o.read("noise_var", c.noise_var);
  o.read("gamma", c.gamma);
  o.read("tau", c.tau);
  o.finish();
  try {
    c.validate();
  } catch (const Error& e) {
    throw KeyError{"privacy.dp", e.what()};
  }
  return c;
}

HeConfig parse_he(Obj o) {
  HeConfig c;
  o.read("poly_degree", c.params.poly_degree);
  if (const json* bits = o.get("modulus_bits")) {
    require(bits->is_array(), o.sub("modulus_bits"), "expected an array of integers");
    c.params.modulus_bits.clear();
    for (const auto& b : *bits) c.params.modulus_bits.push_back(Obj::as<int>(b, o.sub("modulus_bits")));
  }
  o.read("scale_log2", c.params.scale_log2);
  o.read("key_seed", c.key_seed);
  std::string packing(ckks::to_string(c.packing));
  o.read("packing", packing);
  c.packing = parse_enum<ckks::Packing>(packing, o.sub("packing"),
                                        {{"flat", ckks::Packing::kFlat},
                                         {"per_tensor", ckks::Packing::kPerTensor}});
  o.finish();
  try {
    c.params.validate();
  } catch (const Error& e) {
    throw KeyError{"privacy.he", e.what()};
  }
  return c;
}

void parse_data(Obj o, DataConfig& d) {
  std::string source = "generate";
  o.read("source", source);
  d.source = parse_enum<DataSource>(source, o.sub("source"),
                                    {{"generate", DataSource::kGenerate}, {"csv", DataSource::kCsv}});
  o.read("scale_factor", d.generator.scale_factor);
  require(d.generator.scale_factor > 0.0 && d.generator.scale_factor <= 1.0, o.sub("scale_factor"),
          "must lie in (0, 1]");
  o.read("seed", d.generator.seed);
  o.read("train_frac", d.train_frac);
  require(d.train_frac > 0.0 && d.train_frac < 1.0, o.sub("train_frac"), "must lie in (0, 1)");
  o.read("split_seed", d.split_seed);
  std::string csv_dir;
  o.read("csv_dir", csv_dir);
  d.csv_dir = csv_dir;
  if (const json* sites = o.get("sites")) {
    require(sites->is_array() && !sites->empty(), o.sub("sites"), "expected a non-empty array");
    const auto reference = reference_sites();
    std::vector<SiteSpec> chosen;
    std::set<std::string> names;
    for (const auto& s : *sites) {
      const auto name = Obj::as<std::string>(s, o.sub("sites"));
      require(names.insert(name).second, o.sub("sites"), "duplicate site '" + name + "'");
      SiteSpec spec{name, 0, 0};
      for (const auto& r : reference) {
        if (r.name == name) spec = r;
      }
      require(d.source == DataSource::kCsv || spec.n_negative > 0, o.sub("sites"),
              "unknown site '" + name + "' for generated data");
      chosen.push_back(spec);
    }
    d.generator.sites = std::move(chosen);
  }
  if (const json* beta = o.get("coefficients")) {
    require(beta->is_array() && beta->size() == kFeatureCount, o.sub("coefficients"),
            "expected an array of 10 numbers");
    for (size_t i = 0; i < kFeatureCount; ++i) {
      d.generator.coefficients[i] = Obj::as<double>((*beta)[i], o.sub("coefficients"));
    }
  }
  o.read("intercept", d.generator.intercept);
  o.finish();
  require(d.source != DataSource::kCsv || !d.csv_dir.empty(), o.sub("csv_dir"),
          "required when source is csv");
}

ExperimentConfig parse_impl(const json& j) {
  ExperimentConfig c;
  Obj o(j, "");
  std::string model = "lr";
  o.read("model", model);
  c.model = parse_enum<ModelKind>(model, "model",
                                  {{"lr", ModelKind::kLogisticRegression},
                                   {"nn", ModelKind::kFeedForwardNN}});
  o.read("rounds", c.rounds);
  o.read("local_epochs", c.local_epochs);
  o.read("learning_rate", c.learning_rate);
  require(c.learning_rate > 0.0, "learning_rate", "must be positive");
  o.read("l2_penalty", c.l2_penalty);
  require(c.l2_penalty >= 0.0, "l2_penalty", "must be non-negative");
  o.read("seed", c.seed);
  std::string weighting = "unit";
  o.read("weighting", weighting);
  c.weighting = parse_enum<Weighting>(weighting, "weighting",
                                      {{"unit", Weighting::kUnit}, {"examples", Weighting::kExamples}});
  o.read("threshold", c.threshold);

  if (o.has("batch_size")) {
    const json& b = *o.get("batch_size");
    if (b.is_number()) {
      c.default_batch_size = Obj::as<size_t>(b, "batch_size");
      c.site_batch_size.clear();  // a single number applies to every site
    } else {
      Obj bo(b, "batch_size");
      bo.read("default", c.default_batch_size);
      if (bo.has("sites")) {
        Obj so = bo.child("sites");
        c.site_batch_size.clear();
        for (auto it = b.at("sites").begin(); it != b.at("sites").end(); ++it) {
          so.read(it.key(), c.site_batch_size[it.key()]);
        }
        so.finish();
      }
      bo.finish();
    }
  }
  require(c.default_batch_size > 0, "batch_size", "must be positive");
  for (const auto& [site, size] : c.site_batch_size) {
    require(size > 0, "batch_size.sites." + site, "must be positive");
  }

  if (o.has("privacy")) {
    Obj p = o.child("privacy");
    std::string mode = "plain";
    p.read("mode", mode);
    c.privacy = parse_enum<PrivacyMode>(
        mode, "privacy.mode",
        {{"plain", PrivacyMode::kPlain}, {"dp", PrivacyMode::kDp}, {"he", PrivacyMode::kHe}});
    if (p.has("dp")) {
      require(c.privacy == PrivacyMode::kDp, "privacy.dp", "present but privacy.mode is not dp");
      c.dp = parse_dp(p.child("dp"));
    }
    if (p.has("he")) {
      require(c.privacy == PrivacyMode::kHe, "privacy.he", "present but privacy.mode is not he");
      c.he = parse_he(p.child("he"));
    }
    p.finish();
  }
  require(c.privacy != PrivacyMode::kDp || c.dp.has_value(), "privacy.dp",
          "required when privacy.mode is dp");
  require(c.privacy != PrivacyMode::kHe || c.he.has_value(), "privacy.he",
          "required when privacy.mode is he");

  if (o.has("data")) parse_data(o.child("data"), c.data);

  if (o.has("central")) {
    Obj co = o.child("central");
    co.read("folds", c.central.folds);
    require(c.central.folds >= 2, "central.folds", "must be at least 2");
    co.read("epochs", c.central.epochs);
    co.read("batch_size", c.central.batch_size);
    require(c.central.batch_size > 0, "central.batch_size", "must be positive");
    co.finish();
  }

  if (o.has("transport")) {
    Obj t = o.child("transport");
    std::string mode = "sim";
    t.read("mode", mode);
    c.transport.mode = parse_enum<TransportMode>(mode, "transport.mode",
                                                 {{"sim", TransportMode::kSim}, {"tcp", TransportMode::kTcp}});
    t.read("timeout_seconds", c.transport.timeout_seconds);
    require(c.transport.timeout_seconds > 0.0, "transport.timeout_seconds", "must be positive");
    t.read("listen", c.transport.listen);
    t.read("connect", c.transport.connect);
    t.finish();
  }

  std::string out = c.output_dir.string();
  o.read("output_dir", out);
  c.output_dir = out;
  o.finish();
  return c;
}

size_t line_of(const std::string& text, const std::string& path) {
  size_t pos = 0;
  size_t start = 0;
  while (start <= path.size()) {
    size_t dot = path.find('.', start);
    if (dot == std::string::npos) dot = path.size();
    const std::string needle = "\"" + path.substr(start, dot - start) + "\"";
    const size_t found = text.find(needle, pos);
    if (found == std::string::npos) break;
    pos = found;
    start = dot + 1;
  }
  return 1 + static_cast<size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

Error config_error(const KeyError& e, const std::string* text) {
  std::string msg;
  if (text != nullptr) msg = "line " + std::to_string(line_of(*text, e.path)) + ": ";
  msg += "key '" + e.path + "': " + e.message;
  return Error(ErrorKind::kConfiguration, msg);
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const size_t byte = std::min<size_t>(e.byte, text.size());
    const size_t line = 1 + static_cast<size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte > 0 ? byte - 1 : 0), '\n'));
    throw Error(ErrorKind::kConfiguration, "line " + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
  }
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string_view to_string(PrivacyMode mode) {
  switch (mode) {
    case PrivacyMode::kPlain: return "plain";
    case PrivacyMode::kDp: return "dp";
    case PrivacyMode::kHe: return "he";
  }
  return "?";
}

std::vector<std::string> ExperimentConfig::site_names() const {
  std::vector<std::string> names;
  for (const auto& s : data.generator.sites) names.push_back(s.name);
  return names;
}

size_t ExperimentConfig::batch_size_for(const std::string& site) const {
  auto it = site_batch_size.find(site);
  return it == site_batch_size.end() ? default_batch_size : it->second;
}

TrainConfig ExperimentConfig::train_config(const std::string& site, uint64_t train_seed) const {
  return {learning_rate, batch_size_for(site), local_epochs, l2_penalty, train_seed};
}

json ExperimentConfig::to_json() const {
  json batch = {{"default", default_batch_size}, {"sites", json::object()}};
  for (const auto& [site, size] : site_batch_size) batch["sites"][site] = size;

  json privacy = {{"mode", std::string(to_string(this->privacy))}};
  if (dp) {
    privacy["dp"] = {{"fraction", dp->fraction}, {"epsilon", dp->epsilon}, {"noise_var", dp->noise_var},
                     {"gamma", dp->gamma}, {"tau", dp->tau}};
  }
  if (he) {
    privacy["he"] = {{"poly_degree", he->params.poly_degree},
                     {"modulus_bits", he->params.modulus_bits},
                     {"scale_log2", he->params.scale_log2},
                     {"key_seed", he->key_seed},
                     {"packing", std::string(ckks::to_string(he->packing))}};
  }

  json d = {{"source", data.source == DataSource::kCsv ? "csv" : "generate"},
            {"scale_factor", data.generator.scale_factor},
            {"seed", data.generator.seed},
            {"train_frac", data.train_frac},
            {"split_seed", data.split_seed},
            {"sites", site_names()},
            {"coefficients", data.generator.coefficients},
            {"intercept", data.generator.intercept}};
  if (data.source == DataSource::kCsv) d["csv_dir"] = data.csv_dir.string();

  return {{"model", std::string(privfed::to_string(model))},
          {"rounds", rounds},
          {"local_epochs", local_epochs},
          {"learning_rate", learning_rate},
          {"l2_penalty", l2_penalty},
          {"seed", seed},
          {"weighting", weighting == Weighting::kUnit ? "unit" : "examples"},
          {"threshold", threshold},
          {"batch_size", batch},
          {"privacy", privacy},
          {"data", d},
          {"central", {{"folds", central.folds}, {"epochs", central.epochs}, {"batch_size", central.batch_size}}}};
}

json ExperimentConfig::environment_json() const {
  return {{"transport",
           {{"mode", transport.mode == TransportMode::kSim ? "sim" : "tcp"},
            {"timeout_seconds", transport.timeout_seconds},
            {"listen", transport.listen},
            {"connect", transport.connect}}},
          {"output_dir", output_dir.string()}};
}

uint64_t ExperimentConfig::fingerprint() const { return fnv1a(to_json().dump()); }

std::string ExperimentConfig::method_name() const {
  switch (privacy) {
    case PrivacyMode::kPlain: return "FedAvg";
    case PrivacyMode::kDp: return "FedAvg_DP";
    case PrivacyMode::kHe: return "FedAvg_HE";
  }
  return "FedAvg";
}

ExperimentConfig parse_config(const json& j) {
  try {
    return parse_impl(j);
  } catch (const KeyError& e) {
    throw config_error(e, nullptr);
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  const json j = parse_json_text(text);
  try {
    return parse_impl(j);
  } catch (const KeyError& e) {
    throw config_error(e, &text);
  }
}

void apply_override(json& j, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorKind::kConfiguration, "override '" + assignment + "' is not of the form key=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &j;
  size_t start = 0;
  if (value.is_null()) {  // key=null removes the key
    json* parent = &j;
    std::string last;
    while (true) {
      const size_t dot = path.find('.', start);
      last = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (dot == std::string::npos) break;
      if (!parent->is_object() || !parent->contains(last)) return;
      parent = &(*parent)[last];
      start = dot + 1;
    }
    if (parent->is_object()) parent->erase(last);
    return;
  }
  while (true) {
    const size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw Error(ErrorKind::kConfiguration, "override '" + assignment + "' has an empty key");
    if (!node->is_object()) {
      if (!node->is_null()) {
        throw Error(ErrorKind::kConfiguration, "override '" + path + "' descends into a non-object");
      }
      *node = json::object();
    }
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::string text = "{}";
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kIo, "cannot read config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  if (overrides.empty()) return parse_config_text(text);
  json j = parse_json_text(text);
  for (const auto& o : overrides) apply_override(j, o);
  return parse_config(j);
}

Split load_site(const ExperimentConfig& cfg, const std::string& site) {
  const auto names = cfg.site_names();
  const auto it = std::find(names.begin(), names.end(), site);
  if (it == names.end()) throw Error(ErrorKind::kConfiguration, "site '" + site + "' is not configured");
  const auto index = static_cast<size_t>(it - names.begin());
  CohortDataset data;
  if (cfg.data.source == DataSource::kGenerate) {
    data = generate_site(cfg.data.generator, index);
  } else {
    const auto path = cfg.data.csv_dir / (site + ".csv");
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorKind::kConfiguration, "data file '" + path.string() + "' does not exist");
    }
    data = read_csv(path);
  }
  return split_train_valid(data, cfg.data.train_frac, derive_seed(cfg.data.split_seed, {index}));
}

std::vector<std::pair<std::string, Split>> load_all_sites(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, Split>> out;
  for (const auto& name : cfg.site_names()) out.emplace_back(name, load_site(cfg, name));
  return out;
}

}  // namespace privfed
