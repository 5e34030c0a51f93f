#include "dbmc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dbmc/errors.hpp"

namespace dbmc {

using json = nlohmann::json;

std::string_view to_string(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::line:
      return "line";
    case GeometryKind::grid:
      return "grid";
    case GeometryKind::cluster:
      return "cluster";
    case GeometryKind::wrapped_line:
      return "wrapped_line";
    case GeometryKind::custom:
      return "custom";
  }
  return "unknown";
}

std::string fnv1a64_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

const std::set<std::string> kSections = {"geometry", "medium",     "schedule",
                                         "matrix",   "statistics", "output"};

// Reads keys from one section and remembers which ones were consumed so the
// rest can be reported as unknown.
class SectionReader {
 public:
  SectionReader(const json& root, std::string name) : name_(std::move(name)) {
    if (root.contains(name_)) {
      section_ = &root.at(name_);
      if (!section_->is_object()) throw ValidationError(name_, "section must be an object");
    }
  }

  bool present() const { return section_ != nullptr; }
  bool has(const std::string& key) const { return section_ && section_->contains(key); }
  std::string path(const std::string& key) const { return name_ + "." + key; }

  const json* take(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return nullptr;
    return &section_->at(key);
  }

  std::optional<double> number(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ValidationError(path(key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw ValidationError(path(key), "must be finite");
    return d;
  }

  std::optional<double> positive(const std::string& key) {
    auto v = number(key);
    if (v && !(*v > 0.0)) throw ValidationError(path(key), "must be positive");
    return v;
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) throw ValidationError(path(key), "expected an integer");
    return v->get<std::int64_t>();
  }

  std::optional<std::int64_t> integer_at_least(const std::string& key, std::int64_t lo) {
    auto v = integer(key);
    if (v && *v < lo) {
      throw ValidationError(path(key), "must be at least " + std::to_string(lo));
    }
    return v;
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ValidationError(path(key), "expected a string");
    return v->get<std::string>();
  }

  void reject_unknown() const {
    if (!section_) return;
    for (const auto& [key, _] : section_->items()) {
      if (!seen_.count(key)) throw ValidationError(path(key), "unknown key");
    }
  }

 private:
  std::string name_;
  const json* section_ = nullptr;
  std::set<std::string> seen_;
};

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ValidationError(assignment, "override must look like section.key=value");
  }
  const std::string section = assignment.substr(0, dot);
  const std::string key = assignment.substr(dot + 1, eq - dot - 1);
  const std::string text = assignment.substr(eq + 1);
  if (key.empty()) throw ValidationError(assignment, "override key is empty");
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  if (!doc.contains(section)) doc[section] = json::object();
  if (!doc[section].is_object()) throw ValidationError(section, "section must be an object");
  doc[section][key] = std::move(value);
}

GeometryKind parse_kind(const std::string& name) {
  if (name == "line") return GeometryKind::line;
  if (name == "grid") return GeometryKind::grid;
  if (name == "cluster") return GeometryKind::cluster;
  if (name == "wrapped_line") return GeometryKind::wrapped_line;
  if (name == "custom") return GeometryKind::custom;
  throw ValidationError("geometry.kind",
                        "expected one of line, grid, cluster, wrapped_line, custom; got '" + name +
                            "'");
}

json canonical_json(const ExperimentConfig& c) {
  json doc;
  json& g = doc["geometry"];
  g["kind"] = std::string(to_string(c.geometry.kind));
  if (c.geometry.nodes) g["N"] = *c.geometry.nodes;
  if (c.geometry.rows) g["rows"] = *c.geometry.rows;
  if (c.geometry.cols) g["cols"] = *c.geometry.cols;
  if (c.geometry.spacing) g["a"] = *c.geometry.spacing;
  if (c.geometry.cluster_radius) g["cluster_radius"] = *c.geometry.cluster_radius;
  if (c.geometry.file) g["file"] = *c.geometry.file;
  if (c.medium) {
    doc["medium"] = {{"m", c.medium->dimension},
                     {"D", c.medium->diffusion_coefficient},
                     {"node_radius", c.medium->node_radius}};
  }
  json& s = doc["schedule"];
  s["k"] = c.schedule.k;
  if (c.schedule.horizon) s["T0"] = *c.schedule.horizon;
  if (c.schedule.radius) s["R"] = *c.schedule.radius;
  json& m = doc["matrix"];
  m["normalization"] = std::string(to_string(c.matrix.normalization));
  if (c.matrix.neighbor_budget) m["N_prime"] = *c.matrix.neighbor_budget;
  if (c.matrix.epsilon) m["epsilon"] = *c.matrix.epsilon;
  if (c.matrix.density) m["density"] = *c.matrix.density;
  json& st = doc["statistics"];
  st["mu"] = c.statistics.mu;
  st["sigma0_sq"] = c.statistics.sigma0_sq;
  st["trials"] = c.statistics.trials;
  st["epochs"] = c.statistics.epochs;
  st["tol"] = c.statistics.tol;
  st["max_epochs"] = c.statistics.max_epochs;
  if (c.statistics.seed) st["seed"] = *c.statistics.seed;
  // threads and the output section are excluded: neither changes results.
  return doc;
}

}  // namespace

ExperimentConfig parse_config(std::string_view document, std::span<const std::string> overrides) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError("", std::string("malformed config document: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("", "config document must be an object");
  for (const std::string& o : overrides) apply_override(doc, o);
  for (const auto& [key, _] : doc.items()) {
    if (!kSections.count(key)) throw ValidationError(key, "unknown section");
  }

  ExperimentConfig c;
  auto defaulted = [&](const std::string& path, const std::string& value) {
    c.applied_defaults.push_back(path + "=" + value);
  };

  // geometry
  SectionReader geo(doc, "geometry");
  if (!geo.present()) throw ValidationError("geometry", "required section is missing");
  const auto kind = geo.string("kind");
  if (!kind) throw ValidationError("geometry.kind", "required key is missing");
  c.geometry.kind = parse_kind(*kind);
  if (auto n = geo.integer_at_least("N", 1)) c.geometry.nodes = static_cast<std::size_t>(*n);
  if (auto r = geo.integer_at_least("rows", 1)) c.geometry.rows = static_cast<std::size_t>(*r);
  if (auto r = geo.integer_at_least("cols", 1)) c.geometry.cols = static_cast<std::size_t>(*r);
  c.geometry.spacing = geo.positive("a");
  c.geometry.cluster_radius = geo.positive("cluster_radius");
  c.geometry.file = geo.string("file");
  geo.reject_unknown();

  std::vector<std::string> required;
  std::set<std::string> allowed = {"kind"};
  switch (c.geometry.kind) {
    case GeometryKind::line:
    case GeometryKind::wrapped_line:
      required = {"N", "a"};
      break;
    case GeometryKind::grid:
      required = {"rows", "cols", "a"};
      break;
    case GeometryKind::cluster:
      required = {"N", "cluster_radius"};
      break;
    case GeometryKind::custom:
      required = {"file"};
      break;
  }
  allowed.insert(required.begin(), required.end());
  for (const std::string& key : required) {
    if (!geo.has(key)) {
      throw ValidationError("geometry." + key,
                            "required for kind '" + std::string(to_string(c.geometry.kind)) + "'");
    }
  }
  for (const auto& key : {"N", "rows", "cols", "a", "cluster_radius", "file"}) {
    if (geo.has(key) && !allowed.count(key)) {
      throw ValidationError(std::string("geometry.") + key,
                            "not used by kind '" + std::string(to_string(c.geometry.kind)) + "'");
    }
  }

  // medium
  SectionReader med(doc, "medium");
  if (med.present()) {
    MediumParams m;
    const auto dim = med.integer("m");
    const auto d = med.number("D");
    const auto r = med.number("node_radius");
    med.reject_unknown();
    if (!dim) throw ValidationError("medium.m", "required key is missing");
    if (!d) throw ValidationError("medium.D", "required key is missing");
    if (!r) throw ValidationError("medium.node_radius", "required key is missing");
    m.dimension = static_cast<int>(*dim);
    m.diffusion_coefficient = *d;
    m.node_radius = *r;
    m.validate();
    c.medium = m;
  } else if (c.geometry.kind != GeometryKind::custom) {
    throw ValidationError("medium", "required section is missing");
  }

  // schedule
  SectionReader sch(doc, "schedule");
  if (auto k = sch.positive("k")) {
    c.schedule.k = *k;
  } else {
    defaulted("schedule.k", "1");
  }
  c.schedule.horizon = sch.positive("T0");
  c.schedule.radius = sch.positive("R");
  sch.reject_unknown();

  // matrix
  SectionReader mat(doc, "matrix");
  if (auto mode = mat.string("normalization")) {
    c.matrix.normalization = parse_normalization_mode(*mode);
  } else {
    defaulted("matrix.normalization", "column_normalized");
  }
  if (auto np = mat.integer_at_least("N_prime", 0)) c.matrix.neighbor_budget = static_cast<int>(*np);
  c.matrix.epsilon = mat.positive("epsilon");
  if (c.matrix.epsilon && *c.matrix.epsilon >= 1.0) {
    throw ValidationError("matrix.epsilon", "must lie in (0, 1)");
  }
  c.matrix.density = mat.positive("density");
  mat.reject_unknown();

  // statistics
  SectionReader sta(doc, "statistics");
  if (auto v = sta.number("mu")) c.statistics.mu = *v; else defaulted("statistics.mu", "0");
  if (auto v = sta.number("sigma0_sq")) {
    if (*v < 0.0) throw ValidationError("statistics.sigma0_sq", "must be non-negative");
    c.statistics.sigma0_sq = *v;
  } else {
    defaulted("statistics.sigma0_sq", "1");
  }
  if (auto v = sta.integer_at_least("trials", 0)) {
    if (*v == 1) throw ValidationError("statistics.trials", "use 0 (no ensemble) or at least 2");
    c.statistics.trials = static_cast<std::size_t>(*v);
  } else {
    defaulted("statistics.trials", "0");
  }
  if (auto v = sta.integer_at_least("epochs", 0)) c.statistics.epochs = static_cast<unsigned>(*v);
  else defaulted("statistics.epochs", "50");
  if (auto v = sta.positive("tol")) c.statistics.tol = *v; else defaulted("statistics.tol", "1e-08");
  if (auto v = sta.integer_at_least("max_epochs", 0)) c.statistics.max_epochs = static_cast<unsigned>(*v);
  else defaulted("statistics.max_epochs", "10000");
  if (auto v = sta.integer_at_least("seed", 0)) c.statistics.seed = static_cast<std::uint64_t>(*v);
  if (auto v = sta.integer_at_least("threads", 0)) c.statistics.threads = static_cast<unsigned>(*v);
  sta.reject_unknown();
  if (c.statistics.trials > 0 && !c.statistics.seed) {
    throw ValidationError("statistics.seed", "required when statistics.trials > 0");
  }
  if (c.geometry.kind == GeometryKind::cluster && !c.statistics.seed) {
    throw ValidationError("statistics.seed", "required to place cluster nodes");
  }

  // output
  SectionReader out(doc, "output");
  if (auto dir = out.string("directory")) c.output.directory = *dir;
  else defaulted("output.directory", "out");
  if (const json* files = out.take("files")) {
    if (!files->is_array()) throw ValidationError("output.files", "expected an array of names");
    for (std::size_t i = 0; i < files->size(); ++i) {
      if (!(*files)[i].is_string()) {
        throw ValidationError("output.files[" + std::to_string(i) + "]", "expected a string");
      }
      c.output.files.push_back((*files)[i].get<std::string>());
    }
  }
  out.reject_unknown();

  c.canonical = canonical_json(c).dump();
  c.hash = fnv1a64_hex(c.canonical);
  return c;
}

ExperimentConfig load_config_file(const std::string& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ValidationError("--config", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

}  // namespace dbmc
