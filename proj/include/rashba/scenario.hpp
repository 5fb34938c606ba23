#pragma once

// Scenario files: sectioned "key = value" text.
//
//   [scenario]   name, model (kinetic | qdd | both | validate:<suite>), seed
//   [model]      epsilon, alpha, tau, collisionless, kappa
//   [potential]  kind (none | constant | linear | quadratic | gaussian | cosine | tabulated) + its keys
//   [grid]       Lx1, Lx2, Nx1, Nx2, pmax, Np1, Np2, dt
//   [initial]    kind (uniform | gaussian-bump | spin-helix | tabulated) + its keys
//   [output]     t_end, interval, format, progress_every, reference
//   [validation] suite settings
//
// '#' and ';' start comments. Unknown sections and keys, repeated keys and keys
// that do not apply to the selected kind are errors reported as "where: message".

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rashba/grid.hpp"
#include "rashba/snapshot.hpp"

namespace rashba {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ModelKind { kinetic, qdd, both, validate };

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"pauli",         "identities",   "aux",
                                              "residual",      "semiclassical", "drift-diffusion",
                                              "conservation",  "diffusion-limit", "spin-decay",
                                              "moyal"};
  return names;
}

struct ModelSpec {
  double epsilon = 0.1;
  double alpha = 0.0;
  double tau = 1.0;
  bool collisionless = false;
  double kappa = 1.0;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct PotentialSpec {
  std::string kind = "none";
  double value = 0.0;  // constant
  double e1 = 0.0, e2 = 0.0;  // linear
  double curvature = 0.0;  // quadratic
  double amplitude = 0.0;  // gaussian, cosine
  std::optional<double> c1, c2;  // quadratic, gaussian; default domain center
  double width = 1.0;  // gaussian
  int m1 = 1, m2 = 0;  // cosine
  std::string file;  // tabulated
  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;
};

struct InitialSpec {
  std::string kind = "uniform";
  double base = 1.0;
  /// uniform: absolute spin density; gaussian-bump: polarization of n0.
  double spin1 = 0.0, spin2 = 0.0, spin3 = 0.0;
  double amplitude = 0.5;
  double width = 0.5;
  std::optional<double> c1, c2;
  int mode = 1;
  std::string file;
  friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

struct OutputSpec {
  double t_end = 1.0;
  /// Snapshot spacing; 0 keeps the initial and final states only.
  double interval = 0.0;
  SnapshotFormat format = SnapshotFormat::csv;
  int progress_every = 10;
  /// none | heat-kernel
  std::string reference = "none";
  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct ValidationSpec {
  int trials = 20;
  double tolerance = 1e-7;
  int states = 10;
  int pairs = 1000;
  std::vector<double> eps_list{0.2, 0.1, 0.05};
  std::vector<double> tau_list{0.2, 0.1, 0.05};
  double t_probe = 0.5;
  double dt_per_tau = 0.05;
  double kinetic_cfl = 0.5;
  double qdd_c = 0.1;
  double min_order = 0.8;
  bool negative_control = true;
  bool random_potential = true;
  bool parallel = true;
  friend bool operator==(const ValidationSpec&, const ValidationSpec&) = default;
};

struct Scenario {
  std::string name = "unnamed";
  ModelKind model = ModelKind::qdd;
  std::string suite;  // validate only
  std::uint64_t seed = 1;
  ModelSpec params;
  PotentialSpec potential;
  GridSpec grid;
  InitialSpec initial;
  OutputSpec output;
  ValidationSpec validation;
  friend bool operator==(const Scenario&, const Scenario&) = default;

  std::string model_name() const {
    switch (model) {
      case ModelKind::kinetic:
        return "kinetic";
      case ModelKind::qdd:
        return "qdd";
      case ModelKind::both:
        return "both";
      case ModelKind::validate:
        return "validate:" + suite;
    }
    return {};
  }
};

namespace detail {

struct RawEntry {
  std::string value;
  std::string where;
};

// section -> key -> entry, plus where each section was opened.
struct RawConfig {
  std::map<std::string, std::map<std::string, RawEntry>> entries;
  std::map<std::string, std::string> sections;
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string strip_comment(const std::string& line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if ((line[i] == '#' || line[i] == ';') && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
      return line.substr(0, i);
    }
  }
  return line;
}

inline const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"scenario", {"name", "model", "seed"}},
      {"model", {"epsilon", "alpha", "tau", "collisionless", "kappa"}},
      {"potential", {"kind", "value", "e1", "e2", "curvature", "amplitude", "c1", "c2", "width", "m1", "m2", "file"}},
      {"grid", {"Lx1", "Lx2", "Nx1", "Nx2", "pmax", "Np1", "Np2", "dt"}},
      {"initial", {"kind", "base", "spin1", "spin2", "spin3", "amplitude", "width", "c1", "c2", "mode", "file"}},
      {"output", {"t_end", "interval", "format", "progress_every", "reference"}},
      {"validation",
       {"trials", "tolerance", "states", "pairs", "eps_list", "tau_list", "t_probe", "dt_per_tau", "kinetic_cfl",
        "qdd_c", "min_order", "negative_control", "random_potential", "parallel"}},
  };
  return s;
}

inline void put(RawConfig& raw, const std::string& section, const std::string& key, std::string value,
                const std::string& where, bool allow_replace) {
  const auto& sch = schema();
  const auto sec = sch.find(section);
  if (sec == sch.end()) throw ConfigError(where + ": unknown section [" + section + "]");
  if (!sec->second.count(key)) throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
  auto& slot = raw.entries[section];
  const auto it = slot.find(key);
  if (it != slot.end() && !allow_replace) {
    throw ConfigError(where + ": key '" + key + "' repeated (first set at " + it->second.where + ")");
  }
  slot[key] = {std::move(value), where};
}

inline RawConfig parse_raw(std::istream& is, const std::string& source) {
  RawConfig raw;
  std::string line, section;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const std::string where = source + ":" + std::to_string(number);
    const std::string text = trim(strip_comment(line));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError(where + ": malformed section header '" + text + "'");
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      if (!schema().count(section)) throw ConfigError(where + ": unknown section [" + section + "]");
      if (raw.sections.count(section)) {
        throw ConfigError(where + ": section [" + section + "] repeated (first at " + raw.sections[section] + ")");
      }
      raw.sections[section] = where;
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + text + "'");
    if (section.empty()) throw ConfigError(where + ": key outside of any section");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    put(raw, section, key, value, where, false);
  }
  return raw;
}

/// Applies "section.key=value".
inline void apply_override(RawConfig& raw, const std::string& assignment) {
  const std::string where = "--set " + assignment;
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError(where + ": expected section.key=value");
  }
  const std::string section = trim(std::string_view(assignment).substr(0, dot));
  const std::string key = trim(std::string_view(assignment).substr(dot + 1, eq - dot - 1));
  const std::string value = trim(std::string_view(assignment).substr(eq + 1));
  if (value.empty()) throw ConfigError(where + ": empty value");
  put(raw, section, key, value, where, true);
}

// Typed reads with the entry's location in every message.
class Reader {
 public:
  Reader(const RawConfig& raw, std::filesystem::path base_dir) : raw_(raw), base_(std::move(base_dir)) {}

  const RawEntry* find(const std::string& section, const std::string& key) const {
    const auto s = raw_.entries.find(section);
    if (s == raw_.entries.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  std::string where(const std::string& section, const std::string& key) const {
    if (const auto* e = find(section, key)) return e->where;
    const auto s = raw_.sections.find(section);
    return s != raw_.sections.end() ? s->second : std::string("[" + section + "]");
  }

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) const {
    throw ConfigError(where(section, key) + ": " + msg);
  }

  void real(const std::string& section, const std::string& key, double& out) const {
    if (const auto* e = find(section, key)) out = as_real(*e, key);
  }

  void opt_real(const std::string& section, const std::string& key, std::optional<double>& out) const {
    if (const auto* e = find(section, key)) out = as_real(*e, key);
  }

  void integer(const std::string& section, const std::string& key, int& out) const {
    if (const auto* e = find(section, key)) {
      const auto& v = e->value;
      int x = 0;
      const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
      if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
        throw ConfigError(e->where + ": " + key + " must be an integer, got '" + v + "'");
      }
      out = x;
    }
  }

  void unsigned64(const std::string& section, const std::string& key, std::uint64_t& out) const {
    if (const auto* e = find(section, key)) {
      const auto& v = e->value;
      std::uint64_t x = 0;
      const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
      if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
        throw ConfigError(e->where + ": " + key + " must be a non-negative integer, got '" + v + "'");
      }
      out = x;
    }
  }

  void boolean(const std::string& section, const std::string& key, bool& out) const {
    if (const auto* e = find(section, key)) {
      const auto& v = e->value;
      if (v == "true" || v == "yes" || v == "on" || v == "1") {
        out = true;
      } else if (v == "false" || v == "no" || v == "off" || v == "0") {
        out = false;
      } else {
        throw ConfigError(e->where + ": " + key + " must be true or false, got '" + v + "'");
      }
    }
  }

  void text(const std::string& section, const std::string& key, std::string& out) const {
    if (const auto* e = find(section, key)) out = e->value;
  }

  void list(const std::string& section, const std::string& key, std::vector<double>& out) const {
    if (const auto* e = find(section, key)) {
      std::vector<double> v;
      std::size_t start = 0;
      while (true) {
        const auto comma = e->value.find(',', start);
        const std::string item =
            trim(std::string_view(e->value).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        v.push_back(as_real({item, e->where}, key));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      out = std::move(v);
    }
  }

  void path(const std::string& section, const std::string& key, std::string& out) const {
    if (const auto* e = find(section, key)) {
      std::filesystem::path p(e->value);
      if (p.is_relative()) p = base_ / p;
      p = p.lexically_normal();
      if (!std::filesystem::exists(p)) throw ConfigError(e->where + ": file '" + p.string() + "' does not exist");
      out = p.string();
    }
  }

  /// Keys set in `section` outside `allowed` are errors naming `context`.
  void only(const std::string& section, const std::set<std::string>& allowed, const std::string& context) const {
    const auto s = raw_.entries.find(section);
    if (s == raw_.entries.end()) return;
    for (const auto& [key, e] : s->second)
      if (!allowed.count(key)) throw ConfigError(e.where + ": key '" + key + "' does not apply to " + context);
  }

 private:
  static double as_real(const RawEntry& e, const std::string& key) {
    try {
      return parse_double(e.value);
    } catch (const std::invalid_argument&) {
      throw ConfigError(e.where + ": " + key + " must be a number, got '" + e.value + "'");
    }
  }

  const RawConfig& raw_;
  std::filesystem::path base_;
};

inline Scenario build_scenario(const RawConfig& raw, const std::filesystem::path& base_dir) {
  const Reader r(raw, base_dir);
  Scenario s;

  r.text("scenario", "name", s.name);
  if (s.name.find_first_of(" \t/\\") != std::string::npos) {
    r.fail("scenario", "name", "name must not contain spaces or path separators");
  }
  if (const auto* e = r.find("scenario", "model")) {
    const std::string& m = e->value;
    if (m == "kinetic") {
      s.model = ModelKind::kinetic;
    } else if (m == "qdd") {
      s.model = ModelKind::qdd;
    } else if (m == "both") {
      s.model = ModelKind::both;
    } else if (m.rfind("validate:", 0) == 0) {
      s.model = ModelKind::validate;
      s.suite = m.substr(9);
      const auto& names = suite_names();
      if (std::find(names.begin(), names.end(), s.suite) == names.end()) {
        std::string known;
        for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError(e->where + ": unknown validation suite '" + s.suite + "' (known: " + known + ")");
      }
    } else {
      throw ConfigError(e->where + ": model must be kinetic, qdd, both or validate:<suite>, got '" + m + "'");
    }
  }
  r.unsigned64("scenario", "seed", s.seed);

  // [model]
  r.real("model", "epsilon", s.params.epsilon);
  r.real("model", "alpha", s.params.alpha);
  r.real("model", "tau", s.params.tau);
  r.boolean("model", "collisionless", s.params.collisionless);
  r.real("model", "kappa", s.params.kappa);
  if (!(s.params.epsilon > 0.0)) r.fail("model", "epsilon", "ε must be positive");
  if (!(s.params.alpha >= 0.0)) r.fail("model", "alpha", "α must be non-negative");
  if (!(s.params.tau > 0.0)) r.fail("model", "tau", "τ must be positive");
  if (!(s.params.kappa > 0.0)) r.fail("model", "kappa", "κ must be positive");

  // [grid]
  auto& g = s.grid;
  r.real("grid", "Lx1", g.Lx1);
  r.real("grid", "Lx2", g.Lx2);
  r.integer("grid", "Nx1", g.Nx1);
  r.integer("grid", "Nx2", g.Nx2);
  r.real("grid", "pmax", g.pmax);
  r.integer("grid", "Np1", g.Np1);
  r.integer("grid", "Np2", g.Np2);
  r.real("grid", "dt", g.dt);
  try {
    g.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(r.where("grid", "") + ": " + ex.what());
  }

  // [potential]
  auto& p = s.potential;
  r.text("potential", "kind", p.kind);
  static const std::map<std::string, std::set<std::string>> potential_keys{
      {"none", {"kind"}},
      {"constant", {"kind", "value"}},
      {"linear", {"kind", "e1", "e2", "value"}},
      {"quadratic", {"kind", "curvature", "c1", "c2"}},
      {"gaussian", {"kind", "amplitude", "c1", "c2", "width"}},
      {"cosine", {"kind", "amplitude", "m1", "m2"}},
      {"tabulated", {"kind", "file"}},
  };
  const auto pk = potential_keys.find(p.kind);
  if (pk == potential_keys.end()) {
    r.fail("potential", "kind",
           "potential kind must be none, constant, linear, quadratic, gaussian, cosine or tabulated, got '" + p.kind +
               "'");
  }
  r.only("potential", pk->second, "potential kind " + p.kind);
  r.real("potential", "value", p.value);
  r.real("potential", "e1", p.e1);
  r.real("potential", "e2", p.e2);
  r.real("potential", "curvature", p.curvature);
  r.real("potential", "amplitude", p.amplitude);
  r.opt_real("potential", "c1", p.c1);
  r.opt_real("potential", "c2", p.c2);
  r.real("potential", "width", p.width);
  r.integer("potential", "m1", p.m1);
  r.integer("potential", "m2", p.m2);
  r.path("potential", "file", p.file);
  if (p.kind == "gaussian" && !(p.width > 0.0)) r.fail("potential", "width", "width must be positive");
  if (p.kind == "tabulated" && p.file.empty()) r.fail("potential", "file", "tabulated potential needs a file");

  // [initial]
  auto& in = s.initial;
  r.text("initial", "kind", in.kind);
  static const std::map<std::string, std::set<std::string>> initial_keys{
      {"uniform", {"kind", "base", "spin1", "spin2", "spin3"}},
      {"gaussian-bump", {"kind", "base", "amplitude", "width", "c1", "c2", "spin1", "spin2", "spin3"}},
      {"spin-helix", {"kind", "base", "amplitude", "mode"}},
      {"tabulated", {"kind", "file"}},
  };
  const auto ik = initial_keys.find(in.kind);
  if (ik == initial_keys.end()) {
    r.fail("initial", "kind",
           "initial kind must be uniform, gaussian-bump, spin-helix or tabulated, got '" + in.kind + "'");
  }
  r.only("initial", ik->second, "initial kind " + in.kind);
  r.real("initial", "base", in.base);
  r.real("initial", "spin1", in.spin1);
  r.real("initial", "spin2", in.spin2);
  r.real("initial", "spin3", in.spin3);
  r.real("initial", "amplitude", in.amplitude);
  r.real("initial", "width", in.width);
  r.opt_real("initial", "c1", in.c1);
  r.opt_real("initial", "c2", in.c2);
  r.integer("initial", "mode", in.mode);
  r.path("initial", "file", in.file);
  if (in.kind == "tabulated" && in.file.empty()) r.fail("initial", "file", "tabulated initial state needs a file");
  if (in.kind == "gaussian-bump" && !(in.width > 0.0)) r.fail("initial", "width", "width must be positive");
  if (in.kind != "tabulated") {
    if (in.kind == "gaussian-bump") {
      if (!(in.base >= 0.0)) r.fail("initial", "base", "base density must be non-negative");
      if (!(in.base + in.amplitude > 0.0) || (in.base == 0.0 && !(in.amplitude > 0.0))) {
        r.fail("initial", "amplitude", "bump must keep the density positive");
      }
    } else if (!(in.base > 0.0)) {
      r.fail("initial", "base", "base density must be positive");
    }
    const double spin = std::sqrt(in.spin1 * in.spin1 + in.spin2 * in.spin2 + in.spin3 * in.spin3);
    if (in.kind == "uniform" && !(spin < in.base)) {
      r.fail("initial", "spin1", "spin density must be smaller than the base density");
    }
    if (in.kind == "gaussian-bump") {
      if (!(spin < 1.0)) r.fail("initial", "spin1", "spin polarization must be below 1");
    }
    if (in.kind == "spin-helix" && !(std::abs(in.amplitude) < 1.0)) {
      r.fail("initial", "amplitude", "helix polarization must be below 1");
    }
  }

  // [output]
  auto& o = s.output;
  r.real("output", "t_end", o.t_end);
  r.real("output", "interval", o.interval);
  if (const auto* e = r.find("output", "format")) {
    try {
      o.format = parse_format(e->value);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(e->where + ": " + ex.what());
    }
  }
  r.integer("output", "progress_every", o.progress_every);
  r.text("output", "reference", o.reference);
  if (!(o.t_end > 0.0)) r.fail("output", "t_end", "t_end must be positive");
  if (!(o.interval >= 0.0)) r.fail("output", "interval", "interval must be non-negative");
  if (o.progress_every < 1) r.fail("output", "progress_every", "progress_every must be >= 1");
  if (o.reference != "none" && o.reference != "heat-kernel") {
    r.fail("output", "reference", "reference must be none or heat-kernel, got '" + o.reference + "'");
  }
  if (o.reference == "heat-kernel") {
    if (s.model != ModelKind::qdd || in.kind != "gaussian-bump" || p.kind != "none" || s.params.alpha != 0.0) {
      r.fail("output", "reference",
             "the heat-kernel reference needs model = qdd, a gaussian-bump initial state, no potential and α = 0");
    }
  }

  // [validation]
  auto& v = s.validation;
  r.integer("validation", "trials", v.trials);
  r.real("validation", "tolerance", v.tolerance);
  r.integer("validation", "states", v.states);
  r.integer("validation", "pairs", v.pairs);
  r.list("validation", "eps_list", v.eps_list);
  r.list("validation", "tau_list", v.tau_list);
  r.real("validation", "t_probe", v.t_probe);
  r.real("validation", "dt_per_tau", v.dt_per_tau);
  r.real("validation", "kinetic_cfl", v.kinetic_cfl);
  r.real("validation", "qdd_c", v.qdd_c);
  r.real("validation", "min_order", v.min_order);
  r.boolean("validation", "negative_control", v.negative_control);
  r.boolean("validation", "random_potential", v.random_potential);
  r.boolean("validation", "parallel", v.parallel);
  if (v.trials < 1) r.fail("validation", "trials", "trials must be >= 1");
  if (v.states < 1) r.fail("validation", "states", "states must be >= 1");
  if (v.pairs < 1) r.fail("validation", "pairs", "pairs must be >= 1");
  if (!(v.tolerance > 0.0)) r.fail("validation", "tolerance", "tolerance must be positive");
  auto decreasing = [&](const std::vector<double>& xs, const char* key) {
    if (xs.size() < 3) r.fail("validation", key, std::string(key) + " needs at least 3 values");
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!(xs[i] > 0.0)) r.fail("validation", key, std::string(key) + " values must be positive");
      if (i > 0 && !(xs[i] < xs[i - 1])) r.fail("validation", key, std::string(key) + " must be decreasing");
    }
  };
  decreasing(v.eps_list, "eps_list");
  decreasing(v.tau_list, "tau_list");
  if (!(v.t_probe > 0.0)) r.fail("validation", "t_probe", "t_probe must be positive");
  if (!(v.dt_per_tau > 0.0)) r.fail("validation", "dt_per_tau", "dt_per_tau must be positive");
  if (!(v.kinetic_cfl > 0.0)) r.fail("validation", "kinetic_cfl", "kinetic_cfl must be positive");
  if (!(v.qdd_c > 0.0)) r.fail("validation", "qdd_c", "qdd_c must be positive");
  return s;
}

}  // namespace detail

inline Scenario parse_config_text(const std::string& text, const std::string& source = "<text>",
                                  const std::vector<std::string>& overrides = {},
                                  const std::filesystem::path& base_dir = std::filesystem::current_path()) {
  std::istringstream is(text);
  auto raw = detail::parse_raw(is, source);
  for (const auto& o : overrides) detail::apply_override(raw, o);
  return detail::build_scenario(raw, base_dir);
}

inline Scenario parse_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open config file");
  auto raw = detail::parse_raw(is, path);
  for (const auto& o : overrides) detail::apply_override(raw, o);
  return detail::build_scenario(raw, std::filesystem::path(path).parent_path());
}

/// Canonical form: every applicable key, shortest round-trip numbers.
inline std::string emit_config(const Scenario& s) {
  std::ostringstream os;
  auto num = [](double v) { return to_text(v); };
  auto flag = [](bool b) { return b ? "true" : "false"; };
  os << "[scenario]\nname = " << s.name << "\nmodel = " << s.model_name() << "\nseed = " << s.seed << "\n\n";
  const auto& m = s.params;
  os << "[model]\nepsilon = " << num(m.epsilon) << "\nalpha = " << num(m.alpha) << "\ntau = " << num(m.tau)
     << "\ncollisionless = " << flag(m.collisionless) << "\nkappa = " << num(m.kappa) << "\n\n";

  const auto& p = s.potential;
  os << "[potential]\nkind = " << p.kind << '\n';
  auto center = [&](const std::optional<double>& c1, const std::optional<double>& c2) {
    if (c1) os << "c1 = " << num(*c1) << '\n';
    if (c2) os << "c2 = " << num(*c2) << '\n';
  };
  if (p.kind == "constant") os << "value = " << num(p.value) << '\n';
  if (p.kind == "linear") os << "e1 = " << num(p.e1) << "\ne2 = " << num(p.e2) << "\nvalue = " << num(p.value) << '\n';
  if (p.kind == "quadratic") {
    os << "curvature = " << num(p.curvature) << '\n';
    center(p.c1, p.c2);
  }
  if (p.kind == "gaussian") {
    os << "amplitude = " << num(p.amplitude) << "\nwidth = " << num(p.width) << '\n';
    center(p.c1, p.c2);
  }
  if (p.kind == "cosine") os << "amplitude = " << num(p.amplitude) << "\nm1 = " << p.m1 << "\nm2 = " << p.m2 << '\n';
  if (p.kind == "tabulated") os << "file = " << p.file << '\n';
  os << '\n';

  const auto& g = s.grid;
  os << "[grid]\nLx1 = " << num(g.Lx1) << "\nLx2 = " << num(g.Lx2) << "\nNx1 = " << g.Nx1 << "\nNx2 = " << g.Nx2
     << "\npmax = " << num(g.pmax) << "\nNp1 = " << g.Np1 << "\nNp2 = " << g.Np2 << "\ndt = " << num(g.dt)
     << "\n\n";

  const auto& in = s.initial;
  os << "[initial]\nkind = " << in.kind << '\n';
  auto spins = [&] {
    os << "spin1 = " << num(in.spin1) << "\nspin2 = " << num(in.spin2) << "\nspin3 = " << num(in.spin3) << '\n';
  };
  if (in.kind == "uniform") {
    os << "base = " << num(in.base) << '\n';
    spins();
  }
  if (in.kind == "gaussian-bump") {
    os << "base = " << num(in.base) << "\namplitude = " << num(in.amplitude) << "\nwidth = " << num(in.width)
       << '\n';
    center(in.c1, in.c2);
    spins();
  }
  if (in.kind == "spin-helix") {
    os << "base = " << num(in.base) << "\namplitude = " << num(in.amplitude) << "\nmode = " << in.mode << '\n';
  }
  if (in.kind == "tabulated") os << "file = " << in.file << '\n';
  os << '\n';

  const auto& o = s.output;
  os << "[output]\nt_end = " << num(o.t_end) << "\ninterval = " << num(o.interval)
     << "\nformat = " << format_name(o.format) << "\nprogress_every = " << o.progress_every
     << "\nreference = " << o.reference << "\n\n";

  const auto& v = s.validation;
  auto list = [&](const std::vector<double>& xs) {
    std::string out;
    for (double x : xs) out += (out.empty() ? "" : ", ") + num(x);
    return out;
  };
  os << "[validation]\ntrials = " << v.trials << "\ntolerance = " << num(v.tolerance) << "\nstates = " << v.states
     << "\npairs = " << v.pairs << "\neps_list = " << list(v.eps_list) << "\ntau_list = " << list(v.tau_list)
     << "\nt_probe = " << num(v.t_probe) << "\ndt_per_tau = " << num(v.dt_per_tau)
     << "\nkinetic_cfl = " << num(v.kinetic_cfl) << "\nqdd_c = " << num(v.qdd_c)
     << "\nmin_order = " << num(v.min_order) << "\nnegative_control = " << flag(v.negative_control)
     << "\nrandom_potential = " << flag(v.random_potential) << "\nparallel = " << flag(v.parallel) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Built-in scenarios.

struct BuiltinScenario {
  std::string name;
  std::string covers;
  std::string text;
};

inline const std::vector<BuiltinScenario>& builtin_scenarios() {
  static const std::vector<BuiltinScenario> all{
      {"pauli-algebra", "Pauli algebra against explicit 2x2 matrices",
       "[scenario]\nname = pauli-algebra\nmodel = validate:pauli\nseed = 11\n\n"
       "[validation]\npairs = 1000\n"},
      {"moment-identities", "Theta moment identities, 32^2 x 64^2, eps = 0.1, 20 trials",
       "[scenario]\nname = moment-identities\nmodel = validate:identities\nseed = 12\n\n"
       "[model]\nepsilon = 0.1\n\n"
       "[grid]\nNx1 = 32\nNx2 = 32\npmax = 8\nNp1 = 64\nNp2 = 64\n\n"
       "[validation]\ntrials = 20\ntolerance = 1e-7\n"},
      {"aux-formula", "<T w> against the moment-assembled formula, 10 states",
       "[scenario]\nname = aux-formula\nmodel = validate:aux\nseed = 13\n\n"
       "[model]\nepsilon = 0.1\nalpha = 1\n\n"
       "[grid]\nNx1 = 16\nNx2 = 16\npmax = 8\nNp1 = 32\nNp2 = 32\n\n"
       "[validation]\nstates = 10\ntolerance = 1e-7\n"},
      {"residual-current", "residual spin-orbit current",
       "[scenario]\nname = residual-current\nmodel = validate:residual\nseed = 14\n\n"
       "[model]\nepsilon = 0.1\n\n"
       "[grid]\nNx1 = 16\nNx2 = 16\nNp1 = 8\nNp2 = 8\n"},
      {"semiclassical-moments", "<T g> closed form and <T T g> against the drift-diffusion side",
       "[scenario]\nname = semiclassical-moments\nmodel = validate:semiclassical\nseed = 15\n\n"
       "[model]\nalpha = 1\n\n"
       "[grid]\nNx1 = 16\nNx2 = 16\npmax = 8\nNp1 = 32\nNp2 = 32\n\n"
       "[validation]\neps_list = 0.2, 0.1, 0.05\n"},
      {"qdd-regressions", "heat kernel, uniform spin decay, exp(-V) steady state",
       "[scenario]\nname = qdd-regressions\nmodel = validate:drift-diffusion\nseed = 16\n\n"
       "[model]\nalpha = 1\n\n"
       "[grid]\nNx1 = 64\nNx2 = 64\nNp1 = 8\nNp2 = 8\ndt = 0.001\n"},
      {"heat-kernel", "drift-diffusion snapshots with a heat-kernel error column",
       "[scenario]\nname = heat-kernel\nmodel = qdd\nseed = 17\n\n"
       "[grid]\nNx1 = 64\nNx2 = 64\nNp1 = 8\nNp2 = 8\ndt = 0.0005\n\n"
       "[initial]\nkind = gaussian-bump\nbase = 0\namplitude = 1\nwidth = 0.3\n\n"
       "[output]\nt_end = 0.1\ninterval = 0.02\nreference = heat-kernel\n"},
      {"kinetic-conservation", "mass drift, BGK and precession invariants",
       "[scenario]\nname = kinetic-conservation\nmodel = validate:conservation\nseed = 18\n\n"
       "[grid]\nNx1 = 8\nNx2 = 8\npmax = 6\nNp1 = 32\nNp2 = 32\n"},
      {"diffusion-limit", "kinetic vs drift-diffusion as tau -> 0 on 32^2 x 48^2",
       "[scenario]\nname = diffusion-limit\nmodel = validate:diffusion-limit\nseed = 19\n\n"
       "[model]\nalpha = 0\n\n"
       "[grid]\nNx1 = 32\nNx2 = 32\npmax = 6\nNp1 = 48\nNp2 = 48\n\n"
       "[validation]\ntau_list = 0.2, 0.1, 0.05\nt_probe = 0.5\n"},
      {"moyal-truncation", "truncated Moyal product and bracket",
       "[scenario]\nname = moyal-truncation\nmodel = validate:moyal\nseed = 20\n\n"
       "[model]\nepsilon = 0.1\n\n"
       "[grid]\nNx1 = 32\nNx2 = 8\npmax = 8\nNp1 = 48\nNp2 = 48\n"},
      {"spin-decay", "kinetic uniform spin relaxation against 4 a^2 tau, 4 a^2 tau, 8 a^2 tau",
       "[scenario]\nname = spin-decay\nmodel = validate:spin-decay\nseed = 21\n\n"
       "[model]\nalpha = 1\n\n"
       "[grid]\nNx1 = 8\nNx2 = 8\npmax = 6\nNp1 = 48\nNp2 = 48\n\n"
       "[validation]\ntau_list = 0.2, 0.1, 0.05\n"},
      {"spin-helix-kinetic", "demo: kinetic spin helix in a cosine potential",
       "[scenario]\nname = spin-helix-kinetic\nmodel = kinetic\nseed = 22\n\n"
       "[model]\nepsilon = 0.2\nalpha = 0.5\ntau = 0.5\n\n"
       "[potential]\nkind = cosine\namplitude = 0.3\nm1 = 1\nm2 = 1\n\n"
       "[grid]\nNx1 = 16\nNx2 = 16\npmax = 6\nNp1 = 32\nNp2 = 32\ndt = 0.02\n\n"
       "[initial]\nkind = spin-helix\nbase = 1\namplitude = 0.4\nmode = 1\n\n"
       "[output]\nt_end = 1\ninterval = 0.2\n"},
      {"both-bump", "demo: paired kinetic and drift-diffusion densities on a shared time axis",
       "[scenario]\nname = both-bump\nmodel = both\nseed = 23\n\n"
       "[model]\nepsilon = 0.1\nalpha = 0.5\ntau = 0.1\nkappa = 0.1\n\n"
       "[grid]\nNx1 = 16\nNx2 = 16\npmax = 6\nNp1 = 32\nNp2 = 32\ndt = 0.005\n\n"
       "[initial]\nkind = gaussian-bump\nbase = 1\namplitude = 0.5\nwidth = 0.8\nspin1 = 0.2\nspin3 = 0.3\n\n"
       "[output]\nt_end = 0.5\ninterval = 0.1\n"},
  };
  return all;
}

inline const BuiltinScenario& find_builtin(const std::string& name) {
  for (const auto& b : builtin_scenarios())
    if (b.name == name) return b;
  throw ConfigError("unknown built-in scenario '" + name + "' (see --list-scenarios)");
}

inline Scenario builtin_scenario(const std::string& name, const std::vector<std::string>& overrides = {}) {
  const auto& b = find_builtin(name);
  return parse_config_text(b.text, "builtin:" + name, overrides);
}

}  // namespace rashba
