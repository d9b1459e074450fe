#pragma once

// Scenario configuration, orchestration and report emission behind the
// qmsim driver. Configs are flat YAML maps (grammar in docs/config_grammar.md);
// reports are JSON or CSV (docs/report_schema.md).

#include <yaml-cpp/yaml.h>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qmsim/cascade.hpp"
#include "qmsim/coleman_hepp.hpp"
#include "qmsim/errors.hpp"
#include "qmsim/hilbert.hpp"
#include "qmsim/pauli.hpp"
#include "qmsim/radiation.hpp"
#include "qmsim/random.hpp"
#include "qmsim/superselection.hpp"

namespace qmsim::scenario {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

/// Malformed or out-of-range configuration.
class ConfigError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

enum class Kind { ch_basic, ch_heisenberg, ch_cascade, rd_basic, growth };

struct ScenarioInfo {
  Kind kind;
  const char* name;
  const char* summary;
};

inline const std::array<ScenarioInfo, 5>& scenarios() {
  static const std::array<ScenarioInfo, 5> table{{
      {Kind::ch_basic, "ch-basic", "probe passes a spin chain; pointer, IT operator, strict measurement, sectors"},
      {Kind::ch_heisenberg, "ch-heisenberg", "ferromagnetic chain Hamiltonian; pointer states as eigenstates"},
      {Kind::ch_cascade, "ch-cascade", "chains measuring the previous IT operator; information trade-off"},
      {Kind::rd_basic, "rd-basic", "path x lattice x photon field; photodetection observables vs coherence"},
      {Kind::growth, "growth", "unmeasured emitted particles after detector generations"},
  }};
  return table;
}

inline const ScenarioInfo& info(Kind k) {
  for (const auto& s : scenarios()) {
    if (s.kind == k) return s;
  }
  throw ConfigError("unknown scenario kind");
}

inline Kind parse_kind(const std::string& name) {
  for (const auto& s : scenarios()) {
    if (name == s.name) return s.kind;
  }
  std::string known;
  for (const auto& s : scenarios()) known += std::string(known.empty() ? "" : ", ") + s.name;
  throw ConfigError("unknown scenario '" + name + "' (known: " + known + ")");
}

/// Magnitude and phase in degrees.
struct Amplitude {
  double magnitude = std::numbers::sqrt2 / 2;
  double phase_deg = 0.0;

  cplx value() const { return std::polar(magnitude, phase_deg * std::numbers::pi / 180.0); }
};

struct PhotonSpec {
  std::vector<std::size_t> occupation;
  Amplitude amplitude;
};

/// param=start:stop:steps, inclusive linear spacing.
struct Sweep {
  std::string param;
  double start = 0.0;
  double stop = 0.0;
  std::size_t steps = 1;

  double value(std::size_t i) const {
    if (steps == 1) return start;
    return start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
};

inline const std::vector<std::string>& sweepable_params() {
  static const std::vector<std::string> p{"n_atoms",   "a1.magnitude", "a1.phase", "a2.magnitude",
                                          "a2.phase",  "pulse_angle",  "coupling", "cutoff",
                                          "depth",     "emission_factor"};
  return p;
}

struct ScenarioConfig {
  Kind scenario = Kind::ch_basic;
  Amplitude a1;
  Amplitude a2;
  std::size_t n_atoms = 4;
  double pulse_angle = 90.0;  // degrees; 90 completes each flip
  double coupling = 1.0;
  std::vector<std::size_t> chains{1, 1};
  std::size_t modes = 1;
  std::size_t cutoff = 3;
  std::vector<PhotonSpec> photons{{{1}, {std::numbers::sqrt2 / 2, 0.0}}, {{2}, {std::numbers::sqrt2 / 2, 0.0}}};
  std::vector<std::size_t> background;
  std::size_t random_observables = 100;
  std::uint64_t emission_factor = 2;
  std::uint64_t depth = 10;
  std::uint64_t bound = std::numeric_limits<std::uint64_t>::max();
  std::string observables;  // preset name; empty picks the scenario default
  double tolerance = kDefaultTolerance;
  std::uint64_t seed = 20240601;
  std::size_t fuzz_cases = 50;
  std::optional<Sweep> sweep;
  std::string format = "json";
  std::string output;  // empty: stdout
};

namespace detail {

inline std::string where(const YAML::Node& n) {
  const auto m = n.Mark();
  if (m.line < 0) return "(command line)";
  return "line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1);
}

template <typename T>
T scalar(const YAML::Node& n, const std::string& key, const char* expected) {
  if (!n.IsScalar()) throw ConfigError(key + ": expected " + expected + " at " + where(n));
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key + ": expected " + expected + " at " + where(n) + ", got '" + n.Scalar() + "'");
  }
}

inline std::size_t count(const YAML::Node& n, const std::string& key) {
  const auto v = scalar<long long>(n, key, "a non-negative integer");
  if (v < 0) throw ConfigError(key + ": expected a non-negative integer at " + where(n));
  return static_cast<std::size_t>(v);
}

inline std::vector<std::size_t> count_list(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) throw ConfigError(key + ": expected a list of integers at " + where(n));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(count(n[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

inline Amplitude amplitude(const YAML::Node& n, const std::string& key) {
  Amplitude a;
  a.phase_deg = 0.0;
  if (n.IsScalar()) {
    a.magnitude = scalar<double>(n, key, "a number");
  } else if (n.IsSequence()) {
    if (n.size() != 2) throw ConfigError(key + ": expected [magnitude, phase_degrees] at " + where(n));
    a.magnitude = scalar<double>(n[0], key + ".magnitude", "a number");
    a.phase_deg = scalar<double>(n[1], key + ".phase", "a number");
  } else if (n.IsMap()) {
    bool have_magnitude = false;
    for (auto it = n.begin(); it != n.end(); ++it) {
      const auto k = it->first.as<std::string>();
      if (k == "magnitude") {
        a.magnitude = scalar<double>(it->second, key + ".magnitude", "a number");
        have_magnitude = true;
      } else if (k == "phase") {
        a.phase_deg = scalar<double>(it->second, key + ".phase", "a number");
      } else {
        throw ConfigError(key + ": unknown key '" + k + "' at " + where(it->first));
      }
    }
    if (!have_magnitude) throw ConfigError(key + ": missing 'magnitude' at " + where(n));
  } else {
    throw ConfigError(key + ": expected an amplitude at " + where(n));
  }
  if (!(a.magnitude >= 0.0) || !std::isfinite(a.magnitude) || !std::isfinite(a.phase_deg)) {
    throw ConfigError(key + ": magnitude must be finite and >= 0 at " + where(n));
  }
  return a;
}

inline Sweep parse_sweep_text(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep: expected param=start:stop:steps, got '" + text + "'");
  Sweep s;
  s.param = text.substr(0, eq);
  const std::string rest = text.substr(eq + 1);
  std::vector<std::string> parts;
  std::stringstream ss(rest);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw ConfigError("sweep: expected param=start:stop:steps, got '" + text + "'");
  try {
    std::size_t used = 0;
    s.start = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("start");
    s.stop = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("stop");
    const long long steps = std::stoll(parts[2], &used);
    if (used != parts[2].size() || steps < 1) throw std::invalid_argument("steps");
    s.steps = static_cast<std::size_t>(steps);
  } catch (const std::exception&) {
    throw ConfigError("sweep: could not read start:stop:steps in '" + text + "' (steps must be an integer >= 1)");
  }
  return s;
}

inline Sweep sweep(const YAML::Node& n) {
  if (n.IsScalar()) return parse_sweep_text(n.Scalar());
  if (!n.IsMap()) throw ConfigError("sweep: expected param=start:stop:steps or a map at " + where(n));
  Sweep s;
  bool have[4] = {false, false, false, false};
  for (auto it = n.begin(); it != n.end(); ++it) {
    const auto k = it->first.as<std::string>();
    if (k == "param") {
      s.param = scalar<std::string>(it->second, "sweep.param", "a parameter name");
      have[0] = true;
    } else if (k == "start") {
      s.start = scalar<double>(it->second, "sweep.start", "a number");
      have[1] = true;
    } else if (k == "stop") {
      s.stop = scalar<double>(it->second, "sweep.stop", "a number");
      have[2] = true;
    } else if (k == "steps") {
      const auto v = scalar<long long>(it->second, "sweep.steps", "an integer");
      if (v < 1) throw ConfigError("sweep.steps: must be >= 1 at " + where(it->second));
      s.steps = static_cast<std::size_t>(v);
      have[3] = true;
    } else {
      throw ConfigError("sweep: unknown key '" + k + "' at " + where(it->first));
    }
  }
  if (!(have[0] && have[1] && have[2] && have[3])) {
    throw ConfigError("sweep: param, start, stop and steps are all required at " + where(n));
  }
  return s;
}

inline std::vector<PhotonSpec> photons(const YAML::Node& n) {
  if (!n.IsSequence()) throw ConfigError("photons: expected a list at " + where(n));
  std::vector<PhotonSpec> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string key = "photons[" + std::to_string(i) + "]";
    const auto& e = n[i];
    if (!e.IsMap()) throw ConfigError(key + ": expected {occupation, amplitude} at " + where(e));
    PhotonSpec p;
    bool have_occ = false;
    bool have_amp = false;
    for (auto it = e.begin(); it != e.end(); ++it) {
      const auto k = it->first.as<std::string>();
      if (k == "occupation") {
        p.occupation = count_list(it->second, key + ".occupation");
        have_occ = true;
      } else if (k == "amplitude") {
        p.amplitude = amplitude(it->second, key + ".amplitude");
        have_amp = true;
      } else {
        throw ConfigError(key + ": unknown key '" + k + "' at " + where(it->first));
      }
    }
    if (!have_occ || !have_amp) throw ConfigError(key + ": occupation and amplitude are required at " + where(e));
    out.push_back(std::move(p));
  }
  return out;
}

// Rescales a set of magnitudes to unit total weight when they are within
// 1e-6 of it; anything further off is an error.
inline void normalize(std::vector<Amplitude*> amps, const std::string& what) {
  double w = 0.0;
  for (const auto* a : amps) w += a->magnitude * a->magnitude;
  if (std::abs(w - 1.0) > 1e-6) {
    throw ConfigError(what + ": squared magnitudes sum to " + qmsim::detail::format_double(w) + ", must equal 1");
  }
  const double s = 1.0 / std::sqrt(w);
  for (auto* a : amps) a->magnitude *= s;
}

}  // namespace detail

/// Builds a config from a YAML map. Unknown keys and type errors name their
/// position; range checks run afterwards in validate().
inline ScenarioConfig parse_config(const YAML::Node& root) {
  ScenarioConfig c;
  if (!root || root.IsNull()) throw ConfigError("config: empty document (at least 'scenario' is required)");
  if (!root.IsMap()) throw ConfigError("config: expected a key-value map at " + detail::where(root));
  bool have_scenario = false;
  for (auto it = root.begin(); it != root.end(); ++it) {
    const auto key = it->first.as<std::string>();
    const auto& v = it->second;
    if (key == "scenario") {
      c.scenario = parse_kind(detail::scalar<std::string>(v, key, "a scenario name"));
      have_scenario = true;
    } else if (key == "n_atoms") {
      c.n_atoms = detail::count(v, key);
    } else if (key == "a1") {
      c.a1 = detail::amplitude(v, key);
    } else if (key == "a2") {
      c.a2 = detail::amplitude(v, key);
    } else if (key == "pulse_angle") {
      c.pulse_angle = detail::scalar<double>(v, key, "a number (degrees)");
    } else if (key == "coupling") {
      c.coupling = detail::scalar<double>(v, key, "a number");
    } else if (key == "chains") {
      c.chains = detail::count_list(v, key);
    } else if (key == "modes") {
      c.modes = detail::count(v, key);
    } else if (key == "cutoff") {
      c.cutoff = detail::count(v, key);
    } else if (key == "photons") {
      c.photons = detail::photons(v);
    } else if (key == "background") {
      c.background = detail::count_list(v, key);
    } else if (key == "random_observables") {
      c.random_observables = detail::count(v, key);
    } else if (key == "emission_factor") {
      c.emission_factor = detail::count(v, key);
    } else if (key == "depth") {
      c.depth = detail::count(v, key);
    } else if (key == "bound") {
      c.bound = detail::scalar<std::uint64_t>(v, key, "a non-negative integer");
    } else if (key == "observables") {
      c.observables = detail::scalar<std::string>(v, key, "a preset name");
    } else if (key == "tolerance") {
      c.tolerance = detail::scalar<double>(v, key, "a number");
    } else if (key == "seed") {
      c.seed = detail::scalar<std::uint64_t>(v, key, "a non-negative integer");
    } else if (key == "fuzz_cases") {
      c.fuzz_cases = detail::count(v, key);
    } else if (key == "sweep") {
      c.sweep = detail::sweep(v);
    } else if (key == "format") {
      c.format = detail::scalar<std::string>(v, key, "json or csv");
    } else if (key == "output") {
      c.output = detail::scalar<std::string>(v, key, "a path");
    } else {
      throw ConfigError("unknown key '" + key + "' at " + detail::where(it->first));
    }
  }
  if (!have_scenario) throw ConfigError("config: missing required key 'scenario'");
  return c;
}

inline ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("config: syntax error at line " + std::to_string(e.mark.line + 1) + ", column " +
                      std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  return parse_config(root);
}

inline const std::vector<std::string>& presets(Kind k) {
  static const std::vector<std::string> chain{"sector_preserving", "all_strings", "pointer_only", "with_B"};
  static const std::vector<std::string> radiation{"glauber", "with_quadrature"};
  static const std::vector<std::string> none;
  if (k == Kind::ch_basic) return chain;
  if (k == Kind::rd_basic) return radiation;
  return none;
}

inline constexpr std::size_t kEnumerationMaxAtoms = 5;

/// The preset actually used: the configured one, or the scenario default.
inline std::string effective_preset(const ScenarioConfig& c) {
  if (!c.observables.empty()) return c.observables;
  if (c.scenario == Kind::ch_basic) return c.n_atoms <= kEnumerationMaxAtoms ? "sector_preserving" : "pointer_only";
  if (c.scenario == Kind::rd_basic) return "glauber";
  return "";
}

/// Module preconditions plus driver limits; amplitudes are renormalized here.
inline void validate(ScenarioConfig& c, const Limits& limits = {}) {
  if (!(c.tolerance > 0.0) || !std::isfinite(c.tolerance)) throw ConfigError("tolerance: must be a positive number");
  if (c.format != "json" && c.format != "csv") throw ConfigError("format: must be json or csv, got '" + c.format + "'");
  if (c.scenario != Kind::growth && c.scenario != Kind::ch_heisenberg) {
    detail::normalize({&c.a1, &c.a2}, "amplitudes a1, a2");
  }
  if (!c.observables.empty()) {
    const auto& allowed = presets(c.scenario);
    if (std::find(allowed.begin(), allowed.end(), c.observables) == allowed.end()) {
      std::string list;
      for (const auto& p : allowed) list += (list.empty() ? "" : ", ") + p;
      throw ConfigError("observables: preset '" + c.observables + "' is not available for " + info(c.scenario).name +
                        (list.empty() ? std::string(" (no presets)") : " (available: " + list + ")"));
    }
  }
  switch (c.scenario) {
    case Kind::ch_basic: {
      if (c.n_atoms < 1) {
        throw ConfigError("coleman_hepp: N >= 1 required (n_atoms = " + std::to_string(c.n_atoms) + ")");
      }
      if ((std::size_t{1} << std::min<std::size_t>(c.n_atoms + 1, 63)) > limits.dense_cap) {
        throw DimensionCapError("ch-basic: layout [" + ch::chain_layout(std::min<std::size_t>(c.n_atoms, 13)).describe() +
                                "] exceeds dense cap " + std::to_string(limits.dense_cap));
      }
      const auto p = effective_preset(c);
      if ((p == "sector_preserving" || p == "all_strings") && c.n_atoms > kEnumerationMaxAtoms) {
        throw ConfigError("observables: preset '" + p + "' enumerates 4^(N+1) strings and needs n_atoms <= " +
                          std::to_string(kEnumerationMaxAtoms));
      }
      break;
    }
    case Kind::ch_heisenberg:
      if (c.n_atoms < 2) {
        throw ConfigError("coleman_hepp: Heisenberg chain needs N >= 2 (n_atoms = " + std::to_string(c.n_atoms) + ")");
      }
      if (!std::isfinite(c.coupling)) throw ConfigError("coupling: must be finite");
      (void)ch::chain_layout(c.n_atoms, limits);
      break;
    case Kind::ch_cascade: {
      if (c.chains.size() < 2) throw ConfigError("chain_cascade: a cascade needs m >= 2 chains");
      std::size_t total = 1;
      for (auto n : c.chains) {
        if (n < 1) throw ConfigError("chain_cascade: every chain needs N >= 1 atoms");
        total += n;
      }
      if (total > 63 || (std::size_t{1} << total) > limits.dense_cap) {
        throw DimensionCapError("ch-cascade: " + std::to_string(total) + " qubits exceed dense cap " +
                                std::to_string(limits.dense_cap));
      }
      break;
    }
    case Kind::rd_basic: {
      std::vector<Amplitude*> amps;
      for (auto& p : c.photons) amps.push_back(&p.amplitude);
      if (amps.empty()) throw ConfigError("radiation_decoherence: at least one photon pattern is required");
      detail::normalize(amps, "photon amplitudes");
      rd::RadiationModel m;
      m.modes = c.modes;
      m.cutoff = c.cutoff;
      m.background = c.background;
      m.photons.clear();
      for (const auto& p : c.photons) m.photons.push_back({p.occupation, p.amplitude.value()});
      m.a1 = c.a1.value();
      m.a2 = c.a2.value();
      m.validate(1e-12);
      const auto layout = m.layout(limits);
      if (layout.dim() > limits.dense_cap) {
        throw DimensionCapError("rd-basic: layout [" + layout.describe() + "] exceeds dense cap " +
                                std::to_string(limits.dense_cap));
      }
      break;
    }
    case Kind::growth:
      if (c.emission_factor <= 1) throw ConfigError("growth: emission factor N_e must be > 1");
      break;
  }
  if (c.sweep) {
    const auto& p = sweepable_params();
    if (std::find(p.begin(), p.end(), c.sweep->param) == p.end()) {
      std::string list;
      for (const auto& s : p) list += (list.empty() ? "" : ", ") + s;
      throw ConfigError("sweep: unknown parameter '" + c.sweep->param + "' (sweepable: " + list + ")");
    }
    if (c.sweep->steps < 1) throw ConfigError("sweep: steps must be >= 1");
  }
}

/// Sets one sweepable parameter. Integer parameters must receive integral
/// values; sweeping one magnitude sets its partner to keep unit weight.
inline void set_param(ScenarioConfig& c, const std::string& param, double v) {
  auto integral = [&](double x) {
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9 || r < 0) {
      throw ConfigError("sweep: parameter '" + param + "' needs non-negative integers, got " + qmsim::detail::format_double(x));
    }
    return static_cast<std::uint64_t>(r);
  };
  auto magnitude = [&](Amplitude& self, Amplitude& partner) {
    if (v < 0.0 || v > 1.0) throw ConfigError("sweep: " + param + " must lie in [0, 1], got " + qmsim::detail::format_double(v));
    self.magnitude = v;
    partner.magnitude = std::sqrt(std::max(0.0, 1.0 - v * v));
  };
  if (param == "n_atoms") c.n_atoms = integral(v);
  else if (param == "a1.magnitude") magnitude(c.a1, c.a2);
  else if (param == "a2.magnitude") magnitude(c.a2, c.a1);
  else if (param == "a1.phase") c.a1.phase_deg = v;
  else if (param == "a2.phase") c.a2.phase_deg = v;
  else if (param == "pulse_angle") c.pulse_angle = v;
  else if (param == "coupling") c.coupling = v;
  else if (param == "cutoff") c.cutoff = integral(v);
  else if (param == "depth") c.depth = integral(v);
  else if (param == "emission_factor") c.emission_factor = integral(v);
  else throw ConfigError("sweep: unknown parameter '" + param + "'");
}

struct Invariant {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  bool required = true;
};

struct Verdict {
  std::string name;
  DiscriminationVerdict verdict;
};

struct RunReport {
  std::string scenario;
  json params;
  std::vector<std::pair<std::string, double>> expectations;
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  std::vector<Invariant> invariants;
  std::vector<Verdict> verdicts;
  std::optional<double> sweep_value;
  double wall_time_s = 0.0;

  void expect(std::string name, double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    expectations.emplace_back(std::move(name), v);
  }

  /// Passes when residual <= tol.
  void check(std::string name, double residual, double tol, bool required = true) {
    invariants.push_back({std::move(name), residual <= tol, residual, required});
  }

  void check_flag(std::string name, bool pass, double residual, bool required = true) {
    invariants.push_back({std::move(name), pass, residual, required});
  }

  bool required_ok() const {
    return std::all_of(invariants.begin(), invariants.end(), [](const Invariant& i) { return i.pass || !i.required; });
  }
};

namespace detail {

inline json amplitude_json(const Amplitude& a) { return json{{"magnitude", a.magnitude}, {"phase_deg", a.phase_deg}}; }

inline json params_json(const ScenarioConfig& c) {
  json p;
  p["tolerance"] = c.tolerance;
  p["seed"] = c.seed;
  switch (c.scenario) {
    case Kind::ch_basic:
      p["n_atoms"] = c.n_atoms;
      p["a1"] = amplitude_json(c.a1);
      p["a2"] = amplitude_json(c.a2);
      p["pulse_angle"] = c.pulse_angle;
      p["observables"] = effective_preset(c);
      p["fuzz_cases"] = c.fuzz_cases;
      break;
    case Kind::ch_heisenberg:
      p["n_atoms"] = c.n_atoms;
      p["coupling"] = c.coupling;
      p["a1"] = amplitude_json(c.a1);
      p["a2"] = amplitude_json(c.a2);
      p["fuzz_cases"] = c.fuzz_cases;
      break;
    case Kind::ch_cascade:
      p["chains"] = c.chains;
      p["a1"] = amplitude_json(c.a1);
      p["a2"] = amplitude_json(c.a2);
      p["fuzz_cases"] = c.fuzz_cases;
      break;
    case Kind::rd_basic: {
      p["a1"] = amplitude_json(c.a1);
      p["a2"] = amplitude_json(c.a2);
      p["modes"] = c.modes;
      p["cutoff"] = c.cutoff;
      json ph = json::array();
      for (const auto& x : c.photons) ph.push_back(json{{"occupation", x.occupation}, {"amplitude", amplitude_json(x.amplitude)}});
      p["photons"] = ph;
      p["background"] = c.background;
      p["random_observables"] = c.random_observables;
      p["observables"] = effective_preset(c);
      break;
    }
    case Kind::growth:
      p["emission_factor"] = c.emission_factor;
      p["depth"] = c.depth;
      p["bound"] = c.bound;
      break;
  }
  return p;
}

inline double nan() { return std::numeric_limits<double>::quiet_NaN(); }

// Every string of weight <= max_weight on n qubits.
inline ObservableSet low_weight_strings(std::size_t n, std::size_t max_weight) {
  ObservableSet s{"low_weight_strings", {Observable::pauli(PauliSum::identity())}, 1};
  const Letter letters[3] = {Letter::X, Letter::Y, Letter::Z};
  for (std::size_t q = 0; q < n; ++q) {
    for (auto l : letters) s.generators.push_back(Observable::pauli(PauliSum(PauliString::single(l, q))));
  }
  if (max_weight >= 2) {
    for (std::size_t q = 0; q < n; ++q) {
      for (std::size_t r = q + 1; r < n; ++r) {
        for (auto l : letters) {
          for (auto m : letters) {
            s.generators.push_back(
                Observable::pauli(PauliSum(PauliString::single(l, q) * PauliString::single(m, r))));
          }
        }
      }
    }
  }
  return s;
}

inline SectorDecomposition joint_pointer_sectors(std::size_t n, const Limits& limits) {
  const auto layout = ch::chain_layout(n, limits);
  return refine(pointer_sectors(PauliString::single(Letter::Z, 0), layout, "s0", kDegeneracyTolerance, limits),
                pointer_sectors(ch::pointer_operator(n), layout, "mu_z", kDegeneracyTolerance, limits));
}

inline ObservableSet chain_preset(const std::string& name, std::size_t n, const SectorDecomposition& sectors,
                                  double tol, const Limits& limits) {
  if (name == "all_strings") return all_strings_set(n + 1);
  if (name == "sector_preserving") {
    auto s = restricted_algebra(sectors, all_strings_set(n + 1), tol, limits);
    s.name = "sector_preserving";
    return s;
  }
  if (name == "pointer_only") {
    return ObservableSet{"pointer_only",
                         {Observable::pauli("mu_z", ch::pointer_operator(n)),
                          Observable::pauli("sigma0_z", PauliString::single(Letter::Z, 0))},
                         2};
  }
  if (name == "with_B") {
    return ObservableSet{"with_B",
                         {Observable::pauli("mu_z", ch::pointer_operator(n)), Observable::pauli("B", ch::it_operator(n))},
                         1};
  }
  throw ConfigError("observables: unknown preset '" + name + "'");
}

inline RunReport run_ch_basic(const ScenarioConfig& c, const Limits& limits) {
  RunReport r;
  const double tol = c.tolerance;
  const std::size_t n = c.n_atoms;
  ch::ChainModel m;
  m.n_atoms = n;
  m.a1 = c.a1.value();
  m.a2 = c.a2.value();
  m.pulse_angle = c.pulse_angle * std::numbers::pi / 180.0;
  const bool full_flip = ch::pulse_cos_sin(m.pulse_angle) == ch::pulse_cos_sin(ch::kFullFlip);

  const auto psi = ch::full_passage(m, limits);
  const auto sectors = joint_pointer_sectors(n, limits);
  const auto mixed = sector_decohere(DensityMatrix::pure(psi, limits), sectors);
  const PauliSum mu = ch::pointer_operator(n);
  const PauliSum b = ch::it_operator(n);
  const auto strict = ch::strict_check(PauliString::single(Letter::Z, 0), mu, psi, tol);
  const double b_pure = expectation(b, psi, tol);
  const double b_mixed = expectation_mixed(b, mixed, tol);
  const double b_closed = ch::it_expectation_closed_form(n, m.a1, m.a2);
  const double b_reference = ch::it_expectation_reference(m.a1, m.a2);
  const auto k = proportionality_constant(commutator(mu, b), ch::reference_commutator(n), tol);

  r.expect("sigma0_z", strict.q_expect);
  r.expect("mu_z", strict.qo_expect);
  r.expect("delta_q", strict.delta);
  r.expect("B_pure", b_pure);
  r.expect("B_mixed", b_mixed);
  r.expect("B_closed_form", b_closed);
  r.expect("B_reference_formula", b_reference);
  r.expect("B_pure_over_reference", std::abs(b_reference) > tol ? b_pure / b_reference : nan());
  r.expect("commutator_constant_re", k ? k->real() : nan());
  r.expect("commutator_constant_im", k ? k->imag() : nan());

  r.check("norm_preserved", std::abs(psi.norm() - 1.0), tol);
  const double fidelity_gap = 1.0 - std::abs(psi.inner(ch::closed_form_final(m, limits)));
  r.check("closed_form_fidelity", std::max(0.0, fidelity_gap), tol, full_flip);
  r.check("strict_measurement", std::abs(strict.delta), tol, full_flip);
  r.check("B_mixed_zero", std::abs(b_mixed), tol);
  r.check("B_pure_closed_form", std::abs(b_pure - b_closed), tol, full_flip);
  r.check_flag("commutator_proportional", k.has_value(), k ? std::abs(*k - cplx{-2.0}) : 1.0);
  r.check("sector_completeness", sectors.defect(), tol);
  if (full_flip) {
    const auto branch_mix = mixture_of(ch::final_branches(m, limits), limits);
    r.check("decoherence_equals_branch_mixture", (mixed.matrix() - branch_mix.matrix()).cwiseAbs().maxCoeff(), tol);
  } else {
    r.check("decoherence_equals_branch_mixture", 0.0, tol, false);
  }

  Rng rng(c.seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < c.fuzz_cases; ++t) {
    ch::ChainModel f = m;
    std::tie(f.a1, f.a2) = rng.amplitude_pair();
    f.pulse_angle = ch::kFullFlip;
    worst = std::max(worst, 1.0 - std::abs(ch::full_passage(f, limits).inner(ch::closed_form_final(f, limits))));
  }
  r.check("fuzz_closed_form", std::max(0.0, worst), tol);

  // Sector-preserving observables cannot see the decoherence map.
  const ObservableSet pool =
      n <= kEnumerationMaxAtoms ? all_strings_set(n + 1) : low_weight_strings(n + 1, 2);
  const auto restricted = restricted_algebra(sectors, pool, tol, limits);
  const auto blind = discriminate(psi, mixed, restricted, tol, limits);
  r.check("restricted_blind", blind.max_deviation, tol);

  const auto preset = effective_preset(c);
  r.verdicts.push_back({"preset:" + preset, discriminate(psi, mixed, chain_preset(preset, n, sectors, tol, limits), tol, limits)});
  return r;
}

inline RunReport run_ch_heisenberg(const ScenarioConfig& c, const Limits& limits) {
  RunReport r;
  const double tol = c.tolerance;
  const std::size_t n = c.n_atoms;
  const auto layout = ch::chain_layout(n, limits);
  const PauliSum h = ch::heisenberg_hamiltonian(n, c.coupling);
  const double expected = c.coupling * static_cast<double>(n - 1);
  const auto up = StateVector::basis(layout, 0);
  const auto down = StateVector::basis(layout, (std::size_t{1} << n) - 1);
  const auto flip = StateVector::basis(layout, layout.stride(1));
  ch::ChainModel m;
  m.n_atoms = n;
  m.a1 = c.a1.value();
  m.a2 = c.a2.value();
  const auto psi = ch::full_passage(m, limits);

  const auto ru = ch::eigenstate_residual(h, up, tol);
  const auto rd = ch::eigenstate_residual(h, down, tol);
  const auto rf = ch::eigenstate_residual(h, flip, tol);
  const auto rp = ch::eigenstate_residual(h, psi, tol);
  r.expect("eigenvalue_all_up", ru.eigenvalue);
  r.expect("expected_eigenvalue", expected);
  r.expect("residual_all_up", ru.residual);
  r.expect("eigenvalue_all_down", rd.eigenvalue);
  r.expect("residual_all_down", rd.residual);
  r.expect("eigenvalue_final_state", rp.eigenvalue);
  r.expect("residual_single_flip", rf.residual);

  const double scale = std::max(1.0, std::abs(c.coupling) * static_cast<double>(n));
  r.check("all_up_eigenstate", ru.residual, tol * scale);
  r.check("eigenvalue_matches", std::abs(ru.eigenvalue - expected), tol * scale);
  r.check("all_down_eigenstate", rd.residual, tol * scale);
  r.check("final_state_eigenstate", rp.residual, tol * scale);
  r.check("pointer_conserved", commutator(h, ch::pointer_operator(n)).one_norm(), tol * scale);

  Rng rng(c.seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < c.fuzz_cases; ++t) {
    const double j = rng.uniform(-2.0, 2.0);
    const auto hr = ch::heisenberg_hamiltonian(n, j);
    const auto e = ch::eigenstate_residual(hr, up, tol);
    worst = std::max({worst, e.residual, std::abs(e.eigenvalue - j * static_cast<double>(n - 1))});
  }
  r.check("fuzz_coupling", worst, tol * std::max(2.0, 2.0 * static_cast<double>(n)));
  return r;
}

inline RunReport run_ch_cascade(const ScenarioConfig& c, const Limits& limits) {
  RunReport r;
  const double tol = c.tolerance;
  cascade::CascadeModel m;
  m.chains = c.chains;
  m.a1 = c.a1.value();
  m.a2 = c.a2.value();
  const auto stages = cascade::run_cascade(m, tol, limits);
  const auto t = cascade::information_tradeoff(m, tol, limits);
  const auto& s2 = stages[1];
  const double reference_b2 =
      expectation(cascade::build_b2_reference(m.chain_qubits(1), m.chain_qubits(2)), s2.state, tol);
  const Eigen::MatrixXcd joint2 = cascade::joint_it_operator(s2.branches, limits);
  const double joint2_value = s2.state.amplitudes().dot(joint2 * s2.state.amplitudes()).real();
  const auto w = cascade::unmeasured_it_exists(m, tol, limits);

  r.expect("mu_before", t.mu_before);
  r.expect("B_before", t.b_before);
  r.expect("mu_after", t.mu_after);
  r.expect("Bprime_after", t.bprime_after);
  r.expect("b1_re", t.b1.real());
  r.expect("b1_im", t.b1.imag());
  r.expect("b2_re", t.b2.real());
  r.expect("b2_im", t.b2.imag());
  r.expect("B2_reference_stage2", reference_b2);
  r.expect("joint_it_stage2", joint2_value);
  r.expect("terminal_deviation", w.deviation);

  double norm_gap = 0.0;
  double branch_gap = 0.0;
  for (const auto& st : stages) {
    norm_gap = std::max(norm_gap, std::abs(st.state.norm() - 1.0));
    branch_gap = std::max(branch_gap, (st.branches.superposition().amplitudes() - st.state.amplitudes()).norm());
  }
  r.check("stage_norms", norm_gap, tol);
  r.check("stage_branches_reconstruct", branch_gap, tol);
  r.check("tradeoff_mu_zero", std::abs(t.mu_after), tol);
  r.check("tradeoff_bprime", std::abs(t.bprime_after - t.b_before), tol);
  r.check_flag("terminal_covers_observer", w.covers_observer, w.covers_observer ? 0.0 : 1.0);

  // Chain pointers never separate a stage's state from its branch mixture.
  double pointer_dev = 0.0;
  for (std::size_t k = 1; k <= stages.size(); ++k) {
    ObservableSet ptr{"pointers", {}, 2};
    for (std::size_t j = 1; j <= k; ++j) {
      ptr.generators.push_back(Observable::pauli("mu" + std::to_string(j), cascade::chain_pointer(m, j)));
    }
    const auto& st = stages[k - 1];
    pointer_dev =
        std::max(pointer_dev, discriminate(st.state, mixture_of(st.branches, limits), ptr, tol, limits).max_deviation);
  }
  r.check("no_total_information", pointer_dev, tol);

  Rng rng(c.seed);
  double worst = 0.0;
  std::size_t used = 0;
  for (std::size_t tries = 0; used < c.fuzz_cases && tries < 100 * (c.fuzz_cases + 1); ++tries) {
    cascade::CascadeModel f = m;
    std::tie(f.a1, f.a2) = rng.amplitude_pair();
    if (std::abs(ch::it_expectation_closed_form(f.chains[0], f.a1, f.a2)) <= 0.1) continue;
    const auto ft = cascade::information_tradeoff(f, tol, limits);
    worst = std::max({worst, std::abs(ft.mu_after), std::abs(ft.bprime_after - ft.b_before)});
    ++used;
  }
  r.check("fuzz_tradeoff", worst, tol);

  DiscriminationVerdict terminal;
  terminal.max_deviation = w.deviation;
  terminal.distinguishable = w.exists;
  if (w.exists) terminal.witness = "terminal_joint_it";
  r.verdicts.push_back({"terminal_joint_it", terminal});
  return r;
}

inline rd::RadiationModel radiation_model(const ScenarioConfig& c) {
  rd::RadiationModel m;
  m.a1 = c.a1.value();
  m.a2 = c.a2.value();
  m.modes = c.modes;
  m.cutoff = c.cutoff;
  m.background = c.background;
  m.photons.clear();
  for (const auto& p : c.photons) m.photons.push_back({p.occupation, p.amplitude.value()});
  return m;
}

inline RunReport run_rd_basic(const ScenarioConfig& c, const Limits& limits) {
  RunReport r;
  const double tol = c.tolerance;
  const auto m = radiation_model(c);
  const auto fs = rd::build_final_state(m, limits);
  const auto& br = fs.branches.branches();
  const double overlap = std::abs(br[0].state.inner(br[1].state));

  double c2 = 0.0;
  for (const auto& f : rd::glauber_field_generators(m)) c2 = std::max(c2, rd::check_no_vacuum_interference(f, m));
  const double quad_vacuum = rd::check_no_vacuum_interference(rd::quadrature(m, 0), m);

  // Only the pattern with one photon in mode 0 is reachable from the vacuum by a + a^dagger.
  std::vector<std::size_t> one(m.modes, 0);
  one[0] = 1;
  cplx c_one{0.0};
  for (const auto& p : m.photons) {
    if (p.occupation == one) c_one = p.amplitude;
  }
  const auto q = rd::vacuum_connecting_observable(m);
  const double predicted = std::abs(2.0 * (std::conj(m.a1) * m.a2 * c_one).real()) / q.norm_estimate();

  const auto glauber = rd::glauber_generators(m);
  Rng rng(c.seed);
  const auto random_set = rd::random_glauber_observables(m, c.random_observables, rng);
  auto with_q = glauber;
  with_q.name = "with_quadrature";
  with_q.generators.push_back(q);

  const auto v_glauber = rd::check_c22(m, glauber, tol, limits);
  const auto v_random = c.random_observables > 0 ? rd::check_c22(m, random_set, tol, limits) : DiscriminationVerdict{};
  const auto v_with_q = rd::check_c22(m, with_q, tol, limits);

  r.expect("branch_overlap", overlap);
  r.expect("c2_residual", c2);
  r.expect("quadrature_vacuum_element", quad_vacuum);
  r.expect("counterexample_predicted", predicted);

  r.check("branch_orthogonal", overlap, tol);
  r.check("c2_zero", c2, tol);
  r.check("c22_glauber_blind", v_glauber.max_deviation, tol);
  r.check("c22_random_blind", v_random.max_deviation, tol);
  r.check_flag("counterexample_flips", v_with_q.distinguishable == (predicted > tol),
               std::abs(v_with_q.max_deviation - predicted) <= tol ? 0.0 : v_with_q.max_deviation, predicted > tol);

  // Uncorrelated background photons leave both verdicts unchanged.
  rd::RadiationModel plain = m;
  plain.background.clear();
  rd::RadiationModel shifted = m;
  if (shifted.background.empty()) shifted.background = {1};
  auto depth1 = [&](const rd::RadiationModel& x) {
    auto g = rd::glauber_generators(x);
    g.closure_depth = 1;
    return rd::check_c22(x, g, tol, limits).max_deviation;
  };
  auto qdev = [&](const rd::RadiationModel& x) {
    return rd::check_c22(x, ObservableSet{"q", {rd::vacuum_connecting_observable(x)}, 1}, tol, limits).max_deviation;
  };
  double bg_gap = std::abs(depth1(plain) - depth1(shifted));
  bg_gap = std::max(bg_gap, std::abs(qdev(plain) - qdev(shifted)));
  r.check("background_invariance", bg_gap, tol);

  const auto preset = effective_preset(c);
  r.verdicts.push_back({"glauber", v_glauber});
  r.verdicts.push_back({"random_glauber", v_random});
  r.verdicts.push_back({"with_quadrature", v_with_q});
  r.verdicts.push_back({"preset:" + preset, preset == "glauber" ? v_glauber : v_with_q});
  return r;
}

inline RunReport run_growth(const ScenarioConfig& c) {
  RunReport r;
  const auto n = rd::cascade_growth(c.emission_factor, c.depth, c.bound);
  r.counts.emplace_back("unmeasured_particles", n);
  r.expect("log10_unmeasured", static_cast<double>(c.depth) * std::log10(static_cast<double>(c.emission_factor)));
  bool recurrence = true;
  if (c.depth >= 1) recurrence = n == c.emission_factor * rd::cascade_growth(c.emission_factor, c.depth - 1, c.bound);
  r.check_flag("recurrence", recurrence, recurrence ? 0.0 : 1.0);
  return r;
}

}  // namespace detail

/// One point: validates, runs and times the scenario.
inline RunReport run(ScenarioConfig c, const Limits& limits = {}) {
  validate(c, limits);
  const auto t0 = std::chrono::steady_clock::now();
  RunReport r;
  switch (c.scenario) {
    case Kind::ch_basic: r = detail::run_ch_basic(c, limits); break;
    case Kind::ch_heisenberg: r = detail::run_ch_heisenberg(c, limits); break;
    case Kind::ch_cascade: r = detail::run_ch_cascade(c, limits); break;
    case Kind::rd_basic: r = detail::run_rd_basic(c, limits); break;
    case Kind::growth: r = detail::run_growth(c); break;
  }
  r.scenario = info(c.scenario).name;
  r.params = detail::params_json(c);
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

struct RunSet {
  ScenarioConfig config;
  std::vector<RunReport> runs;  // sweep order
  double wall_time_s = 0.0;

  bool required_ok() const {
    return std::all_of(runs.begin(), runs.end(), [](const RunReport& r) { return r.required_ok(); });
  }
};

/// Runs the config, expanding its sweep. Points run concurrently in batches
/// of the hardware thread count and are collected in sweep order.
inline RunSet run_all(ScenarioConfig c, const Limits& limits = {}) {
  validate(c, limits);
  const auto t0 = std::chrono::steady_clock::now();
  RunSet out;
  out.config = c;
  if (!c.sweep) {
    out.runs.push_back(run(c, limits));
  } else {
    const Sweep s = *c.sweep;
    std::vector<ScenarioConfig> points;
    for (std::size_t i = 0; i < s.steps; ++i) {
      ScenarioConfig p = c;
      p.sweep.reset();
      set_param(p, s.param, s.value(i));
      validate(p, limits);
      points.push_back(std::move(p));
    }
    const std::size_t batch = std::max(1U, std::thread::hardware_concurrency());
    for (std::size_t begin = 0; begin < points.size(); begin += batch) {
      std::vector<std::future<RunReport>> futures;
      const std::size_t end = std::min(points.size(), begin + batch);
      for (std::size_t i = begin; i < end; ++i) {
        futures.push_back(std::async(std::launch::async, [&points, &limits, i] { return run(points[i], limits); }));
      }
      for (std::size_t i = begin; i < end; ++i) {
        auto rep = futures[i - begin].get();
        rep.sweep_value = s.value(i);
        out.runs.push_back(std::move(rep));
      }
    }
  }
  out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

inline json to_json(const RunReport& r, std::size_t index) {
  json j;
  j["index"] = index;
  if (r.sweep_value) j["sweep_value"] = *r.sweep_value;
  j["params"] = r.params;
  json e = json::object();
  for (const auto& [k, v] : r.expectations) e[k] = v;
  j["expectations"] = e;
  json cnt = json::object();
  for (const auto& [k, v] : r.counts) cnt[k] = v;
  j["counts"] = cnt;
  json inv = json::array();
  for (const auto& i : r.invariants) {
    inv.push_back(json{{"name", i.name}, {"pass", i.pass}, {"residual", i.residual}, {"required", i.required}});
  }
  j["invariants"] = inv;
  json ver = json::array();
  for (const auto& v : r.verdicts) {
    ver.push_back(json{{"name", v.name},
                       {"max_deviation", v.verdict.max_deviation},
                       {"distinguishable", v.verdict.distinguishable},
                       {"witness", v.verdict.witness ? json(*v.verdict.witness) : json(nullptr)}});
  }
  j["verdicts"] = ver;
  j["required_pass"] = r.required_ok();
  j["wall_time_s"] = r.wall_time_s;
  return j;
}

inline std::string emit_json(const RunSet& s) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["scenario"] = info(s.config.scenario).name;
  j["seed"] = s.config.seed;
  if (s.config.sweep) {
    j["sweep"] = json{{"param", s.config.sweep->param},
                      {"start", s.config.sweep->start},
                      {"stop", s.config.sweep->stop},
                      {"steps", s.config.sweep->steps}};
  } else {
    j["sweep"] = nullptr;
  }
  json runs = json::array();
  for (std::size_t i = 0; i < s.runs.size(); ++i) runs.push_back(to_json(s.runs[i], i));
  j["runs"] = runs;
  j["required_pass"] = s.required_ok();
  j["wall_time_s"] = s.wall_time_s;
  return j.dump(2) + "\n";
}

namespace detail {

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return qmsim::detail::format_double(v);
}

}  // namespace detail

/// One row per run; columns are fixed by the first run's order. Timing is
/// left out so sweeps are reproducible byte for byte.
inline std::string emit_csv(const RunSet& s) {
  std::vector<std::string> header{"index"};
  if (s.config.sweep) header.push_back(s.config.sweep->param);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> names;
  auto column = [&](const std::string& name) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
    names.push_back(name);
    return names.size() - 1;
  };
  for (std::size_t i = 0; i < s.runs.size(); ++i) {
    const auto& r = s.runs[i];
    std::vector<std::pair<std::size_t, std::string>> cells;
    for (const auto& [k, v] : r.expectations) cells.emplace_back(column(k), detail::csv_number(v));
    for (const auto& [k, v] : r.counts) cells.emplace_back(column(k), std::to_string(v));
    for (const auto& inv : r.invariants) {
      cells.emplace_back(column(inv.name + ".pass"), inv.pass ? "1" : "0");
      cells.emplace_back(column(inv.name + ".residual"), detail::csv_number(inv.residual));
    }
    for (const auto& v : r.verdicts) {
      cells.emplace_back(column(v.name + ".max_deviation"), detail::csv_number(v.verdict.max_deviation));
      cells.emplace_back(column(v.name + ".distinguishable"), v.verdict.distinguishable ? "1" : "0");
    }
    std::vector<std::string> row;
    for (const auto& [col, text] : cells) {
      if (row.size() <= col) row.resize(col + 1);
      row[col] = text;
    }
    rows.push_back(std::move(row));
  }
  std::ostringstream out;
  header.insert(header.end(), names.begin(), names.end());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << i;
    if (s.config.sweep) out << "," << detail::csv_number(*s.runs[i].sweep_value);
    auto row = rows[i];
    row.resize(names.size());
    for (const auto& cell : row) out << "," << cell;
    out << "\n";
  }
  return out.str();
}

inline std::string emit(const RunSet& s) { return s.config.format == "csv" ? emit_csv(s) : emit_json(s); }

/// Applies "key=value" to a YAML root; the value is read as YAML, so lists
/// and maps use flow syntax (a2=[0.6, 90]).
inline void apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set: expected key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  YAML::Node v;
  try {
    v = YAML::Load(value);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("--set " + key + ": cannot read value '" + value + "': " + e.msg);
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  root[key] = v;
}

}  // namespace qmsim::scenario
