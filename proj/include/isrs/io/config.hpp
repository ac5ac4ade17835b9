#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "isrs/bench.hpp"
#include "isrs/closedform.hpp"
#include "isrs/errors.hpp"
#include "isrs/link.hpp"
#include "isrs/ode_oracle.hpp"
#include "isrs/osnr.hpp"
#include "isrs/profiles.hpp"
#include "isrs/spectrum.hpp"
#include "isrs/units.hpp"

namespace isrs::io {

using json = nlohmann::json;

struct FlatLaunch {
  double dbm = 0.0;
};
struct TableLaunch {
  std::vector<double> dbm;
};
enum class PreemphasisMode { output_absolute, input_total };
struct PreemphasisRequest {
  PreemphasisMode mode = PreemphasisMode::input_total;
  std::vector<double> target;  // linear; empty means flat
  double total_dbm = 0.0;      // input_total: launch total; output_absolute: received total
};
using LaunchSpec = std::variant<FlatLaunch, TableLaunch, PreemphasisRequest>;

struct OsnrSettings {
  std::vector<double> target;  // empty means flat
  double total_dbm = 0.0;      // launch total power for every span
  OsnrTargetOptions options;
};

struct RunConfig {
  std::string scenario = "scenario";
  BandPlan bands;
  double spacing_thz = 0.05;
  GridPtr grid;
  LinkSpec link;
  std::optional<LaunchSpec> launch;
  SolverOptions solver;
  int order = 3;
  GammaRefMode gamma_ref_mode = GammaRefMode::fixed_at_span_end;
  std::optional<OsnrSettings> osnr;
  std::optional<SweepConfig> sweep;
  std::string output_dir = "out";
  int longitudinal_samples = 50;  // closed-form z samples per span
  std::filesystem::path source;

  /// Launch spectrum for flat or tabulated launch modes.
  PowerSpectrum launch_spectrum() const {
    if (!launch) throw ConfigError(scenario + ": no launch specified");
    if (const auto* f = std::get_if<FlatLaunch>(&*launch)) return PowerSpectrum::flat(grid, dbm_to_watt(f->dbm));
    if (const auto* t = std::get_if<TableLaunch>(&*launch)) {
      std::vector<double> w(t->dbm.size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = dbm_to_watt(t->dbm[i]);
      return {grid, std::move(w)};
    }
    throw ConfigError(scenario + ": launch is a pre-emphasis request; use the preemph command");
  }
};

namespace detail {

/// JSON object accessor that reports errors with the full field path.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return j_; }
  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }
  Node at(const char* key) const {
    if (!has(key)) fail(child_path(key), "missing required field");
    return {j_.at(key), child_path(key)};
  }
  std::optional<Node> find(const char* key) const {
    if (!has(key)) return std::nullopt;
    return Node{j_.at(key), child_path(key)};
  }

  double number() const {
    if (j_.is_string()) {
      const auto s = j_.get<std::string>();
      if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    if (!j_.is_number()) fail(path_, "expected a number");
    return j_.get<double>();
  }
  int integer() const {
    if (!j_.is_number_integer()) fail(path_, "expected an integer");
    return j_.get<int>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail(path_, "expected true or false");
    return j_.get<bool>();
  }
  std::string string() const {
    if (!j_.is_string()) fail(path_, "expected a string");
    return j_.get<std::string>();
  }
  std::vector<double> numbers() const {
    if (!j_.is_array()) fail(path_, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j_.size(); ++i) v.push_back(Node(j_[i], path_ + "[" + std::to_string(i) + "]").number());
    return v;
  }

  double number_or(const char* key, double fallback) const { return has(key) ? at(key).number() : fallback; }
  int integer_or(const char* key, int fallback) const { return has(key) ? at(key).integer() : fallback; }
  bool boolean_or(const char* key, bool fallback) const { return has(key) ? at(key).boolean() : fallback; }
  std::string string_or(const char* key, std::string fallback) const {
    return has(key) ? at(key).string() : std::move(fallback);
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& why) {
    throw ConfigError("config field '" + path + "': " + why);
  }

 private:
  std::string child_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  const json& j_;
  std::string path_;
};

/// Two numeric columns, comma separated, '#' comments and a non-numeric header allowed.
inline std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(const std::filesystem::path& file,
                                                                               const std::string& field) {
  std::ifstream in(file);
  if (!in) Node::fail(field, "cannot open referenced file " + file.string());
  std::vector<double> a, b;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x, y;
    if (!(ss >> x >> y)) {
      if (a.empty()) continue;  // header
      Node::fail(field, file.string() + ":" + std::to_string(lineno) + ": expected two numbers");
    }
    a.push_back(x);
    b.push_back(y);
  }
  return {std::move(a), std::move(b)};
}

inline BandPlan parse_bands(const Node& n) {
  if (n.raw().is_string()) return standard_band_plan(n.string());
  if (!n.raw().is_array()) Node::fail(n.path(), "expected band letters (\"CLU\") or an array of bands");
  BandPlan plan;
  for (std::size_t i = 0; i < n.raw().size(); ++i) {
    Node b(n.raw()[i], n.path() + "[" + std::to_string(i) + "]");
    plan.push_back({b.at("name").string(), b.at("f_low_thz").number(), b.at("f_high_thz").number()});
  }
  return plan;
}

inline AttenuationProfile parse_attenuation(const Node& n, const std::filesystem::path& base) {
  const std::string model = n.string_or("model", "parabolic");
  if (model == "constant") return AttenuationProfile::Constant{db_per_km_to_neper(n.at("db_per_km").number())};
  if (model == "parabolic")
    return AttenuationProfile::Parabolic{db_per_km_to_neper(n.number_or("min_db_per_km", 0.19)),
                                         n.number_or("vertex_thz", 190.5),
                                         db_per_km_to_neper(n.number_or("curvature_db_per_km_per_thz2", 2.5e-4))};
  if (model == "tabulated") {
    if (auto file = n.find("file")) {
      auto [f, a] = read_two_column_csv(base / file->string(), file->path());
      return AttenuationProfile::Tabulated{std::move(f), std::move(a)};
    }
    return AttenuationProfile::Tabulated{n.at("f_thz").numbers(), n.at("db_per_km").numbers()};
  }
  Node::fail(n.path() + ".model", "unknown attenuation model '" + model + "' (constant, parabolic, tabulated)");
}

inline RamanGainModel parse_raman(const Node& n, const std::filesystem::path& base) {
  const double window = n.number_or("window_thz", RamanGainModel::kDefaultWindow);
  double slope;
  if (n.has("slope")) {
    slope = n.at("slope").number();
  } else {
    const double shift = n.number_or("peak_shift_thz", RamanGainModel::kDefaultPeakShift);
    if (!(shift > 0.0)) Node::fail(n.path() + ".peak_shift_thz", "must be positive");
    slope = n.number_or("peak_gain", 0.4) / shift;
  }
  if (auto t = n.find("table")) {
    if (auto file = t->find("file")) {
      auto [s, g] = read_two_column_csv(base / file->string(), file->path());
      return RamanGainModel::tabulated(std::move(s), std::move(g), slope, window);
    }
    return RamanGainModel::tabulated(t->at("shift_thz").numbers(), t->at("gain").numbers(), slope, window);
  }
  return RamanGainModel::triangular(slope, window);
}

inline AmplifierSpec parse_amplifier(const Node& n) {
  AmplifierSpec a;
  const std::string policy = n.string_or("policy", "restore_total_power");
  if (policy == "restore_total_power")
    a.policy = GainPolicy::restore_total_power;
  else if (policy == "restore_band_power")
    a.policy = GainPolicy::restore_band_power;
  else if (policy == "fixed_gain")
    a.policy = GainPolicy::fixed_gain;
  else
    Node::fail(n.path() + ".policy", "unknown gain policy '" + policy + "'");
  a.fixed_gain_db = n.number_or("fixed_gain_db", 0.0);
  if (auto nf = n.find("noise_figure_db")) {
    if (!nf->raw().is_object()) Node::fail(nf->path(), "expected an object mapping band name to dB");
    for (const auto& [band, _] : nf->raw().items()) a.noise_figure_db[band] = nf->at(band.c_str()).number();
  }
  return a;
}

inline std::vector<double> parse_target(const Node& parent, const char* key) {
  if (!parent.has(key)) return {};
  const Node t = parent.at(key);
  if (t.raw().is_string()) {
    if (t.string() != "flat") Node::fail(t.path(), "expected \"flat\" or an array of linear values");
    return {};
  }
  return t.numbers();
}

inline LaunchSpec parse_launch(const Node& n) {
  int modes = n.has("flat_dbm") + n.has("per_channel_dbm") + n.has("preemphasis");
  if (modes != 1)
    Node::fail(n.path(), "exactly one of flat_dbm, per_channel_dbm, preemphasis must be given (found " +
                             std::to_string(modes) + ")");
  if (n.has("flat_dbm")) return FlatLaunch{n.at("flat_dbm").number()};
  if (n.has("per_channel_dbm")) return TableLaunch{n.at("per_channel_dbm").numbers()};
  const Node p = n.at("preemphasis");
  PreemphasisRequest r;
  const std::string mode = p.string_or("mode", "input_total");
  if (mode == "input_total")
    r.mode = PreemphasisMode::input_total;
  else if (mode == "output_absolute")
    r.mode = PreemphasisMode::output_absolute;
  else
    Node::fail(p.path() + ".mode", "expected input_total or output_absolute");
  r.target = parse_target(p, "target");
  r.total_dbm = p.at("total_dbm").number();
  return r;
}

inline SweepAxis parse_axis(const Node& n, SweepAxis fallback) {
  SweepAxis a{n.number_or("lo", fallback.lo), n.number_or("hi", fallback.hi), n.integer_or("count", fallback.count)};
  try {
    a.values();
  } catch (const ConfigError& e) {
    Node::fail(n.path(), e.what());
  }
  return a;
}

inline SolverOptions parse_solver(const Node& n, int& order, GammaRefMode& mode) {
  SolverOptions s;
  s.steps_per_span = n.integer_or("steps_per_span", 50);
  s.photon_correction = n.boolean_or("photon_correction", false);
  const std::string rm = n.string_or("raman_model", "triangular");
  if (rm == "triangular")
    s.raman_model = RamanModelChoice::triangular;
  else if (rm == "tabulated")
    s.raman_model = RamanModelChoice::tabulated;
  else
    Node::fail(n.path() + ".raman_model", "expected triangular or tabulated");
  order = n.integer_or("order", 3);
  if (order < 1) Node::fail(n.path() + ".order", "must be a positive integer");
  const std::string gm = n.string_or("gamma_ref", "fixed_at_span_end");
  if (gm == "fixed_at_span_end")
    mode = GammaRefMode::fixed_at_span_end;
  else if (gm == "per_position")
    mode = GammaRefMode::per_position;
  else
    Node::fail(n.path() + ".gamma_ref", "expected fixed_at_span_end or per_position");
  try {
    s.validate();
  } catch (const ConfigError& e) {
    Node::fail(n.path() + ".steps_per_span", e.what());
  }
  return s;
}

}  // namespace detail

/// Builds a RunConfig from parsed JSON. `base` resolves relative file references.
inline RunConfig parse_config(const json& j, const std::filesystem::path& base = ".") {
  using detail::Node;
  const Node root(j, "");
  if (!j.is_object()) Node::fail("<root>", "expected a JSON object");
  RunConfig c;
  c.scenario = root.string_or("scenario", "scenario");
  c.output_dir = root.string_or("output_dir", "out");

  const Node grid = root.at("grid");
  c.bands = detail::parse_bands(grid.at("bands"));
  c.spacing_thz = grid.number_or("spacing_thz", 0.05);
  c.grid = make_grid(c.bands, c.spacing_thz);

  FiberSpec fiber;
  fiber.attenuation = default_attenuation();
  if (auto f = root.find("fiber")) {
    fiber.length_km = f->number_or("length_km", 100.0);
    if (auto a = f->find("attenuation")) fiber.attenuation = detail::parse_attenuation(*a, base);
    if (auto r = f->find("raman")) fiber.raman = detail::parse_raman(*r, base);
  }
  try {
    fiber.validate();
  } catch (const ConfigError& e) {
    Node::fail("fiber.length_km", e.what());
  }

  std::size_t spans = 1;
  AmplifierSpec amp;
  ReceiverBoost boost;
  if (auto l = root.find("link")) {
    const int s = l->integer_or("spans", 1);
    if (s < 1) Node::fail(l->path() + ".spans", "must be >= 1");
    spans = static_cast<std::size_t>(s);
    if (auto a = l->find("amplifier")) amp = detail::parse_amplifier(*a);
    if (auto b = l->find("receiver_boost")) {
      boost.enabled = b->boolean_or("enabled", true);
      boost.adds_noise = b->boolean_or("adds_noise", false);
      boost.amplifier = b->has("amplifier") ? detail::parse_amplifier(b->at("amplifier")) : amp;
    }
  }
  c.link = LinkSpec::homogeneous(fiber, spans, amp, boost);
  c.link.validate();

  if (auto l = root.find("launch")) {
    c.launch = detail::parse_launch(*l);
    if (const auto* t = std::get_if<TableLaunch>(&*c.launch); t && t->dbm.size() != c.grid->size())
      Node::fail("launch.per_channel_dbm", "has " + std::to_string(t->dbm.size()) + " values for " +
                                               std::to_string(c.grid->size()) + " channels");
    if (const auto* p = std::get_if<PreemphasisRequest>(&*c.launch);
        p && !p->target.empty() && p->target.size() != c.grid->size())
      Node::fail("launch.preemphasis.target", "length does not match the channel count");
  }

  if (auto s = root.find("solver"))
    c.solver = detail::parse_solver(*s, c.order, c.gamma_ref_mode);
  c.longitudinal_samples = root.has("output") ? root.at("output").integer_or("longitudinal_samples", 50) : 50;
  if (c.longitudinal_samples < 1) Node::fail("output.longitudinal_samples", "must be >= 1");

  if (auto o = root.find("osnr")) {
    OsnrSettings s;
    s.target = detail::parse_target(*o, "target");
    if (!s.target.empty() && s.target.size() != c.grid->size())
      Node::fail(o->path() + ".target", "length does not match the channel count");
    s.total_dbm = o->at("total_dbm").number();
    s.options.step = o->number_or("step", 1.0);
    s.options.tolerance = o->number_or("tolerance", 1e-5);
    s.options.max_iterations = o->integer_or("max_iterations", 20);
    s.options.order = c.order;
    const std::string dom = o->string_or("rmse_domain", "linear");
    if (dom == "linear")
      s.options.domain = RmseDomain::linear;
    else if (dom == "db")
      s.options.domain = RmseDomain::db;
    else
      Node::fail(o->path() + ".rmse_domain", "expected linear or db");
    const std::string am = o->string_or("ase_model", "nf_g_minus_one");
    if (am == "nf_g_minus_one")
      s.options.ase.model = AseModel::nf_g_minus_one;
    else if (am == "g_nf_minus_one")
      s.options.ase.model = AseModel::g_nf_minus_one;
    else
      Node::fail(o->path() + ".ase_model", "expected nf_g_minus_one or g_nf_minus_one");
    s.options.ase.reference_bandwidth_thz = o->number_or("reference_bandwidth_thz", 0.0);
    if (!(s.options.step > 0.0)) Node::fail(o->path() + ".step", "must be positive");
    if (s.options.max_iterations < 1) Node::fail(o->path() + ".max_iterations", "must be >= 1");
    c.osnr = std::move(s);
  }

  if (auto s = root.find("sweep")) {
    SweepConfig sc;
    if (auto b = s->find("bands")) {
      if (!b->raw().is_array()) Node::fail(b->path(), "expected an array of band letter strings");
      sc.bands.clear();
      for (std::size_t i = 0; i < b->raw().size(); ++i)
        sc.bands.push_back(Node(b->raw()[i], b->path() + "[" + std::to_string(i) + "]").string());
      for (const auto& name : sc.bands) make_grid(standard_band_plan(name), c.spacing_thz);
    }
    if (auto a = s->find("peak_gain")) sc.peak_gain = detail::parse_axis(*a, sc.peak_gain);
    if (auto a = s->find("launch_dbm")) sc.launch_dbm = detail::parse_axis(*a, sc.launch_dbm);
    if (auto a = s->find("length_km")) sc.length_km = detail::parse_axis(*a, sc.length_km);
    if (auto o = s->find("orders")) {
      sc.orders.clear();
      for (double v : o->numbers()) {
        if (v < 1 || v != std::floor(v)) Node::fail(o->path(), "orders must be positive integers");
        sc.orders.push_back(static_cast<int>(v));
      }
    }
    sc.threads = static_cast<unsigned>(std::max(0, s->integer_or("threads", 0)));
    sc.spacing_thz = c.spacing_thz;
    sc.attenuation = fiber.attenuation;
    sc.solver = c.solver;
    sc.validate();
    c.sweep = std::move(sc);
  }
  return c;
}

/// Reads and parses a config file; syntax errors report line and column.
inline RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(file.string() + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
  }
  RunConfig c = parse_config(j, file.parent_path());
  c.source = file;
  return c;
}

}  // namespace isrs::io
