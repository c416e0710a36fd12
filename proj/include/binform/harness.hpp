#pragma once

// Experiment configuration, growth-law fitting and the verification suites
// driven by the command line tool.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "binform/dirichlet.hpp"
#include "binform/hyperbola.hpp"
#include "binform/lattice.hpp"
#include "binform/volumes.hpp"

namespace binform {

inline constexpr int kCsvVersion = 1;

// ---------------------------------------------------------------------------
// Configuration.

using Coords = std::vector<i64>;  // an element of O_K in power-basis coordinates

struct FormConfig {
  std::string name;
  std::vector<Coords> F, G;  // coefficients from s^deg down to t^deg
  friend bool operator==(const FormConfig&, const FormConfig&) = default;
};

struct TableEntry {
  i64 p = 0;
  int index = 0;
  std::string value;  // "p/q"
  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

struct FConfig {
  std::string builtin = "zero";  // zero | eta | table
  std::vector<TableEntry> table;
  friend bool operator==(const FConfig&, const FConfig&) = default;
};

struct BallConfig {
  std::string norm = "euclidean";  // euclidean | max
  double radius = 1;
  std::vector<double> center;  // empty means the origin
  friend bool operator==(const BallConfig&, const BallConfig&) = default;
};

struct TripletConfig {
  std::vector<BallConfig> balls;
  Coords sigma{1}, tau{0};
  std::vector<Coords> w{{2}};
  bool strong = false;
  friend bool operator==(const TripletConfig&, const TripletConfig&) = default;
};

struct ScheduleConfig {
  double start = 500;
  double ratio = 2;
  int count = 5;
  std::vector<double> grid() const {
    std::vector<double> xs;
    double x = start;
    for (int k = 0; k < count; ++k, x *= ratio) xs.push_back(x);
    return xs;
  }
  friend bool operator==(const ScheduleConfig&, const ScheduleConfig&) = default;
};

struct TruncationConfig {
  i64 prime_bound = 10000;     // Euler products, Hensel and rho checks
  i64 sum_bound = 10000;       // partial Dirichlet sums
  i64 density_bound = 100000;  // prime root density
  friend bool operator==(const TruncationConfig&, const TruncationConfig&) = default;
};

struct ExperimentConfig {
  std::string name;
  Coords minpoly{0, 1};
  std::vector<Coords> r_ideal{{1}};
  std::vector<FormConfig> forms;
  FConfig f;
  TripletConfig triplet;
  ScheduleConfig schedule;
  std::vector<double> check_x{3, 10, 20};  // exact identity checks
  std::vector<std::vector<Coords>> twists{{{1}}, {{3}}, {{7}}};  // ideals c for the twisted sum
  std::map<std::string, bool> suites;
  std::uint64_t seed = kDefaultMcSeed;
  i64 mc_samples = kDefaultMcSamples;
  TruncationConfig truncation;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"core", "hyperbola", "lattice", "lfunc", "volume"};
  return names;
}

namespace detail {

using nlohmann::json;

[[noreturn]] inline void config_error(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

inline void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) config_error(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) config_error("unknown key '" + k + "' in " + where);
  }
}

template <class T>
T get_as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    config_error(where + " has the wrong type");
  }
}

// An element is a coordinate array; a bare integer is shorthand for n * 1.
inline Coords element_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Coords{j.get<i64>()};
  if (!j.is_array() || j.empty()) config_error(where + " must be an integer or a coordinate array");
  return get_as<Coords>(j, where);
}

inline std::vector<Coords> elements_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) config_error(where + " must be an array");
  std::vector<Coords> out;
  for (size_t i = 0; i < j.size(); ++i) out.push_back(element_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline json elements_to_json(const std::vector<Coords>& v) {
  json a = json::array();
  for (const auto& c : v) a.push_back(c);
  return a;
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  using detail::allow_keys;
  using detail::get_as;
  using detail::config_error;
  allow_keys(j, "config", {"name", "field", "r_ideal", "forms", "f", "triplet", "schedule", "check_x", "twists", "suites",
                           "seed", "mc_samples", "truncation"});
  ExperimentConfig c;
  if (j.contains("name")) c.name = get_as<std::string>(j["name"], "name");
  if (!j.contains("field")) config_error("missing 'field'");
  allow_keys(j["field"], "field", {"minpoly"});
  if (!j["field"].contains("minpoly")) config_error("missing 'field.minpoly'");
  c.minpoly = get_as<Coords>(j["field"]["minpoly"], "field.minpoly");
  if (j.contains("r_ideal")) c.r_ideal = detail::elements_from_json(j["r_ideal"], "r_ideal");

  if (!j.contains("forms") || !j["forms"].is_array()) config_error("'forms' must be an array");
  for (size_t i = 0; i < j["forms"].size(); ++i) {
    const auto& fj = j["forms"][i];
    const std::string where = "forms[" + std::to_string(i) + "]";
    allow_keys(fj, where, {"name", "F", "G"});
    if (!fj.contains("F") || !fj.contains("G")) config_error(where + " needs F and G");
    FormConfig fc;
    fc.name = fj.contains("name") ? get_as<std::string>(fj["name"], where + ".name") : "pair" + std::to_string(i);
    fc.F = detail::elements_from_json(fj["F"], where + ".F");
    fc.G = detail::elements_from_json(fj["G"], where + ".G");
    c.forms.push_back(std::move(fc));
  }

  if (j.contains("f")) {
    const auto& fj = j["f"];
    if (fj.is_string()) {
      c.f.builtin = fj.get<std::string>();
    } else {
      allow_keys(fj, "f", {"builtin", "table"});
      if (fj.contains("builtin")) c.f.builtin = get_as<std::string>(fj["builtin"], "f.builtin");
      if (fj.contains("table")) {
        c.f.builtin = "table";
        for (const auto& e : fj["table"]) {
          allow_keys(e, "f.table entry", {"p", "index", "value"});
          TableEntry t;
          t.p = get_as<i64>(e.at("p"), "f.table.p");
          t.index = e.contains("index") ? get_as<int>(e["index"], "f.table.index") : 0;
          t.value = e.at("value").is_string() ? e["value"].get<std::string>() : std::to_string(get_as<i64>(e["value"], "f.table.value"));
          c.f.table.push_back(std::move(t));
        }
      }
    }
    if (c.f.builtin != "zero" && c.f.builtin != "eta" && c.f.builtin != "table")
      config_error("unknown f builtin '" + c.f.builtin + "'");
  }

  if (!j.contains("triplet")) config_error("missing 'triplet'");
  {
    const auto& tj = j["triplet"];
    allow_keys(tj, "triplet", {"balls", "sigma", "tau", "w", "strong"});
    if (!tj.contains("balls") || !tj["balls"].is_array()) config_error("'triplet.balls' must be an array");
    for (const auto& bj : tj["balls"]) {
      allow_keys(bj, "ball", {"norm", "radius", "center"});
      BallConfig b;
      if (bj.contains("norm")) b.norm = get_as<std::string>(bj["norm"], "ball.norm");
      if (b.norm != "euclidean" && b.norm != "max") config_error("ball norm must be 'euclidean' or 'max'");
      if (bj.contains("radius")) b.radius = get_as<double>(bj["radius"], "ball.radius");
      if (bj.contains("center")) b.center = get_as<std::vector<double>>(bj["center"], "ball.center");
      c.triplet.balls.push_back(std::move(b));
    }
    if (tj.contains("sigma")) c.triplet.sigma = detail::element_from_json(tj["sigma"], "triplet.sigma");
    if (tj.contains("tau")) c.triplet.tau = detail::element_from_json(tj["tau"], "triplet.tau");
    if (tj.contains("w")) c.triplet.w = detail::elements_from_json(tj["w"], "triplet.w");
    if (tj.contains("strong")) c.triplet.strong = get_as<bool>(tj["strong"], "triplet.strong");
  }

  if (j.contains("schedule")) {
    const auto& sj = j["schedule"];
    allow_keys(sj, "schedule", {"start", "ratio", "count"});
    if (sj.contains("start")) c.schedule.start = get_as<double>(sj["start"], "schedule.start");
    if (sj.contains("ratio")) c.schedule.ratio = get_as<double>(sj["ratio"], "schedule.ratio");
    if (sj.contains("count")) c.schedule.count = get_as<int>(sj["count"], "schedule.count");
    if (!(c.schedule.start >= 1) || !(c.schedule.ratio > 1) || c.schedule.count < 1)
      config_error("schedule needs start >= 1, ratio > 1 and count >= 1");
  }
  if (j.contains("check_x")) c.check_x = get_as<std::vector<double>>(j["check_x"], "check_x");
  if (j.contains("twists")) {
    c.twists.clear();
    for (size_t i = 0; i < j["twists"].size(); ++i)
      c.twists.push_back(detail::elements_from_json(j["twists"][i], "twists[" + std::to_string(i) + "]"));
  }
  if (j.contains("suites")) {
    for (const auto& [k, v] : j["suites"].items()) {
      if (std::find(suite_names().begin(), suite_names().end(), k) == suite_names().end())
        config_error("unknown suite '" + k + "'");
      c.suites[k] = get_as<bool>(v, "suites." + k);
    }
  }
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("mc_samples")) c.mc_samples = get_as<i64>(j["mc_samples"], "mc_samples");
  if (j.contains("truncation")) {
    const auto& tj = j["truncation"];
    allow_keys(tj, "truncation", {"prime_bound", "sum_bound", "density_bound"});
    if (tj.contains("prime_bound")) c.truncation.prime_bound = get_as<i64>(tj["prime_bound"], "truncation.prime_bound");
    if (tj.contains("sum_bound")) c.truncation.sum_bound = get_as<i64>(tj["sum_bound"], "truncation.sum_bound");
    if (tj.contains("density_bound")) c.truncation.density_bound = get_as<i64>(tj["density_bound"], "truncation.density_bound");
  }
  return c;
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  json j;
  j["name"] = c.name;
  j["field"] = {{"minpoly", c.minpoly}};
  j["r_ideal"] = detail::elements_to_json(c.r_ideal);
  j["forms"] = json::array();
  for (const auto& f : c.forms)
    j["forms"].push_back({{"name", f.name}, {"F", detail::elements_to_json(f.F)}, {"G", detail::elements_to_json(f.G)}});
  json fj = {{"builtin", c.f.builtin}};
  if (!c.f.table.empty()) {
    fj["table"] = json::array();
    for (const auto& e : c.f.table) fj["table"].push_back({{"p", e.p}, {"index", e.index}, {"value", e.value}});
  }
  j["f"] = fj;
  json balls = json::array();
  for (const auto& b : c.triplet.balls) balls.push_back({{"norm", b.norm}, {"radius", b.radius}, {"center", b.center}});
  j["triplet"] = {{"balls", balls},
                  {"sigma", c.triplet.sigma},
                  {"tau", c.triplet.tau},
                  {"w", detail::elements_to_json(c.triplet.w)},
                  {"strong", c.triplet.strong}};
  j["schedule"] = {{"start", c.schedule.start}, {"ratio", c.schedule.ratio}, {"count", c.schedule.count}};
  j["check_x"] = c.check_x;
  j["twists"] = json::array();
  for (const auto& t : c.twists) j["twists"].push_back(detail::elements_to_json(t));
  j["suites"] = json::object();
  for (const auto& [k, v] : c.suites) j["suites"][k] = v;
  j["seed"] = c.seed;
  j["mc_samples"] = c.mc_samples;
  j["truncation"] = {{"prime_bound", c.truncation.prime_bound},
                     {"sum_bound", c.truncation.sum_bound},
                     {"density_bound", c.truncation.density_bound}};
  return j;
}

inline ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("malformed JSON: ") + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string serialize_config(const ExperimentConfig& c) { return config_to_json(c).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Building the objects a configuration describes.

namespace detail {

inline FieldElement to_element(const NumberField& K, const Coords& c, const std::string& where = "element") {
  if (static_cast<int>(c.size()) > K.degree()) config_error(where + " has more coordinates than the field degree");
  Coords padded(K.degree(), 0);
  std::copy(c.begin(), c.end(), padded.begin());
  return FieldElement::from_coords(padded);
}

inline std::vector<FieldElement> to_elements(const NumberField& K, const std::vector<Coords>& v) {
  std::vector<FieldElement> out;
  for (const auto& c : v) out.push_back(to_element(K, c));
  return out;
}

inline BinaryForm to_form(const NumberField& K, const std::vector<Coords>& coeffs, const std::string& where) {
  if (coeffs.empty()) config_error(where + " has no coefficients");
  BinaryForm F;
  for (const auto& c : coeffs) F.coeffs.push_back(to_element(K, c, where));
  return F;
}

inline Ideal to_ideal(const NumberField& K, const std::vector<Coords>& gens, const std::string& where) {
  if (gens.empty()) config_error(where + " needs at least one generator");
  Ideal a = ideal_from_generators(K, to_elements(K, gens));
  if (a.norm() == 0) config_error(where + " is the zero ideal");
  return a;
}

}  // namespace detail

struct Experiment {
  ExperimentConfig config;
  NumberField K;
  FormSystem S;
  MultiplicativeSpec f;
  Triplet T;

  int pair_index(const std::string& key) const {
    for (int i = 0; i < S.size(); ++i)
      if (S.pair(i).name == key) return i;
    try {
      size_t used = 0;
      int i = std::stoi(key, &used);
      if (used == key.size() && i >= 0 && i < S.size()) return i;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::ConfigInvalid, "no form pair named '" + key + "'");
  }
  Factorization twist(size_t k) const {
    return factor_ideal(K, ideal_from_generators(K, detail::to_elements(K, config.twists.at(k))));
  }
};

inline Experiment build_experiment(const ExperimentConfig& c) {
  auto K = NumberField::create(c.minpoly);
  std::vector<FormPair> pairs;
  for (const auto& fc : c.forms) {
    for (const auto& other : pairs)
      if (other.name == fc.name) throw Error(ErrorCode::ConfigInvalid, "duplicate pair name '" + fc.name + "'");
    pairs.push_back({fc.name, detail::to_form(K, fc.F, fc.name + ".F"), detail::to_form(K, fc.G, fc.name + ".G")});
  }
  auto S = FormSystem::create(K, std::move(pairs));

  MultiplicativeSpec f = MultiplicativeSpec::zero();
  if (c.f.builtin == "eta") {
    f = MultiplicativeSpec::eta();
  } else if (c.f.builtin == "table") {
    std::map<MultiplicativeSpec::Key, Rational> entries;
    for (const auto& e : c.f.table) {
      Rational v;
      try {
        v = parse_rational(e.value);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigInvalid, "bad rational '" + e.value + "'");
      }
      entries[{e.p, e.index}] = v;
    }
    f = MultiplicativeSpec::table(std::move(entries), K);
  }

  std::vector<PlaceBall> balls;
  for (const auto& b : c.triplet.balls)
    balls.push_back({b.norm == "max" ? BallNorm::Max : BallNorm::Euclidean, b.radius, b.center});
  auto T = Triplet::create(K, std::move(balls), detail::to_element(K, c.triplet.sigma, "triplet.sigma"),
                           detail::to_element(K, c.triplet.tau, "triplet.tau"), detail::to_ideal(K, c.triplet.w, "triplet.w"),
                           detail::to_ideal(K, c.r_ideal, "r_ideal"), c.triplet.strong);
  for (size_t k = 0; k < c.twists.size(); ++k) detail::to_ideal(K, c.twists[k], "twists[" + std::to_string(k) + "]");
  return Experiment{c, K, S, f, T};
}

// ---------------------------------------------------------------------------
// Sums and growth fits.

struct SumRow {
  double X = 0;
  Rational D;
  double elapsed_ms = 0;
  double scaled() const { return D.get_d() / (X * X); }
};

// D(X) over a schedule from one enumeration; throws AdmissibilityFailed
// unless the triplet is admissible on every point summed.
inline std::vector<SumRow> run_sums(const Experiment& e, const std::vector<double>& xs, int jobs = 1) {
  SumOptions opt;
  opt.jobs = jobs;
  const auto t0 = std::chrono::steady_clock::now();
  auto r = divisor_sums(e.S, e.f, e.T, xs, opt);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (!r.admissibility.ok(e.T.strong()))
    throw Error(ErrorCode::AdmissibilityFailed,
                r.admissibility.failure + " (checked up to X = " + std::to_string(r.admissibility.verified_x) + ")");
  std::vector<SumRow> rows;
  for (size_t k = 0; k < xs.size(); ++k) rows.push_back({xs[k], r.sums[k], ms});
  return rows;
}

struct GrowthFit {
  double rho_hat = 0;
  double c_hat = 0;
  std::vector<double> residuals;
};

// Least squares of log D - 2 log X against log log X.
inline GrowthFit fit_growth(const std::vector<double>& xs, const std::vector<double>& ds) {
  if (xs.size() != ds.size()) throw Error(ErrorCode::PreconditionFailed, "grid and values differ in length");
  if (xs.size() < 4) throw Error(ErrorCode::ScheduleTooShort, "need at least 4 grid points, got " + std::to_string(xs.size()));
  const size_t n = xs.size();
  std::vector<double> u(n), y(n);
  for (size_t k = 0; k < n; ++k) {
    if (!(xs[k] > std::numbers::e) || !(ds[k] > 0))
      throw Error(ErrorCode::DomainError, "fit needs X > e and D(X) > 0");
    u[k] = std::log(std::log(xs[k]));
    y[k] = std::log(ds[k]) - 2 * std::log(xs[k]);
  }
  double mu = 0, my = 0;
  for (size_t k = 0; k < n; ++k) {
    mu += u[k];
    my += y[k];
  }
  mu /= n;
  my /= n;
  double suu = 0, suy = 0;
  for (size_t k = 0; k < n; ++k) {
    suu += (u[k] - mu) * (u[k] - mu);
    suy += (u[k] - mu) * (y[k] - my);
  }
  if (suu == 0) throw Error(ErrorCode::ScheduleTooShort, "grid points coincide");
  GrowthFit g;
  g.rho_hat = suy / suu;
  const double intercept = my - g.rho_hat * mu;
  g.c_hat = std::exp(intercept);
  for (size_t k = 0; k < n; ++k) g.residuals.push_back(y[k] - intercept - g.rho_hat * u[k]);
  return g;
}

inline constexpr double kGrowthTolerance = 0.3;

struct GrowthReport {
  std::vector<SumRow> grid;
  GrowthFit fit;
  int declared_rank = 0;
  bool probabilistic_rank = false;
  double deviation() const { return std::fabs(fit.rho_hat - declared_rank); }
  bool verdict() const { return deviation() <= kGrowthTolerance; }
  GrowthFit refit() const {
    std::vector<double> xs, ds;
    for (const auto& r : grid) {
      xs.push_back(r.X);
      ds.push_back(r.D.get_d());
    }
    return fit_growth(xs, ds);
  }
};

inline GrowthReport run_fit(const Experiment& e, std::vector<double> xs, int jobs = 1) {
  if (xs.size() < 4) throw Error(ErrorCode::ScheduleTooShort, "need at least 4 grid points, got " + std::to_string(xs.size()));
  GrowthReport rep;
  rep.grid = run_sums(e, xs, jobs);
  rep.declared_rank = e.S.rank();
  rep.probabilistic_rank = e.S.probabilistic();
  rep.fit = rep.refit();
  return rep;
}

// ---------------------------------------------------------------------------
// CSV output.

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), width_(header.size()) { row(header); }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw Error(ErrorCode::PreconditionFailed, "CSV row has the wrong width");
    for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << detail::csv_field(cells[i]);
    out_ << '\n';
  }

 private:
  std::ostream& out_;
  size_t width_;
};

inline void write_sum_csv(std::ostream& out, const std::vector<SumRow>& rows, bool timing = true) {
  CsvWriter csv(out, {"X", "D_exact", "D_over_X2", "elapsed_ms"});
  for (const auto& r : rows)
    csv.row({detail::fmt(r.X), to_pq(r.D), detail::fmt(r.scaled()), timing ? detail::fmt(std::round(r.elapsed_ms)) : "0"});
}

inline void write_fit_csv(std::ostream& out, const GrowthReport& rep) {
  CsvWriter csv(out, {"kind", "X", "D_exact", "log_D_minus_2log_X", "residual"});
  for (size_t k = 0; k < rep.grid.size(); ++k) {
    const auto& r = rep.grid[k];
    csv.row({"grid", detail::fmt(r.X), to_pq(r.D), detail::fmt(std::log(r.D.get_d()) - 2 * std::log(r.X)),
             detail::fmt(rep.fit.residuals[k])});
  }
  csv.row({"rho_hat", "", "", detail::fmt(rep.fit.rho_hat), ""});
  csv.row({"c_hat", "", "", detail::fmt(rep.fit.c_hat), ""});
  csv.row({"declared_rank", "", "", std::to_string(rep.declared_rank), rep.probabilistic_rank ? "probabilistic" : "deterministic"});
  csv.row({"verdict", "", "", detail::fmt(rep.deviation()), rep.verdict() ? "PASS" : "FAIL"});
}

inline void write_rank_csv(std::ostream& out, const FormSystem& S) {
  CsvWriter csv(out, {"pair", "name", "deg_F", "deg_G", "verdict", "square_class", "provenance"});
  for (int i = 0; i < S.size(); ++i) {
    const auto& v = S.verdict(i);
    csv.row({std::to_string(i), S.pair(i).name, std::to_string(S.pair(i).F.degree()), std::to_string(S.pair(i).G.degree()),
             v.describe(), v.counts_as_square() ? "1" : "0",
             v.kind == SquareClassVerdict::Kind::ProbablySquare ? "probabilistic" : "deterministic"});
  }
  csv.row({"rank", "", "", "", std::to_string(S.rank()), "", S.probabilistic() ? "probabilistic" : "deterministic"});
  csv.row({"complexity", "", "", "", std::to_string(S.complexity()), "", ""});
}

inline void write_rho_csv(std::ostream& out, const std::vector<RhoRow>& rows) {
  CsvWriter csv(out, {"p", "index", "norm", "in_w", "plus", "minus", "zero", "rho"});
  for (const auto& r : rows)
    csv.row({std::to_string(r.p), std::to_string(r.index), std::to_string(r.norm), r.in_w ? "1" : "0",
             std::to_string(r.symbols.plus), std::to_string(r.symbols.minus), std::to_string(r.symbols.zero),
             std::to_string(r.rho)});
}

// ---------------------------------------------------------------------------
// Verification suites.

struct CheckRow {
  std::string suite, check;
  bool passed = true;
  std::string detail;
  CheckRow(std::string s, std::string c, bool ok = true, std::string d = {})
      : suite(std::move(s)), check(std::move(c)), passed(ok), detail(std::move(d)) {}
};

struct VerifyOptions {
  int jobs = 1;
  std::uint64_t seed = kDefaultMcSeed;
  i64 mc_samples = kDefaultMcSamples;
};

namespace detail {

inline std::string describe_point(const std::optional<Point>& p) {
  if (!p) return "";
  std::ostringstream os;
  os << "(s, t) = ([";
  for (int i = 0; i < kMaxDegree; ++i) os << (i ? " " : "") << p->s.c[i];
  os << "], [";
  for (int i = 0; i < kMaxDegree; ++i) os << (i ? " " : "") << p->t.c[i];
  os << "])";
  return os.str();
}

inline Rational psi_sum(const HyperbolaContext& ctx, bool lattice, int jobs) {
  Rational s = 0;
  for (const auto& psi : PsiVector::all(ctx.size())) s += lattice ? S_psi_lattice(ctx, psi, jobs) : S_psi_direct(ctx, psi);
  return s;
}

inline std::vector<Factorization> ideals_up_to(const NumberField& K, i64 B) {
  std::vector<Factorization> out;
  for_each_ideal(primes_up_to_norm(K, B), B, [&](const Factorization& a, i64) { out.push_back(a); });
  return out;
}

inline std::vector<CheckRow> core_suite(const Experiment& e, const VerifyOptions&) {
  std::vector<CheckRow> rows;
  const auto& K = e.K;
  {
    CheckRow r{"core", "factorization_round_trip"};
    i64 n = 0;
    for (const auto& a : enumerate_ideals(K, 300)) {
      auto fac = factor_ideal(K, a);
      ++n;
      if (!(ideal_from_factorization(K, fac) == a) || fac.norm() != a.norm()) {
        r.passed = false;
        r.detail = "ideal of norm " + std::to_string(a.norm()) + " does not rebuild";
        break;
      }
    }
    if (r.passed) r.detail = std::to_string(n) + " ideals of norm <= 300";
    rows.push_back(r);
  }
  {
    CheckRow r{"core", "jacobi_multiplicative"};
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<i64> u(-50, 50);
    auto odd = detail::ideals_up_to(K, 150);
    std::erase_if(odd, [](const Factorization& a) {
      for (const auto& [P, k] : a.parts)
        if (P->p == 2) return true;
      return false;
    });
    int checked = 0;
    for (int trial = 0; trial < 400 && r.passed; ++trial) {
      const auto& a = odd[rng() % odd.size()];
      const auto& b = odd[rng() % odd.size()];
      Coords c(K.degree());
      for (auto& x : c) x = u(rng);
      FieldElement x = FieldElement::from_coords(c);
      if (jacobi(K, x, fac_mul(a, b)) != jacobi(K, x, a) * jacobi(K, x, b)) {
        r.passed = false;
        r.detail = "symbol not multiplicative in the modulus";
      }
      ++checked;
    }
    if (r.passed) r.detail = std::to_string(checked) + " random (x, a, b)";
    rows.push_back(r);
  }
  {
    CheckRow r{"core", "rank_and_complexity"};
    r.detail = "rank " + std::to_string(e.S.rank()) + ", complexity " + std::to_string(e.S.complexity()) +
               (e.S.probabilistic() ? " (probabilistic)" : " (deterministic)");
    rows.push_back(r);
  }
  const double xmax = e.config.check_x.empty() ? 10 : *std::max_element(e.config.check_x.begin(), e.config.check_x.end());
  {
    CheckRow r{"core", "admissibility"};
    auto rep = e.T.strong() ? check_strongly_admissible(e.S, e.T, xmax) : check_admissible(e.S, e.T, xmax);
    r.passed = rep.ok(e.T.strong());
    r.detail = r.passed ? std::to_string(rep.points_checked) + " points up to X = " + fmt(xmax)
                        : rep.failure + " " + describe_point(rep.point);
    rows.push_back(r);
  }
  for (int k : {2, 3}) {
    CheckRow r{"core", "thinning_k" + std::to_string(k)};
    auto rep = thinning_compare(e.S, e.f, e.T, k, xmax);
    r.passed = rep.ok();
    r.detail = "D = " + to_pq(rep.d_base) + ", D_thin = " + to_pq(rep.d_thin);
    rows.push_back(r);
  }
  for (int i = 0; i < e.S.size(); ++i) {
    if (!e.S.verdict(i).counts_as_square()) continue;
    CheckRow r{"core", "jacobi_trivial_" + e.S.pair(i).name};
    auto rep = jacobi_trivial_check(e.S, e.T, xmax, i);
    r.passed = rep.ok;
    r.detail = rep.ok ? std::to_string(rep.points_checked) + " points"
                      : "symbol differs at " + describe_point(rep.point) + " above p = " + std::to_string(rep.offending_prime);
    rows.push_back(r);
  }
  return rows;
}

inline std::vector<CheckRow> hyperbola_suite(const Experiment& e, const VerifyOptions& opt) {
  std::vector<CheckRow> rows;
  for (double X : e.config.check_x) {
    CheckRow r{"hyperbola", "psi_sums_X" + fmt(X)};
    auto ctx = make_context(e.S, e.f, e.T, X);
    Rational brute = divisor_sum_bruteforce(e.S, e.f, e.T, X);
    Rational direct = psi_sum(ctx, false, opt.jobs);
    r.passed = direct == brute;
    r.detail = "bruteforce " + to_pq(brute) + ", direct " + to_pq(direct);
    if (ctx.lattice_ready()) {
      Rational lat = psi_sum(ctx, true, opt.jobs);
      r.passed = r.passed && lat == brute;
      r.detail += ", lattice " + to_pq(lat);
    } else {
      r.detail += ", lattice route not applicable";
    }
    rows.push_back(r);
  }
  return rows;
}

inline FieldElement random_element(const NumberField& K, std::mt19937_64& rng, i64 bound) {
  std::uniform_int_distribution<i64> u(-bound, bound);
  Coords c(K.degree());
  for (auto& x : c) x = u(rng);
  return FieldElement::from_coords(c);
}

inline std::vector<CheckRow> lattice_suite(const Experiment& e, const VerifyOptions& opt) {
  std::vector<CheckRow> rows;
  const auto& K = e.K;
  const int n = 2 * K.degree();
  std::mt19937_64 rng(opt.seed);
  {
    CheckRow r{"lattice", "minkowski_bounds"};
    const double vb = std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1);
    int tested = 0;
    while (tested < 100 && r.passed) {
      FieldElement a = random_element(K, rng, 5), d = random_element(K, rng, 5), g = random_element(K, rng, 5);
      if (a.is_zero() || d.is_zero()) continue;
      auto L = CongruenceLattice::create(K, principal_ideal(K, a), principal_ideal(K, d), g);
      if (L.determinant() > 1e6) continue;
      ++tested;
      auto mv = successive_minima(L);
      double prod = 1;
      for (double v : mv.values) prod *= v;
      const double det = L.determinant();
      const bool first = std::pow(mv.values[0], n) * vb <= std::pow(2.0, n) * det * (1 + 1e-9);
      const bool lower = std::pow(2.0, n) * det / std::tgamma(n + 1.0) <= vb * prod * (1 + 1e-9);
      const bool upper = vb * prod <= std::pow(2.0, n) * det * (1 + 1e-9);
      if (!(first && lower && upper)) {
        r.passed = false;
        r.detail = "bound fails for a lattice of determinant " + fmt(det);
      }
    }
    if (r.passed) r.detail = std::to_string(tested) + " random lattices";
    rows.push_back(r);
  }
  {
    CheckRow r{"lattice", "sublattice_minima_monotone"};
    int tested = 0;
    while (tested < 30 && r.passed) {
      FieldElement a = random_element(K, rng, 3), d = random_element(K, rng, 3), b = random_element(K, rng, 3);
      if (a.is_zero() || d.is_zero() || b.is_zero()) continue;
      Ideal A = principal_ideal(K, a), D = principal_ideal(K, d), B = principal_ideal(K, b);
      if (A.norm() * A.norm() * D.norm() * B.norm() > 200000) continue;
      ++tested;
      if (!minima_inequality_report(K, A, D, B, random_element(K, rng, 3)).monotone) {
        r.passed = false;
        r.detail = "refined lattice has a smaller minimum";
      }
    }
    if (r.passed) r.detail = std::to_string(tested) + " random (a, d, b)";
    rows.push_back(r);
  }
  {
    CheckRow r{"lattice", "count_vs_main_term"};
    auto L = CongruenceLattice::create(K, unit_ideal(K), rational_ideal(K, 7), FieldElement::from_int(3));
    const double base = K.degree() == 1 ? 20 : 4;
    std::ostringstream os;
    double ratio = 0;
    for (double t : {1.0, 2.0, 4.0, 8.0}) {
      auto R = Region::ball(std::vector<double>(n, 0.0), base * t);
      ratio = static_cast<double>(count_points(L, R)) / main_term(L, R);
      os << (t > 1 ? " " : "") << fmt(ratio);
    }
    r.passed = std::fabs(ratio - 1) <= 0.05;
    r.detail = "count / main term: " + os.str();
    rows.push_back(r);
  }
  return rows;
}

inline std::vector<CheckRow> lfunc_suite(const Experiment& e, const VerifyOptions& opt) {
  std::vector<CheckRow> rows;
  const auto& K = e.K;
  const auto& w = e.T.w_factorization();
  const i64 PB = e.config.truncation.prime_bound;
  auto ideals = ideals_up_to(K, 200);
  for (int i = 0; i < e.S.size(); ++i) {
    const auto& pr = e.S.pair(i);
    const std::string tag = "_" + pr.name;
    {
      CheckRow r{"lfunc", "multiplicative" + tag};
      std::map<std::vector<std::tuple<i64, int, int>>, std::pair<i64, i64>> value;
      for (const auto& a : ideals) value[fac_key(a)] = {tau_F(K, pr.F, a), rho_FG(K, pr.F, pr.G, a, w)};
      int checked = 0;
      for (const auto& a : ideals)
        for (const auto& b : ideals) {
          if (a.is_unit() || b.is_unit() || a.norm() * b.norm() > 200 || !fac_coprime(a, b)) continue;
          auto [ta, ra] = value[fac_key(a)];
          auto [tb, rb] = value[fac_key(b)];
          auto [tab, rab] = value[fac_key(fac_mul(a, b))];
          ++checked;
          if ((tab != ta * tb || rab != ra * rb) && r.passed) {
            r.passed = false;
            r.detail = "fails at norms " + std::to_string(a.norm()) + " and " + std::to_string(b.norm());
          }
        }
      if (r.passed) r.detail = std::to_string(checked) + " coprime pairs of norm product <= 200";
      rows.push_back(r);
    }
    {
      CheckRow r{"lfunc", "rho_prime_bound" + tag};
      i64 worst = 0;
      for (const auto& row : rho_table(K, pr.F, pr.G, w, PB, opt.jobs)) worst = std::max(worst, iabs(row.rho));
      r.passed = worst <= pr.F.degree();
      r.detail = "max |rho(P)| = " + std::to_string(worst) + " for N P <= " + std::to_string(PB);
      rows.push_back(r);
    }
    {
      CheckRow r{"lfunc", "hensel" + tag};
      i64 admissible = 0;
      for (const auto& P : primes_up_to_norm(K, PB)) {
        for (int k = 1; checked_pow(P->norm, k) <= PB; ++k) {
          auto h = hensel_consistency(K, pr.F, pr.G, *P, k, w);
          if (!h.admissible) continue;
          ++admissible;
          if (!h.consistent() && r.passed) {
            r.passed = false;
            r.detail = "mismatch at norm " + std::to_string(P->norm) + "^" + std::to_string(k);
          }
        }
      }
      if (r.passed) r.detail = std::to_string(admissible) + " admissible prime powers";
      rows.push_back(r);
    }
    if (!e.S.verdict(i).counts_as_square()) {
      auto series = CoefficientSeries::rho(K, pr.F, pr.G, w);
      for (size_t k = 0; k < e.config.twists.size(); ++k) {
        auto c = e.twist(k);
        CheckRow r{"lfunc", "twisted_sum" + tag + "_c" + std::to_string(c.norm())};
        auto rep = twisted_sum_check(series, e.f, c, e.config.truncation.sum_bound, PB, opt.jobs);
        r.passed = rep.deviation <= 0.05;
        r.detail = "lhs " + fmt(rep.lhs) + ", rhs " + fmt(rep.rhs) + ", deviation " + fmt(rep.deviation);
        rows.push_back(r);
      }
    }
  }
  std::vector<BinaryForm> seen;
  for (int i = 0; i < e.S.size(); ++i) {
    const auto& F = e.S.pair(i).F;
    if (std::find(seen.begin(), seen.end(), F) != seen.end() || F.leading().is_zero()) continue;
    seen.push_back(F);
    CheckRow r{"lfunc", "prime_root_density_" + e.S.pair(i).name};
    auto d = prime_root_density(K, F, e.config.truncation.density_bound, opt.jobs);
    r.passed = std::fabs(d.deviation()) <= 3;
    r.detail = "sum - log X = " + fmt(d.deviation()) + " over " + std::to_string(d.primes) + " primes";
    rows.push_back(r);
  }
  return rows;
}

inline std::vector<CheckRow> volume_suite(const Experiment& e, const VerifyOptions& opt) {
  std::vector<CheckRow> rows;
  {
    CheckRow r{"volume", "polylog_recursion"};
    for (int q = 1; q <= 6; ++q) r.passed = r.passed && PolyLog::P(q).next() == PolyLog::P(q + 1);
    r.detail = "q <= 6";
    rows.push_back(r);
  }
  {
    CheckRow r{"volume", "iq_closed_vs_quadrature"};
    double worst = std::fabs(I_q(2, std::numbers::e) - 1);
    r.passed = worst <= 1e-9;
    double rel = 0;
    for (int q = 1; q <= 4; ++q)
      for (double T : {1.5, 10.0, 100.0, 1000.0}) rel = std::max(rel, std::fabs(I_q_quadrature(q, T) / I_q(q, T) - 1));
    r.passed = r.passed && rel <= 1e-6;
    r.detail = "|I_2(e) - 1| = " + fmt(worst) + ", max relative gap " + fmt(rel);
    rows.push_back(r);
  }
  auto tech = [&](const std::string& name, const TechnicalRegion& tr) {
    CheckRow r{"volume", name};
    auto rep = technical_volume_check(tr, opt.mc_samples, opt.seed, opt.jobs);
    r.passed = rep.ok();
    r.detail = "mc " + fmt(rep.mc.estimate) + " +- " + fmt(rep.mc.stderr_) + ", reference " + fmt(rep.reference) + ", " +
               fmt(rep.sigmas) + " sigma";
    rows.push_back(r);
  };
  tech("dstar_s", dstar_s(e.K, 20));
  for (int i = 0; i < e.S.size(); ++i) {
    try {
      auto tr = dstar_i(e.K, e.S.pair(i).F, 20);
      tech("dstar_i_" + e.S.pair(i).name, tr);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::InfiniteLocalVolume && err.code() != ErrorCode::Unsupported) throw;
      rows.push_back({"volume", "dstar_i_" + e.S.pair(i).name, true, "skipped: " + std::string(err.what())});
    }
  }
  if (e.S.size() > 0 && !e.config.check_x.empty()) {
    auto ctx = make_context(e.S, e.f, e.T, e.config.check_x.front());
    for (const auto& psi : PsiVector::all(e.S.size())) {
      for (int i = 0; i < e.S.size(); ++i) {
        CheckRow r{"volume", "omega_monotone_psi" + psi.str() + "_i" + std::to_string(i)};
        std::vector<double> base(e.S.size(), 0.0);
        auto rep = omega_monotonicity_check(ctx, psi, i, {0, 0.5, 1, 2, 4}, base, std::min<i64>(opt.mc_samples, 200000),
                                            opt.seed, opt.jobs);
        r.passed = rep.monotone;
        std::ostringstream os;
        for (const auto& est : rep.estimates) os << (os.tellp() ? " " : "") << est.hits;
        r.detail = "hits " + os.str();
        rows.push_back(r);
      }
    }
  }
  return rows;
}

}  // namespace detail

inline bool known_suite(const std::string& s) {
  return s == "all" || std::find(suite_names().begin(), suite_names().end(), s) != suite_names().end();
}

// Runs one suite, or every suite enabled in the config for "all" (all of
// them when the config has no toggles).
inline std::vector<CheckRow> run_suite(const Experiment& e, const std::string& suite, const VerifyOptions& opt) {
  if (!known_suite(suite)) throw Error(ErrorCode::ConfigInvalid, "unknown suite '" + suite + "'");
  std::vector<std::string> todo;
  if (suite == "all") {
    for (const auto& s : suite_names()) {
      auto it = e.config.suites.find(s);
      if (it == e.config.suites.end() || it->second) todo.push_back(s);
    }
  } else {
    todo.push_back(suite);
  }
  std::vector<CheckRow> rows;
  for (const auto& s : todo) {
    std::vector<CheckRow> part;
    try {
      if (s == "core") part = detail::core_suite(e, opt);
      if (s == "hyperbola") part = detail::hyperbola_suite(e, opt);
      if (s == "lattice") part = detail::lattice_suite(e, opt);
      if (s == "lfunc") part = detail::lfunc_suite(e, opt);
      if (s == "volume") part = detail::volume_suite(e, opt);
    } catch (const Error& err) {
      part.push_back({s, "error", false, err.what()});
    }
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

inline void write_check_csv(std::ostream& out, const std::vector<CheckRow>& rows) {
  CsvWriter csv(out, {"suite", "check", "status", "detail"});
  for (const auto& r : rows) csv.row({r.suite, r.check, r.passed ? "PASS" : "FAIL", r.detail});
}

}  // namespace binform
