// Copyright 2026 The phidiv Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The phidiv command-line tool. Everything lives in this header so tests can
// drive run_cli() in-process.

#ifndef PHIDIV_TOOLS_CLI_HPP_
#define PHIDIV_TOOLS_CLI_HPP_

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "phidiv/boundary.hpp"
#include "phidiv/cache.hpp"
#include "phidiv/experiments.hpp"
#include "phidiv/models.hpp"
#include "phidiv/nulldist.hpp"

namespace phidiv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

inline constexpr const char* kAdvisory = "advisory (slow convergence)";
inline constexpr const char* kDefaultSNote =
    "note: s defaults to 2 (higher criticism). No single s is best against every "
    "alternative; pass --s to choose another member of the family.";

// ---------------------------------------------------------------------------
// Parsing helpers

inline std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

inline std::optional<double> parse_double(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = t.data();
  if (*begin == '+') ++begin;
  const auto res = std::from_chars(begin, t.data() + t.size(), value);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

inline double require_double(std::string_view text, const std::string& what) {
  const auto v = parse_double(text);
  if (!v) throw DomainError(what + ": '" + std::string(text) + "' is not a number");
  return *v;
}

// Accepts plain integers and exact forms like 1e5.
inline std::uint64_t require_count(std::string_view text, const std::string& what) {
  const double v = require_double(text, what);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) {
    throw DomainError(what + ": '" + std::string(text) + "' is not a non-negative integer");
  }
  return static_cast<std::uint64_t>(v);
}

// "a,b,c" or "lo:hi:step" (both ends included).
inline std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw DomainError(what + ": ranges are written lo:hi:step");
    const double lo = require_double(parts[0], what);
    const double hi = require_double(parts[1], what);
    const double step = require_double(parts[2], what);
    if (!(step > 0.0) || !(lo <= hi)) throw DomainError(what + ": need lo <= hi and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (count > 1000000) throw DomainError(what + ": range has too many points");
    for (std::size_t k = 0; k < count; ++k) out.push_back(lo + static_cast<double>(k) * step);
    return out;
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(require_double(p, what));
  if (out.empty()) throw DomainError(what + ": empty list");
  return out;
}

inline std::vector<std::uint64_t> parse_count_list(const std::string& text,
                                                   const std::string& what) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(require_count(p, what));
  if (out.empty()) throw DomainError(what + ": empty list");
  return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path.string() + "'");
  return buffer.str();
}

struct DataColumn {
  std::vector<double> values;
  std::vector<std::size_t> lines;  // 1-based file line of each value
};

// One real per line, or a single-column CSV whose first line is a header.
// Blank lines are skipped.
inline DataColumn parse_data(const std::string& text, const std::string& origin) {
  DataColumn out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.find(',') != std::string::npos) {
      throw DomainError(origin + ":" + std::to_string(line_no) +
                        ": expected a single column, found '" + t + "'");
    }
    const auto v = parse_double(t);
    if (!v) {
      if (first_content) {  // header
        first_content = false;
        continue;
      }
      throw DomainError(origin + ":" + std::to_string(line_no) + ": '" + t +
                        "' is not a number");
    }
    if (!std::isfinite(*v)) {
      throw DomainError(origin + ":" + std::to_string(line_no) + ": value is not finite");
    }
    first_content = false;
    out.values.push_back(*v);
    out.lines.push_back(line_no);
  }
  return out;
}

inline void write_output(const std::filesystem::path& path, const std::string& contents) {
  atomic_write_file(path, contents);
}

// ---------------------------------------------------------------------------
// Run configuration

struct ModelBlock {
  std::string family = "normal";
  std::optional<ThetaScale> scale;  // family default when unset
  double sigma0 = 1.0;
  double frechet_shape = 1.0;
  std::optional<double> epsilon;
  // single-spec fields used by diagnose
  double beta = 0.75;
  double r = 0.0;
  std::uint64_t n = 0;
};

struct GridBlock {
  std::vector<double> betas;
  std::vector<double> rs;
  std::vector<double> s_values{2.0};
  std::vector<std::uint64_t> ns;
  double alpha = 0.05;
  std::uint64_t reps = 200;
};

struct CalibrationBlock {
  std::uint64_t reps = 1000;
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> cache_dir;
  unsigned workers = 1;
};

struct OutputBlock {
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> json;
  bool record_runtime = false;
};

struct RunConfig {
  std::string command;
  ModelBlock model;
  GridBlock grid;
  CalibrationBlock calibration;
  OutputBlock output;
};

inline ThetaScale parse_scale(const std::string& name) {
  if (name == "sparse") return ThetaScale::SparsePower;
  if (name == "dense") return ThetaScale::DensePower;
  if (name == "sqrt-log") return ThetaScale::NormalSqrtLog;
  throw DomainError("unknown theta scale '" + name + "' (known: sparse, dense, sqrt-log)");
}

inline ThetaScale scale_for(const ModelBlock& m) {
  if (m.scale) return *m.scale;
  return m.family.rfind("normal", 0) == 0 ? ThetaScale::NormalSqrtLog : ThetaScale::SparsePower;
}

inline FamilyPtr family_for(const ModelBlock& m) {
  return family_by_name(m.family, m.sigma0, m.frechet_shape);
}

namespace detail {

inline const std::set<std::string>& known_keys(const std::string& section) {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model", {"family", "scale", "sigma0", "frechet_shape", "epsilon", "beta", "r", "n"}},
      {"grid", {"beta", "r", "s", "n", "alpha", "reps"}},
      {"calibration", {"reps", "seed", "cache_dir", "workers"}},
      {"output", {"csv", "json", "record_runtime"}}};
  static const std::set<std::string> none;
  const auto it = keys.find(section);
  return it == keys.end() ? none : it->second;
}

inline bool parse_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw DomainError(what + ": expected true or false");
}

}  // namespace detail

// Flat INI text: [model], [grid], [calibration], [output] sections of
// key = value lines. Unknown sections or keys are errors.
inline RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw DomainError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig c;
  for (const auto& [section, body] : tree) {
    const auto& allowed = detail::known_keys(section);
    if (allowed.empty()) throw DomainError(origin + ": unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) {
      throw DomainError(origin + ": key '" + section + "' must sit inside a section");
    }
    for (const auto& [key, node] : body) {
      if (!allowed.contains(key)) {
        throw DomainError(origin + ": unknown key '" + key + "' in [" + section + "]");
      }
      const std::string value = trim(node.data());
      const std::string what = origin + ": " + section + "." + key;
      if (section == "model") {
        if (key == "family") c.model.family = value;
        if (key == "scale") c.model.scale = parse_scale(value);
        if (key == "sigma0") c.model.sigma0 = require_double(value, what);
        if (key == "frechet_shape") c.model.frechet_shape = require_double(value, what);
        if (key == "epsilon") c.model.epsilon = require_double(value, what);
        if (key == "beta") c.model.beta = require_double(value, what);
        if (key == "r") c.model.r = require_double(value, what);
        if (key == "n") c.model.n = require_count(value, what);
      } else if (section == "grid") {
        if (key == "beta") c.grid.betas = parse_list(value, what);
        if (key == "r") c.grid.rs = parse_list(value, what);
        if (key == "s") c.grid.s_values = parse_list(value, what);
        if (key == "n") c.grid.ns = parse_count_list(value, what);
        if (key == "alpha") c.grid.alpha = require_double(value, what);
        if (key == "reps") c.grid.reps = require_count(value, what);
      } else if (section == "calibration") {
        if (key == "reps") c.calibration.reps = require_count(value, what);
        if (key == "seed") c.calibration.seed = require_count(value, what);
        if (key == "cache_dir") c.calibration.cache_dir = value;
        if (key == "workers") {
          c.calibration.workers = static_cast<unsigned>(require_count(value, what));
        }
      } else if (section == "output") {
        if (key == "csv") c.output.csv = value;
        if (key == "json") c.output.json = value;
        if (key == "record_runtime") c.output.record_runtime = detail::parse_bool(value, what);
      }
    }
  }
  family_for(c.model);  // name check
  if (c.calibration.workers < 1) throw DomainError(origin + ": workers must be >= 1");
  if (c.model.epsilon && !(*c.model.epsilon >= 0.0 && *c.model.epsilon <= 1.0)) {
    throw DomainError(origin + ": model.epsilon must lie in [0, 1]");
  }
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_text_file(path), path.string());
}

inline PowerGridConfig power_config_from(const RunConfig& c) {
  PowerGridConfig p;
  p.family = family_for(c.model);
  p.scale = scale_for(c.model);
  p.betas = c.grid.betas;
  p.rs = c.grid.rs;
  p.s_values = c.grid.s_values;
  p.ns = c.grid.ns;
  p.alpha = c.grid.alpha;
  p.reps = c.grid.reps;
  p.calibration_reps = c.calibration.reps;
  p.seed = c.calibration.seed;
  p.epsilon = c.model.epsilon;
  p.workers = c.calibration.workers;
  p.record_runtime = c.output.record_runtime;
  return p;
}

// ---------------------------------------------------------------------------
// Commands

struct TestOptions {
  std::string data_file;
  std::string model;
  std::optional<double> s;
  std::string tail = "lower";
  double alpha = 0.05;
  std::uint64_t reps = 1000;
  std::uint64_t seed = 1;
  std::string cache_dir;
  unsigned workers = 1;
  bool json = false;
};

inline DistributionPtr noise_model(const std::string& name) {
  try {
    return distribution_by_name(name);
  } catch (const DomainError&) {
  }
  try {
    return family_by_name(name)->noise();
  } catch (const DomainError&) {
  }
  throw DomainError("unknown model '" + name +
                    "' (known: uniform, normal, exponential, gumbel, frechet, or a family name)");
}

inline int cmd_test(const TestOptions& o, std::ostream& out) {
  const auto noise = noise_model(o.model);
  const double s = o.s.value_or(2.0);
  if (o.tail != "lower" && o.tail != "upper") throw DomainError("--tail must be lower or upper");
  const auto data = parse_data(read_text_file(o.data_file), o.data_file);
  if (data.values.size() < 2) {
    throw DomainError(o.data_file + ": need n >= 2 observations, found " +
                      std::to_string(data.values.size()));
  }
  const bool upper = o.tail == "upper";
  for (std::size_t i = 0; i < data.values.size(); ++i) {
    const double x = data.values[i];
    const double c = upper ? noise->sf(x) : noise->cdf(x);
    if (!(c > 0.0 && c < 1.0)) {
      throw DomainError(o.data_file + ":" + std::to_string(data.lines[i]) + ": value " +
                        format_number(x) + " lies outside the support of the " + noise->name() +
                        " model");
    }
  }
  const auto p = to_pvalues(data.values, *noise, upper ? PValueSide::Upper : PValueSide::Lower);
  const std::uint64_t n = p.size();
  CalibrationStore store = o.cache_dir.empty() ? CalibrationStore()
                                               : CalibrationStore(o.cache_dir);
  const auto table = store.get(n, s, o.reps, o.seed, o.workers);
  const auto res = run_divergence_test(p, s, table, o.alpha);
  const double ns = res.statistic + centering_or_zero(n);

  if (o.json) {
    nlohmann::json j = {{"n", n},
                        {"s", s},
                        {"n_times_S", ns},
                        {"centering", centering_or_zero(n)},
                        {"statistic", res.statistic},
                        {"alpha", o.alpha},
                        {"mc_critical", res.critical},
                        {"mc_critical_reliable", mc_critical_is_reliable(table, o.alpha)},
                        {"mc_pvalue", res.mc_pvalue},
                        {"reject", res.reject},
                        {"reps", o.reps},
                        {"seed", o.seed}};
    if (std::isnan(res.asymptotic_critical)) {
      j["asymptotic_critical"] = nullptr;
    } else {
      j["asymptotic_critical"] = res.asymptotic_critical;
    }
    j["asymptotic_note"] = kAdvisory;
    if (!o.s) j["note"] = kDefaultSNote;
    out << j.dump(2) << "\n";
    return kExitOk;
  }

  if (!o.s) out << kDefaultSNote << "\n";
  out << "n                    " << n << "\n"
      << "s                    " << format_number(s) << "\n"
      << "n_times_S            " << format_number(ns) << "\n"
      << "centering            " << format_number(centering_or_zero(n)) << "\n"
      << "statistic            " << format_number(res.statistic) << "\n"
      << "mc_critical          " << format_number(res.critical) << "  (alpha "
      << format_number(o.alpha) << ", " << o.reps << " null replicates, seed " << o.seed << ")\n";
  if (!mc_critical_is_reliable(table, o.alpha)) {
    out << "warning: fewer than 5 expected null exceedances; raise --reps\n";
  }
  out << "asymptotic_critical  "
      << (std::isnan(res.asymptotic_critical) ? std::string("n/a (needs n >= 16)")
                                              : format_number(res.asymptotic_critical))
      << "  " << kAdvisory << "\n"
      << "mc_pvalue            " << format_number(res.mc_pvalue) << "\n"
      << "verdict              " << (res.reject ? "reject" : "do not reject")
      << " the null at level " << format_number(o.alpha) << "\n";
  return kExitOk;
}

struct CalibrateOptions {
  std::uint64_t n = 0;
  std::string s_list = "2";
  std::string alpha_list = "0.05";
  std::uint64_t reps = 1000;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  unsigned workers = 1;
  bool json = false;
};

inline int cmd_calibrate(const CalibrateOptions& o, std::ostream& out) {
  const auto s_values = parse_list(o.s_list, "--s");
  const auto alphas = parse_list(o.alpha_list, "--alpha-list");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("--alpha-list: alpha must lie in (0,1)");
  }
  require_table_args(o.n, o.reps);
  CalibrationStore store(o.out_dir);
  const auto tables = store.get_many(o.n, s_values, o.reps, o.seed, o.workers);

  nlohmann::json doc = nlohmann::json::array();
  std::ostringstream text;
  text << "s,alpha,mc_critical,reliable,asymptotic_critical,file\n";
  for (const auto& t : tables) {
    const std::string file =
        (std::filesystem::path(o.out_dir) / cache_file_name(CalibrationKey::of(t))).string();
    for (double a : alphas) {
      const double crit = mc_critical(t, a);
      const bool reliable = mc_critical_is_reliable(t, a);
      const std::optional<double> asym =
          o.n >= kMinCenteringN ? std::optional<double>(asymptotic_critical_centered(o.n, a)) : std::nullopt;
      text << format_number(t.s) << ',' << format_number(a) << ',' << format_number(crit) << ','
           << (reliable ? "yes" : "no") << ','
           << (asym ? format_number(*asym) : std::string("nan")) << ',' << file << "\n";
      nlohmann::json row = {{"n", o.n},           {"s", t.s},       {"alpha", a},
                            {"mc_critical", crit}, {"reliable", reliable}, {"reps", o.reps},
                            {"seed", o.seed},     {"file", file}};
      row["asymptotic_critical"] = asym ? nlohmann::json(*asym) : nlohmann::json(nullptr);
      row["asymptotic_note"] = kAdvisory;
      doc.push_back(row);
    }
  }
  if (o.json) {
    out << doc.dump(2) << "\n";
  } else {
    out << text.str() << "asymptotic criticals are " << kAdvisory << "\n";
  }
  return kExitOk;
}

struct PowerOptions {
  std::string config;
  std::optional<unsigned> workers;
  std::string csv;
  std::string json_out;
  bool json = false;
};

inline int cmd_power(const PowerOptions& o, std::ostream& out) {
  auto run = load_run_config(o.config);
  run.command = "power";
  if (o.workers) run.calibration.workers = *o.workers;
  if (!o.csv.empty()) run.output.csv = o.csv;
  if (!o.json_out.empty()) run.output.json = o.json_out;
  const auto config = power_config_from(run);
  CalibrationStore store = run.calibration.cache_dir ? CalibrationStore(*run.calibration.cache_dir)
                                                     : CalibrationStore();
  const auto results = power_sweep(config, store);
  const std::string csv = power_results_csv(results);
  const std::string json = power_results_json(results);
  if (run.output.csv) write_output(*run.output.csv, csv);
  if (run.output.json) write_output(*run.output.json, json);
  if (o.json) {
    out << json;
  } else if (!run.output.csv && !run.output.json) {
    out << csv;
  } else {
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.failed;
    out << results.size() << " cells, " << failed << " failed\n";
  }
  return kExitOk;
}

struct BoundaryOptions {
  std::string family;
  std::string beta;
  std::string r;
  double p = 1.0;
  std::string gamma_table;
  std::optional<double> t_min;
  std::optional<double> t_max;
  int grid = kDefaultGridPoints;
  double tolerance = kBoundaryTolerance;
  bool json = false;
};

inline int cmd_boundary(const BoundaryOptions& o, std::ostream& out) {
  nlohmann::json doc = nlohmann::json::array();
  std::ostringstream text;

  if (!o.gamma_table.empty()) {
    const auto table = TabulatedFunction::from_csv(o.gamma_table);
    const double lo = o.t_min.value_or(table.x().front());
    const double hi = o.t_max.value_or(table.x().back());
    const auto g = beta_sharp_from_gamma_grid([&](double t) { return table(t); }, lo, hi, o.grid);
    text << "beta_sharp,argmax,grid_spacing\n"
         << format_number(g.value) << ',' << format_number(g.argmax) << ','
         << format_number(g.spacing) << "\n";
    doc.push_back({{"beta_sharp", g.value}, {"argmax", g.argmax}, {"grid_spacing", g.spacing}});
  } else {
    if (o.family.empty()) throw DomainError("boundary: give --family or --gamma-table");
    const auto family = boundary_family_by_name(o.family);
    const auto betas = o.beta.empty() ? std::vector<double>{} : parse_list(o.beta, "--beta");
    const auto rs = o.r.empty() ? std::vector<double>{} : parse_list(o.r, "--r");
    if (betas.empty() && rs.empty()) throw DomainError("boundary: give --beta and/or --r");

    if (!betas.empty() && !rs.empty()) {
      text << "family,beta,r,threshold,margin,verdict\n";
      for (double b : betas) {
        for (double r : rs) {
          const auto c = classify(family, b, r, o.p, o.tolerance);
          text << o.family << ',' << format_number(b) << ',' << format_number(r) << ','
               << format_number(c.threshold_value) << ',' << format_number(c.margin) << ','
               << to_string(c.verdict) << "\n";
          doc.push_back({{"family", o.family},
                         {"beta", b},
                         {"r", r},
                         {"threshold", c.threshold_value},
                         {"margin", c.margin},
                         {"verdict", to_string(c.verdict)}});
        }
      }
    } else if (!betas.empty()) {
      // r on the boundary for each beta
      text << "family,beta,r_boundary\n";
      for (double b : betas) {
        double r = 0.0;
        switch (family) {
          case BoundaryFamily::NormalSparse: r = rho_normal_sparse(b); break;
          case BoundaryFamily::DenseExpFamily: r = rho_dense(b); break;
          case BoundaryFamily::SparseExpFamily:
            if (!(b > 0.5 && b < 1.0)) throw DomainError("boundary: need beta in (1/2, 1)");
            phidiv::detail::require_positive(o.p, "--p");
            r = (2.0 * b - 1.0) / o.p;
            break;
        }
        text << o.family << ',' << format_number(b) << ',' << format_number(r) << "\n";
        doc.push_back({{"family", o.family}, {"beta", b}, {"r_boundary", r}});
      }
    } else {
      if (family != BoundaryFamily::SparseExpFamily) {
        throw DomainError("boundary: --r alone needs --family sparse-expfam");
      }
      text << "family,r,p,beta_sharp\n";
      for (double r : rs) {
        const double b = beta_sharp_expfam(r, o.p);
        text << o.family << ',' << format_number(r) << ',' << format_number(o.p) << ','
             << format_number(b) << "\n";
        doc.push_back({{"family", o.family}, {"r", r}, {"p", o.p}, {"beta_sharp", b}});
      }
    }
  }
  out << (o.json ? doc.dump(2) + "\n" : text.str());
  return kExitOk;
}

struct DiagnoseOptions {
  std::string model_config;
  std::string v_grid = "0.001:0.49:0.001";
  bool sparse = false;
  std::string out_file;
  bool json = false;
};

inline int cmd_diagnose(const DiagnoseOptions& o, std::ostream& out) {
  const auto run = load_run_config(o.model_config);
  if (run.model.n < 1) throw DomainError(o.model_config + ": model.n is required");
  MixtureSpec spec{family_for(run.model), run.model.beta, run.model.r, run.model.n,
                   scale_for(run.model), run.model.epsilon};
  spec.validate();
  const auto grid = parse_list(o.v_grid, "--v-grid");
  const auto curve = o.sparse ? diagnostic_H_sparse(spec, grid) : diagnostic_H(spec, grid);
  std::string csv = "v,H\n";
  nlohmann::json doc = nlohmann::json::array();
  for (std::size_t i = 0; i < curve.v.size(); ++i) {
    csv += format_number(curve.v[i]) + ',' + format_number(curve.values[i]) + "\n";
    doc.push_back({{"v", curve.v[i]}, {"H", curve.values[i]}});
  }
  const std::string body = o.json ? doc.dump(2) + "\n" : csv;
  if (!o.out_file.empty()) {
    write_output(o.out_file, body);
  } else {
    out << body;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Entry point

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"phidiv: phi-divergence goodness-of-fit tests for sparse and dense signals"};
  app.name("phidiv");
  app.require_subcommand(1);

  TestOptions test_o;
  auto* test = app.add_subcommand("test", "Test a data file against a noise model");
  test->add_option("data-file", test_o.data_file, "One value per line or single-column CSV")
      ->required();
  test->add_option("--model", test_o.model, "Noise model: uniform, normal, exponential, ...")
      ->required();
  test->add_option("--s", test_o.s, "Divergence index s (default 2)");
  test->add_option("--tail", test_o.tail, "p-value side: lower (F_0(x)) or upper (1 - F_0(x))")
      ->capture_default_str();
  test->add_option("--alpha", test_o.alpha, "Level")->capture_default_str();
  test->add_option("--reps", test_o.reps, "Null replicates for calibration")->capture_default_str();
  test->add_option("--seed", test_o.seed, "Calibration seed")->capture_default_str();
  test->add_option("--cache-dir", test_o.cache_dir, "Directory for calibration tables");
  test->add_option("--workers", test_o.workers, "Threads")->capture_default_str();
  test->add_flag("--json", test_o.json, "Print JSON");

  CalibrateOptions cal_o;
  auto* calibrate = app.add_subcommand("calibrate", "Build Monte-Carlo null tables");
  calibrate->add_option("--n", cal_o.n, "Sample size")->required();
  calibrate->add_option("--s", cal_o.s_list, "s values: list a,b,c or range lo:hi:step")
      ->capture_default_str();
  calibrate->add_option("--alpha-list", cal_o.alpha_list, "Levels to summarize")
      ->capture_default_str();
  calibrate->add_option("--reps", cal_o.reps, "Null replicates")->capture_default_str();
  calibrate->add_option("--seed", cal_o.seed, "Seed")->capture_default_str();
  calibrate->add_option("--out-dir", cal_o.out_dir, "Where table files go")->capture_default_str();
  calibrate->add_option("--workers", cal_o.workers, "Threads")->capture_default_str();
  calibrate->add_flag("--json", cal_o.json, "Print JSON");

  PowerOptions pow_o;
  auto* power = app.add_subcommand("power", "Run a power sweep from a config file");
  power->add_option("--config", pow_o.config, "INI config with [model] [grid] ...")->required();
  power->add_option("--workers", pow_o.workers, "Threads (overrides the config)");
  power->add_option("--csv", pow_o.csv, "CSV output path (overrides the config)");
  power->add_option("--json-out", pow_o.json_out, "JSON output path (overrides the config)");
  power->add_flag("--json", pow_o.json, "Print JSON");

  BoundaryOptions bnd_o;
  auto* boundary = app.add_subcommand("boundary", "Detection boundaries and classification");
  boundary->add_option("--family", bnd_o.family, "normal-sparse, dense-expfam or sparse-expfam");
  boundary->add_option("--beta", bnd_o.beta, "beta values: list or lo:hi:step");
  boundary->add_option("--r", bnd_o.r, "r values: list or lo:hi:step");
  boundary->add_option("--p", bnd_o.p, "Tail exponent for sparse-expfam")->capture_default_str();
  boundary->add_option("--gamma-table", bnd_o.gamma_table, "CSV of t,gamma(t)");
  boundary->add_option("--t-min", bnd_o.t_min, "Lower end of the t grid");
  boundary->add_option("--t-max", bnd_o.t_max, "Upper end of the t grid");
  boundary->add_option("--grid", bnd_o.grid, "Grid points")->capture_default_str();
  boundary->add_option("--tolerance", bnd_o.tolerance, "On-boundary tolerance")
      ->capture_default_str();
  boundary->add_flag("--json", bnd_o.json, "Print JSON");

  DiagnoseOptions dia_o;
  auto* diagnose = app.add_subcommand("diagnose", "Detectability diagnostic H_n(v)");
  diagnose->add_option("--model-config", dia_o.model_config, "INI with a [model] section")
      ->required();
  diagnose->add_option("--v-grid", dia_o.v_grid, "v values in (0, 1/2)")->capture_default_str();
  diagnose->add_flag("--sparse", dia_o.sparse, "Sparse form without centering terms");
  diagnose->add_option("--out", dia_o.out_file, "Output path");
  diagnose->add_flag("--json", dia_o.json, "Print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "phidiv: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*test) return cmd_test(test_o, out);
    if (*calibrate) return cmd_calibrate(cal_o, out);
    if (*power) return cmd_power(pow_o, out);
    if (*boundary) return cmd_boundary(bnd_o, out);
    if (*diagnose) return cmd_diagnose(dia_o, out);
  } catch (const IoError& e) {
    err << "phidiv: " << e.what() << "\n";
    return kExitIo;
  } catch (const CorruptionError& e) {
    err << "phidiv: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "phidiv: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace phidiv::cli

#endif  // PHIDIV_TOOLS_CLI_HPP_
