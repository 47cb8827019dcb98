#pragma once

// Command-line front end for the qgames library. Exposed as a header so the
// test suite can drive parse_args/run without spawning processes.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qgames/harness.hpp"

namespace qgames::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// --help was given; what() holds the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { kJson, kCsv };

struct RunConfig {
  std::string command;
  std::size_t d = 2;
  std::size_t n = 1;
  std::size_t m = 2;
  std::size_t samples = 100000;
  std::optional<std::uint64_t> seed;
  double tol = 1e-9;
  std::string kind = "cloning";
  std::string matrix;  // "a,b;c,d"; empty selects rock-paper-scissors
  std::vector<std::size_t> levels = {4, 8, 16};
  unsigned threads = 0;
  std::string out;  // empty writes to stdout
  Format format = Format::kJson;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"clone", "estimate", "solve", "sandwich", "asym-bound", "mc-play"};
  return names;
}

inline RealMatrix parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream rs(text);
  std::string row;
  while (std::getline(rs, row, ';')) {
    std::vector<double> vals;
    std::stringstream cs(row);
    std::string cell;
    while (std::getline(cs, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw UsageError("--matrix: cannot parse entry '" + cell + "'");
      }
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty() || rows.front().empty()) throw UsageError("--matrix: empty matrix");
  RealMatrix a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw UsageError("--matrix: rows have different lengths");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return a;
}

inline GameKind parse_kind(const std::string& kind) {
  if (kind == "estimation") return GameKind::kEstimation;
  if (kind == "cloning") return GameKind::kCloning;
  if (kind == "one_particle") return GameKind::kOneParticle;
  throw UsageError("--kind must be estimation, cloning or one_particle");
}

/// Parses argv (argv[0] is the program name). Throws UsageError.
inline RunConfig parse_args(const std::vector<std::string>& argv) {
  CLI::App app{"Quantum estimation and cloning games"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string format = "json";
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "output path (default stdout)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_arity = [&](CLI::App* sub) {
    sub->add_option("--d", cfg.d, "local dimension");
    sub->add_option("--n", cfg.n, "input copies N");
    sub->add_option("--m", cfg.m, "output copies M");
  };
  auto add_seed = [&](CLI::App* sub) { return sub->add_option("--seed", seed, "random seed"); };

  CLI::App* clone = app.add_subcommand("clone", "optimal cloner values and exact checks");
  add_arity(clone);
  add_seed(clone);
  clone->add_option("--tol", cfg.tol);
  add_common(clone);

  CLI::App* estimate = app.add_subcommand("estimate", "qubit estimation POVM and its value");
  estimate->add_option("--n", cfg.n, "input copies N");
  add_seed(estimate);
  estimate->add_option("--tol", cfg.tol);
  add_common(estimate);

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve a zero-sum matrix game");
  solve_cmd->add_option("--matrix", cfg.matrix, "rows separated by ';', entries by ','");
  solve_cmd->add_option("--tol", cfg.tol);
  add_seed(solve_cmd);
  add_common(solve_cmd);

  CLI::App* sandwich = app.add_subcommand("sandwich", "discretized minmax sandwich");
  sandwich->add_option("--kind", cfg.kind);
  add_arity(sandwich);
  sandwich->add_option("--levels", cfg.levels, "nested player II set sizes")->delimiter(',');
  sandwich->add_option("--tol", cfg.tol);
  add_seed(sandwich);
  add_common(sandwich);

  CLI::App* asym = app.add_subcommand("asym-bound", "asymmetric cloning bound scan");
  add_arity(asym);
  asym->add_option("--samples", cfg.samples, "random channels");
  asym->add_option("--tol", cfg.tol);
  add_seed(asym);
  add_common(asym);

  CLI::App* mc = app.add_subcommand("mc-play", "Monte Carlo play of the full protocol");
  mc->add_option("--kind", cfg.kind);
  add_arity(mc);
  mc->add_option("--samples", cfg.samples, "rounds");
  mc->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
  add_seed(mc);
  add_common(mc);

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream help, ignored;
    app.exit(e, help, ignored);
    throw HelpRequested(help.str());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  for (CLI::App* sub : app.get_subcommands()) cfg.command = sub->get_name();
  CLI::App* chosen = app.get_subcommand(cfg.command);
  if (chosen->count("--seed") > 0) cfg.seed = seed;
  cfg.format = format == "csv" ? Format::kCsv : Format::kJson;

  const bool randomized = cfg.command == "sandwich" || cfg.command == "asym-bound" || cfg.command == "mc-play";
  if (randomized && !cfg.seed) throw UsageError(cfg.command + " requires --seed");
  if (cfg.d < 1) throw UsageError("--d must be >= 1");
  if (cfg.n < 1) throw UsageError("--n must be >= 1");
  if (!(cfg.tol > 0)) throw UsageError("--tol must be positive");
  const bool game_with_m = cfg.command == "sandwich" || cfg.command == "mc-play";
  if (cfg.command == "clone" || cfg.command == "asym-bound" || (game_with_m && cfg.kind != "estimation")) {
    if (cfg.m < cfg.n) throw UsageError("--m must be >= --n");
  }
  if (cfg.command == "sandwich" || cfg.command == "mc-play") {
    parse_kind(cfg.kind);
    if (cfg.kind == "estimation" && cfg.d != 2) throw UsageError("estimation games need --d 2");
  }
  if (cfg.command == "sandwich") {
    if (cfg.levels.empty()) throw UsageError("--levels must not be empty");
    for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
      if (cfg.levels[i] < 1 || (i > 0 && cfg.levels[i] < cfg.levels[i - 1])) {
        throw UsageError("--levels must be positive and non-decreasing");
      }
    }
  }
  if (cfg.command == "mc-play" && cfg.samples < 1) throw UsageError("--samples must be >= 1");
  if (cfg.command == "solve" && !cfg.matrix.empty()) parse_matrix(cfg.matrix);
  return cfg;
}

inline RunConfig parse_args(int argc, const char* const* argv) {
  return parse_args(std::vector<std::string>(argv, argv + argc));
}

// ---------------------------------------------------------------------------
// output

using Json = nlohmann::ordered_json;

/// Rounds to 12 significant digits so documents are stable across platforms.
inline double num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

inline Json num_array(const RealVector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

inline Json num_array(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

struct Document {
  Json summary;             // one JSON object
  std::vector<Json> rows;   // optional tabular rows for CSV
};

inline std::string csv_cell(const Json& v) {
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + csv_cell(v[i]);
    return s;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline std::string render_csv(const Document& doc) {
  const std::vector<Json> single{doc.summary};
  const std::vector<Json>& rows = doc.rows.empty() ? single : doc.rows;
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, _] : rows.front().items()) {
    os << (first ? "" : ",") << key;
    first = false;
  }
  os << "\n";
  for (const auto& row : rows) {
    first = true;
    for (const auto& [key, value] : row.items()) {
      os << (first ? "" : ",") << csv_cell(value);
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

inline std::string render(const Document& doc, Format format) {
  if (format == Format::kCsv) return render_csv(doc);
  Json full = doc.summary;
  if (!doc.rows.empty()) full["records"] = doc.rows;
  return full.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// commands; each returns the document and sets `ok` false on a failed check

inline Document run_clone(const RunConfig& c, bool& ok) {
  const Channel ch = optimal_cloner(c.d, c.n, c.m);
  const ValueFormulas v = value_formulas(c.d, c.n, c.m);
  const double global = haar_avg_global_fidelity(ch);
  std::vector<double> singles;
  for (std::size_t k = 1; k <= c.m; ++k) singles.push_back(single_clone_haar_fidelity(ch, k));
  double worst = std::abs(global - v.global_value);
  for (double s : singles) worst = std::max(worst, std::abs(s - v.single_value));
  ok = worst <= c.tol;
  Json j;
  j["command"] = "clone";
  j["d"] = c.d;
  j["n"] = c.n;
  j["m"] = c.m;
  j["global_value"] = num(v.global_value);
  j["single_value"] = num(v.single_value);
  j["asym_bound"] = num(v.asym_bound);
  j["haar_avg_global_fidelity"] = num(global);
  j["single_clone_fidelities"] = num_array(singles);
  j["max_deviation"] = num(worst);
  j["passed"] = ok;
  return {j, {}};
}

inline Document run_estimate(const RunConfig& c, bool& ok) {
  const Povm povm = build_povm(c.n, default_directions(c.n));
  const Povm covariant = optimal_povm(c.n);
  const double target = static_cast<double>(c.n + 1) / static_cast<double>(c.n + 2);
  const double mean = mean_fidelity(povm);
  const double cov_mean = mean_fidelity(covariant);
  ok = std::abs(mean - target) <= c.tol && std::abs(cov_mean - target) <= c.tol;
  Json j;
  j["command"] = "estimate";
  j["n"] = c.n;
  j["outcomes"] = povm.size();
  j["completeness_residual"] = num(povm.residual());
  j["mean_fidelity"] = num(mean);
  j["theoretical_value"] = num(target);
  j["covariant_outcomes"] = covariant.size();
  j["covariant_mean_fidelity"] = num(cov_mean);
  j["passed"] = ok;
  return {j, {}};
}

inline Document run_solve(const RunConfig& c, bool& ok) {
  const MatrixGame g = c.matrix.empty() ? rock_paper_scissors() : MatrixGame(parse_matrix(c.matrix));
  SolveOptions opts;
  opts.tol = std::max(c.tol, 1e-12);
  if (c.seed) opts.seed = *c.seed;
  const EquilibriumPair eq = solve(g, opts);
  ok = true;
  Json j;
  j["command"] = "solve";
  j["rows"] = g.rows();
  j["cols"] = g.cols();
  j["value"] = num(eq.value);
  j["x"] = num_array(eq.x.probs());
  j["y"] = num_array(eq.y.probs());
  j["exploitability"] = num(eq.exploitability);
  return {j, {}};
}

inline Document run_sandwich(const RunConfig& c, bool& ok) {
  GameSpec spec{parse_kind(c.kind), c.d, c.n, c.m, 1, *c.seed};
  std::vector<PlayerIStrategy> strategies;
  if (spec.kind == GameKind::kEstimation) {
    strategies.emplace_back(optimal_povm(c.n));
    strategies.emplace_back(build_povm(c.n, default_directions(c.n)));
  } else {
    strategies.emplace_back(optimal_cloner(c.d, c.n, c.m));
    strategies.emplace_back(identity_embedding(c.d, c.n, c.m));
  }
  const auto states = player_two_states(spec.d, c.levels.back(), *c.seed);
  const SandwichReport rep = sandwich_report(spec, strategies, states, c.levels, c.tol);
  ok = rep.passed();
  Json j;
  j["command"] = "sandwich";
  j["kind"] = c.kind;
  j["d"] = c.d;
  j["n"] = c.n;
  j["m"] = spec.kind == GameKind::kEstimation ? Json(nullptr) : Json(c.m);
  j["theoretical_value"] = num(rep.theoretical_value);
  j["final_gap"] = num(rep.final_gap);
  j["above_theory"] = rep.above_theory;
  j["monotone"] = rep.monotone;
  j["converged"] = rep.converged;
  j["passed"] = ok;
  std::vector<Json> rows;
  for (const auto& l : rep.levels) {
    Json r;
    r["states"] = l.states;
    r["value"] = num(l.value);
    r["exploitability"] = num(l.exploitability);
    rows.push_back(r);
  }
  return {j, rows};
}

inline Document run_asym_bound(const RunConfig& c, bool& ok) {
  ScanOptions opts;
  opts.n_random = c.samples;
  opts.seed = *c.seed;
  opts.tol = c.tol;
  const ScanReport rep = asym_bound_scan(c.d, c.n, c.m, opts);
  ok = rep.passed();
  Json j;
  j["command"] = "asym-bound";
  j["d"] = c.d;
  j["n"] = c.n;
  j["m"] = c.m;
  j["channels"] = rep.records.size();
  j["bound"] = num(rep.bound);
  j["max_sum_fidelity"] = num(rep.max_sum_fidelity);
  j["argmax"] = rep.argmax;
  j["violations"] = rep.violations;
  j["passed"] = ok;
  std::vector<Json> rows;
  for (const auto& r : rep.records) {
    Json row;
    row["channel"] = r.descriptor;
    row["sum_fidelity"] = num(r.sum);
    row["clone_fidelities"] = num_array(r.clone_fidelities);
    rows.push_back(row);
  }
  return {j, rows};
}

inline Document run_mc_play(const RunConfig& c, bool& ok) {
  GameSpec spec{parse_kind(c.kind), c.d, c.n, c.m, c.samples, *c.seed};
  const PlayerIStrategy strategy = spec.kind == GameKind::kEstimation
                                       ? PlayerIStrategy(optimal_povm(c.n))
                                       : PlayerIStrategy(optimal_cloner(c.d, c.n, c.m));
  const MonteCarloRecord rec = monte_carlo_play(spec, strategy, *c.seed, c.threads);
  ok = rec.within(3.0);
  Json j;
  j["command"] = "mc-play";
  j["kind"] = c.kind;
  j["d"] = c.d;
  j["n"] = c.n;
  j["m"] = spec.kind == GameKind::kEstimation ? Json(nullptr) : Json(c.m);
  j["rounds"] = rec.rounds;
  j["seed"] = *c.seed;
  j["mean_payoff"] = num(rec.mean_payoff);
  j["stderr"] = num(rec.stderr_);
  j["exact_fidelity"] = num(rec.exact_fidelity);
  j["pass_probability"] = num(rec.pass_probability);
  j["exact_payoff"] = num(rec.exact_payoff);
  j["z_score"] = num(rec.z_score);
  j["within_3_stderr"] = ok;
  return {j, {}};
}

/// Executes a validated config, writing one document. Returns the exit code.
inline int run(const RunConfig& c, std::ostream& out) {
  Document doc;
  bool ok = true;
  try {
    if (c.command == "clone") doc = run_clone(c, ok);
    else if (c.command == "estimate") doc = run_estimate(c, ok);
    else if (c.command == "solve") doc = run_solve(c, ok);
    else if (c.command == "sandwich") doc = run_sandwich(c, ok);
    else if (c.command == "asym-bound") doc = run_asym_bound(c, ok);
    else if (c.command == "mc-play") doc = run_mc_play(c, ok);
    else throw UsageError("unknown command " + c.command);
  } catch (const Error& e) {
    Json j;
    j["command"] = c.command;
    j["error"] = e.kind();
    j["message"] = e.what();
    doc = {j, {}};
    ok = false;
  }
  const std::string text = render(doc, c.format);
  if (c.out.empty()) {
    out << text;
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
      std::cerr << "cannot open " << c.out << "\n";
      return kExitCheckFailed;
    }
    f << text;
  }
  return ok ? kExitOk : kExitCheckFailed;
}

/// parse_args + run with usage errors mapped to exit code 2.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(argc, argv);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  return run(cfg, out);
}

}  // namespace qgames::cli
