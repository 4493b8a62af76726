#include "ccmfbm_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccmfbm/ccmfbm.hpp"
#include "ccmfbm/verify/acceptance.hpp"

namespace ccmfbm::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct RunConfig {
  double a = 1.0;
  double b = 1.0;
  double hurst = 0.75;
  int grid_n = 500;
  double horizon = 1.0;
  int paths = 1;
  std::uint64_t seed = 0;
  std::string scheme = "cholesky";
  int series_terms = 64;
  double tol = 1e-10;
  int max_terms = 400;
  std::string output;
  std::string format = "csv";

  ModelParams params() const { return ModelParams(a, b, hurst); }
  TimeGrid grid() const { return TimeGrid(horizon, grid_n); }
  SeriesSpec series() const { return SeriesSpec{tol, max_terms}; }
};

json config_json(const RunConfig& c, const std::string& command) {
  return json{{"command", command},   {"a", c.a},
              {"b", c.b},             {"hurst", c.hurst},
              {"grid_n", c.grid_n},   {"horizon", c.horizon},
              {"paths", c.paths},     {"seed", c.seed},
              {"scheme", c.scheme},   {"series_terms", c.series_terms},
              {"tol", c.tol},         {"max_terms", c.max_terms},
              {"format", c.format}};
}

/// Numeric table; NaN marks a missing value (empty CSV cell, JSON null).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      if (!std::isnan(row[i])) os << format_double(row[i]);
    }
    os << '\n';
  }
}

void write_json(std::ostream& os, const Table& t, json meta) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (double v : row) r.push_back(std::isnan(v) ? json(nullptr) : json(v));
    rows.push_back(std::move(r));
  }
  const json doc{{"meta", std::move(meta)}, {"columns", t.columns}, {"rows", std::move(rows)}};
  os << doc.dump(2) << '\n';
}

json meta_for(const RunConfig& c, const std::string& command, json extra = json::object()) {
  json config = config_json(c, command);
  for (auto& [k, v] : extra.items()) config[k] = v;
  return json{{"library", "ccmfbm"}, {"version", kVersion}, {"config", std::move(config)}};
}

void emit(const Table& t, const RunConfig& c, const json& meta, const std::string& path,
          std::ostream& out) {
  auto write = [&](std::ostream& os) {
    if (c.format == "json") {
      write_json(os, t, meta);
    } else {
      write_csv(os, t);
    }
  };
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DomainError("cannot open '" + path + "' for writing");
  write(file);
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

/// Paths with their ids; ids are 0..n-1 for simulated paths and preserved for inputs.
struct PathSet {
  std::vector<double> ids;
  std::vector<SamplePath> paths;
};

PathSet numbered(std::vector<SamplePath> paths) {
  PathSet set{{}, std::move(paths)};
  for (std::size_t i = 0; i < set.paths.size(); ++i) set.ids.push_back(static_cast<double>(i));
  return set;
}

Table paths_table(const PathSet& set) {
  Table t{{"path_id", "t", "x", "w", "bh"}, {}};
  for (std::size_t p = 0; p < set.paths.size(); ++p) {
    const auto& path = set.paths[p];
    for (int k = 0; k <= path.grid.steps(); ++k) {
      t.rows.push_back({set.ids[p], path.grid.node(k), path.x[k],
                        path.w ? (*path.w)[k] : kMissing, path.bh ? (*path.bh)[k] : kMissing});
    }
  }
  return t;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

/// Reads a paths CSV as written by `simulate` (columns path_id, t, x and optionally w, bh).
PathSet read_paths_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw DomainError("cannot open input '" + file + "'");
  std::string line;
  if (!std::getline(in, line)) throw DomainError("input '" + file + "' is empty");
  const auto header = split(line);
  std::map<std::string, int> col;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) col[header[i]] = i;
  for (const char* required : {"path_id", "t", "x"}) {
    if (!col.count(required)) throw DomainError(std::string("input lacks a '") + required + "' column");
  }
  struct Raw {
    std::vector<double> t, x, w;
  };
  std::vector<std::pair<long, Raw>> raw;
  const bool has_w = col.count("w") > 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    auto value = [&](const std::string& name) {
      const auto& s = cells.at(col[name]);
      return s.empty() ? kMissing : std::stod(s);
    };
    try {
      const long id = std::stol(cells.at(col["path_id"]));
      if (raw.empty() || raw.back().first != id) raw.push_back({id, {}});
      Raw& r = raw.back().second;
      r.t.push_back(value("t"));
      r.x.push_back(value("x"));
      if (has_w) r.w.push_back(value("w"));
    } catch (const std::exception&) {
      throw DomainError("malformed row at line " + std::to_string(line_no) + " of '" + file + "'");
    }
  }
  if (raw.empty()) throw DomainError("input '" + file + "' has no rows");
  PathSet set;
  for (auto& [id, r] : raw) {
    const int steps = static_cast<int>(r.t.size()) - 1;
    if (steps < 2 || r.t.front() != 0.0) {
      throw DomainError("path " + std::to_string(id) + " must start at t = 0 with at least 3 nodes");
    }
    const TimeGrid grid(r.t.back(), steps);
    for (int k = 0; k <= steps; ++k) {
      if (std::abs(r.t[k] - grid.node(k)) > 1e-9 * std::max(1.0, grid.horizon())) {
        throw DomainError("path " + std::to_string(id) + " is not on an equidistant grid");
      }
    }
    SamplePath path{grid, std::move(r.x), std::nullopt, std::nullopt, std::nullopt};
    if (has_w && std::none_of(r.w.begin(), r.w.end(), [](double v) { return std::isnan(v); })) {
      path.w = std::move(r.w);
    }
    set.ids.push_back(static_cast<double>(id));
    set.paths.push_back(std::move(path));
  }
  return set;
}

PathSet simulate_paths(const RunConfig& c, DriftModel drift = DriftModel::none,
                       double theta = 0.0) {
  SimConfig cfg{.params = c.params(),
                .grid = c.grid(),
                .n_paths = c.paths,
                .seed = c.seed,
                .scheme = parse_scheme(c.scheme),
                .series_terms = c.series_terms,
                .drift_model = drift,
                .theta = theta};
  return numbered(simulate(cfg));
}

void add_common(CLI::App* app, RunConfig& c) {
  app->add_option("--a", c.a, "Brownian weight a")->capture_default_str();
  app->add_option("--b", c.b, "fractional weight b")->capture_default_str();
  app->add_option("--hurst", c.hurst, "Hurst index H in (1/2, 1)")->capture_default_str();
  app->add_option("--grid-n", c.grid_n, "number of grid steps N")->capture_default_str();
  app->add_option("--horizon", c.horizon, "time horizon T")->capture_default_str();
  app->add_option("--paths", c.paths, "number of simulated paths")->capture_default_str();
  app->add_option("--seed", c.seed, "base RNG seed")->capture_default_str();
  app->add_option("--scheme", c.scheme, "simulation scheme")
      ->check(CLI::IsMember({"cholesky", "mg_approx", "series"}))
      ->capture_default_str();
  app->add_option("--series-terms", c.series_terms, "basis size for the series scheme")
      ->capture_default_str();
  app->add_option("--tol", c.tol, "truncation tolerance of the inverse-kernel series")
      ->capture_default_str();
  app->add_option("--max-terms", c.max_terms, "maximum terms of the inverse-kernel series")
      ->capture_default_str();
  app->add_option("--output", c.output, "output file (default: stdout)");
  app->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& cell : split(text)) {
    try {
      values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw DomainError("cannot parse '" + cell + "' as a number");
    }
  }
  return values;
}

// Kernel curves s -> kernel(t, s) at the cell midpoints s = t (i - 1/2) / n, i = 1..n.
Table kernel_table(const RunConfig& c, double t, const std::string& curve, const std::vector<int>& ks) {
  const ModelParams p = c.params();
  Table table{{"s"}, {}};
  std::optional<InverseKernel> inverse;
  if (curve == "gamma") {
    for (int k : ks) table.columns.push_back("gamma_" + std::to_string(k));
  } else {
    table.columns.push_back(curve == "l-inverse" ? "l_inverse" : curve);
    if (curve == "l-inverse") inverse.emplace(p, c.series());
  }
  for (int i = 1; i <= c.grid_n; ++i) {
    const double s = t * (i - 0.5) / c.grid_n;
    std::vector<double> row{s};
    if (curve == "gamma") {
      for (int k : ks) row.push_back(gamma_k(p.hurst(), k, t, s));
    } else if (curve == "l") {
      row.push_back(l_kernel(p, t, s));
    } else if (curve == "mg") {
      row.push_back(mg_kernel(p.hurst(), t, s));
    } else {
      row.push_back((*inverse)(t, s));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table matrix_table(const TriangularKernel& kernel) {
  Table t{{"row", "col", "value"}, {}};
  for (int k = 0; k < kernel.size(); ++k)
    for (int j = 0; j <= k; ++j) t.rows.push_back({k + 1.0, j + 1.0, kernel(k, j)});
  return t;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

int run_demo(RunConfig c, const std::string& dir, std::ostream& out) {
  std::filesystem::create_directories(dir);
  const std::string ext = c.format == "json" ? ".json" : ".csv";
  auto file = [&](const std::string& stem) { return (std::filesystem::path(dir) / (stem + ext)).string(); };
  c.grid_n = 500;
  c.horizon = 1.0;

  const std::vector<int> ks{1, 2, 3, 10, 15};
  const double hursts[] = {0.6, 0.75, 0.9};
  Table l{{"s"}, {}};
  Table l_inv{{"s"}, {}};
  for (double h : hursts) {
    RunConfig k = c;
    k.a = k.b = 1.0;
    k.hurst = h;
    const std::string tag = format_number(h);
    const Table gamma = kernel_table(k, 1.0, "gamma", ks);
    emit(gamma, k, meta_for(k, "demo", {{"curve", "gamma"}, {"k", ks}, {"t", 1.0}}),
         file("gamma_summands_h" + tag), out);
    const Table lt = kernel_table(k, 1.0, "l", {});
    const Table lit = kernel_table(k, 1.0, "l-inverse", {});
    l.columns.push_back("h" + tag);
    l_inv.columns.push_back("h" + tag);
    for (std::size_t i = 0; i < lt.rows.size(); ++i) {
      if (l.rows.size() <= i) l.rows.push_back({lt.rows[i][0]});
      if (l_inv.rows.size() <= i) l_inv.rows.push_back({lit.rows[i][0]});
      l.rows[i].push_back(lt.rows[i][1]);
      l_inv.rows[i].push_back(lit.rows[i][1]);
    }
  }
  RunConfig unit = c;
  unit.a = unit.b = 1.0;
  emit(l, unit, meta_for(unit, "demo", {{"curve", "l"}, {"t", 1.0}, {"hursts", hursts}}),
       file("kernel_l"), out);
  emit(l_inv, unit, meta_for(unit, "demo", {{"curve", "l-inverse"}, {"t", 1.0}, {"hursts", hursts}}),
       file("kernel_l_inverse"), out);

  const double presets[][3] = {{0.4, 1.4, 0.6}, {1.0, 3.0, 0.75}, {4.0, 9.0, 0.9}};
  for (const auto& pr : presets) {
    RunConfig s = c;
    s.a = pr[0];
    s.b = pr[1];
    s.hurst = pr[2];
    s.paths = 1;
    s.scheme = "cholesky";
    const std::string stem = "path_a" + format_number(pr[0]) + "_b" + format_number(pr[1]) + "_h" +
                             format_number(pr[2]);
    emit(paths_table(simulate_paths(s)), s, meta_for(s, "demo"), file(stem), out);
  }
  out << "demo files written to " << dir << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ccmfbm: completely correlated mixed fractional Brownian motion toolkit", "ccmfbm"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunConfig cfg;
  int status = kExitOk;

  auto* sim = app.add_subcommand("simulate", "simulate sample paths (path_id,t,x,w,bh)");
  add_common(sim, cfg);
  std::string drift = "none";
  double theta = 0.0;
  sim->add_option("--drift-model", drift, "where a drift theta enters")
      ->check(CLI::IsMember({"none", "driving-noise", "observation"}))
      ->capture_default_str();
  sim->add_option("--theta", theta, "drift parameter")->capture_default_str();

  auto* kern = app.add_subcommand("kernel", "kernel curve s -> k(t, s) at cell midpoints of (0, t)");
  add_common(kern, cfg);
  double kernel_t = 1.0;
  std::string curve = "l-inverse";
  std::vector<int> ks{1};
  kern->add_option("--t", kernel_t, "fixed time t")->capture_default_str();
  kern->add_option("--curve", curve, "which kernel")
      ->check(CLI::IsMember({"l", "l-inverse", "mg", "gamma"}))
      ->capture_default_str();
  kern->add_option("--k", ks, "summand indices for --curve gamma")->delimiter(',');

  auto* cov = app.add_subcommand("cov", "covariance table t,s,cov at grid nodes");
  add_common(cov, cfg);

  auto* inv = app.add_subcommand(
      "invert", "recover the driving Bm from paths (--input) or dump a discrete operator");
  add_common(inv, cfg);
  std::string input;
  std::string op = "inverse";
  inv->add_option("--input", input, "paths CSV to invert");
  inv->add_option("--operator", op, "operator to dump when no --input is given")
      ->check(CLI::IsMember({"forward", "inverse", "numeric-inverse"}))
      ->capture_default_str();

  auto* est = app.add_subcommand("estimate-drift", "drift MLE per path");
  add_common(est, cfg);
  est->add_option("--input", input, "paths CSV (default: simulate with --theta)");
  est->add_option("--theta", theta, "true drift when simulating")->capture_default_str();

  auto* pred = app.add_subcommand("predict", "conditional mean and variance at future times");
  add_common(pred, cfg);
  double u = 0.5;
  std::string targets = "0.6,0.8,1.0";
  pred->add_option("--input", input, "paths CSV (default: simulate)");
  pred->add_option("--u", u, "observation horizon (a grid node)")->capture_default_str();
  pred->add_option("--targets", targets, "comma-separated target times in [u, T]")
      ->capture_default_str();
  std::string cov_output;
  pred->add_option("--cov-output", cov_output, "also write the conditional covariance (t,s,cov)");

  auto* ver = app.add_subcommand("verify", "run the acceptance criteria and print pass/fail");
  add_common(ver, cfg);
  std::string level = "desk";
  std::vector<int> criteria;
  ver->add_option("--level", level, "verification level")
      ->check(CLI::IsMember({"desk"}))
      ->capture_default_str();
  ver->add_option("--criteria", criteria, "criterion ids to run (default: all)")->delimiter(',');

  auto* demo = app.add_subcommand("demo", "write the kernel curves and preset paths");
  add_common(demo, cfg);
  std::string demo_dir = "demo";
  demo->add_option("--output-dir", demo_dir, "directory for demo files")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed()) {
      const DriftModel model = drift == "driving-noise" ? DriftModel::driving_noise
                               : drift == "observation" ? DriftModel::observation
                                                        : DriftModel::none;
      emit(paths_table(simulate_paths(cfg, model, theta)), cfg,
           meta_for(cfg, "simulate", {{"drift_model", drift}, {"theta", theta}}), cfg.output, out);
    } else if (kern->parsed()) {
      cfg.params();
      const Table t = kernel_table(cfg, kernel_t, curve, ks);
      emit(t, cfg, meta_for(cfg, "kernel", {{"curve", curve}, {"t", kernel_t}, {"k", ks}}),
           cfg.output, out);
    } else if (cov->parsed()) {
      const ModelParams p = cfg.params();
      const TimeGrid g = cfg.grid();
      Table t{{"t", "s", "cov"}, {}};
      for (int k = 1; k <= g.steps(); ++k)
        for (int j = 1; j <= k; ++j)
          t.rows.push_back({g.node(k), g.node(j), ccmfbm_cov(p, g.node(k), g.node(j))});
      emit(t, cfg, meta_for(cfg, "cov"), cfg.output, out);
    } else if (inv->parsed()) {
      const ModelParams p = cfg.params();
      if (!input.empty()) {
        PathSet set = read_paths_csv(input);
        std::optional<TriangularKernel> inverse;
        for (auto& path : set.paths) {
          if (!inverse || !(inverse->grid() == path.grid)) {
            inverse = build_inverse_operator(p, path.grid, cfg.series());
          }
          path = recover_bm(path, *inverse);
        }
        Table t = paths_table(set);
        t.columns.pop_back();
        for (auto& row : t.rows) row.pop_back();
        emit(t, cfg, meta_for(cfg, "invert", {{"input", input}}), cfg.output, out);
      } else {
        const TimeGrid g = cfg.grid();
        const TriangularKernel forward = build_forward_operator(p, g);
        const TriangularKernel m = op == "forward"   ? forward
                                   : op == "inverse" ? build_inverse_operator(p, g, cfg.series())
                                                     : numeric_inverse_operator(forward);
        emit(matrix_table(m), cfg, meta_for(cfg, "invert", {{"operator", op}}), cfg.output, out);
      }
    } else if (est->parsed()) {
      const ModelParams p = cfg.params();
      const PathSet set = input.empty() ? simulate_paths(cfg, DriftModel::driving_noise, theta)
                                        : read_paths_csv(input);
      Table t{{"path_id", "theta_hat", "terminal_w"}, {}};
      std::optional<DriftEstimator> estimator;
      for (std::size_t i = 0; i < set.paths.size(); ++i) {
        const SamplePath& path = set.paths[i];
        if (!estimator || !(estimator->grid() == path.grid)) estimator.emplace(p, path.grid, cfg.series());
        t.rows.push_back({set.ids[i], estimator->mle(path), estimator->terminal_bm(path)});
      }
      emit(t, cfg, meta_for(cfg, "estimate-drift", {{"input", input}, {"theta", theta}}),
           cfg.output, out);
    } else if (pred->parsed()) {
      const ModelParams p = cfg.params();
      const std::vector<double> ts = parse_list(targets);
      const PathSet set = input.empty() ? simulate_paths(cfg) : read_paths_csv(input);
      Table t{{"path_id", "t", "mean", "variance"}, {}};
      std::optional<Predictor> predictor;
      for (std::size_t i = 0; i < set.paths.size(); ++i) {
        const SamplePath& path = set.paths[i];
        if (!predictor || !(predictor->grid() == path.grid)) predictor.emplace(p, path.grid, u, ts, cfg.series());
        const PredictionResult r = predictor->predict(path);
        for (std::size_t j = 0; j < ts.size(); ++j)
          t.rows.push_back({set.ids[i], ts[j], r.mean[j], r.cov(j, j)});
      }
      emit(t, cfg, meta_for(cfg, "predict", {{"input", input}, {"u", u}, {"targets", ts}}),
           cfg.output, out);
      if (!cov_output.empty() && predictor) {
        Table c{{"t", "s", "cov"}, {}};
        for (std::size_t i = 0; i < ts.size(); ++i)
          for (std::size_t j = 0; j < ts.size(); ++j) c.rows.push_back({ts[i], ts[j], predictor->cov()(i, j)});
        emit(c, cfg, meta_for(cfg, "predict", {{"u", u}, {"targets", ts}}), cov_output, out);
      }
    } else if (ver->parsed()) {
      verify::AcceptanceOptions options;
      options.only.insert(criteria.begin(), criteria.end());
      options.seed = ver->count("--seed") ? cfg.seed : options.seed;
      options.on_result = [&](const verify::CriterionResult& r) {
        out << verify::format_result(r) << std::endl;
      };
      const auto results = verify::run_acceptance(options);
      int failed = 0;
      for (const auto& r : results) failed += !r.passed;
      out << results.size() - failed << "/" << results.size() << " criteria passed\n";
      if (!cfg.output.empty()) {
        json doc{{"meta", meta_for(cfg, "verify", {{"level", level}, {"criteria", join_ints(criteria)}})},
                 {"results", json::array()}};
        for (const auto& r : results) {
          doc["results"].push_back({{"id", r.id},
                                    {"name", r.name},
                                    {"passed", r.passed},
                                    {"detail", r.detail},
                                    {"seconds", r.seconds}});
        }
        std::ofstream file(cfg.output, std::ios::binary);
        if (!file) throw DomainError("cannot open '" + cfg.output + "' for writing");
        file << doc.dump(2) << '\n';
      }
      status = failed == 0 ? kExitOk : kExitCheckFailed;
    } else if (demo->parsed()) {
      status = run_demo(cfg, demo_dir, out);
    }
  } catch (const DomainError& e) {
    err << "ccmfbm: invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "ccmfbm: invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "ccmfbm: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "ccmfbm: error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return status;
}

}  // namespace ccmfbm::cli
