// wienerlab CLI: experiment driver for the invertibility diagnostics.
//
// Commands: diagnose | invert | oracle | innovation | refine. Every run is
// reproducible: a JSON config (overridable by flags, flags win) plus the
// seed pins the outputs byte for byte, independent of --threads.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wienerlab/drift.hpp"
#include "wienerlab/entropy.hpp"
#include "wienerlab/filtering.hpp"
#include "wienerlab/girsanov.hpp"
#include "wienerlab/io.hpp"
#include "wienerlab/parallel.hpp"
#include "wienerlab/transform.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wienerlab;

namespace {

constexpr int kSchemaVersion = 1;

// -------------------------------------------------------------------------
// Config
// -------------------------------------------------------------------------

struct GridConfig {
  std::string kind = "uniform";
  std::size_t n = 128;
  double ratio = 0.5;
  int k_max = 3;
  int refine = 1;
  std::vector<double> points;

  [[nodiscard]] GridPtr build() const {
    if (kind == "uniform") return make_uniform_grid(n);
    if (kind == "geometric") return make_geometric_grid(ratio, k_max, refine);
    if (kind == "explicit") return make_explicit_grid(points);
    throw std::invalid_argument("grid kind must be uniform, geometric or explicit");
  }

  [[nodiscard]] json to_json() const {
    json j{{"kind", kind}};
    if (kind == "uniform") j["n"] = n;
    if (kind == "geometric") {
      j["ratio"] = ratio;
      j["k_max"] = k_max;
      j["refine"] = refine;
    }
    if (kind == "explicit") j["points"] = points;
    return j;
  }
};

struct OracleConfig {
  std::string mode = "mc";  // mc | tree
  std::size_t depth = 10;
  std::string branching = "rademacher";  // rademacher | gauss-hermite
  int gh_nodes = 3;
  double eps_group = 1e-9;
  std::size_t cap = kDefaultTreeCap;
};

struct InvertConfig {
  std::string method = "sequential-euler";  // or picard
  double tol = 1e-10;
  std::size_t max_iter = 200;
  std::size_t paths = 64;
  std::size_t trace_paths = 4;
};

struct ExperimentConfig {
  json drift = json{{"variant", "zero"}};
  GridConfig grid;
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out_dir = "out";
  ParticleFilterConfig estimator;
  OracleConfig oracle;
  InvertConfig invert;
  double z_threshold = 4.0;
  std::vector<std::size_t> refine_grid_sizes = {16, 64, 256};

  [[nodiscard]] DriftSpec drift_spec() const { return DriftSpec::from_json(drift); }

  // Experiment identity only: execution knobs (threads, out) excluded so
  // reruns with different worker counts emit identical reports.
  [[nodiscard]] json resolved() const {
    json j{{"drift", drift},
           {"grid", grid.to_json()},
           {"paths", paths},
           {"seed", seed},
           {"estimator",
            json{{"k_neighbors", estimator.k_neighbors},
                 {"query_count", estimator.query_count},
                 {"ref_subsample", estimator.ref_subsample}}},
           {"oracle",
            json{{"mode", oracle.mode},
                 {"depth", oracle.depth},
                 {"branching", oracle.branching},
                 {"gh_nodes", oracle.gh_nodes},
                 {"eps_group", oracle.eps_group},
                 {"cap", oracle.cap}}},
           {"invert",
            json{{"method", invert.method},
                 {"tol", invert.tol},
                 {"max_iter", invert.max_iter},
                 {"paths", invert.paths},
                 {"trace_paths", invert.trace_paths}}},
           {"innovation", json{{"z_threshold", z_threshold}}},
           {"refine", json{{"grids", refine_grid_sizes}}}};
    return j;
  }
};

void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  in >> j;
  if (j.contains("drift")) cfg.drift = j.at("drift");
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (g.contains("kind")) cfg.grid.kind = g.at("kind").get<std::string>();
    if (g.contains("n")) cfg.grid.n = g.at("n").get<std::size_t>();
    if (g.contains("ratio")) cfg.grid.ratio = g.at("ratio").get<double>();
    if (g.contains("k_max")) cfg.grid.k_max = g.at("k_max").get<int>();
    if (g.contains("refine")) cfg.grid.refine = g.at("refine").get<int>();
    if (g.contains("points")) cfg.grid.points = g.at("points").get<std::vector<double>>();
  }
  if (j.contains("paths")) cfg.paths = j.at("paths").get<std::size_t>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<unsigned>();
  if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
  if (j.contains("estimator")) {
    const auto& e = j.at("estimator");
    if (e.contains("k_neighbors")) cfg.estimator.k_neighbors = e.at("k_neighbors").get<std::size_t>();
    if (e.contains("query_count")) cfg.estimator.query_count = e.at("query_count").get<std::size_t>();
    if (e.contains("ref_subsample"))
      cfg.estimator.ref_subsample = e.at("ref_subsample").get<std::size_t>();
  }
  if (j.contains("oracle")) {
    const auto& o = j.at("oracle");
    if (o.contains("mode")) cfg.oracle.mode = o.at("mode").get<std::string>();
    if (o.contains("depth")) cfg.oracle.depth = o.at("depth").get<std::size_t>();
    if (o.contains("branching")) cfg.oracle.branching = o.at("branching").get<std::string>();
    if (o.contains("gh_nodes")) cfg.oracle.gh_nodes = o.at("gh_nodes").get<int>();
    if (o.contains("eps_group")) cfg.oracle.eps_group = o.at("eps_group").get<double>();
    if (o.contains("cap")) cfg.oracle.cap = o.at("cap").get<std::size_t>();
  }
  if (j.contains("invert")) {
    const auto& v = j.at("invert");
    if (v.contains("method")) cfg.invert.method = v.at("method").get<std::string>();
    if (v.contains("tol")) cfg.invert.tol = v.at("tol").get<double>();
    if (v.contains("max_iter")) cfg.invert.max_iter = v.at("max_iter").get<std::size_t>();
    if (v.contains("paths")) cfg.invert.paths = v.at("paths").get<std::size_t>();
    if (v.contains("trace_paths")) cfg.invert.trace_paths = v.at("trace_paths").get<std::size_t>();
  }
  if (j.contains("innovation") && j.at("innovation").contains("z_threshold")) {
    cfg.z_threshold = j.at("innovation").at("z_threshold").get<double>();
  }
  if (j.contains("refine") && j.at("refine").contains("grids")) {
    cfg.refine_grid_sizes = j.at("refine").at("grids").get<std::vector<std::size_t>>();
  }
}

// "name:key=val,key=val", "@file.json", or inline JSON.
json parse_drift_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw std::invalid_argument("cannot open drift file: " + arg.substr(1));
    json j;
    in >> j;
    return j;
  }
  if (!arg.empty() && arg.front() == '{') return json::parse(arg);

  const auto colon = arg.find(':');
  json j{{"variant", arg.substr(0, colon)}};
  if (colon == std::string::npos) return j;
  std::stringstream params(arg.substr(colon + 1));
  std::string pair;
  while (std::getline(params, pair, ',')) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("drift parameter without '=': " + pair);
    }
    std::string key = pair.substr(0, eq);
    if (key == "kmax") key = "k_max";
    const std::string value = pair.substr(eq + 1);
    try {
      std::size_t used = 0;
      const double num = std::stod(value, &used);
      if (used == value.size()) {
        if (key == "k_max" || key == "sign") {
          j[key] = static_cast<int>(num);
        } else {
          j[key] = num;
        }
        continue;
      }
    } catch (const std::exception&) {
    }
    j[key] = value;
  }
  if (j.at("variant") == "scaled" || j.at("variant") == "stopped") {
    throw std::invalid_argument("composed drifts take JSON form, e.g. "
                                "--drift '{\"variant\":\"scaled\",\"c\":2,\"inner\":{...}}'");
  }
  return j;
}

// "uniform:n=128" | "geometric:ratio=0.5,kmax=3,refine=4" | "explicit:..." .
void parse_grid_arg(GridConfig& grid, const std::string& arg) {
  const auto colon = arg.find(':');
  grid.kind = arg.substr(0, colon);
  if (colon == std::string::npos) return;
  std::stringstream params(arg.substr(colon + 1));
  std::string pair;
  while (std::getline(params, pair, ',')) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("grid parameter without '='");
    const std::string key = pair.substr(0, eq);
    const std::string value = pair.substr(eq + 1);
    if (key == "n") grid.n = static_cast<std::size_t>(std::stoull(value));
    else if (key == "ratio") grid.ratio = std::stod(value);
    else if (key == "kmax" || key == "k_max") grid.k_max = std::stoi(value);
    else if (key == "refine") grid.refine = std::stoi(value);
    else throw std::invalid_argument("unknown grid parameter: " + key);
  }
}

// -------------------------------------------------------------------------
// Output helpers
// -------------------------------------------------------------------------

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json_file(const fs::path& path, const json& j) {
  // nlohmann objects iterate in sorted key order: stable bytes.
  write_text(path, j.dump(2) + "\n");
}

json mc_json(const McEstimate& e) {
  return json{{"mean", e.mean}, {"std_error", e.std_error}, {"n_samples", e.n_samples}};
}

// Tree grid for oracle mode: geometric drifts keep their breakpoints and
// spread `depth` steps over the blocks; everything else gets uniform(depth).
GridPtr oracle_grid(const ExperimentConfig& cfg) {
  const DriftSpec spec = cfg.drift_spec();
  const auto* ts = spec.get_if<TsirelsonDrift>();
  if (ts != nullptr || cfg.grid.kind == "geometric") {
    const double ratio = ts != nullptr ? ts->ratio : cfg.grid.ratio;
    const int k_max = ts != nullptr ? ts->k_max : cfg.grid.k_max;
    const int blocks = k_max + 1;
    const int refine = std::max(1, static_cast<int>(cfg.oracle.depth) / blocks);
    return make_geometric_grid(ratio, k_max, refine);
  }
  return make_uniform_grid(cfg.oracle.depth);
}

TreeModel oracle_tree(const ExperimentConfig& cfg, GridPtr grid) {
  if (cfg.oracle.branching == "rademacher") return TreeModel::rademacher(std::move(grid));
  if (cfg.oracle.branching == "gauss-hermite") {
    return TreeModel::gauss_hermite(std::move(grid), cfg.oracle.gh_nodes);
  }
  throw std::invalid_argument("oracle branching must be rademacher or gauss-hermite");
}

// -------------------------------------------------------------------------
// Commands
// -------------------------------------------------------------------------

int cmd_diagnose(const ExperimentConfig& cfg) {
  const DriftSpec spec = cfg.drift_spec();
  DiagnosticReport report;
  if (cfg.oracle.mode == "tree") {
    const TreeModel model = oracle_tree(cfg, oracle_grid(cfg));
    if (model.path_count() > cfg.oracle.cap) {
      throw std::invalid_argument("oracle tree exceeds the path cap");
    }
    report = invertibility_gap(spec, model, cfg.oracle.eps_group);
  } else if (cfg.oracle.mode == "mc") {
    report = invertibility_gap(spec, cfg.grid.build(), cfg.paths, cfg.seed, cfg.estimator);
  } else {
    throw std::invalid_argument("oracle mode must be mc or tree");
  }

  json j = report.to_json();
  j["schema_version"] = kSchemaVersion;
  j["config"] = cfg.resolved();
  write_json_file(fs::path(cfg.out_dir) / "report.json", j);

  std::ostringstream csv;
  csv << DiagnosticReport::csv_header() << "\r\n" << report.csv_row() << "\r\n";
  write_text(fs::path(cfg.out_dir) / "summary.csv", csv.str());

  std::cout << "diagnose: drift=" << report.drift << " estimator=" << report.estimator
            << " energy=" << format_double(report.energy.mean)
            << " entropy_filter=" << format_double(report.entropy_filter.mean)
            << " gap=" << format_double(report.gap.mean) << " +- "
            << format_double(report.gap.std_error) << " verdict=" << to_string(report.verdict)
            << "\n";
  return 0;
}

int cmd_invert(const ExperimentConfig& cfg) {
  const DriftSpec spec = cfg.drift_spec();
  const GridPtr grid = cfg.grid.build();
  InverseSolveOptions opts;
  if (cfg.invert.method == "picard") {
    opts.method = InverseMethod::Picard;
  } else if (cfg.invert.method == "sequential-euler") {
    opts.method = InverseMethod::SequentialEuler;
  } else {
    throw std::invalid_argument("invert method must be picard or sequential-euler");
  }
  opts.tol = cfg.invert.tol;
  opts.max_iter = cfg.invert.max_iter;

  const bool closed_form = has_analytic_inverse(spec);
  double max_residual = 0.0, max_left = 0.0, max_right = 0.0, max_vs_analytic = 0.0;
  bool all_converged = true;

  std::ostringstream rows;
  CsvWriter csv(rows);
  csv.field(std::string("path"))
      .field(std::string("iterations"))
      .field(std::string("residual"))
      .field(std::string("converged"))
      .field(std::string("comp_left"))
      .field(std::string("comp_right"))
      .field(std::string("sup_vs_analytic"));
  csv.end_row();

  std::ostringstream trace_rows;
  CsvWriter trace_csv(trace_rows);
  trace_csv.field(std::string("path")).field(std::string("iteration"))
      .field(std::string("residual"));
  trace_csv.end_row();

  for (std::size_t p = 0; p < cfg.invert.paths; ++p) {
    const SamplePath w = sample_brownian_path(grid, 1, cfg.seed, p);
    InverseSolveOptions popts = opts;
    popts.keep_trace = p < cfg.invert.trace_paths;
    const InverseSolveResult r = solve_inverse_sde(spec, w, popts);
    const auto [left, right] = composition_residual(spec, w, r.candidate, opts);

    double vs_analytic = 0.0;
    if (closed_form) {
      const SamplePath exact = analytic_inverse(spec, w);
      for (std::size_t k = 0; k < exact.values.size(); ++k) {
        vs_analytic = std::max(vs_analytic, std::fabs(exact.values[k] - r.candidate.values[k]));
      }
    }
    csv.field(static_cast<std::uint64_t>(p))
        .field(static_cast<std::uint64_t>(r.iterations))
        .field(r.residual)
        .field(std::string(r.converged ? "true" : "false"))
        .field(left)
        .field(right)
        .field(closed_form ? format_double(vs_analytic) : std::string());
    csv.end_row();
    for (std::size_t it = 0; it < r.trace.size(); ++it) {
      trace_csv.field(static_cast<std::uint64_t>(p))
          .field(static_cast<std::uint64_t>(it + 1))
          .field(r.trace[it]);
      trace_csv.end_row();
    }

    max_residual = std::max(max_residual, r.residual);
    max_left = std::max(max_left, left);
    max_right = std::max(max_right, right);
    max_vs_analytic = std::max(max_vs_analytic, vs_analytic);
    all_converged = all_converged && r.converged;
  }

  write_text(fs::path(cfg.out_dir) / "residuals.csv", rows.str());
  write_text(fs::path(cfg.out_dir) / "trace.csv", trace_rows.str());

  json j{{"schema_version", kSchemaVersion},
         {"config", cfg.resolved()},
         {"method", cfg.invert.method},
         {"paths", cfg.invert.paths},
         {"max_residual", max_residual},
         {"max_left_composition", max_left},
         {"max_right_composition", max_right},
         {"all_converged", all_converged}};
  if (closed_form) j["max_sup_vs_analytic"] = max_vs_analytic;
  write_json_file(fs::path(cfg.out_dir) / "invert.json", j);

  std::cout << "invert: method=" << cfg.invert.method << " paths=" << cfg.invert.paths
            << " max_residual=" << format_double(max_residual)
            << " comp=(" << format_double(max_left) << "," << format_double(max_right) << ")"
            << (closed_form ? " vs_analytic=" + format_double(max_vs_analytic) : "") << "\n";
  return 0;
}

int cmd_oracle(const ExperimentConfig& cfg) {
  const DriftSpec spec = cfg.drift_spec();
  const TreeModel model = oracle_tree(cfg, oracle_grid(cfg));
  if (model.path_count() > cfg.oracle.cap) {
    throw std::invalid_argument("oracle tree exceeds the path cap");
  }
  const DiagnosticReport report = invertibility_gap(spec, model, cfg.oracle.eps_group);
  const TreeFilterResult tf = tree_conditional_drift(spec, model, cfg.oracle.eps_group,
                                                     cfg.oracle.cap);

  json j = report.to_json();
  j["schema_version"] = kSchemaVersion;
  j["config"] = cfg.resolved();
  j["tree"] = json{{"branching", cfg.oracle.branching},
                   {"depth", model.steps()},
                   {"paths", tf.tree.paths.count}};
  write_json_file(fs::path(cfg.out_dir) / "oracle.json", j);

  std::ofstream bin(fs::path(cfg.out_dir) / "filtered.bin", std::ios::binary);
  write_filtered_batch(bin, tf.filtered, cfg.seed);

  std::cout << "oracle: drift=" << report.drift << " depth=" << model.steps()
            << " paths=" << tf.tree.paths.count
            << " energy=" << format_double(report.energy.mean)
            << " filtered=" << format_double(report.entropy_filter.mean)
            << " gap=" << format_double(report.gap.mean)
            << " verdict=" << to_string(report.verdict) << "\n";
  return 0;
}

int cmd_innovation(const ExperimentConfig& cfg) {
  const DriftSpec spec = cfg.drift_spec();
  const InnovationStats stats = innovation_study(spec, cfg.grid.build(), cfg.paths, cfg.seed,
                                                 cfg.estimator, cfg.z_threshold);

  std::ostringstream rows;
  CsvWriter csv(rows);
  csv.field(std::string("t_left")).field(std::string("dt")).field(std::string("mean"))
      .field(std::string("se_mean")).field(std::string("variance"))
      .field(std::string("se_variance")).field(std::string("lag1_corr"))
      .field(std::string("se_corr")).field(std::string("z_mean")).field(std::string("z_var"))
      .field(std::string("z_corr")).field(std::string("pass"));
  csv.end_row();
  for (const auto& s : stats.steps) {
    csv.field(s.t_left).field(s.dt).field(s.mean).field(s.se_mean).field(s.variance)
        .field(s.se_variance).field(s.lag1_corr).field(s.se_corr).field(s.z_mean)
        .field(s.z_var).field(s.z_corr).field(std::string(s.pass ? "true" : "false"));
    csv.end_row();
  }
  write_text(fs::path(cfg.out_dir) / "innovation.csv", rows.str());

  std::size_t failures = 0;
  for (const auto& s : stats.steps) {
    if (!s.pass) ++failures;
  }
  json j{{"schema_version", kSchemaVersion},
         {"config", cfg.resolved()},
         {"n_paths", stats.n_paths},
         {"z_threshold", stats.z_threshold},
         {"steps", stats.steps.size()},
         {"failing_steps", failures},
         {"all_pass", stats.all_pass}};
  write_json_file(fs::path(cfg.out_dir) / "innovation.json", j);

  std::cout << "innovation: drift=" << spec.describe() << " steps=" << stats.steps.size()
            << " failing=" << failures << " all_pass=" << (stats.all_pass ? "true" : "false")
            << "\n";
  return 0;
}

int cmd_refine(const ExperimentConfig& cfg) {
  const DriftSpec spec = cfg.drift_spec();
  std::vector<GridPtr> grids;
  grids.reserve(cfg.refine_grid_sizes.size());
  for (std::size_t n : cfg.refine_grid_sizes) grids.push_back(make_uniform_grid(n));
  const auto reports = refinement_study(spec, grids, cfg.paths, cfg.seed, cfg.estimator);

  std::ostringstream rows;
  rows << "n," << DiagnosticReport::csv_header() << "\r\n";
  json items = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    rows << cfg.refine_grid_sizes[i] << ',' << reports[i].csv_row() << "\r\n";
    items.push_back(reports[i].to_json());
  }
  write_text(fs::path(cfg.out_dir) / "refinement.csv", rows.str());

  json j{{"schema_version", kSchemaVersion}, {"config", cfg.resolved()}, {"reports", items}};
  write_json_file(fs::path(cfg.out_dir) / "refinement.json", j);

  std::cout << "refine: drift=" << spec.describe() << " grids=" << reports.size() << "\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::cout << "  n=" << cfg.refine_grid_sizes[i]
              << " gap=" << format_double(reports[i].gap.mean) << " +- "
              << format_double(reports[i].gap.std_error)
              << " verdict=" << to_string(reports[i].verdict) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wienerlab: invertibility diagnostics for adapted perturbations of identity"};
  app.require_subcommand(1);

  std::string config_file;
  std::string drift_arg;
  std::string grid_arg;
  ExperimentConfig cfg;
  bool n_set = false, drift_set = false, grid_set = false;
  std::size_t n_flag = 128;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "JSON config file; flags override its fields");
    sub->add_option("--drift", drift_arg,
                    "drift spec: name[:k=v,...], inline JSON, or @file.json");
    sub->add_option("--grid", grid_arg, "grid spec: uniform:n=128 | geometric:ratio=...,kmax=...");
    sub->add_option("--n", n_flag, "uniform grid steps")->check(CLI::PositiveNumber);
    sub->add_option("--N", cfg.paths, "Monte Carlo path count")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--threads", cfg.threads, "worker thread cap (0 = hardware)");
    sub->add_option("--oracle", cfg.oracle.mode, "estimator backend: mc | tree");
    sub->add_option("--depth", cfg.oracle.depth, "tree depth (steps) for --oracle tree");
    sub->add_option("--k", cfg.estimator.k_neighbors, "k-NN neighbor count (0 = sqrt(N))");
    sub->add_option("--queries", cfg.estimator.query_count,
                    "filter query paths (0 = all paths)");
    sub->add_option("--refs", cfg.estimator.ref_subsample,
                    "reference pool size (0 = all paths)");
  };

  CLI::App* diagnose = app.add_subcommand("diagnose", "energy vs entropy gap diagnostic");
  CLI::App* invert = app.add_subcommand("invert", "inverse SDE solver residuals");
  CLI::App* oracle = app.add_subcommand("oracle", "exact tree-model oracle");
  CLI::App* innovation = app.add_subcommand("innovation", "innovation Brownian-motion tests");
  CLI::App* refine = app.add_subcommand("refine", "gap across a grid refinement family");

  for (CLI::App* sub : {diagnose, invert, oracle, innovation, refine}) add_common(sub);

  std::string method = "sequential-euler";
  invert->add_option("--method", method, "picard | sequential-euler");
  invert->add_option("--tol", cfg.invert.tol, "solver tolerance");
  invert->add_option("--max-iter", cfg.invert.max_iter, "picard iteration cap");
  invert->add_option("--paths", cfg.invert.paths, "paths to invert");
  double z_threshold = 4.0;
  innovation->add_option("--z", z_threshold, "per-step z-score threshold");
  std::vector<std::size_t> refine_sizes;
  refine->add_option("--grids", refine_sizes, "uniform grid sizes, coarse to fine");

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().front();

    // Config file first, then flags override what was explicitly given.
    if (!config_file.empty()) load_config_file(cfg, config_file);
    if (sub->count("--drift") > 0) drift_set = true;
    if (sub->count("--grid") > 0) grid_set = true;
    if (sub->count("--n") > 0) n_set = true;
    if (drift_set) cfg.drift = parse_drift_arg(drift_arg);
    if (grid_set) parse_grid_arg(cfg.grid, grid_arg);
    if (n_set) {
      cfg.grid.kind = "uniform";
      cfg.grid.n = n_flag;
    }
    if (sub == invert && invert->count("--method") > 0) cfg.invert.method = method;
    if (sub == innovation && innovation->count("--z") > 0) cfg.z_threshold = z_threshold;
    if (sub == refine && refine->count("--grids") > 0) cfg.refine_grid_sizes = refine_sizes;

    set_max_threads(cfg.threads);
    fs::create_directories(cfg.out_dir);

    // Validate drift/grid compatibility before spending any compute.
    const DriftSpec spec = cfg.drift_spec();
    if (cfg.oracle.mode != "tree") {
      DriftEvaluator probe(spec, cfg.grid.build());
    }

    if (sub == diagnose) return cmd_diagnose(cfg);
    if (sub == invert) return cmd_invert(cfg);
    if (sub == oracle) return cmd_oracle(cfg);
    if (sub == innovation) return cmd_innovation(cfg);
    if (sub == refine) return cmd_refine(cfg);
    std::cerr << "unknown subcommand\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
