// Command line front end: simulate / cluster / bicluster / evaluate / sweep,
// plus rerun to replay any command from its manifest. Every command writes a
// manifest holding the fully resolved configuration, so outputs are
// bit-reproducible from (manifest, binary).

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kkb/kkb.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr int kManifestSchema = 1;

// ---------------------------------------------------------------------------
// shared option blocks
// ---------------------------------------------------------------------------

struct InputOptions {
  std::string path;
  bool header = false;
  int grid_width = 1;
  int covariates = 0;  // 0: derive from the column count
};

kkb::DataMatrix load_matrix(const InputOptions& in) {
  return kkb::csv::read_matrix(in.path, in.grid_width, in.covariates, in.header);
}

kkb::BandwidthSetting parse_sigma(const std::string& text) {
  if (text == "median") return kkb::BandwidthSetting::median(1.0);
  if (text.rfind("median*", 0) == 0) {
    char* end = nullptr;
    const double mult = std::strtod(text.c_str() + 7, &end);
    if (end == nullptr || *end != '\0' || !(mult > 0.0))
      throw usage_error("bandwidth: expected median*<positive multiplier>, got '" + text + "'");
    return kkb::BandwidthSetting::median(mult);
  }
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || !(value > 0.0))
    throw usage_error("bandwidth: expected 'median', 'median*<mult>' or a positive value, got '" +
                      text + "'");
  return kkb::BandwidthSetting::explicit_value(value);
}

std::string sigma_text(const kkb::BandwidthSetting& s) {
  if (!s.use_median) return kkb::csv::format_double(s.value);
  if (s.multiplier == 1.0) return "median";
  return "median*" + kkb::csv::format_double(s.multiplier);
}

kkb::KernelFamily parse_kernel(const std::string& text) {
  if (text == "gaussian") return kkb::KernelFamily::gaussian;
  if (text == "linear") return kkb::KernelFamily::linear;
  throw usage_error("kernel: expected gaussian or linear, got '" + text + "'");
}

std::vector<double> parse_multipliers(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string token =
        text.substr(start, comma == std::string::npos ? comma : comma - start);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0' || !(v > 0.0))
      throw usage_error("multipliers: '" + token + "' is not a positive number");
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw usage_error("multipliers: empty list");
  return out;
}

json sigma_json(const kkb::KernelSpec& spec) {
  json j;
  j["family"] = kkb::name_of(spec.family);
  if (spec.family == kkb::KernelFamily::gaussian) {
    j["sigma"] = spec.sigma;
    j["provenance"] =
        spec.median_based ? "median*" + kkb::csv::format_double(spec.median_multiplier)
                          : std::string("explicit");
  }
  return j;
}

void write_manifest(const fs::path& path, json manifest) {
  manifest["tool_version"] = kkb::version;
  manifest["manifest_schema"] = kManifestSchema;
  std::ofstream out(path);
  if (!out) throw kkb::io_error("cannot open " + path.string() + " for writing");
  out << manifest.dump(2) << '\n';
}

fs::path prepare_out_dir(const std::string& out_dir) {
  fs::path dir(out_dir.empty() ? "." : out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw kkb::io_error("cannot create output directory " + dir.string());
  return dir;
}

std::string absolute_path(const std::string& p) {
  std::error_code ec;
  const fs::path abs = fs::absolute(p, ec);
  return ec ? p : abs.string();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
  int scenario = 1;
  int n = 200;
  int p = 200;
  std::uint64_t seed = 0;
  std::string variance_convention = "sd";
  std::string out_dir = ".";
};

int run_simulate(const SimulateOptions& opt) {
  if (opt.scenario < 1 || opt.scenario > 3)
    throw usage_error("simulate: --scenario must be one of {1, 2, 3}");
  if (opt.variance_convention != "sd" && opt.variance_convention != "var")
    throw usage_error("simulate: --variance-convention must be sd or var");
  const auto start = std::chrono::steady_clock::now();
  kkb::ScenarioSpec spec{opt.scenario, opt.n, opt.p, opt.seed, opt.variance_convention == "sd"};
  const kkb::SyntheticData data = kkb::gen_scenario(spec);

  const fs::path dir = prepare_out_dir(opt.out_dir);
  kkb::csv::write_matrix(dir / "matrix.csv", data.matrix);
  kkb::csv::write_labels(dir / "truth_rows.csv", data.row_labels);
  kkb::csv::write_labels(dir / "truth_cols.csv", data.col_labels);

  json manifest;
  manifest["command"] = "simulate";
  manifest["seed"] = opt.seed;
  manifest["config"] = {{"scenario", opt.scenario},
                        {"n", opt.n},
                        {"p", opt.p},
                        {"seed", opt.seed},
                        {"variance_convention", opt.variance_convention}};
  manifest["outputs"] = {{"matrix", "matrix.csv"},
                         {"truth_rows", "truth_rows.csv"},
                         {"truth_cols", "truth_cols.csv"}};
  manifest["timings_sec"] = {{"total", seconds_since(start)}};
  write_manifest(dir / "simulate_manifest.json", manifest);
  std::cout << "wrote " << (dir / "matrix.csv").string() << " (" << opt.n << " x " << opt.p
            << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// cluster
// ---------------------------------------------------------------------------

struct ClusterOptions {
  InputOptions input;
  std::string axis = "rows";
  int clusters = 2;
  int restarts = 100;
  int max_sweeps = 1000;
  std::string kernel = "gaussian";
  std::string sigma = "median";
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = ".";
};

int run_cluster(const ClusterOptions& opt) {
  if (opt.axis != "rows" && opt.axis != "cols")
    throw usage_error("cluster: --axis must be rows or cols");
  const auto start = std::chrono::steady_clock::now();
  kkb::DataMatrix matrix = load_matrix(opt.input);
  if (opt.axis == "cols") matrix = kkb::transpose_roles(matrix);

  const kkb::KernelFamily family = parse_kernel(opt.kernel);
  const kkb::BandwidthSetting sigma = parse_sigma(opt.sigma);
  kkb::KernelSpec spec;
  spec.family = family;
  if (family == kkb::KernelFamily::gaussian) {
    if (sigma.use_median) {
      spec.sigma = sigma.multiplier * kkb::median_heuristic(matrix, kkb::Axis::rows);
      spec.median_based = true;
      spec.median_multiplier = sigma.multiplier;
    } else {
      spec.sigma = sigma.value;
    }
  }

  kkb::KGroupsOptions opts;
  opts.clusters = opt.clusters;
  opts.restarts = opt.restarts;
  opts.max_sweeps = opt.max_sweeps;
  opts.seed = opt.seed;
  opts.threads = opt.threads;
  const kkb::KGroupsResult result = kkb::kernel_kgroups(matrix, kkb::Axis::rows, spec, opts);

  const fs::path dir = prepare_out_dir(opt.out_dir);
  kkb::csv::write_labels(dir / "labels.csv", result.labels);
  kkb::csv::write_restart_log(dir / "restarts.csv", result.restarts);

  json manifest;
  manifest["command"] = "cluster";
  manifest["seed"] = opt.seed;
  manifest["config"] = {{"input", absolute_path(opt.input.path)},
                        {"header", opt.input.header},
                        {"grid_width", opt.input.grid_width},
                        {"covariates", opt.input.covariates},
                        {"axis", opt.axis},
                        {"clusters", opt.clusters},
                        {"restarts", opt.restarts},
                        {"max_sweeps", opt.max_sweeps},
                        {"kernel", opt.kernel},
                        {"sigma", opt.sigma},
                        {"seed", opt.seed},
                        {"threads", opt.threads}};
  manifest["resolved"] = {{"sigma", sigma_json(spec)}};
  manifest["objective"] = result.objective;
  manifest["best_restart"] = result.best_restart;
  manifest["outputs"] = {{"labels", "labels.csv"}, {"restarts", "restarts.csv"}};
  manifest["timings_sec"] = {{"total", seconds_since(start)}};
  write_manifest(dir / "cluster_manifest.json", manifest);
  std::cout << "objective " << kkb::csv::format_double(result.objective) << ", labels in "
            << (dir / "labels.csv").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// bicluster
// ---------------------------------------------------------------------------

struct BiclusterOptions {
  InputOptions input;           // file mode
  int scenario = 0;             // scenario mode when > 0
  int n = 200, p = 200;
  int trials = 1;
  std::string variance_convention = "sd";
  int clusters = 2;
  int rounds = 20;
  int restarts = 100;
  std::string kernel = "gaussian";
  std::string sigma_data = "median";
  std::string sigma_vars = "median";
  bool no_phase_restarts = false;
  int max_sweeps = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = ".";
};

kkb::AkkbConfig bicluster_config(const BiclusterOptions& opt) {
  kkb::AkkbConfig cfg;
  cfg.clusters = opt.clusters;
  cfg.rounds = opt.rounds;
  cfg.restarts = opt.restarts;
  cfg.family = parse_kernel(opt.kernel);
  cfg.sigma_data = parse_sigma(opt.sigma_data);
  cfg.sigma_variables = parse_sigma(opt.sigma_vars);
  cfg.phase_restarts = !opt.no_phase_restarts;
  cfg.max_sweeps = opt.max_sweeps;
  cfg.seed = opt.seed;
  cfg.threads = opt.threads;
  return cfg;
}

json bicluster_config_json(const BiclusterOptions& opt) {
  json j = {{"clusters", opt.clusters},
            {"rounds", opt.rounds},
            {"restarts", opt.restarts},
            {"kernel", opt.kernel},
            {"sigma_data", opt.sigma_data},
            {"sigma_vars", opt.sigma_vars},
            {"phase_restarts", !opt.no_phase_restarts},
            {"max_sweeps", opt.max_sweeps},
            {"seed", opt.seed},
            {"threads", opt.threads}};
  if (opt.scenario > 0) {
    j["scenario"] = opt.scenario;
    j["n"] = opt.n;
    j["p"] = opt.p;
    j["trials"] = opt.trials;
    j["variance_convention"] = opt.variance_convention;
  } else {
    j["input"] = absolute_path(opt.input.path);
    j["header"] = opt.input.header;
    j["grid_width"] = opt.input.grid_width;
    j["covariates"] = opt.input.covariates;
  }
  return j;
}

json timings_json(const kkb::BiclusterResult& result) {
  json j;
  for (const auto& [phase, secs] : result.phase_seconds) j[phase] = secs;
  return j;
}

int run_bicluster_file(const BiclusterOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const kkb::DataMatrix matrix = load_matrix(opt.input);
  const kkb::AkkbConfig cfg = bicluster_config(opt);
  const kkb::BiclusterResult result = kkb::akkb_fit(matrix, cfg);

  const fs::path dir = prepare_out_dir(opt.out_dir);
  kkb::csv::write_labels(dir / "row_labels.csv", result.bipartition.row_labels);
  kkb::csv::write_labels(dir / "col_labels.csv", result.bipartition.col_labels);
  kkb::csv::write_history(dir / "history.csv", result.history);

  json manifest;
  manifest["command"] = "bicluster";
  manifest["seed"] = opt.seed;
  manifest["config"] = bicluster_config_json(opt);
  manifest["resolved"] = {{"sigma_data", sigma_json(result.kernel_data)},
                          {"sigma_vars", sigma_json(result.kernel_variables)}};
  manifest["converged"] = result.converged;
  manifest["rounds_run"] = result.rounds_run;
  manifest["empirical_risk"] =
      kkb::empirical_risk(matrix, result.bipartition, result.kernel_data);
  manifest["outputs"] = {{"row_labels", "row_labels.csv"},
                         {"col_labels", "col_labels.csv"},
                         {"history", "history.csv"}};
  json timings = timings_json(result);
  timings["total"] = seconds_since(start);
  manifest["timings_sec"] = timings;
  write_manifest(dir / "bicluster_manifest.json", manifest);
  std::cout << (result.converged ? "converged" : "stopped at round limit") << " after "
            << result.rounds_run << " round(s)\n";
  return 0;
}

int run_bicluster_scenario(const BiclusterOptions& opt) {
  if (opt.scenario < 1 || opt.scenario > 3)
    throw usage_error("bicluster: --scenario must be one of {1, 2, 3}");
  if (opt.trials < 1) throw usage_error("bicluster: --trials must be >= 1");
  if (opt.variance_convention != "sd" && opt.variance_convention != "var")
    throw usage_error("bicluster: --variance-convention must be sd or var");
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = prepare_out_dir(opt.out_dir);

  std::ofstream trials(dir / "trials.csv");
  if (!trials) throw kkb::io_error("cannot open trials.csv for writing");
  trials << "trial,seed,row_accuracy,col_accuracy,mean_accuracy,converged,rounds\n";

  std::vector<double> rows_acc, cols_acc, mean_acc;
  bool all_converged = true;
  for (int trial = 0; trial < opt.trials; ++trial) {
    const std::uint64_t seed = opt.seed + std::uint64_t(trial);
    kkb::ScenarioSpec spec{opt.scenario, opt.n, opt.p, seed, opt.variance_convention == "sd"};
    const kkb::SyntheticData data = kkb::gen_scenario(spec);
    kkb::AkkbConfig cfg = bicluster_config(opt);
    cfg.seed = seed;
    const kkb::BiclusterResult result = kkb::akkb_fit(data.matrix, cfg);
    const kkb::AccuracyReport report =
        kkb::bicluster_accuracy(result.bipartition, data.row_labels, data.col_labels);
    rows_acc.push_back(report.row_accuracy);
    cols_acc.push_back(report.col_accuracy);
    mean_acc.push_back(report.mean_accuracy);
    all_converged = all_converged && result.converged;
    trials << trial << ',' << seed << ',' << kkb::csv::format_double(report.row_accuracy) << ','
           << kkb::csv::format_double(report.col_accuracy) << ','
           << kkb::csv::format_double(report.mean_accuracy) << ','
           << (result.converged ? 1 : 0) << ',' << result.rounds_run << '\n';
  }
  if (!trials) throw kkb::io_error("write failed: trials.csv");
  trials.close();

  auto mean_sd = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= double(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(var / double(xs.size() - 1)) : 0.0;
    return std::pair<double, double>{mean, sd};
  };
  const auto [row_mean, row_sd] = mean_sd(rows_acc);
  const auto [col_mean, col_sd] = mean_sd(cols_acc);
  const auto [mean_mean, mean_sd_value] = mean_sd(mean_acc);

  std::ofstream summary(dir / "summary.csv");
  if (!summary) throw kkb::io_error("cannot open summary.csv for writing");
  summary << "metric,mean,sd\n";
  summary << "row_accuracy," << kkb::csv::format_double(row_mean) << ','
          << kkb::csv::format_double(row_sd) << '\n';
  summary << "col_accuracy," << kkb::csv::format_double(col_mean) << ','
          << kkb::csv::format_double(col_sd) << '\n';
  summary << "mean_accuracy," << kkb::csv::format_double(mean_mean) << ','
          << kkb::csv::format_double(mean_sd_value) << '\n';
  summary.close();

  json manifest;
  manifest["command"] = "bicluster";
  manifest["seed"] = opt.seed;
  manifest["config"] = bicluster_config_json(opt);
  manifest["converged"] = all_converged;
  manifest["mean_accuracy"] = mean_mean;
  manifest["outputs"] = {{"trials", "trials.csv"}, {"summary", "summary.csv"}};
  manifest["timings_sec"] = {{"total", seconds_since(start)}};
  write_manifest(dir / "bicluster_manifest.json", manifest);
  std::cout << "mean accuracy " << kkb::csv::format_double(mean_mean) << " over " << opt.trials
            << " trial(s)\n";
  return 0;
}

int run_bicluster(const BiclusterOptions& opt) {
  const bool file_mode = !opt.input.path.empty();
  const bool scenario_mode = opt.scenario > 0;
  if (file_mode == scenario_mode)
    throw usage_error("bicluster: pass exactly one of --input or --scenario");
  return file_mode ? run_bicluster_file(opt) : run_bicluster_scenario(opt);
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateOptions {
  std::string pred, truth;
  std::string pred_cols, truth_cols;
  std::string out_dir;  // empty: stdout only
};

int run_evaluate(const EvaluateOptions& opt) {
  if (opt.pred_cols.empty() != opt.truth_cols.empty())
    throw usage_error("evaluate: --pred-cols and --truth-cols go together");
  const auto start = std::chrono::steady_clock::now();
  const std::vector<int> pred = kkb::csv::read_labels(opt.pred);
  const std::vector<int> truth = kkb::csv::read_labels(opt.truth);

  json report;
  if (opt.pred_cols.empty()) {
    const kkb::LabelMatch match = kkb::clustering_accuracy(pred, truth);
    report["accuracy"] = match.accuracy;
    report["permutation"] = match.permutation;
  } else {
    const std::vector<int> pred_cols = kkb::csv::read_labels(opt.pred_cols);
    const std::vector<int> truth_cols = kkb::csv::read_labels(opt.truth_cols);
    int clusters = 1;
    for (int l : pred) clusters = std::max(clusters, l + 1);
    for (int l : pred_cols) clusters = std::max(clusters, l + 1);
    const kkb::AccuracyReport acc =
        kkb::bicluster_accuracy(kkb::Bipartition{pred, pred_cols, clusters}, truth, truth_cols);
    report["row_accuracy"] = acc.row_accuracy;
    report["col_accuracy"] = acc.col_accuracy;
    report["mean_accuracy"] = acc.mean_accuracy;
    report["row_permutation"] = acc.row_permutation;
    report["col_permutation"] = acc.col_permutation;
  }
  std::cout << report.dump(2) << '\n';

  if (!opt.out_dir.empty()) {
    const fs::path dir = prepare_out_dir(opt.out_dir);
    std::ofstream out(dir / "report.json");
    if (!out) throw kkb::io_error("cannot open report.json for writing");
    out << report.dump(2) << '\n';
    json manifest;
    manifest["command"] = "evaluate";
    manifest["config"] = {{"pred", absolute_path(opt.pred)},
                          {"truth", absolute_path(opt.truth)},
                          {"pred_cols", opt.pred_cols.empty() ? "" : absolute_path(opt.pred_cols)},
                          {"truth_cols",
                           opt.truth_cols.empty() ? "" : absolute_path(opt.truth_cols)}};
    manifest["outputs"] = {{"report", "report.json"}};
    manifest["timings_sec"] = {{"total", seconds_since(start)}};
    write_manifest(dir / "evaluate_manifest.json", manifest);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepOptions {
  InputOptions input;
  std::string truth_rows, truth_cols;
  int clusters = 2;
  int rounds = 20;
  int restarts = 100;
  std::string multipliers_data = "0.25,1,4";
  std::string multipliers_vars = "0.25,1,4";
  bool no_phase_restarts = false;
  int max_sweeps = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = ".";
};

int run_sweep(const SweepOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const kkb::DataMatrix matrix = load_matrix(opt.input);
  const std::vector<int> truth_rows = kkb::csv::read_labels(opt.truth_rows);
  const std::vector<int> truth_cols = kkb::csv::read_labels(opt.truth_cols);

  kkb::AkkbConfig base;
  base.clusters = opt.clusters;
  base.rounds = opt.rounds;
  base.restarts = opt.restarts;
  base.phase_restarts = !opt.no_phase_restarts;
  base.max_sweeps = opt.max_sweeps;
  base.seed = opt.seed;
  base.threads = opt.threads;
  const kkb::SweepGrid grid =
      kkb::bandwidth_sweep(matrix, truth_rows, truth_cols, base,
                           parse_multipliers(opt.multipliers_data),
                           parse_multipliers(opt.multipliers_vars));

  const fs::path dir = prepare_out_dir(opt.out_dir);
  kkb::csv::write_grid(dir / "grid.csv", grid);

  json grid_json;
  grid_json["multipliers_data"] = grid.multipliers_data;
  grid_json["multipliers_vars"] = grid.multipliers_vars;
  grid_json["base_sigma_data"] = grid.base_sigma_data;
  grid_json["base_sigma_variables"] = grid.base_sigma_variables;
  grid_json["mean_accuracy"] = grid.mean_accuracy;
  grid_json["row_accuracy"] = grid.row_accuracy;
  grid_json["col_accuracy"] = grid.col_accuracy;
  {
    std::ofstream out(dir / "grid.json");
    if (!out) throw kkb::io_error("cannot open grid.json for writing");
    out << grid_json.dump(2) << '\n';
  }

  json manifest;
  manifest["command"] = "sweep";
  manifest["seed"] = opt.seed;
  manifest["config"] = {{"input", absolute_path(opt.input.path)},
                        {"header", opt.input.header},
                        {"grid_width", opt.input.grid_width},
                        {"covariates", opt.input.covariates},
                        {"truth_rows", absolute_path(opt.truth_rows)},
                        {"truth_cols", absolute_path(opt.truth_cols)},
                        {"clusters", opt.clusters},
                        {"rounds", opt.rounds},
                        {"restarts", opt.restarts},
                        {"multipliers_data", opt.multipliers_data},
                        {"multipliers_vars", opt.multipliers_vars},
                        {"phase_restarts", !opt.no_phase_restarts},
                        {"max_sweeps", opt.max_sweeps},
                        {"seed", opt.seed},
                        {"threads", opt.threads}};
  manifest["outputs"] = {{"grid_csv", "grid.csv"}, {"grid_json", "grid.json"}};
  manifest["timings_sec"] = {{"total", seconds_since(start)}};
  write_manifest(dir / "sweep_manifest.json", manifest);
  std::cout << "grid " << grid.multipliers_data.size() << " x " << grid.multipliers_vars.size()
            << " written to " << (dir / "grid.csv").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// rerun
// ---------------------------------------------------------------------------

int dispatch_manifest(const json& manifest, const std::string& out_dir);

int run_rerun(const std::string& manifest_path, const std::string& out_dir) {
  std::ifstream in(manifest_path);
  if (!in) throw kkb::io_error("cannot open manifest " + manifest_path);
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw kkb::io_error("manifest " + manifest_path + ": " + e.what());
  }
  return dispatch_manifest(manifest, out_dir);
}

int dispatch_manifest(const json& manifest, const std::string& out_dir) {
  const std::string command = manifest.value("command", "");
  const json cfg = manifest.value("config", json::object());
  if (command == "simulate") {
    SimulateOptions opt;
    opt.scenario = cfg.at("scenario").get<int>();
    opt.n = cfg.at("n").get<int>();
    opt.p = cfg.at("p").get<int>();
    opt.seed = cfg.at("seed").get<std::uint64_t>();
    opt.variance_convention = cfg.value("variance_convention", "sd");
    opt.out_dir = out_dir;
    return run_simulate(opt);
  }
  if (command == "cluster") {
    ClusterOptions opt;
    opt.input = {cfg.at("input").get<std::string>(), cfg.value("header", false),
                 cfg.value("grid_width", 1), cfg.value("covariates", 0)};
    opt.axis = cfg.value("axis", "rows");
    opt.clusters = cfg.at("clusters").get<int>();
    opt.restarts = cfg.value("restarts", 100);
    opt.max_sweeps = cfg.value("max_sweeps", 1000);
    opt.kernel = cfg.value("kernel", "gaussian");
    opt.sigma = cfg.value("sigma", "median");
    opt.seed = cfg.value("seed", std::uint64_t(0));
    opt.threads = cfg.value("threads", 1);
    opt.out_dir = out_dir;
    return run_cluster(opt);
  }
  if (command == "bicluster") {
    BiclusterOptions opt;
    if (cfg.contains("scenario")) {
      opt.scenario = cfg.at("scenario").get<int>();
      opt.n = cfg.at("n").get<int>();
      opt.p = cfg.at("p").get<int>();
      opt.trials = cfg.value("trials", 1);
      opt.variance_convention = cfg.value("variance_convention", "sd");
    } else {
      opt.input = {cfg.at("input").get<std::string>(), cfg.value("header", false),
                   cfg.value("grid_width", 1), cfg.value("covariates", 0)};
    }
    opt.clusters = cfg.at("clusters").get<int>();
    opt.rounds = cfg.value("rounds", 20);
    opt.restarts = cfg.value("restarts", 100);
    opt.kernel = cfg.value("kernel", "gaussian");
    opt.sigma_data = cfg.value("sigma_data", "median");
    opt.sigma_vars = cfg.value("sigma_vars", "median");
    opt.no_phase_restarts = !cfg.value("phase_restarts", true);
    opt.max_sweeps = cfg.value("max_sweeps", 1000);
    opt.seed = cfg.value("seed", std::uint64_t(0));
    opt.threads = cfg.value("threads", 1);
    opt.out_dir = out_dir;
    return run_bicluster(opt);
  }
  if (command == "evaluate") {
    EvaluateOptions opt;
    opt.pred = cfg.at("pred").get<std::string>();
    opt.truth = cfg.at("truth").get<std::string>();
    opt.pred_cols = cfg.value("pred_cols", "");
    opt.truth_cols = cfg.value("truth_cols", "");
    opt.out_dir = out_dir;
    return run_evaluate(opt);
  }
  if (command == "sweep") {
    SweepOptions opt;
    opt.input = {cfg.at("input").get<std::string>(), cfg.value("header", false),
                 cfg.value("grid_width", 1), cfg.value("covariates", 0)};
    opt.truth_rows = cfg.at("truth_rows").get<std::string>();
    opt.truth_cols = cfg.at("truth_cols").get<std::string>();
    opt.clusters = cfg.at("clusters").get<int>();
    opt.rounds = cfg.value("rounds", 20);
    opt.restarts = cfg.value("restarts", 100);
    opt.multipliers_data = cfg.value("multipliers_data", "0.25,1,4");
    opt.multipliers_vars = cfg.value("multipliers_vars", "0.25,1,4");
    opt.no_phase_restarts = !cfg.value("phase_restarts", true);
    opt.max_sweeps = cfg.value("max_sweeps", 1000);
    opt.seed = cfg.value("seed", std::uint64_t(0));
    opt.threads = cfg.value("threads", 1);
    opt.out_dir = out_dir;
    return run_sweep(opt);
  }
  throw kkb::io_error("manifest: unknown command '" + command + "'");
}

void add_input_options(CLI::App* cmd, InputOptions& input, bool required) {
  auto* opt = cmd->add_option("--input", input.path, "input matrix CSV");
  if (required) opt->required();
  cmd->add_flag("--header", input.header, "skip one header line");
  cmd->add_option("--grid-width", input.grid_width, "grid samples per covariate (d)");
  cmd->add_option("--covariates", input.covariates,
                  "covariate count (p); 0 derives it from the column count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel k-groups clustering and alternating kernel biclustering"};
  app.require_subcommand(1);

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic benchmark matrix");
  simulate->add_option("--scenario", sim.scenario, "scenario id in {1, 2, 3}")->required();
  simulate->add_option("--n", sim.n, "rows");
  simulate->add_option("--p", sim.p, "covariates");
  simulate->add_option("--seed", sim.seed, "rng seed");
  simulate->add_option("--variance-convention", sim.variance_convention,
                       "read the scenario-1 normal parameter as sd or var");
  simulate->add_option("--out-dir", sim.out_dir, "output directory");

  ClusterOptions clu;
  CLI::App* cluster = app.add_subcommand("cluster", "flat kernel k-groups on one axis");
  add_input_options(cluster, clu.input, true);
  cluster->add_option("--axis", clu.axis, "rows or cols");
  cluster->add_option("--clusters", clu.clusters, "cluster count")->required();
  cluster->add_option("--restarts", clu.restarts, "random restarts");
  cluster->add_option("--max-sweeps", clu.max_sweeps, "sweep limit per restart");
  cluster->add_option("--kernel", clu.kernel, "gaussian or linear");
  cluster->add_option("--sigma", clu.sigma, "median, median*<mult>, or a value");
  cluster->add_option("--seed", clu.seed, "rng seed");
  cluster->add_option("--threads", clu.threads, "worker threads");
  cluster->add_option("--out-dir", clu.out_dir, "output directory");

  BiclusterOptions bic;
  CLI::App* bicluster = app.add_subcommand("bicluster", "alternating kernel biclustering");
  add_input_options(bicluster, bic.input, false);
  bicluster->add_option("--scenario", bic.scenario, "benchmark scenario instead of --input");
  bicluster->add_option("--n", bic.n, "scenario rows");
  bicluster->add_option("--p", bic.p, "scenario covariates");
  bicluster->add_option("--trials", bic.trials, "scenario trials (seeds seed..seed+N-1)");
  bicluster->add_option("--variance-convention", bic.variance_convention, "sd or var");
  bicluster->add_option("--clusters", bic.clusters, "cluster count on both axes")->required();
  bicluster->add_option("--rounds", bic.rounds, "alternation rounds (T)");
  bicluster->add_option("--restarts", bic.restarts, "restarts per phase (R)");
  bicluster->add_option("--kernel", bic.kernel, "gaussian or linear");
  bicluster->add_option("--sigma-data", bic.sigma_data, "median, median*<mult>, or a value");
  bicluster->add_option("--sigma-vars", bic.sigma_vars, "median, median*<mult>, or a value");
  bicluster->add_flag("--no-phase-restarts", bic.no_phase_restarts,
                      "warm starts only inside update phases");
  bicluster->add_option("--max-sweeps", bic.max_sweeps, "sweep limit per restart");
  bicluster->add_option("--seed", bic.seed, "rng seed");
  bicluster->add_option("--threads", bic.threads, "worker threads");
  bicluster->add_option("--out-dir", bic.out_dir, "output directory");

  EvaluateOptions eva;
  CLI::App* evaluate = app.add_subcommand("evaluate", "score labels against ground truth");
  evaluate->add_option("--pred", eva.pred, "predicted labels CSV")->required();
  evaluate->add_option("--truth", eva.truth, "truth labels CSV")->required();
  evaluate->add_option("--pred-cols", eva.pred_cols, "predicted column labels CSV");
  evaluate->add_option("--truth-cols", eva.truth_cols, "truth column labels CSV");
  evaluate->add_option("--out-dir", eva.out_dir, "also write report.json here");

  SweepOptions swp;
  CLI::App* sweep = app.add_subcommand("sweep", "bandwidth-sensitivity accuracy grid");
  add_input_options(sweep, swp.input, true);
  sweep->add_option("--truth-rows", swp.truth_rows, "truth row labels CSV")->required();
  sweep->add_option("--truth-cols", swp.truth_cols, "truth column labels CSV")->required();
  sweep->add_option("--clusters", swp.clusters, "cluster count")->required();
  sweep->add_option("--rounds", swp.rounds, "alternation rounds");
  sweep->add_option("--restarts", swp.restarts, "restarts per phase");
  sweep->add_option("--multipliers-data", swp.multipliers_data, "comma list of sigma_data multipliers");
  sweep->add_option("--multipliers-vars", swp.multipliers_vars, "comma list of sigma_vars multipliers");
  sweep->add_flag("--no-phase-restarts", swp.no_phase_restarts, "warm starts only in updates");
  sweep->add_option("--max-sweeps", swp.max_sweeps, "sweep limit per restart");
  sweep->add_option("--seed", swp.seed, "rng seed");
  sweep->add_option("--threads", swp.threads, "worker threads");
  sweep->add_option("--out-dir", swp.out_dir, "output directory");

  std::string rerun_manifest, rerun_out_dir;
  CLI::App* rerun = app.add_subcommand("rerun", "replay a command from its manifest");
  rerun->add_option("manifest", rerun_manifest, "manifest JSON path")->required();
  rerun->add_option("--out-dir", rerun_out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (cluster->parsed()) return run_cluster(clu);
    if (bicluster->parsed()) return run_bicluster(bic);
    if (evaluate->parsed()) return run_evaluate(eva);
    if (sweep->parsed()) return run_sweep(swp);
    if (rerun->parsed()) return run_rerun(rerun_manifest, rerun_out_dir);
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const kkb::degenerate_data_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const kkb::validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const kkb::io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
