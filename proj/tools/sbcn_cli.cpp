// sbcn command-line tool. Talks to the library only through the C API.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "sbcn/sbcn.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Failure {
  int exit_code;
  std::string message;
};

int exit_code_for(sbcn_status status) {
  switch (status) {
    case SBCN_ERR_PARSE:
    case SBCN_ERR_SCHEMA:
    case SBCN_ERR_IO:
    case SBCN_ERR_INVALID_ARGUMENT:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

void check(sbcn_status status) {
  if (status != SBCN_OK) {
    throw Failure{exit_code_for(status),
                  std::string(sbcn_status_name(status)) + ": " + sbcn_last_error()};
  }
}

struct Deleter {
  void operator()(sbcn_dataset* p) const { sbcn_dataset_free(p); }
  void operator()(sbcn_network* p) const { sbcn_network_free(p); }
  void operator()(sbcn_model* p) const { sbcn_model_free(p); }
  void operator()(char* p) const { sbcn_string_free(p); }
};

using DatasetPtr = std::unique_ptr<sbcn_dataset, Deleter>;
using NetworkPtr = std::unique_ptr<sbcn_network, Deleter>;
using ModelPtr = std::unique_ptr<sbcn_model, Deleter>;

std::string take(char* s) {
  std::unique_ptr<char, Deleter> owned(s);
  return std::string(s ? s : "");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitUsage, "cannot open " + path};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Writes to a temporary sibling first so a failed run never leaves a
// truncated output behind.
void write_file(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Failure{kExitUsage, "cannot write " + tmp.string()};
    out << content;
    if (!out.flush()) throw Failure{kExitUsage, "cannot write " + tmp.string()};
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Failure{kExitUsage, "cannot write " + path.string() + ": " + ec.message()};
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    write_file(out_path, content);
  }
}

DatasetPtr load_dataset(const std::string& path) {
  sbcn_dataset* d = nullptr;
  check(sbcn_dataset_load(path.c_str(), &d));
  return DatasetPtr(d);
}

std::size_t default_parallelism() {
  if (const char* env = std::getenv("SBCN_THREADS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

struct InferFlags {
  std::string regularizer = "bic";
  bool pf_only = false;
  bool bn = false;
  bool exhaustive = false;
  std::size_t max_parents = 0;
  double pseudocount = 0.0;
  std::string conditions = "point";
  std::size_t condition_replicates = 100;
  double confidence = 0.95;
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
  std::string dataset;
  std::string out;
  std::string dot;
};

void add_infer_flags(CLI::App* cmd, InferFlags& f) {
  cmd->add_option("dataset", f.dataset, "Binary dataset (CSV or TSV)")->required();
  cmd->add_option("--reg", f.regularizer, "Regularizer")
      ->check(CLI::IsMember({"none", "bic", "aic"}))
      ->capture_default_str();
  cmd->add_flag("--pf-only", f.pf_only, "Return the prima facie edges without search");
  cmd->add_flag("--bn", f.bn, "Unconstrained Bayesian network baseline");
  cmd->add_flag("--exhaustive", f.exhaustive, "Exhaustive search (small inputs only)");
  cmd->add_option("--max-parents", f.max_parents, "Parent cap (0 = unlimited)")
      ->capture_default_str();
  cmd->add_option("--pseudocount", f.pseudocount, "Additive smoothing for the tables")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--conditions", f.conditions, "Suppes condition test")
      ->check(CLI::IsMember({"point", "bootstrap"}))
      ->capture_default_str();
  cmd->add_option("--condition-replicates", f.condition_replicates,
                  "Replicates for the bootstrap condition test")
      ->capture_default_str();
  cmd->add_option("--confidence", f.confidence, "Confidence level for the bootstrap test")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  cmd->add_option("--parallelism", f.parallelism, "Worker threads (default $SBCN_THREADS)");
  cmd->add_option("-o,--out", f.out, "Output document (default stdout)");
  cmd->add_option("--dot", f.dot, "Also write a dot graph here");
}

sbcn_infer_options to_options(const InferFlags& f) {
  if (f.pf_only && f.bn) throw Failure{kExitUsage, "--pf-only and --bn are exclusive"};
  sbcn_infer_options o;
  sbcn_infer_options_init(&o);
  o.regularizer = f.regularizer == "none" ? SBCN_REG_NONE
                  : f.regularizer == "aic" ? SBCN_REG_AIC
                                           : SBCN_REG_BIC;
  o.prima_facie_only = f.pf_only;
  o.unconstrained = f.bn;
  o.search_mode = f.exhaustive ? SBCN_SEARCH_EXHAUSTIVE : SBCN_SEARCH_HILL_CLIMB;
  o.max_parents = f.max_parents;
  o.pseudocount = f.pseudocount;
  o.condition_mode = f.conditions == "bootstrap" ? SBCN_CONDITIONS_BOOTSTRAP : SBCN_CONDITIONS_POINT;
  o.condition_replicates = f.condition_replicates;
  o.confidence_level = f.confidence;
  o.seed = f.seed;
  o.parallelism = f.parallelism;
  return o;
}

void write_network(const sbcn_network* net, const InferFlags& f) {
  char* json = nullptr;
  check(sbcn_network_to_json(net, &json));
  std::string doc = take(json);
  std::string dot;
  if (!f.dot.empty()) {
    char* d = nullptr;
    check(sbcn_network_to_dot(net, &d));
    dot = take(d);
  }
  emit(f.out, doc);
  if (!f.dot.empty()) write_file(f.dot, dot);
}

void run_infer(const InferFlags& f) {
  auto options = to_options(f);
  auto data = load_dataset(f.dataset);
  sbcn_network* net = nullptr;
  check(sbcn_infer(data.get(), &options, &net));
  NetworkPtr owned(net);
  write_network(net, f);
}

void run_bootstrap(const InferFlags& f, std::size_t replicates) {
  auto options = to_options(f);
  auto data = load_dataset(f.dataset);
  sbcn_network* net = nullptr;
  check(sbcn_bootstrap(data.get(), &options, replicates, &net));
  NetworkPtr owned(net);
  write_network(net, f);
}

struct SimulateFlags {
  std::string topology = "tree";
  std::size_t nodes = 10;
  std::size_t samples = 200;
  double theta = 0.9;
  double epsilon = 0.05;
  std::optional<double> source_marginal;
  std::size_t max_parents = 0;
  bool allow_weak_gap = false;
  double noise = 0.0;
  std::string noise_mode = "random_entry";
  std::uint64_t seed = 0;
  std::string out;
};

void run_simulate(const SimulateFlags& f) {
  sbcn_model_options o;
  sbcn_model_options_init(&o);
  o.topology = f.topology.c_str();
  o.node_count = f.nodes;
  o.theta = f.theta;
  o.epsilon = f.epsilon;
  o.source_marginal = f.source_marginal.value_or(-1.0);
  o.max_parents = f.max_parents;
  o.allow_weak_gap = f.allow_weak_gap;
  auto mode = f.noise_mode == "flip" ? SBCN_NOISE_FLIP : SBCN_NOISE_RANDOM_ENTRY;

  sbcn_model* m = nullptr;
  sbcn_dataset* d = nullptr;
  check(sbcn_simulate(&o, f.samples, f.noise, mode, f.seed, &m, &d));
  ModelPtr model(m);
  DatasetPtr data(d);

  char* text = nullptr;
  check(sbcn_dataset_to_text(data.get(), &text));
  std::string dataset = take(text);
  check(sbcn_model_edge_list(model.get(), &text));
  std::string edges = take(text);
  check(sbcn_model_to_json(model.get(), &text));
  std::string sidecar = take(text);
  std::optional<std::string> formulas;
  if (f.topology.find("xor") != std::string::npos) {
    check(sbcn_model_xor_formulas(model.get(), &text));
    formulas = take(text);
  }

  std::error_code ec;
  fs::create_directories(f.out, ec);
  if (ec) throw Failure{kExitUsage, "cannot create " + f.out + ": " + ec.message()};
  fs::path dir(f.out);
  write_file(dir / "dataset.csv", dataset);
  write_file(dir / "edges.tsv", edges);
  write_file(dir / "model.json", sidecar);
  if (formulas) write_file(dir / "formulas.txt", *formulas);
}

struct ExperimentFlags {
  std::string config;
  std::string out;
  std::size_t parallelism = 1;
  bool record_runtime = false;
  bool print_config = false;
  bool full_scale = false;
};

void run_experiment(const ExperimentFlags& f) {
  if (f.print_config) {
    char* text = nullptr;
    check(sbcn_experiment_default_config(f.full_scale, &text));
    std::cout << take(text);
    return;
  }
  if (f.out.empty()) throw Failure{kExitUsage, "--out is required"};
  std::optional<std::string> config;
  if (!f.config.empty()) config = read_file(f.config);
  if (!config && f.full_scale) {
    char* text = nullptr;
    check(sbcn_experiment_default_config(1, &text));
    config = take(text);
  }
  sbcn_experiment_report report{};
  check(sbcn_experiment_run(config ? config->c_str() : nullptr, f.out.c_str(), f.parallelism,
                            f.record_runtime, &report));
  std::cerr << "cells: " << report.cells << " (computed " << report.computed << ", reused "
            << report.reused << "), rows: " << report.rows << ", failed rows: "
            << report.failures << '\n';
}

void run_lift(const std::string& dataset, const std::string& formulas, const std::string& out) {
  auto data = load_dataset(dataset);
  std::string text = read_file(formulas);
  sbcn_dataset* lifted = nullptr;
  check(sbcn_dataset_lift(data.get(), text.data(), text.size(), &lifted));
  DatasetPtr owned(lifted);
  char* csv = nullptr;
  check(sbcn_dataset_to_text(lifted, &csv));
  emit(out, take(csv));
}

int run_validate(const std::string& network, const std::string& dataset) {
  std::string text = read_file(network);
  sbcn_network* net = nullptr;
  check(sbcn_network_from_json(text.data(), text.size(), &net));
  NetworkPtr owned(net);
  auto data = load_dataset(dataset);
  std::size_t violations = 0;
  char* report = nullptr;
  check(sbcn_network_validate(net, data.get(), &violations, &report));
  std::string lines = take(report);
  if (violations > 0) {
    std::cerr << lines << violations << " edge(s) violate the Suppes conditions\n";
    return kExitFailure;
  }
  std::cout << "ok: " << sbcn_network_edge_count(net) << " edge(s) satisfy the Suppes conditions\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Suppes-Bayes causal network inference"};
  app.set_version_flag("--version", std::string(sbcn_version()));
  app.require_subcommand(1);

  const std::size_t parallelism = default_parallelism();

  InferFlags infer;
  infer.parallelism = parallelism;
  auto* infer_cmd = app.add_subcommand("infer", "Infer a network from a dataset");
  add_infer_flags(infer_cmd, infer);

  InferFlags boot;
  boot.parallelism = parallelism;
  std::size_t replicates = 100;
  auto* boot_cmd = app.add_subcommand("bootstrap", "Infer with bootstrap edge confidences");
  add_infer_flags(boot_cmd, boot);
  boot_cmd->add_option("--replicates", replicates, "Bootstrap replicates")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SimulateFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Sample a dataset from a random model");
  sim_cmd->add_option("--class", sim.topology, "Topology class")->capture_default_str();
  sim_cmd->add_option("-n,--nodes", sim.nodes, "Number of events")->capture_default_str();
  sim_cmd->add_option("-m,--samples", sim.samples, "Number of samples")->capture_default_str();
  sim_cmd->add_option("--theta", sim.theta, "Firing probability when triggered")
      ->capture_default_str();
  sim_cmd->add_option("--epsilon", sim.epsilon, "Firing probability otherwise")
      ->capture_default_str();
  sim_cmd->add_option("--source-marginal", sim.source_marginal,
                      "Marginal of source nodes (default theta)");
  sim_cmd->add_option("--max-parents", sim.max_parents, "Parent cap (0 = class default)");
  sim_cmd->add_flag("--allow-weak-gap", sim.allow_weak_gap,
                    "Accept theta - epsilon below 0.5");
  sim_cmd->add_option("--noise", sim.noise, "Noise level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sim_cmd->add_option("--noise-mode", sim.noise_mode, "Noise operator")
      ->check(CLI::IsMember({"random_entry", "flip"}))
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("-o,--out", sim.out, "Output directory")->required();

  ExperimentFlags exp;
  exp.parallelism = parallelism;
  auto* exp_cmd = app.add_subcommand("experiment", "Run the simulation benchmark grid");
  exp_cmd->add_option("--config", exp.config, "Grid configuration (JSON)");
  exp_cmd->add_option("-o,--out", exp.out, "Output directory");
  exp_cmd->add_option("--parallelism", exp.parallelism, "Worker threads (default $SBCN_THREADS)");
  exp_cmd->add_flag("--record-runtime", exp.record_runtime,
                    "Fill the runtime column (outputs stop being reproducible)");
  exp_cmd->add_flag("--print-config", exp.print_config, "Print the default grid and exit");
  exp_cmd->add_flag("--full-scale", exp.full_scale,
                    "Use 100 structures and 10 repetitions when no config is given");

  std::string lift_data, lift_formulas, lift_out;
  auto* lift_cmd = app.add_subcommand("lift", "Append CNF formula columns to a dataset");
  lift_cmd->add_option("dataset", lift_data, "Binary dataset")->required();
  lift_cmd->add_option("-f,--formulas", lift_formulas, "Formula file")->required();
  lift_cmd->add_option("-o,--out", lift_out, "Output dataset (default stdout)");

  std::string val_network, val_data;
  auto* val_cmd = app.add_subcommand("validate", "Re-check a network against its data");
  val_cmd->add_option("network", val_network, "Network document (JSON)")->required();
  val_cmd->add_option("dataset", val_data, "Binary dataset")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*infer_cmd) run_infer(infer);
    if (*boot_cmd) run_bootstrap(boot, replicates);
    if (*sim_cmd) run_simulate(sim);
    if (*exp_cmd) run_experiment(exp);
    if (*lift_cmd) run_lift(lift_data, lift_formulas, lift_out);
    if (*val_cmd) return run_validate(val_network, val_data);
  } catch (const Failure& f) {
    std::cerr << "sbcn: " << f.message << '\n';
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "sbcn: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}
