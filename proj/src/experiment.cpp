#include "sbcn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "sbcn/error.hpp"
#include "sbcn/random.hpp"
#include "sbcn/search.hpp"

namespace sbcn {

namespace {

constexpr std::string_view kLiftSuffix = "+lift";

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string optional_fixed(const std::optional<double>& value, int digits) {
  return value ? fixed(*value, digits) : std::string("NA");
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string sanitize(std::string text) {
  for (auto& c : text) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

bool is_xor_kind(TopologyKind kind) {
  return kind == TopologyKind::dag_single_source_xor || kind == TopologyKind::dag_multi_source_xor;
}

std::vector<double> default_noise_levels() {
  std::vector<double> levels;
  for (int k = 0; k <= 8; ++k) levels.push_back(k / 40.0);
  return levels;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::prima_facie_only: return "prima_facie_only";
    case Variant::likelihood_none: return "likelihood_none";
    case Variant::bic: return "bic";
    case Variant::aic: return "aic";
  }
  return "bic";
}

Variant parse_variant(std::string_view name) {
  for (auto v : {Variant::prima_facie_only, Variant::likelihood_none, Variant::bic, Variant::aic}) {
    if (to_string(v) == name) return v;
  }
  throw InvalidArgument("unknown variant '" + std::string(name) + "'");
}

void ExperimentGrid::validate() const {
  if (classes.empty() || node_counts.empty() || sample_sizes.empty() || noise_levels.empty() ||
      variants.empty()) {
    throw InvalidArgument("every grid axis needs at least one value");
  }
  if (structures_per_class < 1 || repetitions < 1) {
    throw InvalidArgument("structures and repetitions must be positive");
  }
  for (auto m : sample_sizes) {
    if (m < 1) throw InvalidArgument("sample sizes must be positive");
  }
  for (double v : noise_levels) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("noise levels must lie in [0, 1]");
  }
  if (max_parents && *max_parents < 1) throw InvalidArgument("max_parents must be at least 1");
  conditions.validate();
}

ExperimentGrid desk_scale_grid() {
  ExperimentGrid g;
  g.classes = benchmark_topologies();
  g.node_counts = {10, 15};
  g.sample_sizes = {50, 100, 150, 200};
  g.noise_levels = default_noise_levels();
  g.structures_per_class = 20;
  g.repetitions = 5;
  g.variants = {Variant::prima_facie_only, Variant::likelihood_none, Variant::bic, Variant::aic};
  return g;
}

ExperimentGrid full_scale_grid() {
  auto g = desk_scale_grid();
  g.structures_per_class = 100;
  g.repetitions = 10;
  return g;
}

ExperimentGrid parse_grid(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("grid config: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("grid config must be a JSON object");
  try {
    ExperimentGrid g = desk_scale_grid();
    if (j.contains("scale")) {
      const auto scale = j.at("scale").get<std::string>();
      if (scale == "full") g = full_scale_grid();
      else if (scale != "desk") throw SchemaError("scale must be 'desk' or 'full'");
    }
    if (j.contains("classes")) {
      g.classes.clear();
      for (const auto& c : j.at("classes")) g.classes.push_back(parse_topology(c.get<std::string>()));
    }
    if (j.contains("node_counts")) g.node_counts = j.at("node_counts").get<std::vector<std::size_t>>();
    if (j.contains("sample_sizes")) g.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
    if (j.contains("noise_levels")) g.noise_levels = j.at("noise_levels").get<std::vector<double>>();
    if (j.contains("structures_per_class")) g.structures_per_class = j.at("structures_per_class").get<std::size_t>();
    if (j.contains("repetitions")) g.repetitions = j.at("repetitions").get<std::size_t>();
    if (j.contains("variants")) {
      g.variants.clear();
      for (const auto& v : j.at("variants")) g.variants.push_back(parse_variant(v.get<std::string>()));
    }
    if (j.contains("master_seed")) g.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("theta")) g.generator.theta = j.at("theta").get<double>();
    if (j.contains("epsilon")) g.generator.epsilon = j.at("epsilon").get<double>();
    if (j.contains("source_marginal") && !j.at("source_marginal").is_null()) {
      g.generator.source_marginal = j.at("source_marginal").get<double>();
    }
    if (j.contains("allow_weak_gap")) g.generator.allow_weak_gap = j.at("allow_weak_gap").get<bool>();
    if (j.contains("noise_mode")) g.noise_mode = parse_noise_mode(j.at("noise_mode").get<std::string>());
    if (j.contains("lift_xor")) g.lift_xor = j.at("lift_xor").get<bool>();
    if (j.contains("max_parents") && !j.at("max_parents").is_null()) {
      g.max_parents = j.at("max_parents").get<std::size_t>();
    }
    if (j.contains("conditions")) {
      const auto& c = j.at("conditions");
      if (c.contains("mode")) {
        const auto mode = c.at("mode").get<std::string>();
        if (mode == "bootstrap") g.conditions.mode = ConditionMode::bootstrap;
        else if (mode == "point_estimate") g.conditions.mode = ConditionMode::point_estimate;
        else throw SchemaError("conditions.mode must be 'point_estimate' or 'bootstrap'");
      }
      if (c.contains("replicates")) g.conditions.replicates = c.at("replicates").get<std::size_t>();
      if (c.contains("confidence_level")) g.conditions.confidence_level = c.at("confidence_level").get<double>();
    }
    g.validate();
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("grid config: ") + e.what());
  }
}

std::string grid_to_json(const ExperimentGrid& g) {
  nlohmann::ordered_json j;
  std::vector<std::string> classes;
  for (auto c : g.classes) classes.emplace_back(to_string(c));
  std::vector<std::string> variants;
  for (auto v : g.variants) variants.emplace_back(to_string(v));
  j["classes"] = classes;
  j["node_counts"] = g.node_counts;
  j["sample_sizes"] = g.sample_sizes;
  j["noise_levels"] = g.noise_levels;
  j["structures_per_class"] = g.structures_per_class;
  j["repetitions"] = g.repetitions;
  j["variants"] = variants;
  j["master_seed"] = g.master_seed;
  j["theta"] = g.generator.theta;
  j["epsilon"] = g.generator.epsilon;
  j["source_marginal"] = g.generator.source_marginal ? nlohmann::ordered_json(*g.generator.source_marginal)
                                                     : nlohmann::ordered_json(nullptr);
  j["allow_weak_gap"] = g.generator.allow_weak_gap;
  j["noise_mode"] = std::string(to_string(g.noise_mode));
  j["lift_xor"] = g.lift_xor;
  j["max_parents"] = g.max_parents ? nlohmann::ordered_json(*g.max_parents) : nlohmann::ordered_json(nullptr);
  j["conditions"] = {
      {"mode", g.conditions.mode == ConditionMode::bootstrap ? "bootstrap" : "point_estimate"},
      {"replicates", g.conditions.replicates},
      {"confidence_level", g.conditions.confidence_level},
  };
  return j.dump(2) + "\n";
}

std::vector<CellCoord> grid_cells(const ExperimentGrid& g) {
  std::vector<CellCoord> out;
  for (std::size_t c = 0; c < g.classes.size(); ++c) {
    for (std::size_t n = 0; n < g.node_counts.size(); ++n) {
      for (std::size_t m = 0; m < g.sample_sizes.size(); ++m) {
        for (std::size_t v = 0; v < g.noise_levels.size(); ++v) out.push_back({c, n, m, v});
      }
    }
  }
  return out;
}

namespace {

struct VariantRun {
  std::string name;
  InferenceConfig config;
  bool lifted = false;
};

std::vector<VariantRun> variant_runs(const ExperimentGrid& g, TopologyKind kind) {
  std::vector<VariantRun> runs;
  auto make = [&](Variant v) {
    InferenceConfig cfg;
    cfg.conditions = g.conditions;
    cfg.search.max_parents = g.max_parents;
    switch (v) {
      case Variant::prima_facie_only:
        cfg.prima_facie_only = true;
        cfg.search.score.regularizer = Regularizer::none;
        break;
      case Variant::likelihood_none: cfg.search.score.regularizer = Regularizer::none; break;
      case Variant::bic: cfg.search.score.regularizer = Regularizer::bic; break;
      case Variant::aic: cfg.search.score.regularizer = Regularizer::aic; break;
    }
    return cfg;
  };
  for (auto v : g.variants) runs.push_back({std::string(to_string(v)), make(v), false});
  if (g.lift_xor && is_xor_kind(kind)) {
    for (auto v : g.variants) {
      runs.push_back({std::string(to_string(v)) + std::string(kLiftSuffix), make(v), true});
    }
  }
  return runs;
}

// Maps lifted-network edges back onto events: formula -> e becomes
// p -> e for every event p the formula mentions.
std::vector<Edge> project_lifted(const Dag& lifted_dag, std::size_t n,
                                 std::span<const NamedFormula> formulas) {
  std::vector<Edge> out;
  for (const auto& e : lifted_dag.edges()) {
    if (e.to >= n) continue;
    if (e.from < n) {
      out.push_back(e);
    } else {
      for (auto p : formulas[e.from - n].formula.events()) {
        if (p != e.to) out.push_back({p, e.to});
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<RunRow> run_cell(const ExperimentGrid& g, const CellCoord& cell, bool record_runtime) {
  g.validate();
  const auto kind = g.classes.at(cell.class_index);
  const auto n = g.node_counts.at(cell.node_index);
  const auto m = g.sample_sizes.at(cell.sample_index);
  const auto noise = g.noise_levels.at(cell.noise_index);
  const auto kind_id = static_cast<std::uint64_t>(kind);
  const auto runs = variant_runs(g, kind);

  std::vector<RunRow> rows;
  for (std::size_t s = 0; s < g.structures_per_class; ++s) {
    std::optional<MpnModel> model;
    std::string structure_error;
    try {
      auto cls = TopologyClass::make(kind, n);
      if (g.max_parents && !(kind == TopologyKind::tree || kind == TopologyKind::forest)) {
        cls.max_parents = *g.max_parents;
      }
      model = random_structure(cls, derive_seed(g.master_seed, {1, kind_id, n, s}), g.generator);
    } catch (const std::exception& e) {
      structure_error = sanitize(std::string("structure: ") + e.what());
    }
    for (std::size_t rep = 0; rep < g.repetitions; ++rep) {
      auto base_row = [&](const std::string& variant) {
        RunRow row;
        row.topology = std::string(to_string(kind));
        row.n = n;
        row.m = m;
        row.noise = noise;
        row.structure_id = s;
        row.repetition = rep;
        row.variant = variant;
        return row;
      };
      if (!model) {
        for (const auto& run : runs) {
          auto row = base_row(run.name);
          row.status = structure_error;
          rows.push_back(std::move(row));
        }
        continue;
      }

      std::optional<Dataset> data;
      std::optional<PrimaFaciePoset> poset;
      std::optional<LiftedPoset> lifted;
      std::vector<NamedFormula> formulas;
      double poset_ms = 0.0;
      std::string data_error;
      try {
        const auto clean = sample_dataset(*model, m, derive_seed(g.master_seed, {2, kind_id, n, s, m, rep}));
        // One noise seed per dataset, shared across noise levels.
        data = apply_noise(clean, {noise, g.noise_mode, derive_seed(g.master_seed, {3, kind_id, n, s, m, rep})});
        auto conds = g.conditions;
        conds.seed = derive_seed(g.master_seed, {4, kind_id, n, s, m, rep, cell.noise_index});
        const auto t0 = std::chrono::steady_clock::now();
        poset = prima_facie(*data, conds);
        if (g.lift_xor && is_xor_kind(kind)) {
          formulas = make_xor_formulas(*model);
          lifted = prima_facie_lifted(*data, formulas, conds);
          // Lifted search space: atomic prima facie edges plus formula edges.
          auto& lp = lifted->poset;
          lp.allowed_edges.insert(lp.allowed_edges.end(), poset->allowed_edges.begin(),
                                  poset->allowed_edges.end());
          std::sort(lp.allowed_edges.begin(), lp.allowed_edges.end());
        }
        poset_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      } catch (const std::exception& e) {
        data_error = sanitize(std::string("data: ") + e.what());
      }

      for (const auto& run : runs) {
        auto row = base_row(run.name);
        if (!data_error.empty()) {
          row.status = data_error;
          rows.push_back(std::move(row));
          continue;
        }
        try {
          const auto t0 = std::chrono::steady_clock::now();
          if (run.lifted) {
            auto inference = infer_with_poset(lifted->lifted, lifted->poset, run.config);
            const auto edges = project_lifted(inference.network.network.dag, n, formulas);
            row.counts = confusion(model->dag, edges);
            row.score = inference.network.score;
          } else {
            auto inference = infer_with_poset(*data, *poset, run.config);
            row.counts = confusion(model->dag, inference.network.network.dag);
            row.score = inference.network.score;
          }
          row.metrics = metrics(row.counts);
          if (record_runtime) {
            row.runtime_ms = poset_ms + std::chrono::duration<double, std::milli>(
                                            std::chrono::steady_clock::now() - t0).count();
          }
        } catch (const std::exception& e) {
          row.status = sanitize(std::string("inference: ") + e.what());
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

namespace {

template <class Fn>
void parallel_for(std::size_t count, std::size_t parallelism, Fn&& fn) {
  const auto workers = std::max<std::size_t>(1, std::min(parallelism, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (auto i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<RunRow> run_grid(const ExperimentGrid& g, std::size_t parallelism, bool record_runtime) {
  g.validate();
  const auto cells = grid_cells(g);
  std::vector<std::vector<RunRow>> per_cell(cells.size());
  parallel_for(cells.size(), parallelism,
               [&](std::size_t i) { per_cell[i] = run_cell(g, cells[i], record_runtime); });
  std::vector<RunRow> rows;
  for (auto& c : per_cell) {
    rows.insert(rows.end(), std::make_move_iterator(c.begin()), std::make_move_iterator(c.end()));
  }
  return rows;
}

std::string results_header() {
  return "class\tn\tm\tnoise\tstructure_id\trepetition\tvariant\ttp\tfp\ttn\tfn\taccuracy\t"
         "sensitivity\tspecificity\tscore\truntime_ms\tstatus\n";
}

std::string format_rows(std::span<const RunRow> rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.topology + '\t' + std::to_string(r.n) + '\t' + std::to_string(r.m) + '\t' +
           fixed(r.noise, 4) + '\t' + std::to_string(r.structure_id) + '\t' +
           std::to_string(r.repetition) + '\t' + r.variant + '\t' + std::to_string(r.counts.tp) +
           '\t' + std::to_string(r.counts.fp) + '\t' + std::to_string(r.counts.tn) + '\t' +
           std::to_string(r.counts.fn) + '\t' + optional_fixed(r.metrics.accuracy, 6) + '\t' +
           optional_fixed(r.metrics.sensitivity, 6) + '\t' +
           optional_fixed(r.metrics.specificity, 6) + '\t' + optional_fixed(r.score, 6) + '\t' +
           optional_fixed(r.runtime_ms, 3) + '\t' + sanitize(r.status) + '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::size_t to_size(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("bad integer '" + std::string(s) + "' in results table");
  }
  return v;
}

std::optional<double> to_optional_double(std::string_view s) {
  if (s == "NA") return std::nullopt;
  // from_chars for double is not available in every libstdc++ we target.
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size()) throw ParseError("bad number '" + tmp + "' in results table");
  return v;
}

}  // namespace

std::vector<RunRow> parse_rows(std::string_view text) {
  std::vector<RunRow> rows;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() : end + 1;
    if (line.empty() || line.starts_with("class\t")) continue;
    const auto f = split_tabs(line);
    if (f.size() != 17) throw ParseError("results row has " + std::to_string(f.size()) + " fields, expected 17");
    RunRow r;
    r.topology = std::string(f[0]);
    r.n = to_size(f[1]);
    r.m = to_size(f[2]);
    r.noise = to_optional_double(f[3]).value_or(0.0);
    r.structure_id = to_size(f[4]);
    r.repetition = to_size(f[5]);
    r.variant = std::string(f[6]);
    r.counts = {to_size(f[7]), to_size(f[8]), to_size(f[9]), to_size(f[10])};
    r.metrics = {to_optional_double(f[11]), to_optional_double(f[12]), to_optional_double(f[13])};
    r.score = to_optional_double(f[14]);
    r.runtime_ms = to_optional_double(f[15]);
    r.status = std::string(f[16]);
    rows.push_back(std::move(r));
  }
  return rows;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  s.mean = mean;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<AggregateRow> aggregate(std::span<const RunRow> rows) {
  using Key = std::tuple<std::string, std::size_t, std::size_t, double, std::string>;
  struct Acc {
    std::size_t runs = 0;
    std::size_t failures = 0;
    std::vector<double> accuracy, sensitivity, specificity, edges, score;
  };
  std::vector<Key> order;
  std::map<Key, Acc> groups;
  for (const auto& r : rows) {
    Key key{r.topology, r.n, r.m, r.noise, r.variant};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    auto& a = it->second;
    ++a.runs;
    if (r.status != "ok") {
      ++a.failures;
      continue;
    }
    if (r.metrics.accuracy) a.accuracy.push_back(*r.metrics.accuracy);
    if (r.metrics.sensitivity) a.sensitivity.push_back(*r.metrics.sensitivity);
    if (r.metrics.specificity) a.specificity.push_back(*r.metrics.specificity);
    a.edges.push_back(static_cast<double>(r.inferred_edges()));
    if (r.score) a.score.push_back(*r.score);
  }
  std::vector<AggregateRow> out;
  for (const auto& key : order) {
    const auto& a = groups.at(key);
    AggregateRow row;
    std::tie(row.topology, row.n, row.m, row.noise, row.variant) = key;
    row.runs = a.runs;
    row.failures = a.failures;
    row.accuracy = summarize(a.accuracy);
    row.sensitivity = summarize(a.sensitivity);
    row.specificity = summarize(a.specificity);
    row.edges = summarize(a.edges);
    row.score = summarize(a.score);
    out.push_back(std::move(row));
  }
  return out;
}

std::string aggregates_header() {
  return "class\tn\tm\tnoise\tvariant\truns\tfailures\taccuracy_mean\taccuracy_sd\t"
         "sensitivity_mean\tsensitivity_sd\tsensitivity_count\tspecificity_mean\tspecificity_sd\t"
         "specificity_count\tedges_mean\tedges_sd\tscore_mean\tscore_sd\n";
}

std::string format_aggregates(std::span<const AggregateRow> rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.topology + '\t' + std::to_string(r.n) + '\t' + std::to_string(r.m) + '\t' +
           fixed(r.noise, 4) + '\t' + r.variant + '\t' + std::to_string(r.runs) + '\t' +
           std::to_string(r.failures) + '\t' + optional_fixed(r.accuracy.mean, 6) + '\t' +
           optional_fixed(r.accuracy.sd, 6) + '\t' + optional_fixed(r.sensitivity.mean, 6) + '\t' +
           optional_fixed(r.sensitivity.sd, 6) + '\t' + std::to_string(r.sensitivity.count) + '\t' +
           optional_fixed(r.specificity.mean, 6) + '\t' + optional_fixed(r.specificity.sd, 6) +
           '\t' + std::to_string(r.specificity.count) + '\t' + optional_fixed(r.edges.mean, 6) +
           '\t' + optional_fixed(r.edges.sd, 6) + '\t' + optional_fixed(r.score.mean, 6) + '\t' +
           optional_fixed(r.score.sd, 6) + '\n';
  }
  return out;
}

std::string cell_key(const ExperimentGrid& g, const CellCoord& cell, bool record_runtime) {
  const auto kind = g.classes.at(cell.class_index);
  const auto n = g.node_counts.at(cell.node_index);
  const auto m = g.sample_sizes.at(cell.sample_index);
  const auto noise = g.noise_levels.at(cell.noise_index);
  // Everything that influences the cell's rows goes into the digest.
  nlohmann::ordered_json j;
  j["class"] = std::string(to_string(kind));
  j["n"] = n;
  j["m"] = m;
  j["noise"] = noise;
  j["noise_index"] = cell.noise_index;
  j["structures"] = g.structures_per_class;
  j["repetitions"] = g.repetitions;
  std::vector<std::string> variants;
  for (auto v : g.variants) variants.emplace_back(to_string(v));
  j["variants"] = variants;
  j["master_seed"] = g.master_seed;
  j["theta"] = g.generator.theta;
  j["epsilon"] = g.generator.epsilon;
  j["source_marginal"] = g.generator.source_marginal.value_or(-1.0);
  j["allow_weak_gap"] = g.generator.allow_weak_gap;
  j["noise_mode"] = std::string(to_string(g.noise_mode));
  j["conditions"] = {static_cast<int>(g.conditions.mode), g.conditions.replicates,
                     g.conditions.confidence_level};
  j["lift_xor"] = g.lift_xor;
  j["max_parents"] = g.max_parents.value_or(0);
  j["record_runtime"] = record_runtime;
  j["format"] = 1;
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(fnv1a(j.dump())));
  return std::string(to_string(kind)) + "_n" + std::to_string(n) + "_m" + std::to_string(m) +
         "_noise" + fixed(noise, 4) + "_" + digest;
}

namespace {

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentGrid& g, const std::filesystem::path& out_dir,
                                std::size_t parallelism, bool record_runtime) {
  g.validate();
  std::error_code ec;
  const auto cell_dir = out_dir / "cells";
  std::filesystem::create_directories(cell_dir, ec);
  if (ec) throw IoError("cannot create '" + cell_dir.string() + "': " + ec.message());

  const auto cells = grid_cells(g);
  std::vector<std::string> texts(cells.size());
  std::vector<char> reused(cells.size(), 0);
  parallel_for(cells.size(), parallelism, [&](std::size_t i) {
    const auto path = cell_dir / (cell_key(g, cells[i], record_runtime) + ".tsv");
    if (auto existing = read_file(path)) {
      // A cell file is complete by construction (atomic rename); re-parse to
      // reject anything malformed.
      try {
        parse_rows(*existing);
        texts[i] = std::move(*existing);
        reused[i] = 1;
        return;
      } catch (const ParseError&) {
      }
    }
    const auto rows = run_cell(g, cells[i], record_runtime);
    texts[i] = format_rows(rows);
    write_file_atomic(path, texts[i]);
  });

  ExperimentReport report;
  report.cells = cells.size();
  std::string results = results_header();
  std::vector<RunRow> all_rows;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    results += texts[i];
    auto rows = parse_rows(texts[i]);
    all_rows.insert(all_rows.end(), std::make_move_iterator(rows.begin()),
                    std::make_move_iterator(rows.end()));
    (reused[i] ? report.reused : report.computed) += 1;
  }
  report.rows = all_rows.size();
  for (const auto& r : all_rows) report.failures += r.status != "ok";

  // Aggregates come from the formatted rows so a resumed run and a fresh run
  // produce the same bytes.
  const auto aggregates = aggregate(all_rows);
  report.results_path = out_dir / "results.tsv";
  report.aggregates_path = out_dir / "aggregates.tsv";
  write_file_atomic(report.results_path, results);
  write_file_atomic(report.aggregates_path, aggregates_header() + format_aggregates(aggregates));
  write_file_atomic(out_dir / "grid.json", grid_to_json(g));
  return report;
}

}  // namespace sbcn
