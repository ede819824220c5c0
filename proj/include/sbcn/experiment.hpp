#ifndef SBCN_EXPERIMENT_HPP
#define SBCN_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sbcn/evaluation.hpp"
#include "sbcn/mpn.hpp"
#include "sbcn/suppes.hpp"

namespace sbcn {

enum class Variant { prima_facie_only, likelihood_none, bic, aic };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

struct ExperimentGrid {
  std::vector<TopologyKind> classes;
  std::vector<std::size_t> node_counts;
  std::vector<std::size_t> sample_sizes;
  std::vector<double> noise_levels;
  std::size_t structures_per_class = 20;
  std::size_t repetitions = 5;
  std::vector<Variant> variants;
  std::uint64_t master_seed = 1;
  GeneratorParams generator;
  NoiseMode noise_mode = NoiseMode::random_entry;
  ConditionTestConfig conditions;
  // For XOR topologies, also run every variant on the lifted dataset
  // (reported as "<variant>+lift").
  bool lift_xor = true;
  std::optional<std::size_t> max_parents;

  void validate() const;
};

// 6 classes x {10, 15} nodes x {50, 100, 150, 200} samples x 9 noise levels,
// 20 structures, 5 repetitions.
ExperimentGrid desk_scale_grid();
// Same axes with 100 structures and 10 repetitions.
ExperimentGrid full_scale_grid();

// Missing fields take desk-scale defaults ("scale": "full" switches the
// defaults to full scale).
ExperimentGrid parse_grid(std::string_view json_text);
std::string grid_to_json(const ExperimentGrid& grid);

struct CellCoord {
  std::size_t class_index = 0;
  std::size_t node_index = 0;
  std::size_t sample_index = 0;
  std::size_t noise_index = 0;
};

// Every cell in canonical grid order.
std::vector<CellCoord> grid_cells(const ExperimentGrid& grid);

struct RunRow {
  std::string topology;
  std::size_t n = 0;
  std::size_t m = 0;
  double noise = 0.0;
  std::size_t structure_id = 0;
  std::size_t repetition = 0;
  std::string variant;
  Confusion counts;
  Metrics metrics;
  std::optional<double> score;
  std::optional<double> runtime_ms;
  std::string status = "ok";

  std::size_t inferred_edges() const { return counts.tp + counts.fp; }
};

std::vector<RunRow> run_cell(const ExperimentGrid& grid, const CellCoord& cell,
                             bool record_runtime = false);
std::vector<RunRow> run_grid(const ExperimentGrid& grid, std::size_t parallelism = 1,
                             bool record_runtime = false);

std::string results_header();
// Formatted rows without the header line.
std::string format_rows(std::span<const RunRow> rows);
// Accepts text with or without the header line.
std::vector<RunRow> parse_rows(std::string_view text);

struct Summary {
  std::size_t count = 0;  // defined values
  std::optional<double> mean;
  std::optional<double> sd;  // sample standard deviation, needs count >= 2
};

Summary summarize(std::span<const double> values);

struct AggregateRow {
  std::string topology;
  std::size_t n = 0;
  std::size_t m = 0;
  double noise = 0.0;
  std::string variant;
  std::size_t runs = 0;
  std::size_t failures = 0;
  Summary accuracy;
  Summary sensitivity;
  Summary specificity;
  Summary edges;
  Summary score;
};

// Grouped by (class, n, m, noise, variant) in order of first appearance.
std::vector<AggregateRow> aggregate(std::span<const RunRow> rows);
std::string aggregates_header();
std::string format_aggregates(std::span<const AggregateRow> rows);

// Content-addressed name of a cell's checkpoint file.
std::string cell_key(const ExperimentGrid& grid, const CellCoord& cell, bool record_runtime);

struct ExperimentReport {
  std::size_t cells = 0;
  std::size_t computed = 0;
  std::size_t reused = 0;
  std::size_t rows = 0;
  std::size_t failures = 0;
  std::filesystem::path results_path;
  std::filesystem::path aggregates_path;
};

// Writes <out>/results.tsv and <out>/aggregates.tsv. Cells already present
// under <out>/cells/ are loaded instead of recomputed.
ExperimentReport run_experiment(const ExperimentGrid& grid, const std::filesystem::path& out_dir,
                                std::size_t parallelism = 1, bool record_runtime = false);

}  // namespace sbcn

#endif
