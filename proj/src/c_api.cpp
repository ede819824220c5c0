#include "sbcn/sbcn.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "sbcn/cnf.hpp"
#include "sbcn/dataset.hpp"
#include "sbcn/document.hpp"
#include "sbcn/error.hpp"
#include "sbcn/evaluation.hpp"
#include "sbcn/experiment.hpp"
#include "sbcn/mpn.hpp"
#include "sbcn/random.hpp"
#include "sbcn/search.hpp"

struct sbcn_dataset {
  sbcn::Dataset data;
};

struct sbcn_network {
  sbcn::NetworkDocument doc;
  std::optional<sbcn::EdgeConfidence> confidence;
};

struct sbcn_model {
  sbcn::MpnModel model;
  std::optional<sbcn::SimulationInfo> info;
};

namespace {

thread_local std::string last_error;

sbcn_status map_code(sbcn::ErrorCode code) {
  switch (code) {
    case sbcn::ErrorCode::parse: return SBCN_ERR_PARSE;
    case sbcn::ErrorCode::schema: return SBCN_ERR_SCHEMA;
    case sbcn::ErrorCode::io: return SBCN_ERR_IO;
    case sbcn::ErrorCode::invalid_argument: return SBCN_ERR_INVALID_ARGUMENT;
    case sbcn::ErrorCode::out_of_range: return SBCN_ERR_OUT_OF_RANGE;
    case sbcn::ErrorCode::undefined_conditional: return SBCN_ERR_UNDEFINED;
    case sbcn::ErrorCode::limit_exceeded: return SBCN_ERR_LIMIT;
  }
  return SBCN_ERR_INTERNAL;
}

sbcn_status fail(sbcn_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class F>
sbcn_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return SBCN_OK;
  } catch (const sbcn::Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SBCN_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SBCN_ERR_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw sbcn::InvalidArgument(std::string(what) + " must not be NULL");
}

std::string_view text_view(const char* text, size_t length) {
  require(text, "text");
  return std::string_view(text, length);
}

sbcn::InferenceConfig to_config(const sbcn_infer_options& o) {
  sbcn::InferenceConfig cfg;
  switch (o.regularizer) {
    case SBCN_REG_NONE: cfg.search.score.regularizer = sbcn::Regularizer::none; break;
    case SBCN_REG_BIC: cfg.search.score.regularizer = sbcn::Regularizer::bic; break;
    case SBCN_REG_AIC: cfg.search.score.regularizer = sbcn::Regularizer::aic; break;
    default: throw sbcn::InvalidArgument("unknown regularizer");
  }
  cfg.search.score.pseudocount = o.pseudocount;
  switch (o.search_mode) {
    case SBCN_SEARCH_HILL_CLIMB: cfg.search.mode = sbcn::SearchMode::hill_climb; break;
    case SBCN_SEARCH_EXHAUSTIVE: cfg.search.mode = sbcn::SearchMode::exhaustive; break;
    default: throw sbcn::InvalidArgument("unknown search mode");
  }
  if (o.max_parents > 0) cfg.search.max_parents = o.max_parents;
  cfg.search.seed = o.seed;
  switch (o.condition_mode) {
    case SBCN_CONDITIONS_POINT: cfg.conditions.mode = sbcn::ConditionMode::point_estimate; break;
    case SBCN_CONDITIONS_BOOTSTRAP: cfg.conditions.mode = sbcn::ConditionMode::bootstrap; break;
    default: throw sbcn::InvalidArgument("unknown condition mode");
  }
  cfg.conditions.replicates = o.condition_replicates;
  cfg.conditions.confidence_level = o.confidence_level;
  cfg.conditions.seed = o.seed;
  cfg.conditions.parallelism = o.parallelism == 0 ? 1 : o.parallelism;
  cfg.prima_facie_only = o.prima_facie_only != 0;
  cfg.unconstrained = o.unconstrained != 0;
  if (cfg.prima_facie_only && cfg.unconstrained) {
    throw sbcn::InvalidArgument("prima facie only and unconstrained are exclusive");
  }
  cfg.conditions.validate();
  cfg.search.validate();
  return cfg;
}

sbcn::DocumentMetadata to_metadata(const sbcn::InferenceConfig& cfg, uint64_t seed) {
  sbcn::DocumentMetadata meta;
  meta.regularizer = std::string(sbcn::to_string(cfg.search.score.regularizer));
  meta.mode = cfg.prima_facie_only ? "prima_facie_only" : cfg.unconstrained ? "bn" : "sbcn";
  meta.seed = seed;
  return meta;
}

sbcn::NoiseMode to_noise_mode(sbcn_noise_mode mode) {
  switch (mode) {
    case SBCN_NOISE_RANDOM_ENTRY: return sbcn::NoiseMode::random_entry;
    case SBCN_NOISE_FLIP: return sbcn::NoiseMode::flip;
  }
  throw sbcn::InvalidArgument("unknown noise mode");
}

sbcn::MpnModel make_model(const sbcn_model_options& o, uint64_t seed) {
  require(o.topology, "topology");
  auto cls = sbcn::TopologyClass::make(sbcn::parse_topology(o.topology), o.node_count);
  if (o.max_parents > 0) cls.max_parents = o.max_parents;
  sbcn::GeneratorParams params;
  params.theta = o.theta;
  params.epsilon = o.epsilon;
  if (o.source_marginal >= 0) params.source_marginal = o.source_marginal;
  params.allow_weak_gap = o.allow_weak_gap != 0;
  return sbcn::random_structure(cls, seed, params);
}

}  // namespace

extern "C" {

const char* sbcn_version(void) { return SBCN_VERSION_STRING; }

const char* sbcn_last_error(void) { return last_error.c_str(); }

const char* sbcn_status_name(sbcn_status status) {
  switch (status) {
    case SBCN_OK: return "ok";
    case SBCN_ERR_PARSE: return "parse error";
    case SBCN_ERR_SCHEMA: return "schema error";
    case SBCN_ERR_IO: return "i/o error";
    case SBCN_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SBCN_ERR_OUT_OF_RANGE: return "index out of range";
    case SBCN_ERR_UNDEFINED: return "undefined conditional";
    case SBCN_ERR_LIMIT: return "limit exceeded";
    case SBCN_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void sbcn_string_free(char* s) { std::free(s); }

sbcn_status sbcn_dataset_load(const char* path, sbcn_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new sbcn_dataset{sbcn::load_dataset(path)};
  });
}

sbcn_status sbcn_dataset_parse(const char* text, size_t length, sbcn_dataset** out) {
  return guarded([&] {
    require(out, "out");
    *out = new sbcn_dataset{sbcn::parse_dataset(text_view(text, length))};
  });
}

sbcn_status sbcn_dataset_save(const sbcn_dataset* data, const char* path) {
  return guarded([&] {
    require(data, "data");
    require(path, "path");
    sbcn::save_dataset(data->data, path);
  });
}

sbcn_status sbcn_dataset_to_text(const sbcn_dataset* data, char** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = copy_string(sbcn::format_dataset(data->data));
  });
}

void sbcn_dataset_free(sbcn_dataset* data) { delete data; }

size_t sbcn_dataset_event_count(const sbcn_dataset* data) {
  return data ? data->data.event_count() : 0;
}

size_t sbcn_dataset_sample_count(const sbcn_dataset* data) {
  return data ? data->data.sample_count() : 0;
}

const char* sbcn_dataset_event_name(const sbcn_dataset* data, size_t v) {
  if (!data || v >= data->data.event_count()) return nullptr;
  return data->data.event_name(v).c_str();
}

sbcn_status sbcn_dataset_cell(const sbcn_dataset* data, size_t row, size_t v, int* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = data->data.cell(row, v);
  });
}

sbcn_status sbcn_dataset_marginal(const sbcn_dataset* data, size_t v, double* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = sbcn::marginal(data->data, v);
  });
}

sbcn_status sbcn_dataset_joint(const sbcn_dataset* data, size_t i, size_t j, double* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = sbcn::joint(data->data, i, j);
  });
}

sbcn_status sbcn_dataset_conditional(const sbcn_dataset* data, size_t effect, size_t cause,
                                     int cause_value, double* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = sbcn::conditional(data->data, effect, cause, cause_value);
  });
}

size_t sbcn_dataset_degenerate(const sbcn_dataset* data, size_t* out, size_t capacity) {
  if (!data) return 0;
  auto d = data->data.degenerate_events();
  if (out) {
    for (size_t i = 0; i < d.size() && i < capacity; ++i) out[i] = d[i];
  }
  return d.size();
}

sbcn_status sbcn_dataset_lift(const sbcn_dataset* data, const char* formulas, size_t length,
                              sbcn_dataset** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    const auto& names = data->data.event_names();
    auto parsed = sbcn::parse_formulas(text_view(formulas, length), names);
    *out = new sbcn_dataset{sbcn::lift_dataset(data->data, parsed)};
  });
}

sbcn_status sbcn_dataset_apply_noise(const sbcn_dataset* data, double level,
                                     sbcn_noise_mode mode, uint64_t seed, sbcn_dataset** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    sbcn::NoiseSpec spec{level, to_noise_mode(mode), seed};
    *out = new sbcn_dataset{sbcn::apply_noise(data->data, spec)};
  });
}

void sbcn_infer_options_init(sbcn_infer_options* options) {
  if (!options) return;
  sbcn::InferenceConfig defaults;
  options->regularizer = SBCN_REG_BIC;
  options->pseudocount = defaults.search.score.pseudocount;
  options->prima_facie_only = 0;
  options->unconstrained = 0;
  options->search_mode = SBCN_SEARCH_HILL_CLIMB;
  options->max_parents = 0;
  options->condition_mode = SBCN_CONDITIONS_POINT;
  options->condition_replicates = defaults.conditions.replicates;
  options->confidence_level = defaults.conditions.confidence_level;
  options->seed = 0;
  options->parallelism = 1;
}

sbcn_status sbcn_infer(const sbcn_dataset* data, const sbcn_infer_options* options,
                       sbcn_network** out) {
  return guarded([&] {
    require(data, "data");
    require(options, "options");
    require(out, "out");
    auto cfg = to_config(*options);
    auto result = sbcn::infer_sbcn(data->data, cfg);
    auto doc = sbcn::make_document(result.network, to_metadata(cfg, options->seed));
    *out = new sbcn_network{std::move(doc), std::nullopt};
  });
}

sbcn_status sbcn_bootstrap(const sbcn_dataset* data, const sbcn_infer_options* options,
                           size_t replicates, sbcn_network** out) {
  return guarded([&] {
    require(data, "data");
    require(options, "options");
    require(out, "out");
    if (replicates == 0) throw sbcn::InvalidArgument("replicates must be positive");
    auto cfg = to_config(*options);
    auto result = sbcn::infer_sbcn(data->data, cfg);
    auto conf = sbcn::bootstrap_confidence(data->data, cfg, replicates, options->seed,
                                           cfg.conditions.parallelism);
    auto doc = sbcn::make_document(result.network, to_metadata(cfg, options->seed), &conf);
    *out = new sbcn_network{std::move(doc), std::move(conf)};
  });
}

sbcn_status sbcn_network_pair_confidence(const sbcn_network* net, size_t from, size_t to,
                                         double* out) {
  return guarded([&] {
    require(net, "network");
    require(out, "out");
    if (from >= net->doc.events.size() || to >= net->doc.events.size()) {
      throw sbcn::IndexError("event index out of range");
    }
    *out = net->confidence ? net->confidence->confidence({from, to}) : -1.0;
  });
}

void sbcn_network_free(sbcn_network* net) { delete net; }

size_t sbcn_network_event_count(const sbcn_network* net) {
  return net ? net->doc.events.size() : 0;
}

size_t sbcn_network_edge_count(const sbcn_network* net) {
  return net ? net->doc.edges.size() : 0;
}

sbcn_status sbcn_network_edge(const sbcn_network* net, size_t index, const char** from,
                              const char** to, double* confidence) {
  return guarded([&] {
    require(net, "network");
    if (index >= net->doc.edges.size()) throw sbcn::IndexError("edge index out of range");
    const auto& e = net->doc.edges[index];
    if (from) *from = e.from.c_str();
    if (to) *to = e.to.c_str();
    if (confidence) {
      *confidence = e.confidence.value_or(std::numeric_limits<double>::quiet_NaN());
    }
  });
}

sbcn_status sbcn_network_score(const sbcn_network* net, double* out) {
  return guarded([&] {
    require(net, "network");
    require(out, "out");
    *out = net->doc.metadata.score.value_or(std::numeric_limits<double>::quiet_NaN());
  });
}

sbcn_status sbcn_network_to_json(const sbcn_network* net, char** out) {
  return guarded([&] {
    require(net, "network");
    require(out, "out");
    *out = copy_string(sbcn::to_json(net->doc));
  });
}

sbcn_status sbcn_network_to_dot(const sbcn_network* net, char** out) {
  return guarded([&] {
    require(net, "network");
    require(out, "out");
    *out = copy_string(sbcn::to_dot(net->doc));
  });
}

sbcn_status sbcn_network_from_json(const char* text, size_t length, sbcn_network** out) {
  return guarded([&] {
    require(out, "out");
    *out = new sbcn_network{sbcn::document_from_json(text_view(text, length)), std::nullopt};
  });
}

sbcn_status sbcn_network_validate(const sbcn_network* net, const sbcn_dataset* data,
                                  size_t* violations, char** report) {
  return guarded([&] {
    require(net, "network");
    require(data, "data");
    auto found = sbcn::validate_against(net->doc, data->data);
    if (violations) *violations = found.size();
    if (report) {
      std::ostringstream os;
      for (const auto& v : found) os << v.from << " -> " << v.to << ": " << v.reason << '\n';
      *report = copy_string(os.str());
    }
  });
}

void sbcn_model_options_init(sbcn_model_options* options) {
  if (!options) return;
  sbcn::GeneratorParams defaults;
  options->topology = "tree";
  options->node_count = 10;
  options->theta = defaults.theta;
  options->epsilon = defaults.epsilon;
  options->source_marginal = -1.0;
  options->max_parents = 0;
  options->allow_weak_gap = 0;
}

sbcn_status sbcn_model_random(const sbcn_model_options* options, uint64_t seed,
                              sbcn_model** out) {
  return guarded([&] {
    require(options, "options");
    require(out, "out");
    *out = new sbcn_model{make_model(*options, seed), std::nullopt};
  });
}

void sbcn_model_free(sbcn_model* model) { delete model; }

size_t sbcn_model_node_count(const sbcn_model* model) {
  return model ? model->model.dag.node_count() : 0;
}

sbcn_status sbcn_model_sample(const sbcn_model* model, size_t samples, uint64_t seed,
                              sbcn_dataset** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = new sbcn_dataset{sbcn::sample_dataset(model->model, samples, seed)};
  });
}

sbcn_status sbcn_model_edge_list(const sbcn_model* model, char** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = copy_string(sbcn::format_edge_list(model->model));
  });
}

sbcn_status sbcn_model_to_json(const sbcn_model* model, char** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = copy_string(sbcn::model_to_json(model->model, model->info));
  });
}

sbcn_status sbcn_model_xor_formulas(const sbcn_model* model, char** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    std::string text;
    for (const auto& f : sbcn::make_xor_formulas(model->model)) {
      text += f.name + " = " + sbcn::to_string(f.formula, model->model.event_names) + "\n";
    }
    *out = copy_string(text);
  });
}

sbcn_status sbcn_simulate(const sbcn_model_options* options, size_t samples, double noise,
                          sbcn_noise_mode noise_mode, uint64_t seed, sbcn_model** model,
                          sbcn_dataset** data) {
  return guarded([&] {
    require(options, "options");
    require(model, "model");
    require(data, "data");
    auto mode = to_noise_mode(noise_mode);
    auto m = make_model(*options, sbcn::derive_seed(seed, {1}));
    auto clean = sbcn::sample_dataset(m, samples, sbcn::derive_seed(seed, {2}));
    auto noisy = sbcn::apply_noise(clean, {noise, mode, sbcn::derive_seed(seed, {3})});
    sbcn::SimulationInfo info{options->topology, samples, noise, mode, seed};
    auto owned_model = std::make_unique<sbcn_model>(sbcn_model{std::move(m), info});
    auto owned_data = std::make_unique<sbcn_dataset>(sbcn_dataset{std::move(noisy)});
    *model = owned_model.release();
    *data = owned_data.release();
  });
}

sbcn_status sbcn_experiment_run(const char* config_json, const char* out_dir,
                                size_t parallelism, int record_runtime,
                                sbcn_experiment_report* report) {
  return guarded([&] {
    require(out_dir, "out_dir");
    auto grid = config_json ? sbcn::parse_grid(config_json) : sbcn::desk_scale_grid();
    auto r = sbcn::run_experiment(grid, out_dir, parallelism == 0 ? 1 : parallelism,
                                  record_runtime != 0);
    if (report) *report = {r.cells, r.computed, r.reused, r.rows, r.failures};
  });
}

sbcn_status sbcn_experiment_default_config(int full_scale, char** out) {
  return guarded([&] {
    require(out, "out");
    *out = copy_string(
        sbcn::grid_to_json(full_scale ? sbcn::full_scale_grid() : sbcn::desk_scale_grid()));
  });
}

}  // extern "C"
