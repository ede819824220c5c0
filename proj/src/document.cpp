#include "sbcn/document.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "sbcn/error.hpp"
#include "sbcn/suppes.hpp"

namespace sbcn {

using ojson = nlohmann::ordered_json;

std::string_view tool_version() { return SBCN_VERSION_STRING; }

void NetworkDocument::validate() const {
  auto declared = [this](const std::string& name) {
    return std::find(events.begin(), events.end(), name) != events.end();
  };
  for (std::size_t a = 0; a < events.size(); ++a) {
    for (std::size_t b = a + 1; b < events.size(); ++b) {
      if (events[a] == events[b]) throw SchemaError("duplicate event '" + events[a] + "'");
    }
  }
  for (const auto& e : edges) {
    if (!declared(e.from) || !declared(e.to)) {
      throw SchemaError("edge " + e.from + " -> " + e.to + " references an undeclared event");
    }
    if (e.confidence && !(*e.confidence >= 0.0 && *e.confidence <= 1.0)) {
      throw SchemaError("edge confidence outside [0, 1]");
    }
  }
  for (const auto& t : cpts) {
    if (!declared(t.node)) throw SchemaError("table for undeclared event '" + t.node + "'");
    for (const auto& p : t.parents) {
      if (!declared(p)) throw SchemaError("table parent '" + p + "' is undeclared");
    }
    if (t.probabilities.size() != (std::size_t{1} << t.parents.size())) {
      throw SchemaError("table for '" + t.node + "' has the wrong number of entries");
    }
  }
}

NetworkDocument make_document(const ScoredNetwork& network, DocumentMetadata metadata,
                              const EdgeConfidence* confidence) {
  const auto& net = network.network;
  NetworkDocument doc;
  doc.events = net.event_names;
  for (const auto& e : net.dag.edges()) {
    DocumentEdge de{net.event_names.at(e.from), net.event_names.at(e.to), std::nullopt};
    if (confidence) de.confidence = confidence->confidence(e);
    doc.edges.push_back(std::move(de));
  }
  for (const auto& t : net.cpts) {
    DocumentCpt dc;
    dc.node = net.event_names.at(t.node);
    for (auto p : t.parents) dc.parents.push_back(net.event_names.at(p));
    dc.probabilities = t.p_one;
    dc.unsupported = t.unsupported;
    doc.cpts.push_back(std::move(dc));
  }
  metadata.score = network.score;
  metadata.log_likelihood = network.log_likelihood;
  metadata.penalty = network.penalty;
  if (confidence) metadata.bootstrap_replicates = confidence->replicates();
  if (metadata.tool_version.empty()) metadata.tool_version = std::string(tool_version());
  doc.metadata = std::move(metadata);
  return doc;
}

namespace {

ojson number_or_null(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::string to_json(const NetworkDocument& doc) {
  ojson j;
  j["schema_version"] = doc.schema_version;
  j["events"] = doc.events;
  j["edges"] = ojson::array();
  for (const auto& e : doc.edges) {
    ojson je;
    je["from"] = e.from;
    je["to"] = e.to;
    if (e.confidence) je["confidence"] = *e.confidence;
    j["edges"].push_back(std::move(je));
  }
  j["cpts"] = ojson::array();
  for (const auto& t : doc.cpts) {
    ojson jt;
    jt["node"] = t.node;
    jt["parents"] = t.parents;
    jt["probabilities"] = t.probabilities;
    jt["unsupported"] = t.unsupported;
    j["cpts"].push_back(std::move(jt));
  }
  ojson meta;
  meta["regularizer"] = doc.metadata.regularizer;
  meta["mode"] = doc.metadata.mode;
  meta["seed"] = doc.metadata.seed;
  meta["score"] = number_or_null(doc.metadata.score);
  meta["log_likelihood"] = number_or_null(doc.metadata.log_likelihood);
  meta["penalty"] = number_or_null(doc.metadata.penalty);
  if (doc.metadata.bootstrap_replicates) meta["bootstrap_replicates"] = *doc.metadata.bootstrap_replicates;
  meta["tool_version"] = doc.metadata.tool_version;
  j["metadata"] = std::move(meta);
  return j.dump(2) + "\n";
}

NetworkDocument document_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("network document: ") + e.what());
  }
  try {
    NetworkDocument doc;
    doc.schema_version = j.at("schema_version").get<int>();
    if (doc.schema_version != kDocumentSchemaVersion) {
      throw SchemaError("unsupported schema version " + std::to_string(doc.schema_version));
    }
    doc.events = j.at("events").get<std::vector<std::string>>();
    for (const auto& je : j.at("edges")) {
      doc.edges.push_back({je.at("from").get<std::string>(), je.at("to").get<std::string>(),
                           optional_number(je, "confidence")});
    }
    for (const auto& jt : j.at("cpts")) {
      DocumentCpt t;
      t.node = jt.at("node").get<std::string>();
      t.parents = jt.at("parents").get<std::vector<std::string>>();
      t.probabilities = jt.at("probabilities").get<std::vector<double>>();
      if (jt.contains("unsupported")) t.unsupported = jt.at("unsupported").get<std::vector<std::size_t>>();
      doc.cpts.push_back(std::move(t));
    }
    const auto& meta = j.at("metadata");
    doc.metadata.regularizer = meta.at("regularizer").get<std::string>();
    doc.metadata.mode = meta.value("mode", std::string("sbcn"));
    doc.metadata.seed = meta.value("seed", std::uint64_t{0});
    doc.metadata.score = optional_number(meta, "score");
    doc.metadata.log_likelihood = optional_number(meta, "log_likelihood");
    doc.metadata.penalty = optional_number(meta, "penalty");
    if (meta.contains("bootstrap_replicates") && !meta.at("bootstrap_replicates").is_null()) {
      doc.metadata.bootstrap_replicates = meta.at("bootstrap_replicates").get<std::size_t>();
    }
    doc.metadata.tool_version = meta.value("tool_version", std::string());
    doc.validate();
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("network document: ") + e.what());
  }
}

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_dot(const NetworkDocument& doc) {
  std::string out = "digraph sbcn {\n";
  for (const auto& e : doc.events) out += "  " + dot_quote(e) + ";\n";
  for (const auto& e : doc.edges) {
    out += "  " + dot_quote(e.from) + " -> " + dot_quote(e.to);
    if (e.confidence) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", *e.confidence);
      out += std::string(" [label=\"") + buf + "\"]";
    }
    out += ";\n";
  }
  return out + "}\n";
}

std::vector<SuppesViolation> validate_against(const NetworkDocument& doc, const Dataset& data) {
  doc.validate();
  std::vector<SuppesViolation> out;
  for (const auto& e : doc.edges) {
    const auto from = data.find_event(e.from);
    const auto to = data.find_event(e.to);
    if (!from || !to) {
      out.push_back({e.from, e.to, "event missing from the dataset"});
      continue;
    }
    const auto c = pair_counts(data, *from, *to);
    if (data.is_degenerate(*from) || data.is_degenerate(*to)) {
      out.push_back({e.from, e.to, "degenerate event (marginal 0 or 1)"});
    } else if (!c.temporal_priority()) {
      out.push_back({e.from, e.to, "temporal priority fails: P(cause) <= P(effect)"});
    } else if (!c.probability_raising()) {
      out.push_back({e.from, e.to, "probability raising fails: P(effect|cause) <= P(effect|!cause)"});
    }
  }
  return out;
}

std::string format_edge_list(const MpnModel& model) {
  std::string out;
  for (const auto& e : model.dag.edges()) {
    out += model.event_names.at(e.from) + '\t' + model.event_names.at(e.to) + '\n';
  }
  return out;
}

std::string model_to_json(const MpnModel& model, const std::optional<SimulationInfo>& info) {
  ojson j;
  j["events"] = model.event_names;
  j["theta"] = model.theta;
  j["epsilon"] = model.epsilon;
  j["source_marginal"] = model.source_marginal;
  j["nodes"] = ojson::array();
  for (std::size_t v = 0; v < model.dag.node_count(); ++v) {
    ojson node;
    node["name"] = model.event_names[v];
    std::vector<std::string> parents;
    for (auto p : model.dag.parents(v)) parents.push_back(model.event_names[p]);
    node["parents"] = parents;
    node["logic"] = model.logic[v] ? ojson(std::string(to_string(*model.logic[v]))) : ojson(nullptr);
    j["nodes"].push_back(std::move(node));
  }
  if (info) {
    j["simulation"] = {
        {"topology", info->topology},
        {"samples", info->samples},
        {"noise", info->noise},
        {"noise_mode", std::string(to_string(info->noise_mode))},
        {"seed", info->seed},
    };
  }
  j["tool_version"] = std::string(tool_version());
  return j.dump(2) + "\n";
}

}  // namespace sbcn
