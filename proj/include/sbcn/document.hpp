#ifndef SBCN_DOCUMENT_HPP
#define SBCN_DOCUMENT_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbcn/dataset.hpp"
#include "sbcn/evaluation.hpp"
#include "sbcn/mpn.hpp"
#include "sbcn/scoring.hpp"

namespace sbcn {

inline constexpr int kDocumentSchemaVersion = 1;

std::string_view tool_version();

struct DocumentEdge {
  std::string from;
  std::string to;
  std::optional<double> confidence;
  bool operator==(const DocumentEdge&) const = default;
};

struct DocumentCpt {
  std::string node;
  std::vector<std::string> parents;
  // Bit k of the index is the value of parents[k].
  std::vector<double> probabilities;
  std::vector<std::size_t> unsupported;
  bool operator==(const DocumentCpt&) const = default;
};

struct DocumentMetadata {
  std::string regularizer = "none";
  std::string mode = "sbcn";  // sbcn | prima_facie_only | bn
  std::uint64_t seed = 0;
  std::optional<double> score;
  std::optional<double> log_likelihood;
  std::optional<double> penalty;
  std::optional<std::size_t> bootstrap_replicates;
  std::string tool_version;
  bool operator==(const DocumentMetadata&) const = default;
};

// Serializable form of an inferred network.
struct NetworkDocument {
  int schema_version = kDocumentSchemaVersion;
  std::vector<std::string> events;
  std::vector<DocumentEdge> edges;
  std::vector<DocumentCpt> cpts;
  DocumentMetadata metadata;

  // Throws SchemaError when an edge or table names an undeclared event.
  void validate() const;
  bool operator==(const NetworkDocument&) const = default;
};

NetworkDocument make_document(const ScoredNetwork& network, DocumentMetadata metadata,
                              const EdgeConfidence* confidence = nullptr);

std::string to_json(const NetworkDocument& doc);
NetworkDocument document_from_json(std::string_view text);

// Graph description in dot syntax; confidences become edge labels.
std::string to_dot(const NetworkDocument& doc);

struct SuppesViolation {
  std::string from;
  std::string to;
  std::string reason;
};

// Re-checks both Suppes inequalities for every edge with exact counts.
std::vector<SuppesViolation> validate_against(const NetworkDocument& doc, const Dataset& data);

// Ground truth: "<parent>\t<child>" lines, and a JSON sidecar with logic,
// theta, epsilon and the generating parameters.
struct SimulationInfo {
  std::string topology;
  std::size_t samples = 0;
  double noise = 0.0;
  NoiseMode noise_mode = NoiseMode::random_entry;
  std::uint64_t seed = 0;
};

std::string format_edge_list(const MpnModel& model);
std::string model_to_json(const MpnModel& model, const std::optional<SimulationInfo>& info = {});

}  // namespace sbcn

#endif
