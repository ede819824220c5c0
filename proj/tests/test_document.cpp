#include "doctest.h"
#include "sbcn/document.hpp"
#include "sbcn/error.hpp"
#include "sbcn/mpn.hpp"
#include "sbcn/search.hpp"
#include "test_util.hpp"

#include <json.hpp>

using namespace sbcn;
using testing::toy;

namespace {

NetworkDocument toy_document(const EdgeConfidence* conf = nullptr) {
  InferenceConfig cfg;
  cfg.search.score.regularizer = Regularizer::none;
  const auto inference = infer_sbcn(toy(), cfg);
  DocumentMetadata meta;
  meta.regularizer = "none";
  meta.seed = 42;
  return make_document(inference.network, meta, conf);
}

}  // namespace

TEST_SUITE("document") {

TEST_CASE("toy network document") {
  const auto doc = toy_document();
  CHECK(doc.events == std::vector<std::string>{"v0", "v1"});
  REQUIRE(doc.edges.size() == 1);
  CHECK(doc.edges[0] == DocumentEdge{"v0", "v1", std::nullopt});
  REQUIRE(doc.cpts.size() == 2);
  CHECK(doc.cpts[1].parents == std::vector<std::string>{"v0"});
  CHECK(doc.cpts[1].probabilities[1] == doctest::Approx(2.0 / 3.0));
  CHECK(doc.cpts[1].probabilities[0] == 0.0);
  CHECK(doc.metadata.tool_version == tool_version());
  REQUIRE(doc.metadata.score);
  CHECK(*doc.metadata.score == doctest::Approx(*doc.metadata.log_likelihood));
}

TEST_CASE("json round trip is byte-identical") {
  EdgeConfidence conf(2);
  conf.add_replicate(Dag::from_edges(2, std::vector<Edge>{{0, 1}}));
  conf.add_replicate(Dag(2));
  conf.add_replicate(Dag::from_edges(2, std::vector<Edge>{{0, 1}}));
  for (const auto& doc : {toy_document(), toy_document(&conf)}) {
    const auto text = to_json(doc);
    const auto back = document_from_json(text);
    CHECK(back == doc);
    CHECK(to_json(back) == text);
  }
  const auto with_conf = toy_document(&conf);
  REQUIRE(with_conf.edges[0].confidence);
  CHECK(*with_conf.edges[0].confidence == doctest::Approx(2.0 / 3.0));
  CHECK(with_conf.metadata.bootstrap_replicates == std::optional<std::size_t>(3));
}

TEST_CASE("random inferred documents round trip") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = testing::random_dataset(40, 5, seed, 0.3 + 0.02 * static_cast<double>(seed));
    InferenceConfig cfg;
    cfg.search.score.regularizer = seed % 2 ? Regularizer::aic : Regularizer::none;
    const auto doc = make_document(infer_sbcn(data, cfg).network, {});
    const auto text = to_json(doc);
    CHECK(to_json(document_from_json(text)) == text);
  }
}

TEST_CASE("document parsing rejects malformed input") {
  CHECK_THROWS_AS(document_from_json("{"), ParseError);
  CHECK_THROWS_AS(document_from_json("[]"), SchemaError);
  auto j = nlohmann::json::parse(to_json(toy_document()));
  auto bad_version = j;
  bad_version["schema_version"] = 99;
  CHECK_THROWS_AS(document_from_json(bad_version.dump()), SchemaError);
  auto bad_edge = j;
  bad_edge["edges"][0]["to"] = "ghost";
  CHECK_THROWS_AS(document_from_json(bad_edge.dump()), SchemaError);
  auto bad_table = j;
  bad_table["cpts"][1]["probabilities"] = {0.5};
  CHECK_THROWS_AS(document_from_json(bad_table.dump()), SchemaError);
  auto bad_conf = j;
  bad_conf["edges"][0]["confidence"] = 1.5;
  CHECK_THROWS_AS(document_from_json(bad_conf.dump()), SchemaError);
  auto missing = j;
  missing.erase("events");
  CHECK_THROWS_AS(document_from_json(missing.dump()), SchemaError);
}

TEST_CASE("dot export") {
  EdgeConfidence conf(2);
  conf.add_replicate(Dag::from_edges(2, std::vector<Edge>{{0, 1}}));
  CHECK(to_dot(toy_document()) == "digraph sbcn {\n  \"v0\";\n  \"v1\";\n  \"v0\" -> \"v1\";\n}\n");
  CHECK(to_dot(toy_document(&conf)).find("\"v0\" -> \"v1\" [label=\"1.00\"];") != std::string::npos);
  NetworkDocument quoted;
  quoted.events = {"a\"b"};
  CHECK(to_dot(quoted).find("\"a\\\"b\"") != std::string::npos);
}

TEST_CASE("validation against data") {
  const auto doc = toy_document();
  CHECK(validate_against(doc, toy()).empty());

  auto reversed = doc;
  reversed.edges = {{"v1", "v0", std::nullopt}};
  auto v = validate_against(reversed, toy());
  REQUIRE(v.size() == 1);
  CHECK(v[0].reason.find("temporal priority") != std::string::npos);

  // v0 more frequent than v1 but independent of it.
  const auto indep = testing::from_rows({{1, 1}, {1, 0}, {1, 1}, {1, 0}, {0, 1}, {0, 0}, {1, 0}, {1, 0}});
  const auto pr = validate_against(doc, testing::from_rows({{1, 0}, {1, 0}, {1, 1}, {0, 1}}));
  REQUIRE(pr.size() == 1);
  CHECK(pr[0].reason.find("probability raising") != std::string::npos);
  CHECK(validate_against(doc, indep).size() == 1);

  const auto degenerate = validate_against(doc, testing::from_rows({{1, 0}, {1, 1}}));
  REQUIRE(degenerate.size() == 1);
  CHECK(degenerate[0].reason.find("degenerate") != std::string::npos);

  const auto renamed = testing::from_rows({{1, 0}, {1, 1}, {0, 0}}, {"x", "y"});
  CHECK(validate_against(doc, renamed).size() == 1);
}

TEST_CASE("ground-truth sidecars") {
  const auto model = random_structure(TopologyClass::make(TopologyKind::dag_single_source_disj, 8), 3);
  const auto edges = format_edge_list(model);
  std::size_t lines = 0;
  for (char c : edges) lines += c == '\n';
  CHECK(lines == model.dag.edge_count());

  const auto j = nlohmann::json::parse(model_to_json(model, SimulationInfo{"dag_single_source_disj", 100, 0.1, NoiseMode::flip, 7}));
  CHECK(j["events"].size() == 8);
  for (const auto& node : j["nodes"]) {
    if (node["parents"].empty()) CHECK(node["logic"].is_null());
    else CHECK(node["logic"] == "OR");
  }
  CHECK(j["simulation"]["noise_mode"] == "flip");
  CHECK(j["theta"] == model.theta);
  CHECK_FALSE(nlohmann::json::parse(model_to_json(model)).contains("simulation"));
}

}
