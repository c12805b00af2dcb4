#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "doctest.h"
#include "scalesift/commands.hpp"
#include "scalesift/config.hpp"
#include "scalesift/error.hpp"
#include "scalesift/metrics.hpp"
#include "test_util.hpp"

using namespace scalesift;

namespace {

Json minimal() {
  return Json::parse(R"({"world": {}, "providers": {"lr": {"kind": "synthetic-lr"},
                         "hr": {"kind": "synthetic-hr"}}, "budget": 12})");
}

std::string config_error(const Json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

struct CliResult {
  int status;
  std::string out;
  std::string err;
};

CliResult run_cli(const TempDir& dir, const std::string& args) {
  std::string cmd = std::string(SCALESIFT_CLI_PATH) + " " + args + " > " + (dir / "stdout.txt").string() +
                    " 2> " + (dir / "stderr.txt").string();
  int rc = std::system(cmd.c_str());
  return {WEXITSTATUS(rc), read_text_file(dir / "stdout.txt"), read_text_file(dir / "stderr.txt")};
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  RunConfig c = parse_config(minimal());
  CHECK(c.seed == 7);
  CHECK(c.budget.max_locations == 12);
  CHECK(c.budget.area_per_location == 5.0);
  CHECK(c.sampler == SamplerStrategy::Disagreement);
  CHECK(c.modality == ModalityStrategy::Oracle);
  CHECK(c.k == 40);
  REQUIRE(c.world.has_value());
  CHECK(c.world->num_locations == 400);
  // The resolved config parses back to itself.
  Json resolved = to_json(c);
  CHECK(to_json(parse_config(resolved)) == resolved);
}

TEST_CASE("strict parsing names the offending path") {
  Json doc = minimal();
  doc["budgett"] = 3;
  CHECK(config_error(doc).find("$.budgett") != std::string::npos);

  doc = minimal();
  doc["budget"] = -1;
  CHECK(config_error(doc).find("$.budget") != std::string::npos);

  doc = minimal();
  doc["budget"] = Json{{"max_locations", "ten"}};
  CHECK(config_error(doc).find("$.budget.max_locations") != std::string::npos);

  doc = minimal();
  doc.erase("budget");
  CHECK(config_error(doc).find("missing required key: $.budget") != std::string::npos);

  doc = minimal();
  doc["sampler"] = "greedy";
  CHECK(config_error(doc).find("$.sampler") != std::string::npos);

  doc = minimal();
  doc["providers"]["lr"]["kind"] = "synthetic-hr";
  CHECK(config_error(doc).find("$.providers.lr.kind") != std::string::npos);

  doc = minimal();
  doc["modality"] = Json{{"strategy", "llm"}};
  CHECK(config_error(doc).find("$.modality.llm") != std::string::npos);

  doc = minimal();
  doc["world"]["num_locations"] = "many";
  CHECK(config_error(doc).find("$.world.num_locations") != std::string::npos);
}

TEST_CASE("referenced files must exist") {
  Json doc = minimal();
  doc["providers"]["lr"] = Json{{"kind", "cached"}, {"path", "nowhere.csv"}};
  CHECK(config_error(doc).find("nowhere.csv") != std::string::npos);
}

TEST_CASE("seed override reaches every derived seed") {
  RunConfig c = parse_config(minimal());
  c.set_seed(99);
  CHECK(c.seed == 99);
  CHECK(c.split_seed == 99);
  CHECK(c.train.seed == 99);
  CHECK(c.world->seed == 99);
}

TEST_CASE("file digest") {
  TempDir dir;
  write_text_file(dir / "abc.txt", "abc");
  CHECK(file_digest(dir / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("label csv parsing") {
  LabelTable t = parse_label_csv("location_id,concept_id,label\nl1,a,1\nl2,a,0\nl1,b,0\nl2,b,1\n");
  CHECK(t.num_concepts() == 2);
  CHECK(t.num_locations() == 2);
  CHECK(t.at(0, 0));
  CHECK_FALSE(t.at(1, 0));
  CHECK_THROWS_AS(parse_label_csv("location_id,concept_id,label\nl1,a,2\n"), ParseError);
  CHECK_THROWS_AS(parse_label_csv("location_id,concept_id,label\nl1,a,1\nl2,b,1\n"), Error);
}

TEST_CASE("error json carries the error kind and extra fields") {
  Json j = error_json(MissingArtifactError("no model", "/x/kd_model.json"));
  CHECK(j["error"]["kind"] == "missing_artifact");
  CHECK(j["error"]["path"] == "/x/kd_model.json");
  CHECK(error_json(ParseError("bad", 4))["error"]["line"] == 4);
  CHECK(error_json(TrainingError("diverged", 12))["error"]["epoch"] == 12);
  CHECK(error_json(ProtocolError("bad answer", "maybe"))["error"]["raw_response"] == "maybe");
  CHECK(error_json(TransportError("down", 3))["error"]["retries"] == 3);
}

TEST_CASE("command line") {
  TempDir dir;
  Json cfg = minimal();
  cfg["world"]["num_locations"] = 80;
  cfg["train"] = Json{{"epochs", 60}};
  cfg["output_dir"] = (dir / "out").string();
  write_text_file(dir / "config.json", dump_json(cfg));
  const std::string conf = "--config " + (dir / "config.json").string();

  SUBCASE("run before distill reports the missing model") {
    CliResult r = run_cli(dir, "run " + conf);
    CHECK(r.status == 1);
    Json err = Json::parse(r.err);
    CHECK(err["error"]["kind"] == "missing_artifact");
    CHECK(err["error"]["path"].get<std::string>().find("kd_model.json") != std::string::npos);
  }
  SUBCASE("distill, run and eval") {
    REQUIRE(run_cli(dir, "distill " + conf).status == 0);
    CliResult r = run_cli(dir, "run " + conf);
    REQUIRE(r.status == 0);
    for (const char* f : {"plan.json", "decisions.csv", "selection.csv", "scores_final.csv",
                          "cost_report.json", "eval_report.json", "manifest_run.json"})
      CHECK(std::filesystem::exists(dir / "out" / f));
    Json manifest = Json::parse(read_text_file(dir / "out" / "manifest_run.json"));
    CHECK(manifest["subcommand"] == "run");

    // Labels for every test location, then eval against the final scores.
    RunConfig rc = parse_config_file(dir / "config.json");
    World w = generate_world(*rc.world);
    Split split = split_locations(w, rc.split_fractions, rc.split_seed);
    std::string labels = "location_id,concept_id,label\n";
    for (const auto& c : w.spec.concepts)
      for (const auto& l : split.test)
        labels += l + "," + c.id + "," + (w.label(w.location_index(l), w.concept_index(c.id)) ? "1" : "0") + "\n";
    write_text_file(dir / "labels.csv", labels);
    CliResult e = run_cli(dir, "eval " + conf + " --scores " + (dir / "out" / "scores_final.csv").string() +
                                   " --labels " + (dir / "labels.csv").string() + " --out " + (dir / "ev").string());
    REQUIRE(e.status == 0);
    EvalReport a = eval_report_from_json(Json::parse(read_text_file(dir / "ev" / "eval_report.json")));
    EvalReport b = eval_report_from_json(Json::parse(read_text_file(dir / "out" / "eval_report.json")));
    CHECK(a.map == b.map);
  }
  SUBCASE("bad config is reported as json") {
    write_text_file(dir / "bad.json", R"({"world": {}, "budget": 3})");
    CliResult r = run_cli(dir, "generate --config " + (dir / "bad.json").string());
    CHECK(r.status == 1);
    CHECK(Json::parse(r.err)["error"]["kind"] == "config");
  }
  SUBCASE("sweep writes a curve") {
    REQUIRE(run_cli(dir, "distill " + conf).status == 0);
    REQUIRE(run_cli(dir, "sweep " + conf).status == 0);
    std::string curve = read_text_file(dir / "out" / "curve.csv");
    CHECK(curve.rfind("budget,strategy,precision_at_k,map_at_k,seed\n0,", 0) == 0);
  }
}
