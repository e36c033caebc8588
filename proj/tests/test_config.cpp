#include <sstream>
#include <string>

#include "doctest.h"
#include "harvest/config.hpp"
#include "harvest/error.hpp"
#include "harvest/instance_io.hpp"

using namespace harvest;
using nlohmann::json;

namespace {

std::string source(const std::string& rel) { return std::string(HARVEST_SOURCE_DIR) + "/" + rel; }

std::string error_of(const json& doc) {
  try {
    parse_run_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

int instance_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_instance(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("shipped configurations parse") {
  for (const char* name : {"configs/block_reactive.json", "configs/block_predictive.json", "configs/block_stochastic.json", "configs/desk.json"}) {
    CAPTURE(name);
    CHECK_NOTHROW(parse_run_config(load_json_file(source(name))));
  }
  const RunConfig c = parse_run_config(load_json_file(source("configs/block_reactive.json")));
  CHECK(c.setup.sim.crew_size == 25);
  CHECK(c.setup.sim.robot_count == 12);
  CHECK(c.setup.scheduler.kind == SchedulerKind::Reactive);
  CHECK(c.experiment.run_count == 20);
  CHECK(c.setup.field.furrow_count() == 100);

  const RunConfig d = parse_run_config(load_json_file(source("configs/desk.json")));
  CHECK(d.setup.sim.fsm_variant == FsmVariant::Extended);
  CHECK(d.setup.scheduler.kind == SchedulerKind::MsaExact);
  CHECK(d.setup.uncertainty.pred_sd == 30.0);
}

TEST_CASE("configuration errors name the offending field") {
  const json base = load_json_file(source("configs/block_reactive.json"));

  json doc = base;
  doc["sim"]["robot_speeed"] = 1.5;
  CHECK(error_of(doc).find("sim.robot_speeed") != std::string::npos);

  doc = base;
  doc.erase("distributions");
  CHECK(error_of(doc).find("distributions") != std::string::npos);

  doc = base;
  doc["sim"]["crew_size"] = "many";
  CHECK(error_of(doc).find("sim.crew_size") != std::string::npos);

  doc = base;
  doc["scheduler"]["kind"] = "fifo";
  CHECK(error_of(doc).find("scheduler.kind") != std::string::npos);

  doc = base;
  doc["bogus"] = json::object();
  CHECK(error_of(doc).find("bogus") != std::string::npos);

  doc = base;
  doc["distributions"]["pick_time"]["weights"] = json::array({1.0});
  CHECK_FALSE(error_of(doc).empty());

  CHECK_THROWS_AS(load_json_file(source("configs/does_not_exist.json")), ConfigError);
}

TEST_CASE("rejection needs the extended state machine") {
  json doc = load_json_file(source("configs/block_stochastic.json"));
  doc["sim"]["fsm_variant"] = "simple";
  const std::string msg = error_of(doc);
  CHECK_FALSE(msg.empty());
  CHECK(msg.find("msa-srlpt") != std::string::npos);
}

TEST_CASE("overrides set nested values") {
  json doc = load_json_file(source("configs/block_reactive.json"));
  apply_override(doc, "sim.robot_count=3");
  CHECK(doc["sim"]["robot_count"] == 3);
  apply_override(doc, "scheduler.kind=manual");
  CHECK(doc["scheduler"]["kind"] == "manual");
  apply_override(doc, "experiment.output_dir=\"x/y\"");
  CHECK(doc["experiment"]["output_dir"] == "x/y");
  CHECK_THROWS_AS(apply_override(doc, "robot_count=3"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "sim.robot_count"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, ".x=1"), ConfigError);
}

TEST_CASE("configuration digest is stable and content sensitive") {
  const json a = load_json_file(source("configs/block_reactive.json"));
  json b = load_json_file(source("configs/block_reactive.json"));
  CHECK(config_digest(a) == config_digest(b));
  CHECK(config_digest(a).size() == 16);
  apply_override(b, "sim.robot_count=11");
  CHECK(config_digest(a) != config_digest(b));
}

TEST_CASE("solver instance files") {
  std::istringstream in("M,now,load_s,unload_s\n2,0,5,5\nid,release_s,one_way_s,process_s\nR1,30,30,70\nR2,0,40,90\n");
  const SolverInstance inst = parse_instance(in);
  CHECK(inst.robots == 2);
  REQUIRE(inst.problem.jobs.size() == 2);
  CHECK(inst.labels[0] == "R1");
  CHECK(inst.problem.jobs[0].release_delay == 30.0);
  CHECK(inst.problem.jobs[1].process == 90.0);
  CHECK_FALSE(inst.has_scenario_columns);

  std::istringstream empty("");
  CHECK_THROWS_AS(parse_instance(empty), ParseError);
  CHECK(instance_error_line("M,now\n") == 1);
  CHECK(instance_error_line("M,now,load_s,unload_s\n2,0,5\n") == 2);
  CHECK(instance_error_line("M,now,load_s,unload_s\n1.5,0,5,5\n") == 2);
  CHECK(instance_error_line("M,now,load_s,unload_s\n2,0,5,5\nid,release_s,one_way_s,process_s\nR1,x,30,70\n") == 4);
  CHECK(instance_error_line(
            "M,now,load_s,unload_s\n2,0,5,5\nid,release_s,one_way_s,process_s\nR1,0,30,70\nR2,0,30\n") == 5);
}
