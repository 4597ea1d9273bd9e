#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "xorbench/error.hpp"
#include "xorbench/kvconfig.hpp"
#include "xorbench/records.hpp"
#include "xorbench/solvers.hpp"

using namespace xorbench;

TEST_CASE("key-value config: parsing and typed access") {
  const auto kv = KeyValueConfig::parse(
      "# comment\n"
      "sizes = 32, 64 ,128\n"
      "  laser.g0=2.5   # trailing comment\n"
      "flag = yes\n"
      "cap = inf\n"
      "name = results.jsonl\n");
  CHECK(kv.get_u64s("sizes") == std::vector<std::uint64_t>{32, 64, 128});
  CHECK(kv.get_double("laser.g0", 0.0) == 2.5);
  CHECK(kv.get_bool("flag", false));
  CHECK(std::isinf(kv.get_double("cap", 0.0)));
  CHECK(kv.get_string("name", "") == "results.jsonl");
  CHECK(kv.get_u64("missing", 7) == 7);
  CHECK_FALSE(kv.has("missing"));
  CHECK_THROWS_AS(kv.get_u64("laser.g0", 0), Error);
  CHECK_THROWS_AS(kv.get_bool("name", false), Error);
}

TEST_CASE("key-value config: errors name the line") {
  try {
    KeyValueConfig::parse("a = 1\nnot a pair\n");
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/file.conf"), Error);
}

TEST_CASE("key-value config: merge precedence, prefixes and dump round trip") {
  auto base = KeyValueConfig::parse("a = 1\nb = 2\nlaser.kappa.16 = 0.1\nlaser.kappa.32 = 0.2\n");
  base.merge(KeyValueConfig::parse("b = 3\nc = 4\n"));
  CHECK(base.get_string("a", "") == "1");
  CHECK(base.get_string("b", "") == "3");
  CHECK(base.get_string("c", "") == "4");
  const auto pre = base.with_prefix("laser.kappa.");
  CHECK(pre.size() == 2);
  CHECK(pre.at("16") == "0.1");
  CHECK(KeyValueConfig::parse(base.dump()).entries() == base.entries());
}

TEST_CASE("solver configs from key-value files") {
  const auto kv = KeyValueConfig::parse(
      "laser.g0 = 3\nlaser.kappa = auto\nlaser.eta = 0.03\n"
      "sa.t_hi = auto\nsa.t_lo = 0.2\nsa.sweeps_per_temp = 4\n"
      "tabu.tenure = 7\ntabu.aspiration = false\n"
      "pt.replicas = auto\npt.t_lo = 0.3\npt.sweeps_between_swaps = 2\n"
      "laser.kappa.16 = 0.05\nlaser.kappa.64 = 0.2\n");
  const auto laser = std::get<LaserParams>(solver_config_from(kv, "laser"));
  CHECK(laser.g0 == 3.0);
  CHECK(laser.kappa == 0.0);
  CHECK(laser.eta == 0.03);
  const auto sa = std::get<AnnealParams>(solver_config_from(kv, "sa"));
  CHECK(sa.t_hi == 0.0);
  CHECK(sa.t_lo == 0.2);
  CHECK(sa.sweeps_per_temp == 4);
  const auto tabu = std::get<TabuParams>(solver_config_from(kv, "tabu"));
  CHECK(tabu.tenure == 7);
  CHECK_FALSE(tabu.aspiration);
  const auto pt = std::get<TemperingParams>(solver_config_from(kv, "pt"));
  CHECK(pt.num_replicas == 0);
  CHECK(pt.sweeps_between_swaps == 2);
  CHECK_THROWS_AS(solver_config_from(kv, "qaoa"), Error);

  const auto table = kappa_table_from(kv);
  CHECK(table.lookup(16) == 0.05);
  CHECK(table.lookup(64) == 0.2);

  const SparseIsing model(xorsat_to_ising(generate_3r3x(16, 1)).first);
  const auto resolved_laser = std::get<LaserParams>(resolve_auto(laser, model, table));
  CHECK(resolved_laser.kappa == 0.05);
  const auto resolved_sa = std::get<AnnealParams>(resolve_auto(sa, model, table));
  CHECK(resolved_sa.t_hi == 2.0 * model.max_abs_coupling());
  const auto resolved_pt = std::get<TemperingParams>(resolve_auto(pt, model, table));
  CHECK(resolved_pt.num_replicas == default_replicas(16));
  CHECK_THROWS_AS(resolve_auto(laser, model, KappaTable{}), Error);
}

TEST_CASE("records: JSON round trip with and without a solution step") {
  RunRecord r;
  r.instance_label = "3r3x-v16-s5";
  r.solver_id = "sa";
  r.seed = 18446744073709551615ull;
  r.steps_executed = 1234;
  r.success = true;
  r.best_energy = 0.0;
  r.step_of_solution = 1200;
  r.wall_time = 0.1 + 0.2;
  r.step_unit = "sweep";
  r.n = 32;
  r.noise = 0.03;
  r.instance_index = 4;
  r.restart = 9;
  const auto j = to_json(r, "2026-01-02T03:04:05Z");
  CHECK(j["timestamp"] == "2026-01-02T03:04:05Z");
  const auto back = record_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.same_outcome(r));
  CHECK(back.wall_time == r.wall_time);

  r.success = false;
  r.step_of_solution.reset();
  r.best_energy = 3.0;
  const auto j2 = to_json(r, iso8601_now());
  CHECK(j2["step_of_solution"].is_null());
  CHECK(record_from_json(j2).same_outcome(r));
  CHECK(std::regex_match(iso8601_now(), std::regex(R"(\d{4}-\d\d-\d\dT\d\d:\d\d:\d\dZ)")));
}

TEST_CASE("records: files with headers, torn tails and corrupt lines") {
  const auto dir = oracle::temp_dir("records");
  RunRecord r;
  r.solver_id = "tabu";
  r.step_unit = "move";
  {
    std::ofstream out(dir / "ok.jsonl");
    out << R"({"header":{"plan":{}}})" << '\n';
    append_record(out, r);
    r.restart = 1;
    append_record(out, r);
    out << R"({"instance_label":"x","solv)";  // interrupted write
  }
  const auto recs = read_records((dir / "ok.jsonl").string());
  REQUIRE(recs.size() == 2);
  CHECK(recs[1].restart == 1);

  {
    std::ofstream out(dir / "bad.jsonl");
    append_record(out, r);
    out << "garbage\n";
    append_record(out, r);
  }
  CHECK_THROWS_AS(read_records((dir / "bad.jsonl").string()), Error);
  CHECK_THROWS_AS(read_records((dir / "missing.jsonl").string()), Error);
}
