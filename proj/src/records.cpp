#include "xorbench/records.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <ostream>

#include "xorbench/error.hpp"

namespace xorbench {

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json to_json(const RunRecord& r, const std::string& timestamp) {
  nlohmann::json j;
  j["instance_label"] = r.instance_label;
  j["solver_id"] = r.solver_id;
  j["seed"] = r.seed;
  j["steps_executed"] = r.steps_executed;
  j["success"] = r.success;
  j["best_energy"] = r.best_energy;
  j["step_of_solution"] = r.step_of_solution ? nlohmann::json(*r.step_of_solution) : nlohmann::json();
  j["wall_time"] = r.wall_time;
  j["step_unit"] = r.step_unit;
  j["n"] = r.n;
  j["noise"] = r.noise;
  j["instance_index"] = r.instance_index;
  j["restart"] = r.restart;
  j["timestamp"] = timestamp;
  return j;
}

RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.instance_label = j.at("instance_label").get<std::string>();
  r.solver_id = j.at("solver_id").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.steps_executed = j.at("steps_executed").get<std::uint64_t>();
  r.success = j.at("success").get<bool>();
  r.best_energy = j.at("best_energy").get<double>();
  if (!j.at("step_of_solution").is_null())
    r.step_of_solution = j.at("step_of_solution").get<std::uint64_t>();
  r.wall_time = j.at("wall_time").get<double>();
  r.step_unit = j.at("step_unit").get<std::string>();
  r.n = j.value("n", std::size_t{0});
  r.noise = j.value("noise", 0.0);
  r.instance_index = j.value("instance_index", std::size_t{0});
  r.restart = j.value("restart", std::size_t{0});
  return r;
}

void append_record(std::ostream& out, const RunRecord& record) {
  out << to_json(record, iso8601_now()).dump() << '\n';
}

std::vector<RunRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open results file " + path);
  std::vector<RunRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      if (j.contains("header")) continue;
      out.push_back(record_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      // A torn final line from an interrupted run is dropped; anything else is corrupt.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw Error(ErrorKind::SyntaxError,
                  path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace xorbench
