#pragma once

// JSON-lines persistence of RunRecords. Each record is one JSON object per
// line with an ISO-8601 UTC timestamp; a results file may start with one
// {"header": {...}} line echoing the resolved configuration.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "xorbench/solvers.hpp"

namespace xorbench {

std::string iso8601_now();

nlohmann::json to_json(const RunRecord& record, const std::string& timestamp);
RunRecord record_from_json(const nlohmann::json& j);

void append_record(std::ostream& out, const RunRecord& record);
// Skips header lines. Throws Io / SyntaxError.
std::vector<RunRecord> read_records(const std::string& path);

}  // namespace xorbench
