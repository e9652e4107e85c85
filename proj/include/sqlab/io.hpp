#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sqlab/dimension.hpp"
#include "sqlab/norms.hpp"
#include "sqlab/problem_spec.hpp"
#include "sqlab/problems.hpp"
#include "sqlab/solvers.hpp"
#include "sqlab/streaming.hpp"

namespace sqlab {

using json = nlohmann::json;

// finite doubles stay numbers; infinities and NaN become "inf", "-inf", "nan"
json num(double v);
double num_from(const json& j);

json problem_to_json(const ProblemSpec& p);
ProblemSpec problem_from_json(const json& j);

json to_json(const NormReport& r);
json to_json(const DimensionReport& r);
json to_json(const RunReport& r);
json to_json(const BitLedger& l);
json to_json(const LineAudit& a);
json to_json(const CombinedAudit& a);

// reports carry {"report": kind, "instance": name, ...}
json tag_report(json body, const std::string& kind, const std::string& instance);

std::string csv_double(double v);  // %.17g, "inf"/"-inf"/"nan" otherwise
std::string csv_escape(const std::string& s);
std::string csv_scalar(const json& v);

// one row per report, sorted by instance, columns: report, instance, then the sorted scalar keys
std::string report_merge(const std::vector<json>& reports);
std::string report_merge_files(const std::vector<std::string>& paths);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace sqlab
