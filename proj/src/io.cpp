#include "sqlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sqlab {

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double num_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorKind::InvalidArgument, "expected a number, got " + j.dump());
}

static json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

static std::vector<double> nums_from(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(num_from(x));
  return v;
}

json problem_to_json(const ProblemSpec& p) {
  json j;
  j["kind"] = problem_kind_name(p.kind);
  j["name"] = p.name;
  j["domain"] = p.domain->ids();
  if (p.domain->is_labeled()) j["labeled"] = true;
  j["dists"] = json::array();
  for (const auto& d : p.dists) j["dists"].push_back(nums(d.weights()));
  j["reference"] = p.reference ? nums(p.reference->weights()) : json(nullptr);
  j["solutions"] = p.solutions;
  j["validity"] = json::array();
  for (const auto& row : p.validity) {
    json r = json::array();
    for (bool b : row) r.push_back(b);
    j["validity"].push_back(r);
  }
  json verify = json::object();
  for (std::size_t f = 0; f < p.verify.size(); ++f)
    if (p.verify[f]) verify[p.solutions.at(f)] = nums(p.verify[f]->values());
  j["verify"] = verify;
  j["threshold"] = p.threshold ? num(*p.threshold) : json(nullptr);
  j["eps"] = p.eps ? num(*p.eps) : json(nullptr);
  return j;
}

ProblemSpec problem_from_json(const json& j) {
  try {
    ProblemSpec p;
    auto kind = parse_problem_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorKind::InvalidArgument, "unknown problem kind");
    p.kind = *kind;
    p.name = j.value("name", "");
    auto ids = j.at("domain").get<std::vector<std::string>>();
    if (j.value("labeled", false)) {
      std::vector<std::string> base;
      for (std::size_t i = 0; i + 1 < ids.size(); i += 2) base.push_back(ids[i].substr(0, ids[i].rfind('|')));
      p.domain = FiniteDomain::labeled(base);
      if (p.domain->ids() != ids) throw Error(ErrorKind::InvalidArgument, "labeled domain ids malformed");
    } else {
      p.domain = FiniteDomain::make(ids);
    }
    for (const auto& d : j.at("dists")) p.dists.emplace_back(p.domain, nums_from(d));
    if (j.contains("reference") && !j["reference"].is_null()) p.reference = Distribution(p.domain, nums_from(j["reference"]));
    p.solutions = j.at("solutions").get<std::vector<std::string>>();
    for (const auto& row : j.at("validity")) p.validity.push_back(row.get<std::vector<bool>>());
    if (j.contains("verify") && !j["verify"].empty()) {
      p.verify.resize(p.solutions.size());
      for (auto it = j["verify"].begin(); it != j["verify"].end(); ++it) {
        auto pos = std::find(p.solutions.begin(), p.solutions.end(), it.key());
        if (pos == p.solutions.end()) throw Error(ErrorKind::InvalidArgument, "verify names unknown solution " + it.key());
        p.verify[static_cast<std::size_t>(pos - p.solutions.begin())] =
            QueryFn(p.domain, nums_from(it.value()), QueryRange::Unit);
      }
    }
    if (j.contains("threshold") && !j["threshold"].is_null()) p.threshold = num_from(j["threshold"]);
    if (j.contains("eps") && !j["eps"].is_null()) p.eps = num_from(j["eps"]);
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed problem JSON: ") + e.what());
  }
}

json to_json(const NormReport& r) {
  return {{"value", num(r.value)},
          {"exactness", exactness_name(r.exactness)},
          {"certificate", {{"query", nums(r.query)}, {"signs", r.signs}, {"subset", r.subset}}}};
}

json to_json(const DimensionReport& r) {
  json cert;
  cert["queries"] = json::array();
  for (const auto& q : r.queries) cert["queries"].push_back(nums(q));
  cert["query_weights"] = nums(r.query_weights);
  cert["subsets"] = r.subsets;
  cert["measure"] = nums(r.measure);
  cert["reference"] = nums(r.reference);
  if (r.uncoverable) cert["uncoverable"] = *r.uncoverable;
  return {{"quantity", r.quantity},
          {"value", num(r.value)},
          {"exactness", exactness_name(r.exactness)},
          {"lower", num(r.lower)},
          {"upper", num(r.upper)},
          {"dual_value", r.dual_value ? num(*r.dual_value) : json(nullptr)},
          {"note", r.note},
          {"certificate", cert}};
}

json to_json(const RunReport& r) {
  json hist = json::array();
  for (const auto& [i, s] : r.history) hist.push_back({i, s});
  return {{"outcome", r.outcome},
          {"solution", r.solution ? json(*r.solution) : json(nullptr)},
          {"queries", r.queries},
          {"updates", r.updates},
          {"update_budget", r.update_budget},
          {"kl_bound", num(r.kl_bound)},
          {"seed", r.seed},
          {"valid_answer_fraction", num(r.valid_answer_fraction)},
          {"theorem_violation", r.theorem_violation},
          {"history", hist}};
}

json to_json(const BitLedger& l) {
  return {{"persistent_bits", l.persistent_bits},
          {"peak_bits", l.peak_bits},
          {"samples", l.samples},
          {"bound", l.bound},
          {"sample_bound", l.sample_bound},
          {"within_bound", l.within_bound}};
}

json to_json(const LineAudit& a) {
  return {{"p", a.p},
          {"same", num(a.same)},
          {"parallel", num(a.parallel)},
          {"other", num(a.other)},
          {"same_bound", num(a.same_bound)},
          {"parallel_bound", num(a.parallel_bound)},
          {"same_err", num(a.same_err)},
          {"parallel_err", num(a.parallel_err)},
          {"other_err", num(a.other_err)},
          {"rho", num(a.rho)},
          {"rho_closed", num(a.rho_closed)},
          {"rho_bound", num(a.rho_bound)},
          {"kbar1", num(a.kbar1)},
          {"kbar1_bound", num(a.kbar1_bound)},
          {"kbar1_exactness", exactness_name(a.kbar1_exactness)},
          {"passes", a.passes()}};
}

json to_json(const CombinedAudit& a) {
  json rows = json::array();
  for (const auto& r : a.rows)
    rows.push_back({{"tau", num(r.tau)},
                    {"rsd", num(r.rsd)},
                    {"bound", num(r.bound)},
                    {"relation", r.relation},
                    {"holds", r.holds}});
  return {{"d", num(a.d)}, {"all_hold", a.all_hold()}, {"rows", rows}};
}

json tag_report(json body, const std::string& kind, const std::string& instance) {
  body["report"] = kind;
  body["instance"] = instance;
  return body;
}

std::string csv_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_scalar(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) return csv_double(v.get<double>());
  if (v.is_string()) return csv_escape(v.get<std::string>());
  return csv_escape(v.dump());
}

std::string report_merge(const std::vector<json>& reports) {
  std::string kind;
  std::set<std::string> keys;
  for (const auto& r : reports) {
    auto k = r.value("report", "");
    if (kind.empty()) kind = k;
    if (k != kind) throw Error(ErrorKind::InvalidArgument, "cannot merge report kinds " + kind + " and " + k);
    for (auto it = r.begin(); it != r.end(); ++it)
      if (!it.value().is_structured() && it.key() != "report" && it.key() != "instance") keys.insert(it.key());
  }
  std::vector<const json*> order;
  for (const auto& r : reports) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(),
                   [](const json* a, const json* b) { return a->value("instance", "") < b->value("instance", ""); });
  std::ostringstream out;
  out << "report,instance";
  for (const auto& k : keys) out << ',' << csv_escape(k);
  out << "\r\n";
  for (const auto* r : order) {
    out << csv_escape(kind) << ',' << csv_escape(r->value("instance", ""));
    for (const auto& k : keys) out << ',' << (r->contains(k) ? csv_scalar((*r)[k]) : "");
    out << "\r\n";
  }
  return out.str();
}

std::string report_merge_files(const std::vector<std::string>& paths) {
  std::vector<json> reports;
  for (const auto& p : paths) {
    try {
      reports.push_back(json::parse(read_file(p)));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::InvalidArgument, p + ": " + e.what());
    }
  }
  return report_merge(reports);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << content;
}

}  // namespace sqlab
