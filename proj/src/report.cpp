#include "robustsi/report.h"

#include <cstdio>

namespace robustsi {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string truncation_pairs_json(const IntervalSet& trunc) {
  std::string out = "[";
  bool first = true;
  for (const Interval& p : trunc.pieces()) {
    if (!first) out += ",";
    first = false;
    out += "[" + num(p.lo) + "," + num(p.hi) + "]";
  }
  return out + "]";
}

std::string truncation_pairs_csv(const IntervalSet& trunc) {
  std::string out;
  bool first = true;
  for (const Interval& p : trunc.pieces()) {
    if (!first) out += ";";
    first = false;
    out += num(p.lo) + ":" + num(p.hi);
  }
  return out;
}

}  // namespace

std::string emit_report(const std::vector<SelectiveReport>& reports,
                        ReportFormat format) {
  if (format == ReportFormat::Json) {
    std::string out = "[";
    bool first = true;
    for (const SelectiveReport& r : reports) {
      if (!first) out += ",";
      first = false;
      out += "\n  {\"index\": " + std::to_string(r.target_index) +
             ", \"z_obs\": " + num(r.z_obs) +
             ", \"naive_p\": " + num(r.naive_p) +
             ", \"bonferroni_p\": " + num(r.bonferroni_p) +
             ", \"selective_p\": " + num(r.selective_p) +
             ", \"ci_lo\": " + num(r.ci_lo) + ", \"ci_hi\": " + num(r.ci_hi) +
             ", \"truncation\": " + truncation_pairs_json(r.truncation) +
             ", \"mass_outside_window_bound\": " +
             num(r.mass_outside_window_bound) + "}";
    }
    out += reports.empty() ? "]" : "\n]";
    return out;
  }
  std::string out =
      "index,z_obs,naive_p,bonferroni_p,selective_p,ci_lo,ci_hi,truncation,"
      "mass_outside_window_bound\n";
  for (const SelectiveReport& r : reports) {
    out += std::to_string(r.target_index) + "," + num(r.z_obs) + "," +
           num(r.naive_p) + "," + num(r.bonferroni_p) + "," +
           num(r.selective_p) + "," + num(r.ci_lo) + "," + num(r.ci_hi) + "," +
           truncation_pairs_csv(r.truncation) + "," +
           num(r.mass_outside_window_bound) + "\n";
  }
  return out;
}

}  // namespace robustsi
