#include "tng/reports.hpp"

#include <cstdio>
#include <sstream>

#include "tng/json_util.hpp"

namespace tng {

namespace {

constexpr const char* kReportFormat = "tng-report/1";
constexpr const char* kCsvHeader = "src,dst,pa,distance,interventions,outcome\n";

const char* lap_outcome(const LapReport& r) {
  if (r.failed) return "Failed";
  return r.budget_exhausted ? "Partial" : "Done";
}

std::string cell_outcome(const MatrixCell& c) { return c.no_path ? "NoPath" : outcome_name(c.outcome); }

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string format_number(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  std::string s = buf;
  if (s == "-0" || s.rfind("-0.", 0) == 0) {
    // Avoid "-0.000000" for values that round to zero.
    bool zero = s.find_first_not_of("-0.") == std::string::npos;
    if (zero) s.erase(0, 1);
  }
  return s;
}

std::string lap_reports_csv(const std::vector<LapReport>& reports, const std::string& trajectory) {
  std::string out = kCsvHeader;
  for (const LapReport& r : reports) {
    out += trajectory + "," + trajectory + "," + format_number(r.pa) + "," +
           format_number(r.distance) + "," + std::to_string(r.interventions.size()) + "," +
           lap_outcome(r) + "\n";
  }
  return out;
}

std::string lap_reports_json(const std::vector<LapReport>& reports, const std::string& trajectory,
                             std::uint64_t seed) {
  json runs = json::array();
  double sum = 0.0;
  for (const LapReport& r : reports) {
    json iv = json::array();
    for (const Intervention& i : r.interventions) {
      iv.push_back({{"start", i.start}, {"end", i.end}, {"trigger", i.trigger}});
    }
    runs.push_back({{"controller", r.controller},
                    {"pa", r.pa},
                    {"laps_target", r.laps_target},
                    {"laps_completed", r.laps_completed},
                    {"outcome", lap_outcome(r)},
                    {"total_time", r.total_time},
                    {"human_time", r.human_time},
                    {"distance", r.distance},
                    {"abstentions", r.abstentions},
                    {"max_cross_track", r.max_cross_track},
                    {"median_cross_track", r.median_cross_track},
                    {"interventions", iv}});
    sum += r.pa;
  }
  json doc = {{"format", kReportFormat}, {"kind", "laps"}, {"trajectory", trajectory},
              {"seed", seed}, {"runs", runs}};
  doc["mean_pa"] = reports.empty() ? 0.0 : sum / double(reports.size());
  return doc.dump(1) + "\n";
}

std::string matrix_csv(const MatrixReport& rep, const std::vector<std::string>&) {
  std::string out = kCsvHeader;
  for (const MatrixCell& c : rep.cells) {
    out += std::to_string(c.src) + "," + std::to_string(c.dst) + "," + format_number(c.pa) + "," +
           format_number(c.distance) + "," + std::to_string(c.interventions) + "," +
           cell_outcome(c) + "\n";
  }
  return out;
}

std::string matrix_json(const MatrixReport& rep, const std::vector<std::string>& names,
                        std::uint64_t seed) {
  const std::size_t n = rep.size;
  json pa = json::array();
  json dist = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    json pa_row = json::array();
    json dist_row = json::array();
    for (std::size_t j = 0; j < n; ++j) {
      const MatrixCell* c = rep.cell(i, j);
      if (c == nullptr || c->no_path) {
        pa_row.push_back(nullptr);
        dist_row.push_back(nullptr);
      } else {
        pa_row.push_back(c->pa);
        dist_row.push_back(c->distance);
      }
    }
    pa.push_back(pa_row);
    dist.push_back(dist_row);
  }
  json cells = json::array();
  for (const MatrixCell& c : rep.cells) {
    cells.push_back({{"src", c.src},
                     {"dst", c.dst},
                     {"start_vertex", c.start_vertex},
                     {"goal_vertex", c.goal_vertex},
                     {"hops", c.hops},
                     {"pa", c.pa},
                     {"distance", c.distance},
                     {"interventions", c.interventions},
                     {"total_time", c.total_time},
                     {"human_time", c.human_time},
                     {"outcome", cell_outcome(c)},
                     {"failure_reason", c.failure_reason}});
  }
  json doc = {{"format", kReportFormat}, {"kind", "matrix"}, {"seed", seed}, {"size", n}};
  doc["names"] = names;
  doc["pa"] = pa;
  doc["distance"] = dist;
  doc["mean_pa"] = rep.mean_pa;
  doc["total_distance"] = rep.total_distance;
  doc["done"] = rep.done;
  doc["flagged"] = rep.flagged;
  doc["cells"] = cells;
  return doc.dump(1) + "\n";
}

std::string degradation_csv(const DegradationReport& rep) {
  std::string out = "controller,magnitude,pa,delta_pa\n";
  for (const DegradationRow& row : rep.rows) {
    for (std::size_t k = 0; k < rep.magnitudes.size(); ++k) {
      out += row.controller + "," + format_number(rep.magnitudes[k], 3) + "," +
             format_number(row.pa[k]) + "," + format_number(row.delta[k]) + "\n";
    }
  }
  return out;
}

std::string degradation_json(const DegradationReport& rep) {
  json rows = json::array();
  for (const DegradationRow& r : rep.rows) {
    rows.push_back({{"controller", r.controller}, {"pa", r.pa}, {"delta_pa", r.delta}});
  }
  json doc = {{"format", kReportFormat}, {"kind", "degradation"}, {"seed", rep.seed},
              {"magnitudes", rep.magnitudes}, {"rows", rows}};
  return doc.dump(1) + "\n";
}

std::string dagger_study_json(const DaggerStudyReport& rep) {
  json doc = {{"format", kReportFormat}, {"kind", "dagger"}, {"seeds", rep.seeds},
              {"interventions", rep.interventions}, {"pa", rep.pa},
              {"median_interventions", rep.median_interventions},
              {"non_increasing", rep.non_increasing}};
  return doc.dump(1) + "\n";
}

std::string render_report(const std::string& report_json) {
  const json doc = parse_json_text(report_json, "report");
  check_format(doc, kReportFormat, "report");
  const std::string kind = get_string(require(doc, "kind", ""), "kind");
  std::ostringstream out;
  if (kind == "laps") {
    out << "Lap experiment on " << get_string(require(doc, "trajectory", ""), "trajectory") << "\n";
    out << pad("controller", 12) << pad("PA", 10) << pad("laps", 6) << pad("interv.", 9) << "\n";
    for (const json& r : require(doc, "runs", "")) {
      out << pad(get_string(require(r, "controller", "runs"), "controller"), 12)
          << pad(format_number(get_number(require(r, "pa", "runs"), "pa"), 1), 10)
          << pad(std::to_string(get_integer(require(r, "laps_completed", "runs"), "laps")), 6)
          << pad(std::to_string(require(r, "interventions", "runs").size()), 9) << "\n";
    }
  } else if (kind == "matrix") {
    const std::size_t n = get_unsigned(require(doc, "size", ""), "size");
    const json& pa = require(doc, "pa", "");
    out << "Percentage autonomy (rows: source, columns: destination)\n" << pad("", 6);
    for (std::size_t j = 0; j < n; ++j) out << pad(std::to_string(j), 8);
    out << "\n";
    for (std::size_t i = 0; i < n; ++i) {
      out << pad(std::to_string(i), 6);
      for (std::size_t j = 0; j < n; ++j) {
        const json& v = pa.at(i).at(j);
        out << pad(v.is_null() ? "-" : format_number(v.get<double>(), 1), 8);
      }
      out << "\n";
    }
    out << "mean PA " << format_number(get_number(require(doc, "mean_pa", ""), "mean_pa"), 2)
        << ", total distance "
        << format_number(get_number(require(doc, "total_distance", ""), "total_distance"), 1)
        << " m, done " << get_unsigned(require(doc, "done", ""), "done") << "\n";
  } else if (kind == "degradation") {
    const json& mags = require(doc, "magnitudes", "");
    out << "PA under landmark perturbation (delta vs. unperturbed)\n" << pad("controller", 12);
    for (const json& m : mags) out << pad(format_number(m.get<double>(), 2) + " m", 18);
    out << "\n";
    for (const json& r : require(doc, "rows", "")) {
      out << pad(get_string(require(r, "controller", "rows"), "controller"), 12);
      const json& pa = require(r, "pa", "rows");
      const json& d = require(r, "delta_pa", "rows");
      for (std::size_t k = 0; k < mags.size(); ++k) {
        out << pad(format_number(pa.at(k).get<double>(), 1) + " (" +
                       format_number(d.at(k).get<double>(), 1) + ")",
                   18);
      }
      out << "\n";
    }
  } else if (kind == "dagger") {
    out << "Median interventions per DAgger iteration:";
    for (const json& m : require(doc, "median_interventions", "")) {
      out << " " << format_number(m.get<double>(), 1);
    }
    out << "\nnon-increasing: "
        << (get_bool(require(doc, "non_increasing", ""), "non_increasing") ? "yes" : "no") << "\n";
  } else {
    throw ParseError("report: unknown kind '" + kind + "'");
  }
  return out.str();
}

}  // namespace tng
