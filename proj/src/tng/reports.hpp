#pragma once

#include <string>
#include <vector>

#include "tng/experiments.hpp"

namespace tng {

// Report emitters. CSV files carry one row per run or matrix cell with the
// columns src,dst,pa,distance,interventions,outcome. JSON summaries use the
// `tng-report/1` format tag with a "kind" of laps, matrix, degradation or
// dagger. Numbers are printed with fixed precision so identical runs give
// byte-identical files.

std::string format_number(double v, int precision = 6);

std::string lap_reports_csv(const std::vector<LapReport>& reports, const std::string& trajectory);
std::string lap_reports_json(const std::vector<LapReport>& reports, const std::string& trajectory,
                             std::uint64_t seed);

std::string matrix_csv(const MatrixReport& rep, const std::vector<std::string>& names);
std::string matrix_json(const MatrixReport& rep, const std::vector<std::string>& names,
                        std::uint64_t seed);

// Degradation CSV columns: controller,magnitude,pa,delta_pa.
std::string degradation_csv(const DegradationReport& rep);
std::string degradation_json(const DegradationReport& rep);

std::string dagger_study_json(const DaggerStudyReport& rep);

// Plain-text rendering of any `tng-report/1` document.
std::string render_report(const std::string& report_json);

}  // namespace tng
