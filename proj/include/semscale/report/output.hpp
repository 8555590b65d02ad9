#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "semscale/report/experiment.hpp"

namespace semscale::report {

/// "# config_hash=<hash>" then backend,P,N,T_a,T_c,T_total,msgs,words; one row
/// per (backend, P) with numbers printed to 9 significant digits.
void emit_csv(std::ostream& os, const ScalingReport& report);

/// Per-step wall-clock times are left out so that modeled runs serialize identically.
std::string to_json(const ScalingReport& report);
/// Throws IoError on malformed input or when any component's config hash
/// differs from the report's.
ScalingReport from_json(const std::string& text);

enum class PlotKind { Scaling, Weak, Histogram, Convergence };
/// "scaling", "weak", "histogram" or "convergence"; throws InvalidArgument otherwise.
PlotKind parse_plot_kind(std::string_view name);

/// Self-contained SVG. Scaling: log-log T_a (solid), T_c (dashed), T_total
/// markers and the ideal line per backend. Histogram: loads of the largest P.
void emit_svg_plot(std::ostream& os, const ScalingReport& report, PlotKind kind);
/// One bar per distinct load.
void emit_histogram_svg(std::ostream& os, const std::map<int, int>& histogram, std::string_view title = "");

/// Writes scaling.csv, report.json and the four plots into `dir` (created if needed).
void write_artifacts(const ScalingReport& report, const std::string& dir);

} // namespace semscale::report
