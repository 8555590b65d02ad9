#include "semscale/report/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "semscale/error.hpp"

namespace semscale::report {

namespace {

using nlohmann::json;

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

// Plot area with optional log axes.
struct Frame {
  double x0 = 1, x1 = 10, y0 = 1, y1 = 10;
  bool logx = true, logy = true;
  static constexpr double left = 70, right = 20, top = 40, bottom = 50, width = 640, height = 420;

  [[nodiscard]] double tx(double v) const { return v; }
  [[nodiscard]] double sx(double v) const {
    const double a = logx ? std::log10(x0) : x0, b = logx ? std::log10(x1) : x1, t = logx ? std::log10(v) : v;
    return left + (t - a) / (b - a) * (width - left - right);
  }
  [[nodiscard]] double sy(double v) const {
    const double a = logy ? std::log10(y0) : y0, b = logy ? std::log10(y1) : y1, t = logy ? std::log10(v) : v;
    return height - bottom - (t - a) / (b - a) * (height - top - bottom);
  }
};

void widen_log(double& lo, double& hi) {
  if (!(lo > 0.0)) lo = hi > 0.0 ? hi / 10 : 1.0;
  if (!(hi > lo)) hi = lo * 10;
  lo = std::pow(10.0, std::floor(std::log10(lo)));
  hi = std::pow(10.0, std::ceil(std::log10(hi)));
  if (hi <= lo) hi = lo * 10;
}

void open_svg(std::ostream& os, const Frame& f, std::string_view title, std::string_view xlabel, std::string_view ylabel) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Frame::width << "\" height=\"" << Frame::height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << Frame::width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n"
     << "<rect x=\"" << Frame::left << "\" y=\"" << Frame::top << "\" width=\"" << Frame::width - Frame::left - Frame::right
     << "\" height=\"" << Frame::height - Frame::top - Frame::bottom << "\" fill=\"none\" stroke=\"black\"/>\n"
     << "<text x=\"" << Frame::width / 2 << "\" y=\"" << Frame::height - 10 << "\" text-anchor=\"middle\">" << xlabel
     << "</text>\n"
     << "<text transform=\"translate(16," << Frame::height / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel
     << "</text>\n";
  auto ticks = [](double lo, double hi, bool log) {
    std::vector<double> t;
    if (log) {
      for (double v = lo; v <= hi * 1.0001; v *= 10) t.push_back(v);
    } else {
      const double step = (hi - lo) / 5;
      for (int i = 0; i <= 5; ++i) t.push_back(lo + i * step);
    }
    return t;
  };
  for (double v : ticks(f.x0, f.x1, f.logx))
    os << "<text x=\"" << f.sx(v) << "\" y=\"" << Frame::height - Frame::bottom + 16 << "\" text-anchor=\"middle\">"
       << g9(v) << "</text>\n";
  for (double v : ticks(f.y0, f.y1, f.logy))
    os << "<text x=\"" << Frame::left - 6 << "\" y=\"" << f.sy(v) + 4 << "\" text-anchor=\"end\">" << g9(v) << "</text>\n";
}

void polyline(std::ostream& os, const Frame& f, const std::vector<std::pair<double, double>>& pts, const char* color,
              const char* cls, const char* dash) {
  std::vector<std::pair<double, double>> ok;
  for (auto [x, y] : pts)
    if ((!f.logx || x > 0) && (!f.logy || y > 0)) ok.emplace_back(x, y);
  if (ok.size() < 2) return;
  os << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
  if (dash) os << " stroke-dasharray=\"" << dash << "\"";
  os << " points=\"";
  for (auto [x, y] : ok) os << g9(f.sx(x)) << "," << g9(f.sy(y)) << " ";
  os << "\"/>\n";
}

void marker(std::ostream& os, const Frame& f, double x, double y, const char* color, const char* cls) {
  os << "<circle class=\"" << cls << "\" cx=\"" << g9(f.sx(x)) << "\" cy=\"" << g9(f.sy(y)) << "\" r=\"4\" fill=\""
     << color << "\"/>\n";
}

void legend(std::ostream& os, int row, const char* color, const std::string& text, const char* dash = nullptr) {
  const double y = Frame::top + 14 + 16 * row, x = Frame::width - Frame::right - 170;
  os << "<line x1=\"" << x << "\" y1=\"" << y << "\" x2=\"" << x + 24 << "\" y2=\"" << y << "\" stroke=\"" << color
     << "\" stroke-width=\"1.5\"";
  if (dash) os << " stroke-dasharray=\"" << dash << "\"";
  os << "/>\n<text x=\"" << x + 30 << "\" y=\"" << y + 4 << "\">" << text << "</text>\n";
}

void scaling_plot(std::ostream& os, const ScalingReport& r) {
  Frame f;
  double plo = 1e300, phi = 0, tlo = 1e300, thi = 0;
  for (const auto& b : r.backends) {
    for (std::size_t i = 0; i < b.curve.samples.size(); ++i) {
      const auto& s = b.curve.samples[i];
      plo = std::min(plo, static_cast<double>(s.p));
      phi = std::max(phi, static_cast<double>(s.p));
      for (double v : {s.t_a, s.t_c, s.t_total, b.ideal.empty() ? 0.0 : b.ideal[i]})
        if (v > 0) {
          tlo = std::min(tlo, v);
          thi = std::max(thi, v);
        }
    }
  }
  if (phi == 0) plo = phi = 1;
  if (thi == 0) tlo = thi = 1;
  f.x0 = plo;
  f.x1 = phi;
  widen_log(f.x0, f.x1);
  f.y0 = tlo;
  f.y1 = thi;
  widen_log(f.y0, f.y1);
  open_svg(os, f, "Time for " + r.window + ", N = " + std::to_string(r.n), "ranks P", "time [s]");
  int row = 0;
  for (std::size_t bi = 0; bi < r.backends.size(); ++bi) {
    const auto& b = r.backends[bi];
    const char* c = palette[bi % 4];
    std::vector<std::pair<double, double>> ta, tc, ideal;
    for (std::size_t i = 0; i < b.curve.samples.size(); ++i) {
      const auto& s = b.curve.samples[i];
      ta.emplace_back(s.p, s.t_a);
      tc.emplace_back(s.p, s.t_c);
      if (i < b.ideal.size()) ideal.emplace_back(s.p, b.ideal[i]);
    }
    os << "<g class=\"backend\" id=\"" << b.backend << "\">\n";
    polyline(os, f, ta, c, "compute", nullptr);
    polyline(os, f, tc, c, "comm", "6,4");
    polyline(os, f, ideal, "#777777", "ideal", "2,3");
    for (const auto& s : b.curve.samples) marker(os, f, s.p, s.t_total, c, "total");
    os << "</g>\n";
    legend(os, row++, c, b.backend + " computation");
    legend(os, row++, c, b.backend + " communication", "6,4");
  }
  legend(os, row, "#777777", "ideal", "2,3");
  os << "</svg>\n";
}

void weak_plot(std::ostream& os, const ScalingReport& r) {
  Frame f;
  double xlo = 1e300, xhi = 0, tlo = 1e300, thi = 0;
  for (const auto& b : r.backends)
    for (const auto& bucket : b.weak)
      for (const auto& e : bucket.entries) {
        const double x = static_cast<double>(e.n) / e.p;
        xlo = std::min(xlo, x);
        xhi = std::max(xhi, x);
        tlo = std::min(tlo, e.t_total);
        thi = std::max(thi, e.t_total);
      }
  if (xhi == 0) xlo = xhi = 1;
  if (thi == 0) tlo = thi = 1;
  f.x0 = xlo;
  f.x1 = xhi;
  widen_log(f.x0, f.x1);
  f.y0 = tlo;
  f.y1 = thi;
  widen_log(f.y0, f.y1);
  open_svg(os, f, "Total time against N/P", "N/P", "time [s]");
  for (std::size_t bi = 0; bi < r.backends.size(); ++bi) {
    for (const auto& bucket : r.backends[bi].weak)
      for (const auto& e : bucket.entries)
        marker(os, f, static_cast<double>(e.n) / e.p, e.t_total, palette[bi % 4], "total");
    legend(os, static_cast<int>(bi), palette[bi % 4], r.backends[bi].backend);
  }
  os << "</svg>\n";
}

void convergence_plot(std::ostream& os, const ScalingReport& r) {
  Frame f;
  f.logx = f.logy = false;
  double smax = 1, imax = 1;
  for (const auto& b : r.backends)
    for (const auto& s : b.steps) {
      smax = std::max(smax, static_cast<double>(s.step));
      imax = std::max(imax, static_cast<double>(s.pressure_iterations));
    }
  f.x0 = 0;
  f.x1 = smax;
  f.y0 = 0;
  f.y1 = imax * 1.1;
  open_svg(os, f, "Pressure iterations per step", "step", "GMRES iterations");
  for (std::size_t bi = 0; bi < r.backends.size(); ++bi) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : r.backends[bi].steps) pts.emplace_back(s.step, s.pressure_iterations);
    polyline(os, f, pts, palette[bi % 4], "iterations", nullptr);
    legend(os, static_cast<int>(bi), palette[bi % 4], r.backends[bi].backend);
  }
  os << "</svg>\n";
}

json sample_json(const perf::ScalingSample& s) {
  return {{"P", s.p}, {"T_total", s.t_total}, {"T_a", s.t_a}, {"T_c", s.t_c}};
}

template <class T>
T need(const json& j, const char* key) {
  if (!j.contains(key)) throw IoError(std::string("report JSON: missing ") + key);
  return j.at(key).get<T>();
}

} // namespace

void emit_csv(std::ostream& os, const ScalingReport& r) {
  os << "# config_hash=" << r.config_hash << "\n";
  os << "backend,P,N,T_a,T_c,T_total,msgs,words\n";
  for (const auto& b : r.backends)
    for (std::size_t i = 0; i < b.curve.samples.size(); ++i) {
      const auto& s = b.curve.samples[i];
      const auto& c = b.cells.at(i);
      os << b.backend << "," << s.p << "," << b.curve.n << "," << g9(s.t_a) << "," << g9(s.t_c) << "," << g9(s.t_total)
         << "," << c.msgs << "," << c.words << "\n";
    }
}

std::string to_json(const ScalingReport& r) {
  json j;
  j["config_hash"] = r.config_hash;
  j["config"] = r.config_text;
  j["profile"] = r.profile;
  j["window"] = r.window;
  j["N"] = r.n;
  j["elements"] = r.num_elements;
  j["backends"] = json::array();
  for (const auto& b : r.backends) {
    json jb;
    jb["backend"] = b.backend;
    jb["config_hash"] = b.config_hash;
    jb["N"] = b.curve.n;
    jb["samples"] = json::array();
    for (const auto& s : b.curve.samples) jb["samples"].push_back(sample_json(s));
    jb["strong"] = {{"reached", b.strong.reached},         {"crossover_P", b.strong.crossover_p},
                    {"N_per_P", b.strong.n_per_p},         {"P_lo", b.strong.p_lo},
                    {"P_hi", b.strong.p_hi},               {"N_per_P_lo", b.strong.n_per_p_lo},
                    {"N_per_P_hi", b.strong.n_per_p_hi}};
    jb["ideal"] = b.ideal;
    jb["cells"] = json::array();
    for (const auto& c : b.cells) {
      json jc{{"P", c.p}, {"msgs", c.msgs}, {"words", c.words}, {"coarse_msgs", c.coarse_msgs},
              {"coarse_words", c.coarse_words}};
      jc["histogram"] = json::array();
      for (const auto& [load, count] : c.histogram) jc["histogram"].push_back({load, count});
      jc["sites"] = json::object();
      for (const auto& [name, t] : c.sites) jc["sites"][name] = {{"T_a", t.t_a}, {"T_c", t.t_c}};
      jb["cells"].push_back(jc);
    }
    jb["steps"] = json::array();
    for (const auto& s : b.steps)
      jb["steps"].push_back({{"step", s.step},
                             {"t", s.t},
                             {"pressure_iterations", s.pressure_iterations},
                             {"velocity_iterations", s.velocity_iterations},
                             {"model_seconds", s.model_seconds},
                             {"divergence", s.divergence}});
    jb["weak"] = json::array();
    for (const auto& w : b.weak) {
      json jw{{"log2_N_per_P", w.log2_n_per_p}, {"entries", json::array()}};
      for (const auto& e : w.entries) jw["entries"].push_back({{"N", e.n}, {"P", e.p}, {"T_total", e.t_total}});
      jb["weak"].push_back(jw);
    }
    j["backends"].push_back(jb);
  }
  return j.dump(2) + "\n";
}

ScalingReport from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("report JSON: ") + e.what());
  }
  try {
    ScalingReport r;
    r.config_hash = need<std::string>(j, "config_hash");
    r.config_text = need<std::string>(j, "config");
    r.profile = need<std::string>(j, "profile");
    r.window = need<std::string>(j, "window");
    r.n = need<std::uint64_t>(j, "N");
    r.num_elements = need<int>(j, "elements");
    for (const auto& jb : need<json>(j, "backends")) {
      BackendResult b;
      b.backend = need<std::string>(jb, "backend");
      b.config_hash = need<std::string>(jb, "config_hash");
      if (b.config_hash != r.config_hash)
        throw IoError("report JSON: backend " + b.backend + " has config hash " + b.config_hash + ", report has " +
                      r.config_hash);
      b.curve.n = need<std::uint64_t>(jb, "N");
      for (const auto& s : need<json>(jb, "samples"))
        b.curve.samples.push_back({need<int>(s, "P"), need<double>(s, "T_total"), need<double>(s, "T_a"), need<double>(s, "T_c")});
      const auto& st = need<json>(jb, "strong");
      b.strong.reached = need<bool>(st, "reached");
      b.strong.crossover_p = need<double>(st, "crossover_P");
      b.strong.n_per_p = need<double>(st, "N_per_P");
      b.strong.p_lo = need<int>(st, "P_lo");
      b.strong.p_hi = need<int>(st, "P_hi");
      b.strong.n_per_p_lo = need<double>(st, "N_per_P_lo");
      b.strong.n_per_p_hi = need<double>(st, "N_per_P_hi");
      b.ideal = need<std::vector<double>>(jb, "ideal");
      for (const auto& jc : need<json>(jb, "cells")) {
        CellCounters c;
        c.p = need<int>(jc, "P");
        c.msgs = need<std::uint64_t>(jc, "msgs");
        c.words = need<std::uint64_t>(jc, "words");
        c.coarse_msgs = need<std::uint64_t>(jc, "coarse_msgs");
        c.coarse_words = need<std::uint64_t>(jc, "coarse_words");
        for (const auto& h : need<json>(jc, "histogram")) c.histogram[h.at(0).get<int>()] = h.at(1).get<int>();
        const auto sites = need<json>(jc, "sites");
        for (const auto& [name, t] : sites.items())
          c.sites[name] = {need<double>(t, "T_a"), need<double>(t, "T_c")};
        b.cells.push_back(std::move(c));
      }
      for (const auto& s : need<json>(jb, "steps")) {
        time::StepReport sr;
        sr.step = need<int>(s, "step");
        sr.t = need<double>(s, "t");
        sr.pressure_iterations = need<int>(s, "pressure_iterations");
        sr.velocity_iterations = need<int>(s, "velocity_iterations");
        sr.model_seconds = need<double>(s, "model_seconds");
        sr.divergence = need<double>(s, "divergence");
        b.steps.push_back(sr);
      }
      for (const auto& jw : need<json>(jb, "weak")) {
        perf::WeakBucket w;
        w.log2_n_per_p = need<int>(jw, "log2_N_per_P");
        for (const auto& e : need<json>(jw, "entries"))
          w.entries.push_back({need<std::uint64_t>(e, "N"), need<int>(e, "P"), need<double>(e, "T_total")});
        b.weak.push_back(std::move(w));
      }
      r.backends.push_back(std::move(b));
    }
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("report JSON: ") + e.what());
  }
}

PlotKind parse_plot_kind(std::string_view name) {
  if (name == "scaling") return PlotKind::Scaling;
  if (name == "weak") return PlotKind::Weak;
  if (name == "histogram") return PlotKind::Histogram;
  if (name == "convergence") return PlotKind::Convergence;
  throw InvalidArgument("unknown plot kind: " + std::string(name));
}

void emit_histogram_svg(std::ostream& os, const std::map<int, int>& histogram, std::string_view title) {
  Frame f;
  f.logx = f.logy = false;
  f.x0 = 0;
  f.x1 = static_cast<double>(std::max<std::size_t>(histogram.size(), 1));
  f.y0 = 0;
  int top = 1;
  for (const auto& [load, count] : histogram) top = std::max(top, count);
  f.y1 = top * 1.1;
  open_svg(os, f, title.empty() ? "Elements per rank" : title, "elements per rank", "ranks");
  int i = 0;
  for (const auto& [load, count] : histogram) {
    const double x = f.sx(i + 0.15), w = f.sx(i + 0.85) - x;
    os << "<rect class=\"bar\" x=\"" << g9(x) << "\" y=\"" << g9(f.sy(count)) << "\" width=\"" << g9(w)
       << "\" height=\"" << g9(f.sy(0) - f.sy(count)) << "\" fill=\"#1f77b4\"/>\n"
       << "<text x=\"" << g9(x + w / 2) << "\" y=\"" << g9(f.sy(0) + 30) << "\" text-anchor=\"middle\">" << load
       << "</text>\n";
    ++i;
  }
  os << "</svg>\n";
}

void emit_svg_plot(std::ostream& os, const ScalingReport& report, PlotKind kind) {
  switch (kind) {
    case PlotKind::Scaling: scaling_plot(os, report); return;
    case PlotKind::Weak: weak_plot(os, report); return;
    case PlotKind::Convergence: convergence_plot(os, report); return;
    case PlotKind::Histogram: {
      std::map<int, int> h;
      int p = 0;
      if (!report.backends.empty() && !report.backends.front().cells.empty()) {
        h = report.backends.front().cells.back().histogram;
        p = report.backends.front().cells.back().p;
      }
      emit_histogram_svg(os, h, "Elements per rank, P = " + std::to_string(p));
      return;
    }
  }
}

void write_artifacts(const ScalingReport& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  auto open = [&](const char* name) {
    std::ofstream out(std::filesystem::path(dir) / name);
    if (!out) throw IoError("cannot write " + (std::filesystem::path(dir) / name).string());
    return out;
  };
  {
    auto out = open("scaling.csv");
    emit_csv(out, report);
  }
  {
    auto out = open("report.json");
    out << to_json(report);
  }
  const std::pair<const char*, PlotKind> plots[] = {{"scaling.svg", PlotKind::Scaling},
                                                    {"weak.svg", PlotKind::Weak},
                                                    {"histogram.svg", PlotKind::Histogram},
                                                    {"convergence.svg", PlotKind::Convergence}};
  for (const auto& [name, kind] : plots) {
    auto out = open(name);
    emit_svg_plot(out, report, kind);
    if (!out) throw IoError(std::string("write failed: ") + name);
  }
}

} // namespace semscale::report
