#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mesharc::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

namespace {

std::string opt(const std::optional<double>& v) {
  return v ? format_number(*v) : "nan";
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    out.push_back(cell);
  }
  return out;
}

}  // namespace

void write_levels_csv(std::ostream& out, const std::vector<LevelDiagnostics>& diags) {
  out << "level,N,delta,l2_error,linf_error,kappa\n";
  for (const auto& d : diags) {
    char delta[32];
    std::snprintf(delta, sizeof delta, "%.10g", d.delta);
    out << d.step << ',' << d.n << ',' << delta << ',' << opt(d.l2_error) << ','
        << opt(d.linf_error) << ','
        << (d.condition.kappa > 0.0 ? format_number(d.condition.kappa) : "nan") << '\n';
  }
}

std::vector<double> read_l2_column(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty run CSV");
  const auto header = split(line);
  const auto it = std::find(header.begin(), header.end(), "l2_error");
  if (it == header.end()) throw std::runtime_error("run CSV has no l2_error column");
  const auto col = static_cast<std::size_t>(it - header.begin());
  std::vector<double> e;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (cells.size() <= col)
      throw std::runtime_error("line " + std::to_string(lineno) + ": missing l2_error");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cells[col], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cells[col].size() || cells[col].empty())
      throw std::runtime_error("line " + std::to_string(lineno) + ": bad number '" +
                               cells[col] + "'");
    e.push_back(v);
  }
  return e;
}

void write_rates_csv(std::ostream& out, const RateReport& report) {
  out << "transition,ratio,class\n";
  for (const auto& r : report.entries)
    out << r.transition << ',' << format_number(r.ratio) << ',' << to_string(r.cls) << '\n';
  out << "sigma," << opt(report.sigma) << ",derived\n";
}

void write_angles_csv(std::ostream& out, const AngleAnalysis& angles) {
  out << "i,sin_alpha\n";
  for (const auto& e : angles.entries)
    out << e.i << ',' << (e.sin_alpha ? format_number(*e.sin_alpha) : "nan") << '\n';
}

bool write_errors_svg(std::ostream& out, const std::vector<LevelDiagnostics>& diags,
                      const std::string& title) {
  struct Series {
    const char* label;
    const char* colour;
    std::vector<std::pair<double, double>> pts;
  };
  Series l2{"L2", "#1f77b4", {}}, linf{"Linf", "#d62728", {}};
  for (const auto& d : diags) {
    const double x = static_cast<double>(d.step);
    if (d.l2_error && *d.l2_error > 0.0) l2.pts.emplace_back(x, std::log10(*d.l2_error));
    if (d.linf_error && *d.linf_error > 0.0) linf.pts.emplace_back(x, std::log10(*d.linf_error));
  }
  if (l2.pts.empty() && linf.pts.empty()) return false;

  double ylo = 1e300, yhi = -1e300;
  for (const auto* s : {&l2, &linf})
    for (const auto& p : s->pts) {
      ylo = std::min(ylo, p.second);
      yhi = std::max(yhi, p.second);
    }
  ylo = std::floor(ylo);
  yhi = std::ceil(yhi);
  if (yhi <= ylo) yhi = ylo + 1;
  const double xmax = std::max<double>(2.0, static_cast<double>(diags.size()));

  const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  auto px = [&](double x) { return L + (x - 1.0) / (xmax - 1.0) * (W - L - R); };
  auto py = [&](double y) { return T + (yhi - y) / (yhi - ylo) * (H - T - B); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\">" << title << "</text>\n";
  for (double y = ylo; y <= yhi + 1e-9; y += 1.0) {
    out << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << py(y) << "\" y2=\""
        << py(y) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">1e"
        << static_cast<int>(y) << "</text>\n";
  }
  for (std::size_t i = 1; i <= diags.size(); ++i)
    out << "<text x=\"" << px(static_cast<double>(i)) << "\" y=\"" << H - B + 18
        << "\" text-anchor=\"middle\">" << i << "</text>\n";
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\">level</text>\n";
  out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
      << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";

  double ly = T + 16;
  for (const auto* s : {&l2, &linf}) {
    if (s->pts.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << s->colour << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : s->pts) out << px(p.first) << ',' << py(p.second) << ' ';
    out << "\"/>\n";
    for (const auto& p : s->pts)
      out << "<circle cx=\"" << px(p.first) << "\" cy=\"" << py(p.second) << "\" r=\"3\" fill=\""
          << s->colour << "\"/>\n";
    out << "<text x=\"" << W - R - 60 << "\" y=\"" << ly << "\" fill=\"" << s->colour << "\">"
        << s->label << "</text>\n";
    ly += 16;
  }
  out << "</svg>\n";
  return true;
}

}  // namespace mesharc::cli
