#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fracdim/error.hpp"
#include "fracdim/sample_set.hpp"

namespace fracdim {

/// Shortest round-trip scientific form with an unpadded exponent: 1e-4, 2.5e-3.
inline std::string format_delta(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
  std::string s(buf, res.ptr);
  const auto e = s.find('e');
  if (e == std::string::npos) return s;
  std::string mant = s.substr(0, e);
  std::string exp = s.substr(e + 1);
  std::string sign;
  if (!exp.empty() && (exp[0] == '-' || exp[0] == '+')) {
    if (exp[0] == '-') sign = "-";
    exp.erase(0, 1);
  }
  exp.erase(0, std::min(exp.find_first_not_of('0'), exp.size() - 1));
  return mant + "e" + sign + exp;
}

/// 17 significant digits, enough to round-trip any double.
inline std::string format_coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const SampleSet& s) {
  os << "# dim=" << s.dim() << " delta=" << format_delta(s.delta()) << " family=" << s.family() << '\n';
  std::string line;
  for (std::size_t i = 0; i < s.size(); ++i) {
    line.clear();
    const auto p = s.point(i);
    for (int k = 0; k < s.dim(); ++k) {
      if (k) line += ',';
      line += format_coord(p[k]);
    }
    line += '\n';
    os << line;
  }
}

inline void write_csv_file(const std::string& path, const SampleSet& s) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_csv(os, s);
  if (!os) throw Error("write to " + path + " failed");
}

namespace detail {

inline double parse_double(std::string_view tok, std::size_t line) {
  while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r')) tok.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError("line " + std::to_string(line) + ": bad number '" + std::string(tok) + "'");
  return v;
}

}  // namespace detail

/// Reads the CSV format written by write_csv. The header line is required.
inline SampleSet read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("empty input");
  if (line.rfind('#', 0) != 0) throw ParseError("missing '# dim=... delta=... family=...' header");
  int dim = 0;
  double delta = 0.0;
  std::string family = "custom";
  bool have_dim = false, have_delta = false;
  std::istringstream hs(line.substr(1));
  std::string field;
  while (hs >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ParseError("header field without '=': " + field);
    const std::string key = field.substr(0, eq), val = field.substr(eq + 1);
    if (key == "dim") {
      const auto res = std::from_chars(val.data(), val.data() + val.size(), dim);
      if (res.ec != std::errc() || res.ptr != val.data() + val.size() || dim < 1)
        throw ParseError("bad dim in header: " + val);
      have_dim = true;
    } else if (key == "delta") {
      delta = detail::parse_double(val, 1);
      have_delta = true;
    } else if (key == "family") {
      family = val;
    }
  }
  if (!have_dim || !have_delta) throw ParseError("header must give dim and delta");

  std::vector<double> coords;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    int cols = 0;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      coords.push_back(detail::parse_double(rest.substr(0, comma), lineno));
      ++cols;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols != dim)
      throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(dim) + " columns, got " +
                       std::to_string(cols));
  }
  if (coords.empty()) throw ParseError("no points in input");
  try {
    return SampleSet(dim, delta, std::move(coords), family);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

inline SampleSet read_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path);
  return read_csv(is);
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = true;
  bool line = false;
  std::string color = "#1f77b4";
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace detail

/// Renders a scatter/line plot as a standalone SVG document.
inline std::string render_svg(const Plot& plot) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 55;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double py = 0.05 * (y1 - y0);
  y0 -= py;
  y1 += py;
  auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto sy = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << detail::xml_escape(plot.title) << "</text>\n"
     << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    os << "<text x=\"" << sx(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << detail::num(xv)
       << "</text>\n"
       << "<text x=\"" << L - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">" << detail::num(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 14 << "\" text-anchor=\"middle\">"
     << detail::xml_escape(plot.x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (T + H - B) / 2 << ")\">" << detail::xml_escape(plot.y_label) << "</text>\n";
  double legend_y = T + 16;
  for (const auto& s : plot.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.line && n > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < n; ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) os << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
      os << "\"/>\n";
    }
    if (s.markers)
      for (std::size_t i = 0; i < n; ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
          os << "<circle cx=\"" << sx(s.x[i]) << "\" cy=\"" << sy(s.y[i]) << "\" r=\"3\" fill=\"" << s.color
             << "\"/>\n";
    os << "<rect x=\"" << L + 10 << "\" y=\"" << legend_y - 9 << "\" width=\"10\" height=\"10\" fill=\"" << s.color
       << "\"/>\n<text x=\"" << L + 26 << "\" y=\"" << legend_y << "\">" << detail::xml_escape(s.name)
       << "</text>\n";
    legend_y += 16;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace fracdim
