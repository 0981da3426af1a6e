#include "surfint/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace surfint {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 460.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-14 ? 0.0 : v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
  }
};

}  // namespace

std::string render_svg(const Plot& plot) {
  Range rx, ry;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (std::isfinite(s.y[i])) {
        rx.add(s.x[i]);
        ry.add(s.y[i]);
      }
    }
  }
  for (double r : plot.reference_lines) ry.add(r);
  rx.pad();
  ry.pad();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto X = [&](double x) { return kLeft + (x - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto Y = [&](double y) { return kTop + (ry.hi - y) / (ry.hi - ry.lo) * ph; };

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(plot.title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double xv = rx.lo + (rx.hi - rx.lo) * t / 5.0;
    const double yv = ry.lo + (ry.hi - ry.lo) * t / 5.0;
    os << "<line x1=\"" << X(xv) << "\" y1=\"" << kTop + ph << "\" x2=\"" << X(xv) << "\" y2=\"" << kTop + ph + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << X(xv) << "\" y=\"" << kTop + ph + 19 << "\" text-anchor=\"middle\">" << tick_label(xv)
       << "</text>\n";
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << Y(yv) << "\" x2=\"" << kLeft << "\" y2=\"" << Y(yv)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << Y(yv) + 4 << "\" text-anchor=\"end\">" << tick_label(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
     << escape(plot.xlabel) << "</text>\n";
  os << "<text transform=\"translate(18," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(plot.ylabel) << "</text>\n";
  for (double r : plot.reference_lines) {
    os << "<line x1=\"" << kLeft << "\" y1=\"" << Y(r) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << Y(r)
       << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
  }
  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const auto& ser = plot.series[s];
    const char* color = kColors[s % std::size(kColors)];
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points
           << "\"/>\n";
      }
      points.clear();
    };
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      if (!std::isfinite(ser.y[i])) {
        flush();
        continue;
      }
      std::ostringstream p;
      p.precision(6);
      p << X(ser.x[i]) << ',' << Y(ser.y[i]) << ' ';
      points += p.str();
      os << "<circle cx=\"" << X(ser.x[i]) << "\" cy=\"" << Y(ser.y[i]) << "\" r=\"3\" fill=\"" << color
         << "\"/>\n";
    }
    flush();
    const double ly = kTop + 14 + 18.0 * static_cast<double>(s);
    os << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + pw + 32 << "\" y2=\""
       << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kLeft + pw + 38 << "\" y=\"" << ly << "\">" << escape(ser.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace surfint
