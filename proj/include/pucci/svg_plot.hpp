/**
 * @file svg_plot.hpp
 * @brief Standalone SVG log-log scatter with a fitted line.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pucci/quadrature.hpp"

namespace pucci {

struct PlotSeries {
  std::vector<double> x, y;
  std::string xlabel = "x", ylabel = "y", title;
};

namespace detail {

inline std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
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

}  // namespace detail

/// Points with nonpositive coordinates are dropped; fewer than two usable points is an error.
inline std::string loglog_svg(const PlotSeries& s, std::optional<LineFit> fit = std::nullopt) {
  if (s.x.size() != s.y.size()) throw std::invalid_argument("series x and y differ in length");
  if (s.x.empty()) throw std::invalid_argument("empty series");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < s.x.size(); ++i)
    if (s.x[i] > 0.0 && s.y[i] > 0.0) lx.push_back(std::log10(s.x[i])), ly.push_back(std::log10(s.y[i]));
  if (lx.size() < 2) throw std::invalid_argument("insufficient points");
  if (!fit) {
    std::vector<double> px, py;
    for (std::size_t i = 0; i < lx.size(); ++i) px.push_back(std::pow(10.0, lx[i])), py.push_back(std::pow(10.0, ly[i]));
    fit = fit_loglog(px, py);
  }
  const double W = 640, H = 480, L = 80, R = 30, T = 40, B = 60;
  auto [xlo, xhi] = std::minmax_element(lx.begin(), lx.end());
  auto [ylo, yhi] = std::minmax_element(ly.begin(), ly.end());
  double x0 = *xlo, x1 = *xhi, y0 = *ylo, y1 = *yhi;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double padx = 0.05 * (x1 - x0), pady = 0.05 * (y1 - y0);
  x0 -= padx, x1 += padx, y0 -= pady, y1 += pady;
  auto X = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto Y = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double vx = x0 + (x1 - x0) * k / 4, vy = y0 + (y1 - y0) * k / 4;
    o << "<text x=\"" << detail::fmt(X(vx)) << "\" y=\"" << H - B + 18 << "\" font-size=\"11\" text-anchor=\"middle\">"
      << detail::fmt(std::pow(10.0, vx), "%.2e") << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << detail::fmt(Y(vy) + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
      << detail::fmt(std::pow(10.0, vy), "%.2e") << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" font-size=\"13\" text-anchor=\"middle\">"
    << detail::xml_escape(s.xlabel) << " (log)</text>\n";
  o << "<text transform=\"translate(18," << (T + H - B) / 2 << ") rotate(-90)\" font-size=\"13\" text-anchor=\"middle\">"
    << detail::xml_escape(s.ylabel) << " (log)</text>\n";
  if (!s.title.empty())
    o << "<text x=\"" << W / 2 << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">" << detail::xml_escape(s.title)
      << "</text>\n";
  for (std::size_t i = 0; i < lx.size(); ++i)
    o << "<circle cx=\"" << detail::fmt(X(lx[i])) << "\" cy=\"" << detail::fmt(Y(ly[i])) << "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
  // fitted line in log10 coordinates: log y = slope log x + intercept / ln 10
  const double a = fit->slope, b = fit->intercept / std::log(10.0);
  const double fx0 = *xlo, fx1 = *xhi;
  o << "<line x1=\"" << detail::fmt(X(fx0)) << "\" y1=\"" << detail::fmt(Y(a * fx0 + b)) << "\" x2=\"" << detail::fmt(X(fx1))
    << "\" y2=\"" << detail::fmt(Y(a * fx1 + b)) << "\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
  o << "<text x=\"" << L + 10 << "\" y=\"" << T + 18 << "\" font-size=\"12\">slope " << detail::fmt(a) << ", R^2 "
    << detail::fmt(fit->r_squared) << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace pucci
