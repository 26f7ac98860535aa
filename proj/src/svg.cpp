#include "csc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "csc/error.hpp"

namespace csc::svg {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// 1, 2 or 5 times a power of ten, giving about five ticks.
double tick_step(double range) {
  const double raw = range / 5.0;
  const double p = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * p >= raw) return m * p;
  }
  return 10.0 * p;
}

}  // namespace

std::string xml_escape(const std::string& s) {
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

std::string scatter(const std::vector<Series>& series, const ScatterOptions& opt) {
  double xmax = 0.0;
  double ymax = 0.0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw InvalidArgument("svg series '" + s.label + "': x/y lengths differ");
    for (double v : s.x) {
      if (std::isfinite(v)) xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      if (std::isfinite(v)) ymax = std::max(ymax, v);
    }
  }
  if (xmax <= 0.0) xmax = 1.0;
  if (ymax <= 0.0) ymax = 1.0;
  const double xstep = tick_step(xmax);
  const double ystep = tick_step(ymax);
  xmax = std::ceil(xmax / xstep) * xstep;
  ymax = std::ceil(ymax / ystep) * ystep;

  const double left = 64, right = 16, top = 36, bottom = 52;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;
  auto px = [&](double x) { return left + pw * x / xmax; };
  auto py = [&](double y) { return top + ph * (1.0 - y / ymax); };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(opt.width) + "\" height=\"" + std::to_string(opt.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + fmt(opt.width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
         xml_escape(opt.title) + "</text>\n";
  out += "<g stroke=\"black\" stroke-width=\"1\">\n";
  out += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top + ph) + "\" x2=\"" + fmt(left + pw) + "\" y2=\"" +
         fmt(top + ph) + "\"/>\n";
  out += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(left) + "\" y2=\"" + fmt(top + ph) +
         "\"/>\n";
  for (double t = 0.0; t <= xmax * (1 + 1e-9); t += xstep) {
    out += "<line x1=\"" + fmt(px(t)) + "\" y1=\"" + fmt(top + ph) + "\" x2=\"" + fmt(px(t)) + "\" y2=\"" +
           fmt(top + ph + 4) + "\"/>\n";
  }
  for (double t = 0.0; t <= ymax * (1 + 1e-9); t += ystep) {
    out += "<line x1=\"" + fmt(left - 4) + "\" y1=\"" + fmt(py(t)) + "\" x2=\"" + fmt(left) + "\" y2=\"" +
           fmt(py(t)) + "\"/>\n";
  }
  out += "</g>\n<g font-family=\"sans-serif\" font-size=\"10\">\n";
  for (double t = 0.0; t <= xmax * (1 + 1e-9); t += xstep) {
    out += "<text x=\"" + fmt(px(t)) + "\" y=\"" + fmt(top + ph + 16) + "\" text-anchor=\"middle\">" +
           tick_label(t) + "</text>\n";
  }
  for (double t = 0.0; t <= ymax * (1 + 1e-9); t += ystep) {
    out += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(py(t) + 3) + "\" text-anchor=\"end\">" + tick_label(t) +
           "</text>\n";
  }
  out += "<text x=\"" + fmt(left + pw / 2) + "\" y=\"" + fmt(opt.height - 10.0) + "\" text-anchor=\"middle\">" +
         xml_escape(opt.x_label) + "</text>\n";
  out += "<text transform=\"translate(14," + fmt(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         xml_escape(opt.y_label) + "</text>\n";
  out += "</g>\n";
  for (const auto& s : series) {
    out += "<g fill=\"" + xml_escape(s.color) + "\" fill-opacity=\"0.6\">\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out += "<circle cx=\"" + fmt(px(s.x[i])) + "\" cy=\"" + fmt(py(s.y[i])) + "\" r=\"" + fmt(opt.point_radius) +
             "\"/>\n";
    }
    out += "</g>\n";
  }
  out += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = top + 12 + 16.0 * double(i);
    out += "<rect x=\"" + fmt(left + 10) + "\" y=\"" + fmt(y - 8) + "\" width=\"10\" height=\"10\" fill=\"" +
           xml_escape(series[i].color) + "\"/>\n";
    out += "<text x=\"" + fmt(left + 26) + "\" y=\"" + fmt(y + 1) + "\">" + xml_escape(series[i].label) + "</text>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace csc::svg
