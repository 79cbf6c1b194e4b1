// Minimal self-contained SVG rendering of a calibration curve. No
// dependencies; the output is deterministic for identical inputs.
#pragma once

#include <algorithm>
#include <cstdio>
#include <string>

#include "routefit/calibrate.hpp"

namespace routefit {

namespace detail {

inline std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

// Line chart of mean similarity over the searched weights with the best
// weight marked. Width and height are the outer pixel dimensions.
inline std::string svg_curve(const SearchResult& r, int width = 640,
                             int height = 400) {
  if (r.curve.empty()) throw ValidationError("chart: empty curve");
  const double ml = 56.0, mr = 16.0, mt = 34.0, mb = 44.0;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;

  double wmax = 0.0, smin = r.curve.front().mean_sim, smax = smin;
  for (const CurvePoint& p : r.curve) {
    wmax = std::max(wmax, p.w);
    smin = std::min(smin, p.mean_sim);
    smax = std::max(smax, p.mean_sim);
  }
  if (wmax <= 0.0) wmax = 1.0;
  double pad = (smax - smin) * 0.1;
  if (pad <= 0.0) pad = 0.01;
  smin = std::max(0.0, smin - pad);
  smax = std::min(1.0, smax + pad);
  if (smax <= smin) smax = smin + 0.01;

  auto sx = [&](double w) { return ml + pw * (w / wmax); };
  auto sy = [&](double s) { return mt + ph * (1.0 - (s - smin) / (smax - smin)); };
  using detail::fmt6;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt6(ml) + "\" y=\"20\" font-family=\"sans-serif\" "
         "font-size=\"14\">" +
         std::string(display_name(r.kind)) + " weight search</text>\n";

  // axes
  svg += "<line x1=\"" + fmt6(ml) + "\" y1=\"" + fmt6(mt) + "\" x2=\"" +
         fmt6(ml) + "\" y2=\"" + fmt6(mt + ph) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt6(ml) + "\" y1=\"" + fmt6(mt + ph) + "\" x2=\"" +
         fmt6(ml + pw) + "\" y2=\"" + fmt6(mt + ph) + "\" stroke=\"black\"/>\n";

  // ticks: 5 on each axis
  for (int i = 0; i <= 4; ++i) {
    const double w = wmax * i / 4.0;
    const double x = sx(w);
    svg += "<line x1=\"" + fmt6(x) + "\" y1=\"" + fmt6(mt + ph) + "\" x2=\"" +
           fmt6(x) + "\" y2=\"" + fmt6(mt + ph + 4.0) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt6(x) + "\" y=\"" + fmt6(mt + ph + 18.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"middle\">" +
           fmt6(w) + "</text>\n";
    const double s = smin + (smax - smin) * i / 4.0;
    const double y = sy(s);
    svg += "<line x1=\"" + fmt6(ml - 4.0) + "\" y1=\"" + fmt6(y) + "\" x2=\"" +
           fmt6(ml) + "\" y2=\"" + fmt6(y) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt6(ml - 8.0) + "\" y=\"" + fmt6(y + 4.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"end\">" +
           fmt6(s) + "</text>\n";
  }
  svg += "<text x=\"" + fmt6(ml + pw / 2.0) + "\" y=\"" +
         fmt6(mt + ph + 36.0) +
         "\" font-family=\"sans-serif\" font-size=\"12\" "
         "text-anchor=\"middle\">weight</text>\n";
  svg += "<text x=\"14\" y=\"" + fmt6(mt + ph / 2.0) +
         "\" font-family=\"sans-serif\" font-size=\"12\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 14 " +
         fmt6(mt + ph / 2.0) + ")\">mean similarity</text>\n";

  // best-weight marker behind the curve
  svg += "<line x1=\"" + fmt6(sx(r.best_w)) + "\" y1=\"" + fmt6(mt) +
         "\" x2=\"" + fmt6(sx(r.best_w)) + "\" y2=\"" + fmt6(mt + ph) +
         "\" stroke=\"#c0392b\" stroke-dasharray=\"4 3\"/>\n";
  svg += "<text x=\"" + fmt6(sx(r.best_w) + 4.0) + "\" y=\"" + fmt6(mt + 12.0) +
         "\" font-family=\"sans-serif\" font-size=\"11\" "
         "fill=\"#c0392b\">w=" +
         detail::format_weight(r.best_w) + (r.unbounded ? "+" : "") +
         "</text>\n";

  svg += "<polyline fill=\"none\" stroke=\"#2c6fbb\" stroke-width=\"1.5\" "
         "points=\"";
  for (std::size_t i = 0; i < r.curve.size(); ++i) {
    if (i) svg += " ";
    svg += fmt6(sx(r.curve[i].w)) + "," + fmt6(sy(r.curve[i].mean_sim));
  }
  svg += "\"/>\n";
  for (const CurvePoint& p : r.curve) {
    svg += "<circle cx=\"" + fmt6(sx(p.w)) + "\" cy=\"" + fmt6(sy(p.mean_sim)) +
           "\" r=\"2\" fill=\"#2c6fbb\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace routefit
