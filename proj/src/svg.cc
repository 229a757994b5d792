// Copyright 2026 The FloodLens Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "floodlens/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>


namespace floodlens::svg {
namespace {

constexpr double kLeft = 70, kRight = 70, kTop = 40, kBottom = 70;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  if (v == 0.0) return "0";
  const double a = std::fabs(v);
  char buf[32];
  if (a >= 1e5 || a < 1e-3)
    std::snprintf(buf, sizeof buf, "%.1e", v);
  else
    std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::pair<double, double> extent(const std::vector<const Line *> &lines) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Line *l : lines)
    for (double v : l->values)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  lo = std::min(lo, 0.0);
  if (hi <= lo) hi = lo + 1.0;
  return {lo, hi};
}

}  // namespace

std::string escape_xml(const std::string &text) {
  std::string out;
  for (char c : text) {
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

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo) || target < 1) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> ticks;
  const double first = std::floor(lo / step + 1e-9) * step;
  for (double t = first; t <= hi + step * 1e-9; t += step)
    ticks.push_back(std::fabs(t) < step * 1e-9 ? 0.0 : t);
  if (ticks.back() < hi - step * 1e-9) ticks.push_back(ticks.back() + step);
  return ticks;
}

std::string render(const Chart &chart) {
  const double w = chart.width, h = chart.height;
  const double pw = w - kLeft - kRight, ph = h - kTop - kBottom;
  const std::size_t n = chart.x_labels.size();
  auto x_at = [&](std::size_t i) {
    return kLeft + (n <= 1 ? pw / 2 : pw * double(i) / double(n - 1));
  };

  std::vector<const Line *> right;
  for (const auto &l : chart.right) right.push_back(&l);
  auto [llo, lhi] = extent({&chart.left});
  auto lticks = nice_ticks(llo, lhi);
  llo = lticks.front();
  lhi = lticks.back();
  auto [rlo, rhi] = extent(right);
  auto rticks = nice_ticks(rlo, rhi);
  rlo = rticks.front();
  rhi = rticks.back();
  auto y_at = [&](double v, double lo, double hi) { return kTop + ph * (1.0 - (v - lo) / (hi - lo)); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width
      << "\" height=\"" << chart.height << "\" viewBox=\"0 0 " << chart.width << ' '
      << chart.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(w / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape_xml(chart.title) << "</text>\n";

  // Frame and grid.
  out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (double t : lticks) {
    const double y = y_at(t, llo, lhi);
    out << "<line x1=\"" << num(kLeft - 4) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft + pw)
        << "\" y2=\"" << num(y) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  if (!right.empty())
    for (double t : rticks) {
      const double y = y_at(t, rlo, rhi);
      out << "<line x1=\"" << num(kLeft + pw) << "\" y1=\"" << num(y) << "\" x2=\""
          << num(kLeft + pw + 4) << "\" y2=\"" << num(y) << "\" stroke=\"#444\"/>\n";
      out << "<text x=\"" << num(kLeft + pw + 6) << "\" y=\"" << num(y + 4) << "\">"
          << tick_label(t) << "</text>\n";
    }
  const std::size_t every = std::max<std::size_t>(1, (n + 7) / 8);
  for (std::size_t i = 0; i < n; i += every) {
    const double x = x_at(i);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(x)
        << "\" y2=\"" << num(kTop + ph + 4) << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 16)
        << "\" text-anchor=\"middle\">" << escape_xml(chart.x_labels[i]) << "</text>\n";
  }
  out << "<text transform=\"translate(14," << num(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(chart.left_axis) << "</text>\n";
  if (!right.empty())
    out << "<text transform=\"translate(" << num(w - 10) << ',' << num(kTop + ph / 2)
        << ") rotate(90)\" text-anchor=\"middle\">" << escape_xml(chart.right_axis)
        << "</text>\n";

  auto path = [&](const Line &line, double lo, double hi, const char *dash) {
    std::string d;
    bool pen = false;
    for (std::size_t i = 0; i < line.values.size() && i < n; ++i) {
      const double v = line.values[i];
      if (!std::isfinite(v)) {
        pen = false;
        continue;
      }
      d += pen ? " L" : (d.empty() ? "M" : " M");
      d += num(x_at(i)) + ',' + num(y_at(v, lo, hi));
      pen = true;
    }
    if (d.empty()) return;
    out << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << escape_xml(line.color)
        << "\" stroke-width=\"1.8\"" << dash << "/>\n";
  };
  path(chart.left, llo, lhi, "");
  for (const Line *l : right) path(*l, rlo, rhi, " stroke-dasharray=\"5,3\"");

  // Legend.
  double ly = h - 22;
  double lx = kLeft;
  std::vector<const Line *> all = {&chart.left};
  all.insert(all.end(), right.begin(), right.end());
  for (const Line *l : all) {
    out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 20)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << escape_xml(l->color)
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(lx + 25) << "\" y=\"" << num(ly + 4) << "\">"
        << escape_xml(l->label) << "</text>\n";
    lx += 40 + 7.0 * double(l->label.size());
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace floodlens::svg
