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

#ifndef FLOODLENS_SVG_H_
#define FLOODLENS_SVG_H_

#include <string>
#include <vector>

namespace floodlens::svg {

// One polyline. NaN values break the line.
struct Line {
  std::string label;
  std::vector<double> values;  // one per x category
  std::string color = "#1f77b4";
};

// Two-axis weekly line chart: |left| is scaled to the left axis and
// |right| (optional) to the right one, so series with different units can
// share the time axis.
struct Chart {
  std::string title;
  std::vector<std::string> x_labels;
  Line left;
  std::vector<Line> right;
  std::string left_axis;
  std::string right_axis;
  int width = 760;
  int height = 360;
};

// Round tick positions covering [lo, hi] with roughly |target| steps of
// 1, 2 or 5 times a power of ten.
std::vector<double> nice_ticks(double lo, double hi, int target = 5);

std::string render(const Chart &chart);

std::string escape_xml(const std::string &text);

}  // namespace floodlens::svg

#endif  // FLOODLENS_SVG_H_
