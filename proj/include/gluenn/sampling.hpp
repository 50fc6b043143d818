#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gluenn/common.hpp"

namespace gluenn {

enum class Spacing { linear, logarithmic };

struct SampleSpec {
  std::vector<std::pair<double, double>> intervals;
  int count = 0;
  Spacing spacing = Spacing::linear;
};

// A named collocation set. Points are sorted ascending; endpoints of every
// interval are included.
struct SampleSet {
  std::string label;
  SampleSpec spec;
  std::vector<double> points;
};

namespace detail {

inline std::vector<double> fill_interval(double lo, double hi, int n, Spacing spacing) {
  if (n == 1) return {lo};
  std::vector<double> pts(static_cast<std::size_t>(n));
  if (spacing == Spacing::linear) {
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = lo + step * i;
  } else {
    const double ratio = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i);
  }
  pts.front() = lo;
  pts.back() = hi;
  return pts;
}

}  // namespace detail

// Builds the collocation set for a spec. Multi-interval counts are
// allocated proportionally to linear interval length, rounded, with the
// last interval absorbing the remainder so the total is preserved.
inline SampleSet generate_samples(const std::string& label, const SampleSpec& spec) {
  if (spec.count < 2) throw Error("samples " + label + ": count must be at least 2");
  if (spec.intervals.empty()) throw Error("samples " + label + ": no intervals");
  double total_len = 0.0;
  for (const auto& [lo, hi] : spec.intervals) {
    if (!(hi > lo)) throw Error("samples " + label + ": interval must satisfy hi > lo");
    if (spec.spacing == Spacing::logarithmic && !(lo > 0.0))
      throw Error("samples " + label + ": logarithmic spacing requires lo > 0");
    total_len += hi - lo;
  }

  std::vector<int> alloc(spec.intervals.size());
  int used = 0;
  for (std::size_t i = 0; i + 1 < spec.intervals.size(); ++i) {
    const double len = spec.intervals[i].second - spec.intervals[i].first;
    alloc[i] = static_cast<int>(std::lround(spec.count * len / total_len));
    used += alloc[i];
  }
  alloc.back() = spec.count - used;
  for (std::size_t i = 0; i < alloc.size(); ++i)
    if (alloc[i] < 2) throw Error("samples " + label + ": interval allocation below 2 points");

  SampleSet set;
  set.label = label;
  set.spec = spec;
  set.points.reserve(static_cast<std::size_t>(spec.count));
  for (std::size_t i = 0; i < spec.intervals.size(); ++i) {
    auto pts = detail::fill_interval(spec.intervals[i].first, spec.intervals[i].second, alloc[i],
                                     spec.spacing);
    set.points.insert(set.points.end(), pts.begin(), pts.end());
  }
  for (std::size_t i = 1; i < set.points.size(); ++i)
    if (!(set.points[i] > set.points[i - 1]))
      throw Error("samples " + label + ": points are not strictly increasing");
  return set;
}

}  // namespace gluenn
