#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace satf {

struct Summary {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(count)
  std::size_t count = 0;
};

inline Summary summarize(std::span<const double> xs) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return s;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std_error = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  return s;
}

}  // namespace satf
