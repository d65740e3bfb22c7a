#include "grl/summary.hpp"

#include <algorithm>
#include <cmath>

#include "grl/errors.hpp"

namespace grl {

double median(std::vector<double> values) {
  if (values.empty()) throw PreconditionError("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {
double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * (static_cast<double>(v.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}
}  // namespace

double iqr(std::vector<double> values) {
  if (values.empty()) throw PreconditionError("iqr: empty input");
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
}

CurveSummary summarize_curve(const std::vector<double>& rewards, int window) {
  if (rewards.empty()) throw PreconditionError("summarize_curve: empty curve");
  CurveSummary s;
  s.window = window;
  const int n = static_cast<int>(rewards.size());
  const int w = std::min(window, n);
  const std::vector<double> tail(rewards.end() - w, rewards.end());
  s.final_window_median = median(tail);
  s.final_window_iqr = iqr(tail);

  const double threshold = 0.9 * s.final_window_median;
  for (int ep = 0; ep < n; ++ep) {
    const int lo = std::max(0, ep - w + 1);
    const std::vector<double> trailing(rewards.begin() + lo,
                                       rewards.begin() + ep + 1);
    if (median(trailing) >= threshold) {
      s.convergence_episode = ep + 1;  // 1-based
      break;
    }
  }
  return s;
}

}  // namespace grl
