#ifndef GRL_SUMMARY_HPP
#define GRL_SUMMARY_HPP

#include <vector>

namespace grl {

struct CurveSummary {
  double final_window_median = 0.0;
  double final_window_iqr = 0.0;
  int convergence_episode = -1;  // first episode whose trailing median
                                 // reaches 90% of the final-window median
  int window = 50;
};

// Final-window statistics of one learning curve.  Curves shorter than the
// window use their full length.
CurveSummary summarize_curve(const std::vector<double>& rewards,
                             int window = 50);

double median(std::vector<double> values);
double iqr(std::vector<double> values);

}  // namespace grl

#endif
