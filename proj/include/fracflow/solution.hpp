#ifndef FRACFLOW_SOLUTION_HPP
#define FRACFLOW_SOLUTION_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace fracflow {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double truncated_fraction = 0.0;
};

struct SolutionPoint {
  double t1 = 0.0;
  double t2 = 0.0;  // used by 2-d curves only
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double truncated_fraction = 0.0;
};

struct SolutionCurve {
  std::vector<SolutionPoint> points;
  std::string method;  // "mc" | "quad" | "closed_form"
  bool two_dim = false;
  std::vector<std::string> warnings;
};

}  // namespace fracflow

#endif  // FRACFLOW_SOLUTION_HPP
