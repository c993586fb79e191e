#ifndef EXREG_NELDER_MEAD_HPP
#define EXREG_NELDER_MEAD_HPP

#include <Eigen/Core>
#include <functional>

namespace exreg {

struct NelderMeadOptions {
  int max_iterations = 500;
  double tolerance = 1e-6;  // simplex diameter in the search space
  double initial_step = 0.4;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  long evaluations = 0;
};

// Derivative-free simplex minimizer (reflection 1, expansion 2, contraction
// 1/2, shrink 1/2). The objective may return +inf to reject a point.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& start, const NelderMeadOptions& options = {});

}  // namespace exreg

#endif
