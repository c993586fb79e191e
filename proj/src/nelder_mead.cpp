#include "exreg/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace exreg {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& start, const NelderMeadOptions& options) {
  const int d = static_cast<int>(start.size());
  NelderMeadResult result;
  result.evaluations = 0;

  auto eval = [&](const Eigen::VectorXd& x) {
    ++result.evaluations;
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Eigen::VectorXd> pts(d + 1, start);
  std::vector<double> vals(d + 1);
  for (int i = 1; i <= d; ++i) pts[i](i - 1) += options.initial_step;
  for (int i = 0; i <= d; ++i) vals[i] = eval(pts[i]);

  std::vector<int> order(d + 1);
  auto sort_simplex = [&]() {
    for (int i = 0; i <= d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
  };

  auto diameter = [&]() {
    double dia = 0.0;
    for (int i = 1; i <= d; ++i)
      dia = std::max(dia, (pts[i] - pts[0]).cwiseAbs().maxCoeff());
    return dia;
  };

  for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
    sort_simplex();
    const int best = order[0], worst = order[d], second_worst = order[d - 1];
    if (diameter() < options.tolerance) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int i = 0; i <= d; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= static_cast<double>(d);

    const Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
    const double v_ref = eval(reflected);

    if (v_ref < vals[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double v_exp = eval(expanded);
      if (v_exp < v_ref) {
        pts[worst] = expanded;
        vals[worst] = v_exp;
      } else {
        pts[worst] = reflected;
        vals[worst] = v_ref;
      }
      continue;
    }
    if (v_ref < vals[second_worst]) {
      pts[worst] = reflected;
      vals[worst] = v_ref;
      continue;
    }
    // Contraction towards the better of the worst point and its reflection.
    const bool outside = v_ref < vals[worst];
    const Eigen::VectorXd contracted =
        outside ? centroid + 0.5 * (reflected - centroid) : centroid + 0.5 * (pts[worst] - centroid);
    const double v_con = eval(contracted);
    if (v_con < std::min(v_ref, vals[worst])) {
      pts[worst] = contracted;
      vals[worst] = v_con;
      continue;
    }
    // Shrink towards the best vertex.
    for (int i = 0; i <= d; ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      vals[i] = eval(pts[i]);
    }
  }

  sort_simplex();
  result.x = pts[order[0]];
  result.value = vals[order[0]];
  return result;
}

}  // namespace exreg
