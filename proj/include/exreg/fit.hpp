#ifndef EXREG_FIT_HPP
#define EXREG_FIT_HPP

#include <optional>
#include <utility>
#include <vector>

#include "exreg/model.hpp"
#include "exreg/nelder_mead.hpp"
#include "exreg/simulate.hpp"

namespace exreg {

// Unordered location pairs entering a composite likelihood, each counted
// once, all within max_distance.
struct PairSelection {
  double max_distance = 0.0;  // +inf = unbounded
  std::vector<std::pair<int, int>> pairs;

  // All pairs among `members` within max_distance.
  static PairSelection among(const std::vector<Location>& locations,
                             const std::vector<int>& members, double max_distance);
  // Star-shaped set centered at one location: pairs (center, u) for every u
  // with 0 < |center - u| < epsilon. Pairs not involving the center are
  // excluded.
  static PairSelection around(const std::vector<Location>& locations, int center, double epsilon);
};

// Default pair-distance threshold: unbounded for member sets of at most 200
// locations, otherwise the 0.3 empirical quantile of the within-set pairwise
// distances.
double default_pair_threshold(const std::vector<Location>& locations,
                              const std::vector<int>& members);

double median_nn_distance(const std::vector<Location>& locations);

struct FitResult {
  AnisotropyParams params;
  double nll = 0.0;
  long pairs_used = 0;
  bool converged = false;
  int starts_tried = 0;
};

// Composite negative log-likelihood over the selected pairs: the sum over
// observations and pairs of -log f(y1, y2; rho(x1 - x2)) with rho from the
// stationary correlation under `params`. Correlations are clamped to
// 1 - 1e-9 before entering the density.
double cluster_composite_nll(const AnisotropyParams& params, const GlobalParams& globals,
                             const ObservationSet& obs, const PairSelection& pairs,
                             MatrixForm form = MatrixForm::standard);

struct FitOptions {
  NelderMeadOptions nm;
  MatrixForm form = MatrixForm::standard;
};

// Simplex maximization of the composite likelihood in transformed coordinates
// (log a, log b, gamma free), with gamma multi-starts {0, pi/4, pi/2, 3pi/4}
// plus the init. Throws ClusterTooSmallError / NoPairsError / FitFailureError.
FitResult fit_cluster_mle(const GlobalParams& globals, const ObservationSet& obs,
                          const std::vector<int>& members, const PairSelection& pairs,
                          std::optional<AnisotropyParams> init = {}, const FitOptions& options = {});

struct LocalFitConfig {
  double epsilon = 0.0;    // neighborhood radius
  int min_neighbors = 4;
  FitOptions fit;
};

// Local anisotropy estimate at one location from the star-shaped pair set.
// Returns nullopt (excluded location) when the neighborhood is too small.
std::optional<FitResult> fit_local_anisotropy(int center, const GlobalParams& globals,
                                              const ObservationSet& obs,
                                              const LocalFitConfig& config);

}  // namespace exreg

#endif
