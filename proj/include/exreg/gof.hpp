#ifndef EXREG_GOF_HPP
#define EXREG_GOF_HPP

#include <map>
#include <optional>
#include <vector>

#include "exreg/fit.hpp"
#include "exreg/regionalize.hpp"

namespace exreg {

// Log-likelihood differences below this magnitude are reported as ties.
inline constexpr double kTieTolerance = 1e-9;

enum class Winner { edc, lec, tie, skipped };
std::string_view winner_name(Winner w);

struct Intersection {
  int sigma_label = 0;
  int tau_label = 0;
  std::vector<int> members;
  bool eligible = false;  // two or more members
};

// All non-empty intersections sigma_i n tau_j over the common location
// universe; intersections with fewer than two members are flagged skipped.
std::vector<Intersection> intersect_clusterings(const Clustering& sigma, const Clustering& tau);

struct IntersectionResult {
  Intersection sets;
  double ll_sigma = 0.0;  // composite log-likelihood at the sigma-cluster fit
  double ll_tau = 0.0;
  Winner winner = Winner::skipped;
};

struct GofReport {
  std::vector<IntersectionResult> intersections;
  std::vector<Winner> winner_by_location;  // size = location universe
};

// Evaluate the composite likelihood of both fitted models on every eligible
// intersection, with the same pair-threshold policy as fitting (an explicit
// threshold, or the member-count rule when unset). sigma plays the EDC role.
GofReport compare_gof(const ObservationSet& obs, const GlobalParams& globals,
                      const Clustering& sigma, const std::map<int, FitResult>& sigma_fits,
                      const Clustering& tau, const std::map<int, FitResult>& tau_fits,
                      std::optional<double> pair_max_distance = {});

struct WinnerAggregate {
  std::vector<double> lec_fraction;  // of non-skipped replicates per location
  std::vector<double> tie_fraction;
  std::vector<int> counted;  // non-skipped replicate count per location
  int replicates = 0;
};

WinnerAggregate aggregate_winner_percentages(const std::vector<GofReport>& reports);

}  // namespace exreg

#endif
