#include "exreg/gof.hpp"

#include <algorithm>
#include <cmath>

namespace exreg {

std::string_view winner_name(Winner w) {
  switch (w) {
    case Winner::edc: return "EDC";
    case Winner::lec: return "LEC";
    case Winner::tie: return "tie";
    case Winner::skipped: return "skipped";
  }
  return "?";
}

std::vector<Intersection> intersect_clusterings(const Clustering& sigma, const Clustering& tau) {
  if (sigma.labels.size() != tau.labels.size())
    throw std::invalid_argument("intersect_clusterings: different location universes");
  const int n = static_cast<int>(sigma.labels.size());
  for (int i = 0; i < n; ++i) {
    if ((sigma.labels[i] == 0) != (tau.labels[i] == 0))
      throw std::invalid_argument(
          "intersect_clusterings: clusterings label different location sets");
  }
  std::map<std::pair<int, int>, std::vector<int>> cells;
  for (int i = 0; i < n; ++i) {
    if (sigma.labels[i] == 0) continue;
    cells[{sigma.labels[i], tau.labels[i]}].push_back(i);
  }
  std::vector<Intersection> out;
  out.reserve(cells.size());
  for (auto& [key, members] : cells) {
    Intersection v;
    v.sigma_label = key.first;
    v.tau_label = key.second;
    v.members = std::move(members);
    v.eligible = v.members.size() >= 2;
    out.push_back(std::move(v));
  }
  return out;
}

GofReport compare_gof(const ObservationSet& obs, const GlobalParams& globals,
                      const Clustering& sigma, const std::map<int, FitResult>& sigma_fits,
                      const Clustering& tau, const std::map<int, FitResult>& tau_fits,
                      std::optional<double> pair_max_distance) {
  GofReport report;
  report.winner_by_location.assign(obs.locations.size(), Winner::skipped);
  for (Intersection& v : intersect_clusterings(sigma, tau)) {
    IntersectionResult res;
    if (v.eligible) {
      const auto sf = sigma_fits.find(v.sigma_label);
      const auto tf = tau_fits.find(v.tau_label);
      if (sf == sigma_fits.end())
        throw std::invalid_argument("compare_gof: missing fit for sigma cluster " +
                                    std::to_string(v.sigma_label));
      if (tf == tau_fits.end())
        throw std::invalid_argument("compare_gof: missing fit for tau cluster " +
                                    std::to_string(v.tau_label));
      const double threshold =
          pair_max_distance ? *pair_max_distance : default_pair_threshold(obs.locations, v.members);
      const PairSelection pairs = PairSelection::among(obs.locations, v.members, threshold);
      if (pairs.pairs.empty()) {
        v.eligible = false;  // no pair within the threshold
      } else {
        // Identical pair sets for both models keep the comparison paired.
        const double ll_s = -cluster_composite_nll(sf->second.params, globals, obs, pairs);
        const double ll_t = -cluster_composite_nll(tf->second.params, globals, obs, pairs);
        if (!std::isfinite(ll_s) || !std::isfinite(ll_t)) {
          v.eligible = false;
        } else {
          res.ll_sigma = ll_s;
          res.ll_tau = ll_t;
          if (std::fabs(ll_s - ll_t) < kTieTolerance)
            res.winner = Winner::tie;
          else
            res.winner = ll_s > ll_t ? Winner::edc : Winner::lec;
        }
      }
    }
    if (!v.eligible) res.winner = Winner::skipped;
    for (const int m : v.members) report.winner_by_location[m] = res.winner;
    res.sets = std::move(v);
    report.intersections.push_back(std::move(res));
  }
  return report;
}

WinnerAggregate aggregate_winner_percentages(const std::vector<GofReport>& reports) {
  if (reports.empty())
    throw std::invalid_argument("aggregate_winner_percentages: no reports");
  const std::size_t n = reports.front().winner_by_location.size();
  WinnerAggregate agg;
  agg.replicates = static_cast<int>(reports.size());
  agg.lec_fraction.assign(n, 0.0);
  agg.tie_fraction.assign(n, 0.0);
  agg.counted.assign(n, 0);
  for (const GofReport& rep : reports) {
    if (rep.winner_by_location.size() != n)
      throw std::invalid_argument("aggregate_winner_percentages: mismatched universes");
    for (std::size_t i = 0; i < n; ++i) {
      switch (rep.winner_by_location[i]) {
        case Winner::skipped: break;
        case Winner::lec:
          agg.lec_fraction[i] += 1.0;
          ++agg.counted[i];
          break;
        case Winner::tie:
          agg.tie_fraction[i] += 1.0;
          ++agg.counted[i];
          break;
        case Winner::edc:
          ++agg.counted[i];
          break;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (agg.counted[i] > 0) {
      agg.lec_fraction[i] /= agg.counted[i];
      agg.tie_fraction[i] /= agg.counted[i];
    }
  }
  return agg;
}

}  // namespace exreg
