#include "exreg/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "exreg/empirical.hpp"

namespace exreg {

PairSelection PairSelection::among(const std::vector<Location>& locations,
                                   const std::vector<int>& members, double max_distance) {
  PairSelection sel;
  sel.max_distance = max_distance;
  std::vector<int> sorted = members;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if (distance(locations[sorted[i]], locations[sorted[j]]) <= max_distance)
        sel.pairs.emplace_back(sorted[i], sorted[j]);
    }
  }
  return sel;
}

PairSelection PairSelection::around(const std::vector<Location>& locations, int center,
                                    double epsilon) {
  PairSelection sel;
  sel.max_distance = epsilon;
  for (int u = 0; u < static_cast<int>(locations.size()); ++u) {
    if (u == center) continue;
    if (distance(locations[center], locations[u]) < epsilon)
      sel.pairs.emplace_back(std::min(center, u), std::max(center, u));
  }
  return sel;
}

double default_pair_threshold(const std::vector<Location>& locations,
                              const std::vector<int>& members) {
  if (members.size() <= 200) return std::numeric_limits<double>::infinity();
  std::vector<double> dists;
  dists.reserve(members.size() * (members.size() - 1) / 2);
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      dists.push_back(distance(locations[members[i]], locations[members[j]]));
  std::sort(dists.begin(), dists.end());
  return dists[static_cast<std::size_t>(0.3 * (dists.size() - 1))];
}

double median_nn_distance(const std::vector<Location>& locations) {
  const int n = static_cast<int>(locations.size());
  if (n < 2) throw std::invalid_argument("median_nn_distance: need at least 2 locations");
  std::vector<double> nn(n, std::numeric_limits<double>::infinity());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) nn[i] = std::min(nn[i], distance(locations[i], locations[j]));
  std::sort(nn.begin(), nn.end());
  return n % 2 == 1 ? nn[n / 2] : 0.5 * (nn[n / 2 - 1] + nn[n / 2]);
}

namespace {

// Composite likelihood evaluator with per-(pair, observation) terms cached;
// the optimizer hits this with many parameter candidates against the same
// data.
class CompositeNll {
 public:
  CompositeNll(const GlobalParams& globals, const ObservationSet& obs, const PairSelection& sel,
               MatrixForm form)
      : model_(globals), alpha_(globals.alpha), form_(form), m_(obs.observations()) {
    if (sel.pairs.empty()) throw NoPairsError("composite likelihood: empty pair set");
    if (obs.margins != Margins::unit_frechet)
      throw std::invalid_argument("composite likelihood: observations must be unit Frechet");
    lags_.reserve(sel.pairs.size());
    terms_.reserve(sel.pairs.size() * m_);
    for (const auto& [i, j] : sel.pairs) {
      lags_.emplace_back(obs.locations[i].x - obs.locations[j].x,
                         obs.locations[i].y - obs.locations[j].y);
      for (long r = 0; r < m_; ++r) terms_.push_back(model_.terms(obs.data(r, i), obs.data(r, j)));
    }
  }

  double at(double a, double b, double gamma) const {
    const Eigen::Matrix2d mat = anisotropy_entries(a, b, gamma, form_);
    double nll = 0.0;
    const ExtremalT::Terms* t = terms_.data();
    for (const auto& lag : lags_) {
      const double r = (mat * lag).norm();
      const double rho = std::min(r == 0.0 ? 1.0 : std::exp(-std::pow(r, alpha_)), kRhoClamp);
      for (long k = 0; k < m_; ++k, ++t) nll -= model_.log_density(*t, rho);
    }
    return nll;
  }

  long pair_count() const { return static_cast<long>(lags_.size()); }

 private:
  ExtremalT model_;
  double alpha_;
  MatrixForm form_;
  long m_;
  std::vector<Eigen::Vector2d> lags_;
  std::vector<ExtremalT::Terms> terms_;
};

// Moment-matched isotropic scale: madogram theta of the shortest pairs mapped
// back through the theoretical extremal coefficient.
AnisotropyParams derive_init(const GlobalParams& globals, const ObservationSet& obs,
                             const PairSelection& sel) {
  std::vector<std::pair<int, int>> pairs = sel.pairs;
  std::sort(pairs.begin(), pairs.end(), [&](const auto& p, const auto& q) {
    return distance(obs.locations[p.first], obs.locations[p.second]) <
           distance(obs.locations[q.first], obs.locations[q.second]);
  });
  if (pairs.size() > 64) pairs.resize(64);
  std::vector<double> scales;
  scales.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    const double theta =
        fmadogram_theta_pair(average_ranks(obs.data.col(i)), average_ranks(obs.data.col(j)));
    const double rho = std::clamp(invert_theta(theta, globals), 1e-6, kRhoClamp);
    const double h = distance(obs.locations[i], obs.locations[j]);
    scales.push_back(h / std::pow(-std::log(rho), 1.0 / globals.alpha));
  }
  std::sort(scales.begin(), scales.end());
  const double s = std::max(scales[scales.size() / 2], 1e-3);
  return AnisotropyParams{0.5 * s, 0.5 * s, 0.0};
}

FitResult run_multistart(const CompositeNll& nll, const AnisotropyParams& init,
                         const NelderMeadOptions& nm) {
  auto objective = [&](const Eigen::VectorXd& u) {
    try {
      return nll.at(std::exp(u(0)), std::exp(u(1)), u(2));
    } catch (const NumericalDomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const double la = std::log(init.a);
  const double lb = std::log(std::max(init.b, 0.25 * init.a));
  std::vector<Eigen::Vector3d> starts;
  starts.push_back(Eigen::Vector3d(la, std::log(std::max(init.b, 1e-8)), init.gamma));
  for (const double g : {0.0, M_PI / 4.0, M_PI / 2.0, 3.0 * M_PI / 4.0})
    starts.push_back(Eigen::Vector3d(la, lb, g));

  FitResult best;
  best.nll = std::numeric_limits<double>::infinity();
  best.starts_tried = static_cast<int>(starts.size());
  best.pairs_used = nll.pair_count();
  for (const auto& s : starts) {
    const NelderMeadResult r = nelder_mead(objective, s, nm);
    if (r.value < best.nll) {
      best.nll = r.value;
      best.params = AnisotropyParams{std::exp(r.x(0)), std::exp(r.x(1)),
                                     wrap_angle_half_period(r.x(2))};
      best.converged = r.converged;
    }
  }
  if (!std::isfinite(best.nll))
    throw FitFailureError("fit: no start produced a finite composite likelihood");
  return best;
}

}  // namespace

double cluster_composite_nll(const AnisotropyParams& params, const GlobalParams& globals,
                             const ObservationSet& obs, const PairSelection& pairs,
                             MatrixForm form) {
  params.validate();
  build_matrix(params, form);  // reject degenerate parameter combinations
  const CompositeNll nll(globals, obs, pairs, form);
  return nll.at(params.a, params.b, params.gamma);
}

FitResult fit_cluster_mle(const GlobalParams& globals, const ObservationSet& obs,
                          const std::vector<int>& members, const PairSelection& pairs,
                          std::optional<AnisotropyParams> init, const FitOptions& options) {
  if (members.size() < 2)
    throw ClusterTooSmallError("fit_cluster_mle: cluster has fewer than 2 members");
  if (pairs.pairs.empty()) throw NoPairsError("fit_cluster_mle: no pairs within threshold");
  const CompositeNll nll(globals, obs, pairs, options.form);
  const AnisotropyParams start = init ? *init : derive_init(globals, obs, pairs);
  return run_multistart(nll, start, options.nm);
}

std::optional<FitResult> fit_local_anisotropy(int center, const GlobalParams& globals,
                                              const ObservationSet& obs,
                                              const LocalFitConfig& config) {
  if (!(config.epsilon > 0.0))
    throw std::invalid_argument("fit_local_anisotropy: epsilon must be > 0");
  const PairSelection sel = PairSelection::around(obs.locations, center, config.epsilon);
  if (static_cast<int>(sel.pairs.size()) < config.min_neighbors) return std::nullopt;
  const CompositeNll nll(globals, obs, sel, config.fit.form);
  const AnisotropyParams start = derive_init(globals, obs, sel);
  FitResult result = run_multistart(nll, start, config.fit.nm);
  return result;
}

}  // namespace exreg
