#include "exreg/regionalize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "exreg/parallel.hpp"

namespace exreg {

Eigen::MatrixXd edc_dissimilarity(const ThetaMatrix& theta) {
  Eigen::MatrixXd d = theta.theta.array() - 1.0;
  d.diagonal().setZero();
  return d;
}

LocalEstimateField smooth_estimates(const LocalEstimateField& field,
                                    const std::vector<Location>& locations, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("smooth_estimates: radius must be > 0");
  if (field.params.size() != locations.size())
    throw std::invalid_argument("smooth_estimates: field/location size mismatch");
  const int n = static_cast<int>(locations.size());
  LocalEstimateField out;
  out.smoothed = true;
  out.params.resize(n);
  for (int i = 0; i < n; ++i) {
    if (!field.params[i].has_value()) continue;
    double sum_a = 0.0, sum_b = 0.0, cos2 = 0.0, sin2 = 0.0;
    long count = 0;
    for (int j = 0; j < n; ++j) {
      if (!field.params[j].has_value()) continue;
      if (distance(locations[i], locations[j]) > radius) continue;
      const AnisotropyParams& p = *field.params[j];
      sum_a += p.a;
      sum_b += p.b;
      cos2 += std::cos(2.0 * p.gamma);
      sin2 += std::sin(2.0 * p.gamma);
      ++count;
    }
    if (count == 0) continue;  // neighborhood of excluded points only
    const double gamma = wrap_angle_half_period(0.5 * std::atan2(sin2, cos2));
    out.params[i] = AnisotropyParams{sum_a / count, std::max(sum_b / count, 0.0), gamma};
  }
  return out;
}

namespace {

// Adaptive Simpson on a smooth piece.
double simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb,
               double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double fa, double b,
                        double fb, double fm, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, flm);
  const double right = simpson(f, m, fm, b, fb, frm);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive_simpson(f, a, fa, b, fb, fm, simpson(f, a, fa, b, fb, fm), tol, 40);
}

void check_ellipse(const AnisotropyMatrix& A) {
  if (!A.m.allFinite() || std::fabs(A.m.determinant()) < 1e-300)
    throw DegenerateMatrixError("ellipse_jaccard: zero-area ellipse");
}

}  // namespace

double ellipse_jaccard(const AnisotropyMatrix& A1, const AnisotropyMatrix& A2, double level) {
  if (!(level > 0.0)) throw std::invalid_argument("ellipse_jaccard: level must be > 0");
  check_ellipse(A1);
  check_ellipse(A2);
  if (A1.m == A2.m) return 0.0;

  // Change of variables u = A1 h / level maps L1 to the unit disk and L2 to
  // the ellipse {u : |B u| <= 1}; the common h-space scale level^2/|det A1|
  // multiplies every area.
  const Eigen::Matrix2d b_mat = A2.m * A1.m.inverse();
  const double det_b = std::fabs(b_mat.determinant());
  if (!(det_b > 0.0) || !b_mat.allFinite())
    throw DegenerateMatrixError("ellipse_jaccard: degenerate matrix ratio");
  const Eigen::Matrix2d g = b_mat.transpose() * b_mat;
  const double p = g(0, 0), q = g(0, 1), s = g(1, 1);

  // Radial profile of the intersection of the unit disk with the ellipse;
  // both regions are star-shaped around the origin.
  auto integrand = [&](double phi) {
    const double c = std::cos(phi), sn = std::sin(phi);
    const double gg = p * c * c + 2.0 * q * c * sn + s * sn * sn;
    return 0.5 * std::min(1.0, 1.0 / gg);
  };

  // The boundaries cross where g(phi) = 1; split there so each Simpson piece
  // is smooth. The crossing equation is a quadratic in tan(phi).
  std::vector<double> knots{0.0, M_PI};
  const double qa = s - 1.0, qb = 2.0 * q, qc = p - 1.0;
  if (std::fabs(qa) < 1e-14) {
    knots.push_back(M_PI / 2.0);  // cos(phi) = 0 solves the degenerate equation
    if (std::fabs(qb) > 1e-14) {
      const double t = -qc / qb;
      knots.push_back(wrap_angle_half_period(std::atan(t)));
    }
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      for (const double t : {(-qb + root) / (2.0 * qa), (-qb - root) / (2.0 * qa)})
        knots.push_back(wrap_angle_half_period(std::atan(t)));
    }
  }
  std::sort(knots.begin(), knots.end());

  double half_area = 0.0;  // integral over [0, pi); the profile has period pi
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (knots[i + 1] - knots[i] < 1e-14) continue;
    half_area += integrate(integrand, knots[i], knots[i + 1], 1e-10);
  }
  const double scale = level * level / std::fabs(A1.m.determinant());
  const double inter = 2.0 * half_area * scale;
  const double area1 = M_PI * scale;
  const double area2 = M_PI / det_b * scale;
  const double uni = area1 + area2 - inter;
  return std::clamp(1.0 - inter / uni, 0.0, 1.0);
}

SubsetDissimilarity lec_dissimilarity(const LocalEstimateField& field, int threads,
                                      MatrixForm form) {
  if (!field.smoothed)
    throw std::invalid_argument("lec_dissimilarity: field must be smoothed first");
  SubsetDissimilarity out;
  for (int i = 0; i < static_cast<int>(field.params.size()); ++i)
    if (field.params[i].has_value()) out.ids.push_back(i);
  const long n = static_cast<long>(out.ids.size());
  if (n < 2)
    throw std::invalid_argument("lec_dissimilarity: fewer than 2 non-excluded locations");
  std::vector<AnisotropyMatrix> mats(n);
  for (long i = 0; i < n; ++i) mats[i] = build_matrix(*field.params[out.ids[i]], form);
  out.d.setZero(n, n);
  parallel_for(n, threads > 0 ? threads : default_threads(), [&](long i) {
    for (long j = i + 1; j < n; ++j) {
      const double v = ellipse_jaccard(mats[i], mats[j]);
      out.d(i, j) = v;
      out.d(j, i) = v;
    }
  });
  return out;
}

Linkage parse_linkage(std::string_view name) {
  if (name == "average") return Linkage::average;
  if (name == "single") return Linkage::single;
  if (name == "complete") return Linkage::complete;
  throw std::invalid_argument("unknown linkage '" + std::string(name) + "'");
}

std::string_view linkage_name(Linkage linkage) {
  switch (linkage) {
    case Linkage::average: return "average";
    case Linkage::single: return "single";
    case Linkage::complete: return "complete";
  }
  return "?";
}

std::vector<int> agglomerative_cluster(const Eigen::MatrixXd& dissimilarity, int k,
                                       Linkage linkage) {
  const int n = static_cast<int>(dissimilarity.rows());
  if (dissimilarity.cols() != n) throw std::invalid_argument("agglomerative_cluster: not square");
  if (k < 1 || k > n)
    throw std::invalid_argument("agglomerative_cluster: k must lie in [1, n], got " +
                                std::to_string(k));

  Eigen::MatrixXd work = dissimilarity;
  std::vector<bool> alive(n, true);
  std::vector<long> size(n, 1);
  std::vector<int> min_member(n);
  std::vector<std::vector<int>> members(n);
  for (int i = 0; i < n; ++i) {
    min_member[i] = i;
    members[i] = {i};
  }

  int clusters = n;
  while (clusters > k) {
    int best_i = -1, best_j = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        const double d = work(i, j);
        if (d < best_d) {
          best_d = d;
          best_i = i;
          best_j = j;
        } else if (d == best_d && best_i >= 0) {
          const int lo = std::min(min_member[i], min_member[j]);
          const int hi = std::max(min_member[i], min_member[j]);
          const int blo = std::min(min_member[best_i], min_member[best_j]);
          const int bhi = std::max(min_member[best_i], min_member[best_j]);
          if (lo < blo || (lo == blo && hi < bhi)) {
            best_i = i;
            best_j = j;
          }
        }
      }
    }
    // Merge best_j into best_i (Lance-Williams update of the survivor's row).
    for (int l = 0; l < n; ++l) {
      if (!alive[l] || l == best_i || l == best_j) continue;
      double d;
      switch (linkage) {
        case Linkage::average:
          d = (size[best_i] * work(best_i, l) + size[best_j] * work(best_j, l)) /
              static_cast<double>(size[best_i] + size[best_j]);
          break;
        case Linkage::single:
          d = std::min(work(best_i, l), work(best_j, l));
          break;
        case Linkage::complete:
          d = std::max(work(best_i, l), work(best_j, l));
          break;
      }
      work(best_i, l) = d;
      work(l, best_i) = d;
    }
    size[best_i] += size[best_j];
    min_member[best_i] = std::min(min_member[best_i], min_member[best_j]);
    members[best_i].insert(members[best_i].end(), members[best_j].begin(), members[best_j].end());
    members[best_j].clear();
    alive[best_j] = false;
    --clusters;
  }

  std::vector<int> final_slots;
  for (int i = 0; i < n; ++i)
    if (alive[i]) final_slots.push_back(i);
  std::sort(final_slots.begin(), final_slots.end(),
            [&](int a, int b) { return min_member[a] < min_member[b]; });
  std::vector<int> labels(n, 0);
  for (int label = 1; label <= static_cast<int>(final_slots.size()); ++label)
    for (const int m : members[final_slots[label - 1]]) labels[m] = label;
  return labels;
}

std::vector<int> Clustering::members_of(int label) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i)
    if (labels[i] == label) out.push_back(i);
  return out;
}

Clustering clustering_from_labels(int n_locations, const std::vector<int>& ids,
                                  const std::vector<int>& subset_labels, int k) {
  if (ids.size() != subset_labels.size())
    throw std::invalid_argument("clustering_from_labels: id/label size mismatch");
  Clustering c;
  c.k = k;
  c.labels.assign(n_locations, 0);
  for (std::size_t i = 0; i < ids.size(); ++i) c.labels.at(ids[i]) = subset_labels[i];
  return c;
}

}  // namespace exreg
