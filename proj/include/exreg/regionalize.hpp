#ifndef EXREG_REGIONALIZE_HPP
#define EXREG_REGIONALIZE_HPP

#include <Eigen/Core>
#include <optional>
#include <string_view>
#include <vector>

#include "exreg/empirical.hpp"
#include "exreg/types.hpp"

namespace exreg {

// Extremal-dependence dissimilarity D1 = theta - 1, entrywise.
Eigen::MatrixXd edc_dissimilarity(const ThetaMatrix& theta);

// Per-location anisotropy estimates; nullopt marks an excluded location.
struct LocalEstimateField {
  std::vector<std::optional<AnisotropyParams>> params;
  bool smoothed = false;
};

// Local averaging within `radius` (the location itself included): a and b by
// arithmetic mean, gamma by the half-angle of the mean doubled-angle unit
// vector. Excluded locations stay excluded.
LocalEstimateField smooth_estimates(const LocalEstimateField& field,
                                    const std::vector<Location>& locations, double radius);

// Jaccard dissimilarity D2 = 1 - |L1 n L2| / |L1 u L2| of the bounded
// elliptic level sets L = {h : |A h| <= level}. Invariant under the level
// value, joint scaling and joint rotation of the two matrices.
double ellipse_jaccard(const AnisotropyMatrix& A1, const AnisotropyMatrix& A2,
                       double level = 0.5);

// Dissimilarity over the non-excluded locations of a smoothed field.
struct SubsetDissimilarity {
  std::vector<int> ids;  // location indices the rows refer to
  Eigen::MatrixXd d;
};
SubsetDissimilarity lec_dissimilarity(const LocalEstimateField& field, int threads = 0,
                                      MatrixForm form = MatrixForm::standard);

enum class Linkage { average, single, complete };
Linkage parse_linkage(std::string_view name);
std::string_view linkage_name(Linkage linkage);

// Agglomerative merging cut at k clusters. Ties are broken towards the pair
// whose clusters contain the lowest row indices; labels 1..k are assigned by
// the smallest member index of each final cluster.
std::vector<int> agglomerative_cluster(const Eigen::MatrixXd& dissimilarity, int k,
                                       Linkage linkage = Linkage::average);

// Partition of the location universe; label 0 marks excluded locations.
struct Clustering {
  std::vector<int> labels;
  int k = 0;
  std::vector<int> members_of(int label) const;
};

Clustering clustering_from_labels(int n_locations, const std::vector<int>& ids,
                                  const std::vector<int>& subset_labels, int k);

}  // namespace exreg

#endif
