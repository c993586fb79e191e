#ifndef EXREG_CSV_HPP
#define EXREG_CSV_HPP

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

#include "exreg/regionalize.hpp"
#include "exreg/simulate.hpp"

namespace exreg {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

// locations CSV: header "id,x,y", ids 0..n-1 in row order.
void write_locations_csv(const std::filesystem::path& path, const std::vector<Location>& locations);
std::vector<Location> read_locations_csv(const std::filesystem::path& path);

// observations CSV: one row per observation, one column per location, header
// row carries the location ids.
void write_observations_csv(const std::filesystem::path& path, const ObservationSet& obs);
ObservationSet read_observations_csv(const std::filesystem::path& path,
                                     const std::vector<Location>& locations, Margins margins);

// Square id-labelled matrix (theta or dissimilarity).
void write_square_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                             const std::vector<int>& ids);
Eigen::MatrixXd read_square_matrix_csv(const std::filesystem::path& path,
                                       std::vector<int>* ids = nullptr);

// labels CSV: "id,label"; excluded locations carry label 0.
void write_labels_csv(const std::filesystem::path& path, const Clustering& clustering);
Clustering read_labels_csv(const std::filesystem::path& path);

// generic per-location values: "id,<name>".
void write_values_csv(const std::filesystem::path& path, const std::string& column_name,
                      const std::vector<double>& values);
std::vector<double> read_values_csv(const std::filesystem::path& path);

}  // namespace exreg

#endif
