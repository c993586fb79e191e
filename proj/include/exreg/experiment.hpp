#ifndef EXREG_EXPERIMENT_HPP
#define EXREG_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exreg/fit.hpp"
#include "exreg/gof.hpp"
#include "exreg/parameter_field.hpp"
#include "exreg/regionalize.hpp"
#include "exreg/simulate.hpp"

namespace exreg {

struct ExperimentConfig {
  FieldPreset preset = FieldPreset::example1;
  GridSpec grid;
  FieldOverrides overrides;
  MatrixForm form = MatrixForm::standard;
  long observations = 100;              // m per replicate
  int clusters = 5;                     // K
  GlobalParams sim_globals{5.0, 1.0};   // generating parameters
  std::vector<GlobalParams> globals;    // analysis sweep; empty = sim_globals
  int replicates = 5;
  std::optional<std::uint64_t> seed;    // mandatory
  double epsilon = 0.0;                 // 0 = 2.5 x median nearest-neighbor distance
  int min_neighbors = 4;
  double smoothing_radius = 0.0;        // 0 = 1.5 x epsilon
  Linkage linkage = Linkage::average;
  std::optional<double> pair_max_distance;  // unset = member-count rule
  bool spectral_approx = false;
  double sim_accuracy = 1e-3;
  std::filesystem::path out_dir = "out";
  int threads = 0;      // 0 = hardware concurrency
  int task_workers = 1; // concurrent (replicate x globals) tasks
  bool emit_svg = true;

  void validate() const;
  std::map<std::string, std::string> as_map() const;
};

// Key = value text configuration; '#' starts a comment. Unknown keys and
// unparsable values raise ConfigError naming the key.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);
ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv);

struct FileRecord {
  std::string path;  // relative to the output directory
  std::uint64_t bytes = 0;
  std::string fnv64;
};

struct RunManifest {
  std::string version;
  std::map<std::string, std::string> config;
  std::map<std::string, double> stage_ms;
  std::vector<std::string> failures;
  std::vector<FileRecord> files;
};

std::uint64_t fnv1a64(const std::string& bytes);

// Analysis of one replicate at one choice of the global parameters; the
// building blocks are also used by the CLI subcommands.
struct ReplicateAnalysis {
  std::vector<std::optional<FitResult>> local_fits;
  LocalEstimateField local_smooth;
  SubsetDissimilarity d2;
  Clustering edc;
  Clustering lec;
  std::map<int, FitResult> edc_fits;
  std::map<int, FitResult> lec_fits;
  GofReport gof;
  double epsilon = 0.0;           // resolved values
  double smoothing_radius = 0.0;
};

struct AnalysisSettings {
  GlobalParams globals;
  int clusters = 5;
  double epsilon = 0.0;
  int min_neighbors = 4;
  double smoothing_radius = 0.0;
  Linkage linkage = Linkage::average;
  std::optional<double> pair_max_distance;
  MatrixForm form = MatrixForm::standard;
  int threads = 0;
};

std::vector<std::optional<FitResult>> fit_local_field(const ObservationSet& obs,
                                                      const AnalysisSettings& s, double epsilon);
LocalEstimateField to_estimate_field(const std::vector<std::optional<FitResult>>& fits);
Clustering cluster_edc(const ThetaMatrix& theta, const std::vector<int>& included,
                       int clusters, Linkage linkage);
std::map<int, FitResult> fit_clusters(const ObservationSet& obs, const Clustering& clustering,
                                      const AnalysisSettings& s);
ReplicateAnalysis analyze_replicate(const ObservationSet& obs, const ThetaMatrix& theta,
                                    const AnalysisSettings& s);

// Full pipeline: simulate (shared across the sweep), madogram, both
// clusterings, per-cluster fits, goodness of fit, aggregation, files and
// manifest. Deterministic given (config, seed) except the manifest's
// wall-clock fields.
RunManifest run_experiment(const ExperimentConfig& config);

}  // namespace exreg

#endif
