#include "exreg/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "exreg/csv.hpp"
#include "exreg/model.hpp"
#include "exreg/parallel.hpp"
#include "exreg/rng.hpp"
#include "exreg/svg.hpp"

namespace exreg {

using nlohmann::json;

void ExperimentConfig::validate() const {
  grid.validate();
  sim_globals.validate();
  for (const auto& g : globals) g.validate();
  if (!seed) throw ConfigError("config key 'seed': a master seed is mandatory");
  if (observations < 2) throw ConfigError("config key 'observations': need at least 2");
  if (clusters < 1) throw ConfigError("config key 'clusters': need at least 1");
  if (replicates < 1) throw ConfigError("config key 'replicates': need at least 1");
  if (min_neighbors < 1) throw ConfigError("config key 'min_neighbors': need at least 1");
  if (epsilon < 0.0) throw ConfigError("config key 'epsilon': must be >= 0");
  if (smoothing_radius < 0.0) throw ConfigError("config key 'smoothing_radius': must be >= 0");
  if (pair_max_distance && !(*pair_max_distance > 0.0))
    throw ConfigError("config key 'pair_max_distance': must be > 0");
  if (!(sim_accuracy > 0.0 && sim_accuracy < 1.0))
    throw ConfigError("config key 'sim_accuracy': must lie in (0, 1)");
  if (task_workers < 1) throw ConfigError("config key 'task_workers': need at least 1");
  if (out_dir.empty()) throw ConfigError("config key 'out': output directory is mandatory");
}

std::map<std::string, std::string> ExperimentConfig::as_map() const {
  std::map<std::string, std::string> kv;
  kv["preset"] = preset_name(preset);
  kv["xmin"] = format_double(grid.xmin);
  kv["xmax"] = format_double(grid.xmax);
  kv["ymin"] = format_double(grid.ymin);
  kv["ymax"] = format_double(grid.ymax);
  kv["resolution"] = format_double(grid.resolution);
  if (overrides.a) kv["const_a"] = format_double(*overrides.a);
  if (overrides.b) kv["const_b"] = format_double(*overrides.b);
  if (overrides.gamma) kv["const_gamma"] = format_double(*overrides.gamma);
  kv["matrix_form"] = form == MatrixForm::standard ? "standard" : "rotation";
  kv["observations"] = std::to_string(observations);
  kv["clusters"] = std::to_string(clusters);
  kv["sim_nu"] = format_double(sim_globals.nu);
  kv["sim_alpha"] = format_double(sim_globals.alpha);
  std::string gl;
  for (const auto& g : globals) {
    if (!gl.empty()) gl += ",";
    gl += format_double(g.nu) + ":" + format_double(g.alpha);
  }
  kv["globals"] = gl;
  kv["replicates"] = std::to_string(replicates);
  if (seed) kv["seed"] = std::to_string(*seed);
  kv["epsilon"] = epsilon > 0.0 ? format_double(epsilon) : "auto";
  kv["min_neighbors"] = std::to_string(min_neighbors);
  kv["smoothing_radius"] = smoothing_radius > 0.0 ? format_double(smoothing_radius) : "auto";
  kv["linkage"] = std::string(linkage_name(linkage));
  kv["pair_max_distance"] = pair_max_distance ? format_double(*pair_max_distance) : "auto";
  kv["sim_algorithm"] = spectral_approx ? "spectral" : "exact";
  kv["sim_accuracy"] = format_double(sim_accuracy);
  kv["out"] = out_dir.string();
  kv["threads"] = std::to_string(threads);
  kv["task_workers"] = std::to_string(task_workers);
  kv["emit_svg"] = emit_svg ? "true" : "false";
  return kv;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
  return parse_config_text(read_text_file(path));
}

namespace {

double config_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad numeric value '" + value + "'");
  }
}

long config_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad integer value '" + value + "'");
  }
}

std::vector<GlobalParams> parse_globals_list(const std::string& value) {
  std::vector<GlobalParams> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    const std::string pair = item.substr(b, e - b + 1);
    const auto colon = pair.find(':');
    if (colon == std::string::npos)
      throw ConfigError("config key 'globals': expected nu:alpha, got '" + pair + "'");
    GlobalParams g;
    g.nu = config_double("globals", pair.substr(0, colon));
    g.alpha = config_double("globals", pair.substr(colon + 1));
    out.push_back(g);
  }
  return out;
}

}  // namespace

ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : kv) {
    try {
      if (key == "preset") cfg.preset = parse_preset(value);
      else if (key == "xmin") cfg.grid.xmin = config_double(key, value);
      else if (key == "xmax") cfg.grid.xmax = config_double(key, value);
      else if (key == "ymin") cfg.grid.ymin = config_double(key, value);
      else if (key == "ymax") cfg.grid.ymax = config_double(key, value);
      else if (key == "resolution") cfg.grid.resolution = config_double(key, value);
      else if (key == "const_a") cfg.overrides.a = config_double(key, value);
      else if (key == "const_b") cfg.overrides.b = config_double(key, value);
      else if (key == "const_gamma") cfg.overrides.gamma = config_double(key, value);
      else if (key == "matrix_form") {
        if (value == "standard") cfg.form = MatrixForm::standard;
        else if (value == "rotation") cfg.form = MatrixForm::rotation;
        else throw ConfigError("config key 'matrix_form': expected standard|rotation");
      }
      else if (key == "observations") cfg.observations = config_long(key, value);
      else if (key == "clusters") cfg.clusters = static_cast<int>(config_long(key, value));
      else if (key == "sim_nu") cfg.sim_globals.nu = config_double(key, value);
      else if (key == "sim_alpha") cfg.sim_globals.alpha = config_double(key, value);
      else if (key == "globals") cfg.globals = parse_globals_list(value);
      else if (key == "replicates") cfg.replicates = static_cast<int>(config_long(key, value));
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(config_long(key, value));
      else if (key == "epsilon") cfg.epsilon = value == "auto" ? 0.0 : config_double(key, value);
      else if (key == "min_neighbors") cfg.min_neighbors = static_cast<int>(config_long(key, value));
      else if (key == "smoothing_radius")
        cfg.smoothing_radius = value == "auto" ? 0.0 : config_double(key, value);
      else if (key == "linkage") cfg.linkage = parse_linkage(value);
      else if (key == "pair_max_distance") {
        if (value == "auto") cfg.pair_max_distance.reset();
        else cfg.pair_max_distance = config_double(key, value);
      }
      else if (key == "sim_algorithm") {
        if (value == "exact") cfg.spectral_approx = false;
        else if (value == "spectral") cfg.spectral_approx = true;
        else throw ConfigError("config key 'sim_algorithm': expected exact|spectral");
      }
      else if (key == "sim_accuracy") cfg.sim_accuracy = config_double(key, value);
      else if (key == "out") cfg.out_dir = value;
      else if (key == "threads") cfg.threads = static_cast<int>(config_long(key, value));
      else if (key == "task_workers") cfg.task_workers = static_cast<int>(config_long(key, value));
      else if (key == "emit_svg") {
        if (value == "true") cfg.emit_svg = true;
        else if (value == "false") cfg.emit_svg = false;
        else throw ConfigError("config key 'emit_svg': expected true|false");
      }
      else throw ConfigError("config: unknown key '" + key + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
  if (cfg.globals.empty()) cfg.globals = {cfg.sim_globals};
  cfg.validate();
  return cfg;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::optional<FitResult>> fit_local_field(const ObservationSet& obs,
                                                      const AnalysisSettings& s, double epsilon) {
  const long n = obs.size();
  std::vector<std::optional<FitResult>> fits(n);
  LocalFitConfig lf;
  lf.epsilon = epsilon;
  lf.min_neighbors = s.min_neighbors;
  lf.fit.form = s.form;
  parallel_for(n, s.threads > 0 ? s.threads : default_threads(), [&](long i) {
    try {
      fits[i] = fit_local_anisotropy(static_cast<int>(i), s.globals, obs, lf);
    } catch (const FitFailureError&) {
      fits[i] = std::nullopt;  // treated as an excluded location
    }
  });
  return fits;
}

LocalEstimateField to_estimate_field(const std::vector<std::optional<FitResult>>& fits) {
  LocalEstimateField field;
  field.params.reserve(fits.size());
  for (const auto& f : fits)
    field.params.push_back(f ? std::optional<AnisotropyParams>(f->params) : std::nullopt);
  return field;
}

Clustering cluster_edc(const ThetaMatrix& theta, const std::vector<int>& included, int clusters,
                       Linkage linkage) {
  const long k = static_cast<long>(included.size());
  Eigen::MatrixXd sub(k, k);
  for (long i = 0; i < k; ++i)
    for (long j = 0; j < k; ++j) sub(i, j) = theta.theta(included[i], included[j]) - 1.0;
  sub.diagonal().setZero();
  const std::vector<int> labels = agglomerative_cluster(sub, clusters, linkage);
  return clustering_from_labels(static_cast<int>(theta.theta.rows()), included, labels, clusters);
}

std::map<int, FitResult> fit_clusters(const ObservationSet& obs, const Clustering& clustering,
                                      const AnalysisSettings& s) {
  std::map<int, FitResult> fits;
  std::mutex mutex;
  FitOptions options;
  options.form = s.form;
  parallel_for(clustering.k, s.threads > 0 ? s.threads : default_threads(), [&](long lbl) {
    const int label = static_cast<int>(lbl) + 1;
    const std::vector<int> members = clustering.members_of(label);
    if (members.size() < 2) return;  // singletons only ever feed skipped intersections
    const double threshold = s.pair_max_distance ? *s.pair_max_distance
                                                 : default_pair_threshold(obs.locations, members);
    const PairSelection pairs = PairSelection::among(obs.locations, members, threshold);
    if (pairs.pairs.empty()) return;
    const FitResult fit = fit_cluster_mle(s.globals, obs, members, pairs, {}, options);
    std::lock_guard<std::mutex> lock(mutex);
    fits.emplace(label, fit);
  });
  return fits;
}

ReplicateAnalysis analyze_replicate(const ObservationSet& obs, const ThetaMatrix& theta,
                                    const AnalysisSettings& s) {
  ReplicateAnalysis out;
  out.epsilon = s.epsilon > 0.0 ? s.epsilon : 2.5 * median_nn_distance(obs.locations);
  out.smoothing_radius = s.smoothing_radius > 0.0 ? s.smoothing_radius : 1.5 * out.epsilon;

  out.local_fits = fit_local_field(obs, s, out.epsilon);
  out.local_smooth = smooth_estimates(to_estimate_field(out.local_fits), obs.locations,
                                      out.smoothing_radius);
  out.d2 = lec_dissimilarity(out.local_smooth, s.threads, s.form);
  out.lec = clustering_from_labels(static_cast<int>(obs.size()), out.d2.ids,
                                   agglomerative_cluster(out.d2.d, s.clusters, s.linkage),
                                   s.clusters);
  out.edc = cluster_edc(theta, out.d2.ids, s.clusters, s.linkage);
  out.edc_fits = fit_clusters(obs, out.edc, s);
  out.lec_fits = fit_clusters(obs, out.lec, s);
  out.gof = compare_gof(obs, s.globals, out.edc, out.edc_fits, out.lec, out.lec_fits,
                        s.pair_max_distance);
  return out;
}

namespace {

struct FileSink {
  std::filesystem::path root;
  std::vector<FileRecord>* records;
  std::mutex* mutex;

  void write(const std::string& rel, const std::string& content) const {
    const std::filesystem::path full = root / rel;
    std::filesystem::create_directories(full.parent_path());
    write_text_file(full, content);
    FileRecord rec;
    rec.path = rel;
    rec.bytes = content.size();
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(content)));
    rec.fnv64 = buf;
    std::lock_guard<std::mutex> lock(*mutex);
    records->push_back(rec);
  }
};

std::string globals_dir(const GlobalParams& g) {
  return "nu" + format_double(g.nu) + "_alpha" + format_double(g.alpha);
}

std::string rep_dir(int rep) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "rep%03d", rep);
  return buf;
}

std::string csv_from_matrix(const Eigen::MatrixXd& m, const std::vector<int>& ids) {
  std::string out = "id";
  for (const int id : ids) out += "," + std::to_string(id);
  out += '\n';
  for (long r = 0; r < m.rows(); ++r) {
    out += std::to_string(ids[r]);
    for (long c = 0; c < m.cols(); ++c) out += "," + format_double(m(r, c));
    out += '\n';
  }
  return out;
}

std::string csv_from_observations(const ObservationSet& obs) {
  std::string out;
  for (long c = 0; c < obs.size(); ++c) {
    if (c) out += ',';
    out += std::to_string(c);
  }
  out += '\n';
  for (long r = 0; r < obs.observations(); ++r) {
    for (long c = 0; c < obs.size(); ++c) {
      if (c) out += ',';
      out += format_double(obs.data(r, c));
    }
    out += '\n';
  }
  return out;
}

std::string csv_from_locations(const std::vector<Location>& locations) {
  std::string out = "id,x,y\n";
  for (std::size_t i = 0; i < locations.size(); ++i)
    out += std::to_string(i) + "," + format_double(locations[i].x) + "," +
           format_double(locations[i].y) + "\n";
  return out;
}

std::string csv_from_labels(const Clustering& c) {
  std::string out = "id,label\n";
  for (std::size_t i = 0; i < c.labels.size(); ++i)
    out += std::to_string(i) + "," + std::to_string(c.labels[i]) + "\n";
  return out;
}

std::string csv_from_values(const std::string& name, const std::vector<double>& values) {
  std::string out = "id," + name + "\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    out += std::to_string(i) + "," + format_double(values[i]) + "\n";
  return out;
}

json json_from_fit(const FitResult& fit) {
  return json{{"a", fit.params.a},
              {"b", fit.params.b},
              {"gamma", fit.params.gamma},
              {"nll", fit.nll},
              {"pairs_used", fit.pairs_used},
              {"converged", fit.converged},
              {"starts_tried", fit.starts_tried}};
}

json json_from_cluster_fits(const Clustering& clustering, const std::map<int, FitResult>& fits) {
  json arr = json::array();
  for (int label = 1; label <= clustering.k; ++label) {
    json entry{{"label", label}, {"members", clustering.members_of(label)}};
    const auto it = fits.find(label);
    if (it != fits.end()) entry["fit"] = json_from_fit(it->second);
    arr.push_back(std::move(entry));
  }
  return arr;
}

json json_from_gof(const GofReport& gof) {
  json inter = json::array();
  for (const auto& r : gof.intersections) {
    json entry{{"sigma", r.sets.sigma_label},
               {"tau", r.sets.tau_label},
               {"members", r.sets.members},
               {"winner", std::string(winner_name(r.winner))}};
    if (r.winner != Winner::skipped) {
      entry["ll_edc"] = r.ll_sigma;
      entry["ll_lec"] = r.ll_tau;
    }
    inter.push_back(std::move(entry));
  }
  json winners = json::array();
  for (const Winner w : gof.winner_by_location) winners.push_back(std::string(winner_name(w)));
  return json{{"tie_tolerance", kTieTolerance},
              {"intersections", std::move(inter)},
              {"winner_by_location", std::move(winners)}};
}

const char* interest_param(FieldPreset preset) {
  switch (preset) {
    case FieldPreset::example2: return "gamma";
    case FieldPreset::example3: return "a";
    default: return "b";
  }
}

double param_component(const AnisotropyParams& p, const std::string& name) {
  if (name == "a") return p.a;
  if (name == "b") return p.b;
  return p.gamma;
}

class StageTimer {
 public:
  explicit StageTimer(std::map<std::string, double>& sink) : sink_(sink) {}
  template <typename Fn>
  void run(const std::string& name, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto end = std::chrono::steady_clock::now();
    sink_[name] += std::chrono::duration<double, std::milli>(end - start).count();
  }

 private:
  std::map<std::string, double>& sink_;
};

}  // namespace

RunManifest run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  RunManifest manifest;
  manifest.version = kVersion;
  manifest.config = cfg.as_map();

  std::filesystem::create_directories(cfg.out_dir);
  std::mutex record_mutex;
  FileSink sink{cfg.out_dir, &manifest.files, &record_mutex};
  StageTimer timer(manifest.stage_ms);
  const int threads = cfg.threads > 0 ? cfg.threads : default_threads();

  ParameterField field = build_parameter_field(cfg.preset, cfg.grid, cfg.sim_globals,
                                               cfg.overrides);
  field.form = cfg.form;
  const long n = static_cast<long>(field.locations.size());
  const std::vector<int> all_ids = [&] {
    std::vector<int> ids(n);
    for (long i = 0; i < n; ++i) ids[i] = static_cast<int>(i);
    return ids;
  }();

  timer.run("setup", [&] {
    sink.write("locations.csv", csv_from_locations(field.locations));
    for (const std::string name : {"a", "b", "gamma"}) {
      std::vector<double> values(n);
      for (long i = 0; i < n; ++i) values[i] = param_component(field.params[i], name);
      sink.write("true_" + name + ".csv", csv_from_values(name, values));
      if (cfg.emit_svg) {
        HeatmapOptions opt;
        opt.title = "true " + name;
        sink.write("true_" + name + ".svg", render_heatmap_svg(field.locations, values, opt));
      }
    }
  });

  // Reference figures from the exact model: theta maps around four probe
  // points and the clustering of the exact extremal coefficients.
  try {
    timer.run("exact_theta", [&] {
      const ExtremalT model(cfg.sim_globals);
      std::vector<AnisotropyMatrix> mats(n);
      for (long i = 0; i < n; ++i) mats[i] = build_matrix(field.params[i], field.form);
      auto theta_of = [&](long i, long j) {
        if (i == j) return 1.0;
        const double rho = corr_nonstationary(mats[i], mats[j], cfg.sim_globals.alpha,
                                              field.locations[i], field.locations[j]);
        return model.theta(std::min(rho, 1.0));
      };
      const Location probes[4] = {{-3.0, 2.0}, {3.0, 2.0}, {-3.0, -2.0}, {3.0, -2.0}};
      for (int p = 0; p < 4; ++p) {
        long nearest = 0;
        for (long i = 1; i < n; ++i)
          if (distance(field.locations[i], probes[p]) <
              distance(field.locations[nearest], probes[p]))
            nearest = i;
        std::vector<double> values(n);
        for (long i = 0; i < n; ++i) values[i] = theta_of(nearest, i);
        const std::string stem = "exact_theta_ref" + std::to_string(p);
        sink.write(stem + ".csv", csv_from_values("theta", values));
        if (cfg.emit_svg) {
          HeatmapOptions opt;
          opt.title = "theta around (" + format_double(field.locations[nearest].x) + "," +
                      format_double(field.locations[nearest].y) + ")";
          sink.write(stem + ".svg", render_heatmap_svg(field.locations, values, opt));
        }
      }
      ThetaMatrix exact;
      exact.theta.resize(n, n);
      parallel_for(n, threads, [&](long i) {
        for (long j = i; j < n; ++j) {
          const double t = theta_of(i, j);
          exact.theta(i, j) = t;
          exact.theta(j, i) = t;
        }
      });
      const Clustering exact_edc = cluster_edc(exact, all_ids, cfg.clusters, cfg.linkage);
      sink.write("labels_exact_edc.csv", csv_from_labels(exact_edc));
      if (cfg.emit_svg) {
        std::vector<double> values(exact_edc.labels.begin(), exact_edc.labels.end());
        HeatmapOptions opt;
        opt.title = "EDC on exact theta";
        opt.boundaries = exact_edc;
        sink.write("labels_exact_edc.svg", render_heatmap_svg(field.locations, values, opt));
      }
    });
  } catch (const std::exception& e) {
    manifest.failures.push_back(std::string("exact_theta: ") + e.what());
  }

  // Simulation is shared across the (nu, alpha) sweep: one data set per
  // replicate, generated under the true parameters.
  std::vector<ObservationSet> observations(cfg.replicates);
  std::vector<ThetaMatrix> thetas(cfg.replicates);
  try {
    timer.run("simulate", [&] {
      const CovarianceFactor factor = factor_correlation(field, field.constant());
      SimulationOptions sim;
      sim.threads = threads;
      sim.spectral_approx = cfg.spectral_approx;
      sim.accuracy = cfg.sim_accuracy;
      for (int rep = 0; rep < cfg.replicates; ++rep) {
        const std::uint64_t rep_seed =
            substream_seed(*cfg.seed, Stream::replicate, static_cast<std::uint64_t>(rep));
        observations[rep] = max_stable_sample(field, factor, cfg.observations, rep_seed, sim);
        thetas[rep] = fmadogram_theta_matrix(observations[rep], threads);
        sink.write(rep_dir(rep) + "/observations.csv", csv_from_observations(observations[rep]));
        sink.write(rep_dir(rep) + "/theta.csv", csv_from_matrix(thetas[rep].theta, all_ids));
        sink.write(rep_dir(rep) + "/d1.csv",
                   csv_from_matrix(edc_dissimilarity(thetas[rep]), all_ids));
      }
    });
  } catch (const std::exception& e) {
    manifest.failures.push_back(std::string("simulate: ") + e.what());
    const json partial{{"version", manifest.version},
                       {"config", manifest.config},
                       {"failures", manifest.failures}};
    write_text_file(cfg.out_dir / "manifest.json", partial.dump(2) + "\n");
    return manifest;
  }

  // (replicate x globals) analysis tasks through a bounded worker pool.
  struct Task {
    int rep;
    std::size_t g;
  };
  std::vector<Task> tasks;
  for (int rep = 0; rep < cfg.replicates; ++rep)
    for (std::size_t g = 0; g < cfg.globals.size(); ++g) tasks.push_back({rep, g});

  std::vector<std::vector<GofReport>> reports(cfg.globals.size());
  for (auto& r : reports) r.resize(cfg.replicates);
  std::vector<std::vector<bool>> report_ok(cfg.globals.size(),
                                           std::vector<bool>(cfg.replicates, false));
  std::mutex failure_mutex;

  const int stage_threads = std::max(1, threads / cfg.task_workers);
  const auto analyze_start = std::chrono::steady_clock::now();
  parallel_for(static_cast<long>(tasks.size()), cfg.task_workers, [&](long t) {
    const Task task = tasks[t];
    const GlobalParams g = cfg.globals[task.g];
    const std::string dir = rep_dir(task.rep) + "/" + globals_dir(g);
    try {
      AnalysisSettings s;
      s.globals = g;
      s.clusters = cfg.clusters;
      s.epsilon = cfg.epsilon;
      s.min_neighbors = cfg.min_neighbors;
      s.smoothing_radius = cfg.smoothing_radius;
      s.linkage = cfg.linkage;
      s.pair_max_distance = cfg.pair_max_distance;
      s.form = cfg.form;
      s.threads = stage_threads;
      const ReplicateAnalysis res = analyze_replicate(observations[task.rep], thetas[task.rep], s);

      json local{{"epsilon", res.epsilon},
                 {"smoothing_radius", res.smoothing_radius},
                 {"locations", json::array()}};
      for (std::size_t i = 0; i < res.local_fits.size(); ++i) {
        json entry{{"id", i}};
        if (res.local_fits[i]) {
          entry["fit"] = json_from_fit(*res.local_fits[i]);
          if (res.local_smooth.params[i]) {
            entry["smoothed"] = json{{"a", res.local_smooth.params[i]->a},
                                     {"b", res.local_smooth.params[i]->b},
                                     {"gamma", res.local_smooth.params[i]->gamma}};
          }
        } else {
          entry["excluded"] = true;
        }
        local["locations"].push_back(std::move(entry));
      }
      sink.write(dir + "/local_fits.json", local.dump(2) + "\n");
      sink.write(dir + "/d2.csv", csv_from_matrix(res.d2.d, res.d2.ids));
      sink.write(dir + "/labels_edc.csv", csv_from_labels(res.edc));
      sink.write(dir + "/labels_lec.csv", csv_from_labels(res.lec));
      sink.write(dir + "/fits_edc.json",
                 json_from_cluster_fits(res.edc, res.edc_fits).dump(2) + "\n");
      sink.write(dir + "/fits_lec.json",
                 json_from_cluster_fits(res.lec, res.lec_fits).dump(2) + "\n");
      sink.write(dir + "/gof.json", json_from_gof(res.gof).dump(2) + "\n");

      std::string winners = "id,winner\n";
      for (std::size_t i = 0; i < res.gof.winner_by_location.size(); ++i)
        winners += std::to_string(i) + "," +
                   std::string(winner_name(res.gof.winner_by_location[i])) + "\n";
      sink.write(dir + "/winners.csv", winners);

      if (cfg.emit_svg) {
        const std::string pname = interest_param(cfg.preset);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        auto emit_cluster_map = [&](const char* tag, const Clustering& clustering,
                                    const std::map<int, FitResult>& fits) {
          std::vector<double> values(clustering.labels.size(), nan);
          for (std::size_t i = 0; i < values.size(); ++i) {
            const int label = clustering.labels[i];
            const auto it = label > 0 ? fits.find(label) : fits.end();
            if (it != fits.end()) values[i] = param_component(it->second.params, pname);
          }
          HeatmapOptions opt;
          opt.title = std::string(tag) + " clusters, fitted " + pname;
          opt.boundaries = clustering;
          sink.write(dir + "/clusters_" + tag + ".svg",
                     render_heatmap_svg(observations[task.rep].locations, values, opt));
        };
        emit_cluster_map("edc", res.edc, res.edc_fits);
        emit_cluster_map("lec", res.lec, res.lec_fits);
        std::vector<double> wvals(res.gof.winner_by_location.size(), nan);
        for (std::size_t i = 0; i < wvals.size(); ++i) {
          switch (res.gof.winner_by_location[i]) {
            case Winner::edc: wvals[i] = 0.0; break;
            case Winner::tie: wvals[i] = 0.5; break;
            case Winner::lec: wvals[i] = 1.0; break;
            case Winner::skipped: break;
          }
        }
        HeatmapOptions opt;
        opt.title = "winner map (0 = EDC, 1 = LEC)";
        opt.boundaries = res.lec;
        sink.write(dir + "/winner_map.svg",
                   render_heatmap_svg(observations[task.rep].locations, wvals, opt));
      }

      reports[task.g][task.rep] = res.gof;
      report_ok[task.g][task.rep] = true;
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      manifest.failures.push_back(dir + ": " + e.what());
    }
  });
  manifest.stage_ms["analyze"] +=
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - analyze_start)
          .count();

  timer.run("aggregate", [&] {
    for (std::size_t g = 0; g < cfg.globals.size(); ++g) {
      std::vector<GofReport> ok;
      for (int rep = 0; rep < cfg.replicates; ++rep)
        if (report_ok[g][rep]) ok.push_back(reports[g][rep]);
      if (ok.empty()) continue;
      const WinnerAggregate agg = aggregate_winner_percentages(ok);
      const std::string dir = "agg/" + globals_dir(cfg.globals[g]);
      std::string csv = "id,lec_fraction,tie_fraction,counted\n";
      for (std::size_t i = 0; i < agg.lec_fraction.size(); ++i)
        csv += std::to_string(i) + "," + format_double(agg.lec_fraction[i]) + "," +
               format_double(agg.tie_fraction[i]) + "," + std::to_string(agg.counted[i]) + "\n";
      sink.write(dir + "/winner_aggregate.csv", csv);
      if (cfg.emit_svg) {
        std::vector<double> values(agg.lec_fraction.size());
        for (std::size_t i = 0; i < values.size(); ++i)
          values[i] = agg.counted[i] > 0 ? agg.lec_fraction[i]
                                         : std::numeric_limits<double>::quiet_NaN();
        HeatmapOptions opt;
        opt.title = "LEC win fraction over " + std::to_string(agg.replicates) + " replicates";
        sink.write(dir + "/lec_fraction.svg",
                   render_heatmap_svg(field.locations, values, opt));
      }
    }
  });

  std::sort(manifest.files.begin(), manifest.files.end(),
            [](const FileRecord& a, const FileRecord& b) { return a.path < b.path; });

  json mj{{"version", manifest.version},
          {"config", manifest.config},
          {"failures", manifest.failures},
          {"stage_ms", manifest.stage_ms}};
  json files = json::array();
  for (const auto& f : manifest.files)
    files.push_back(json{{"path", f.path}, {"bytes", f.bytes}, {"fnv64", f.fnv64}});
  mj["files"] = std::move(files);
  write_text_file(cfg.out_dir / "manifest.json", mj.dump(2) + "\n");
  return manifest;
}

}  // namespace exreg
