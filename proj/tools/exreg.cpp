// Command-line front end: simulate, transform, regionalize, fit, gof,
// experiment, render.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "exreg/csv.hpp"
#include "exreg/experiment.hpp"
#include "exreg/model.hpp"
#include "exreg/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace exreg;

namespace {

struct GridFlags {
  double xmin = -5.0, xmax = 5.0, ymin = -5.0, ymax = 5.0, resolution = 0.5;
  void add(CLI::App* app) {
    app->add_option("--xmin", xmin);
    app->add_option("--xmax", xmax);
    app->add_option("--ymin", ymin);
    app->add_option("--ymax", ymax);
    app->add_option("--resolution", resolution, "grid spacing");
  }
  GridSpec spec() const { return GridSpec{xmin, xmax, ymin, ymax, resolution}; }
};

std::map<int, FitResult> read_fits_json(const fs::path& path) {
  const json j = json::parse(read_text_file(path));
  std::map<int, FitResult> fits;
  for (const auto& entry : j) {
    if (!entry.contains("fit")) continue;
    const json& f = entry["fit"];
    FitResult fit;
    fit.params = AnisotropyParams{f["a"], f["b"], f["gamma"]};
    fit.nll = f["nll"];
    fit.pairs_used = f["pairs_used"];
    fit.converged = f["converged"];
    fit.starts_tried = f["starts_tried"];
    fits.emplace(entry["label"].get<int>(), fit);
  }
  return fits;
}

json fit_to_json(int label, const std::vector<int>& members, const FitResult& fit) {
  return json{{"label", label},
              {"members", members},
              {"fit",
               {{"a", fit.params.a},
                {"b", fit.params.b},
                {"gamma", fit.params.gamma},
                {"nll", fit.nll},
                {"pairs_used", fit.pairs_used},
                {"converged", fit.converged},
                {"starts_tried", fit.starts_tried}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exreg: regionalization toolkit for spatial extremal dependence"};
  app.require_subcommand(1);

  // ---- simulate ----------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "simulate max-stable fields on a grid");
  std::string sim_preset = "example1";
  GridFlags sim_grid;
  long sim_m = 100;
  double sim_nu = 5.0, sim_alpha = 1.0;
  std::uint64_t sim_seed = 0;
  bool sim_seed_set = false;
  std::string sim_out = "out";
  std::string sim_algorithm = "exact";
  double sim_accuracy = 1e-3;
  std::optional<double> sim_a, sim_b, sim_gamma;
  sim->add_option("--preset", sim_preset, "example1|example2|example3|constant");
  sim_grid.add(sim);
  sim->add_option("--observations,-m", sim_m, "independent fields");
  sim->add_option("--nu", sim_nu);
  sim->add_option("--alpha", sim_alpha);
  sim->add_option("--seed", sim_seed)->required()->each([&](const std::string&) { sim_seed_set = true; });
  sim->add_option("--out", sim_out, "output directory");
  sim->add_option("--algorithm", sim_algorithm, "exact|spectral");
  sim->add_option("--accuracy", sim_accuracy, "spectral truncation accuracy");
  sim->add_option("--const-a", sim_a);
  sim->add_option("--const-b", sim_b);
  sim->add_option("--const-gamma", sim_gamma);

  // ---- transform ---------------------------------------------------------
  auto* tr = app.add_subcommand("transform", "rank-transform observations to unit Frechet");
  std::string tr_obs, tr_loc, tr_out;
  tr->add_option("--observations", tr_obs)->required();
  tr->add_option("--locations", tr_loc)->required();
  tr->add_option("--out", tr_out, "output observations CSV")->required();

  // ---- regionalize -------------------------------------------------------
  auto* rg = app.add_subcommand("regionalize", "cluster locations by EDC and/or LEC");
  std::string rg_obs, rg_loc, rg_out = "out", rg_algorithm = "both", rg_linkage = "average";
  int rg_k = 5;
  double rg_nu = 5.0, rg_alpha = 1.0, rg_epsilon = 0.0, rg_radius = 0.0;
  int rg_min_neighbors = 4;
  std::optional<double> rg_pair_threshold;
  rg->add_option("--observations", rg_obs)->required();
  rg->add_option("--locations", rg_loc)->required();
  rg->add_option("--out", rg_out, "output directory");
  rg->add_option("--algorithm", rg_algorithm, "edc|lec|both");
  rg->add_option("--clusters,-k", rg_k);
  rg->add_option("--nu", rg_nu);
  rg->add_option("--alpha", rg_alpha);
  rg->add_option("--epsilon", rg_epsilon, "local-fit radius (0 = auto)");
  rg->add_option("--smoothing-radius", rg_radius, "0 = auto");
  rg->add_option("--min-neighbors", rg_min_neighbors);
  rg->add_option("--linkage", rg_linkage, "average|single|complete");
  rg->add_option("--pair-max-distance", rg_pair_threshold);

  // ---- fit ---------------------------------------------------------------
  auto* ft = app.add_subcommand("fit", "fit a stationary model per cluster");
  std::string ft_obs, ft_loc, ft_labels, ft_out = "fits.json";
  double ft_nu = 5.0, ft_alpha = 1.0;
  std::optional<double> ft_pair_threshold;
  ft->add_option("--observations", ft_obs)->required();
  ft->add_option("--locations", ft_loc)->required();
  ft->add_option("--labels", ft_labels)->required();
  ft->add_option("--out", ft_out);
  ft->add_option("--nu", ft_nu);
  ft->add_option("--alpha", ft_alpha);
  ft->add_option("--pair-max-distance", ft_pair_threshold);

  // ---- gof ---------------------------------------------------------------
  auto* gf = app.add_subcommand("gof", "compare two regionalizations on cluster intersections");
  std::string gf_obs, gf_loc, gf_labels_edc, gf_labels_lec, gf_fits_edc, gf_fits_lec,
      gf_out = "out";
  double gf_nu = 5.0, gf_alpha = 1.0;
  std::optional<double> gf_pair_threshold;
  gf->add_option("--observations", gf_obs)->required();
  gf->add_option("--locations", gf_loc)->required();
  gf->add_option("--labels-edc", gf_labels_edc)->required();
  gf->add_option("--labels-lec", gf_labels_lec)->required();
  gf->add_option("--fits-edc", gf_fits_edc)->required();
  gf->add_option("--fits-lec", gf_fits_lec)->required();
  gf->add_option("--out", gf_out, "output directory");
  gf->add_option("--nu", gf_nu);
  gf->add_option("--alpha", gf_alpha);
  gf->add_option("--pair-max-distance", gf_pair_threshold);

  // ---- experiment --------------------------------------------------------
  auto* ex = app.add_subcommand("experiment", "run the full simulation study pipeline");
  std::string ex_config;
  std::map<std::string, std::string> ex_overrides;
  std::optional<std::uint64_t> ex_seed;
  std::optional<std::string> ex_out, ex_preset;
  std::optional<double> ex_nu, ex_alpha, ex_resolution;
  std::optional<int> ex_clusters, ex_replicates;
  std::optional<long> ex_observations;
  ex->add_option("--config", ex_config, "key = value configuration file");
  ex->add_option("--seed", ex_seed);
  ex->add_option("--out", ex_out);
  ex->add_option("--preset", ex_preset);
  ex->add_option("--nu", ex_nu, "single analysis nu (overrides the globals list)");
  ex->add_option("--alpha", ex_alpha);
  ex->add_option("--clusters,-k", ex_clusters);
  ex->add_option("--replicates", ex_replicates);
  ex->add_option("--resolution", ex_resolution);
  ex->add_option("--observations,-m", ex_observations);

  // ---- render ------------------------------------------------------------
  auto* rd = app.add_subcommand("render", "render a per-location value CSV as an SVG heatmap");
  std::string rd_values, rd_loc, rd_out, rd_title;
  std::string rd_labels;
  rd->add_option("--values", rd_values)->required();
  rd->add_option("--locations", rd_loc)->required();
  rd->add_option("--out", rd_out)->required();
  rd->add_option("--title", rd_title);
  rd->add_option("--labels", rd_labels, "labels CSV for cluster boundaries");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      (void)sim_seed_set;
      FieldOverrides ov;
      ov.a = sim_a;
      ov.b = sim_b;
      ov.gamma = sim_gamma;
      const ParameterField field =
          build_parameter_field(parse_preset(sim_preset), sim_grid.spec(),
                                GlobalParams{sim_nu, sim_alpha}, ov);
      SimulationOptions opt;
      if (sim_algorithm == "spectral")
        opt.spectral_approx = true;
      else if (sim_algorithm != "exact")
        throw std::invalid_argument("--algorithm must be exact|spectral");
      opt.accuracy = sim_accuracy;
      const ObservationSet obs =
          max_stable_sample(field, field.constant(), sim_m, sim_seed, opt);
      fs::create_directories(sim_out);
      write_locations_csv(fs::path(sim_out) / "locations.csv", field.locations);
      write_observations_csv(fs::path(sim_out) / "observations.csv", obs);
      std::cout << "wrote " << sim_m << " observations on " << obs.size() << " locations to "
                << sim_out << "\n";
    } else if (tr->parsed()) {
      const auto locations = read_locations_csv(tr_loc);
      const ObservationSet raw = read_observations_csv(tr_obs, locations, Margins::raw);
      write_observations_csv(tr_out, rank_frechet_transform(raw));
      std::cout << "wrote " << tr_out << "\n";
    } else if (rg->parsed()) {
      const auto locations = read_locations_csv(rg_loc);
      const ObservationSet obs =
          read_observations_csv(rg_obs, locations, Margins::unit_frechet);
      fs::create_directories(rg_out);
      AnalysisSettings s;
      s.globals = GlobalParams{rg_nu, rg_alpha};
      s.clusters = rg_k;
      s.epsilon = rg_epsilon;
      s.min_neighbors = rg_min_neighbors;
      s.smoothing_radius = rg_radius;
      s.linkage = parse_linkage(rg_linkage);
      s.pair_max_distance = rg_pair_threshold;
      const bool want_edc = rg_algorithm == "edc" || rg_algorithm == "both";
      const bool want_lec = rg_algorithm == "lec" || rg_algorithm == "both";
      if (!want_edc && !want_lec)
        throw std::invalid_argument("--algorithm must be edc|lec|both");
      std::vector<int> included(locations.size());
      for (std::size_t i = 0; i < included.size(); ++i) included[i] = static_cast<int>(i);
      ThetaMatrix theta;
      if (want_edc || want_lec) theta = fmadogram_theta_matrix(obs);
      if (want_edc) {
        write_square_matrix_csv(fs::path(rg_out) / "theta.csv", theta.theta, included);
        write_square_matrix_csv(fs::path(rg_out) / "d1.csv", edc_dissimilarity(theta), included);
      }
      if (want_lec) {
        const double eps = s.epsilon > 0.0 ? s.epsilon : 2.5 * median_nn_distance(locations);
        const auto local = fit_local_field(obs, s, eps);
        const double radius = s.smoothing_radius > 0.0 ? s.smoothing_radius : 1.5 * eps;
        const LocalEstimateField smooth =
            smooth_estimates(to_estimate_field(local), locations, radius);
        const SubsetDissimilarity d2 = lec_dissimilarity(smooth, s.threads, s.form);
        write_square_matrix_csv(fs::path(rg_out) / "d2.csv", d2.d, d2.ids);
        const Clustering lec = clustering_from_labels(
            static_cast<int>(locations.size()), d2.ids,
            agglomerative_cluster(d2.d, s.clusters, s.linkage), s.clusters);
        write_labels_csv(fs::path(rg_out) / "labels_lec.csv", lec);
        included = d2.ids;
      }
      if (want_edc) {
        const Clustering edc = cluster_edc(theta, included, s.clusters, s.linkage);
        write_labels_csv(fs::path(rg_out) / "labels_edc.csv", edc);
      }
      std::cout << "wrote regionalization outputs to " << rg_out << "\n";
    } else if (ft->parsed()) {
      const auto locations = read_locations_csv(ft_loc);
      const ObservationSet obs =
          read_observations_csv(ft_obs, locations, Margins::unit_frechet);
      const Clustering clustering = read_labels_csv(ft_labels);
      AnalysisSettings s;
      s.globals = GlobalParams{ft_nu, ft_alpha};
      s.pair_max_distance = ft_pair_threshold;
      const std::map<int, FitResult> fits = fit_clusters(obs, clustering, s);
      json arr = json::array();
      for (int label = 1; label <= clustering.k; ++label) {
        const auto it = fits.find(label);
        if (it == fits.end()) {
          arr.push_back(json{{"label", label}, {"members", clustering.members_of(label)}});
        } else {
          arr.push_back(fit_to_json(label, clustering.members_of(label), it->second));
        }
      }
      write_text_file(ft_out, arr.dump(2) + "\n");
      std::cout << "wrote " << ft_out << "\n";
    } else if (gf->parsed()) {
      const auto locations = read_locations_csv(gf_loc);
      const ObservationSet obs =
          read_observations_csv(gf_obs, locations, Margins::unit_frechet);
      const Clustering edc = read_labels_csv(gf_labels_edc);
      const Clustering lec = read_labels_csv(gf_labels_lec);
      const auto fits_edc = read_fits_json(gf_fits_edc);
      const auto fits_lec = read_fits_json(gf_fits_lec);
      const GofReport report = compare_gof(obs, GlobalParams{gf_nu, gf_alpha}, edc, fits_edc,
                                           lec, fits_lec, gf_pair_threshold);
      fs::create_directories(gf_out);
      json inter = json::array();
      for (const auto& r : report.intersections) {
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
      write_text_file(fs::path(gf_out) / "gof.json",
                      json{{"intersections", inter}}.dump(2) + "\n");
      std::string winners = "id,winner\n";
      for (std::size_t i = 0; i < report.winner_by_location.size(); ++i)
        winners += std::to_string(i) + "," +
                   std::string(winner_name(report.winner_by_location[i])) + "\n";
      write_text_file(fs::path(gf_out) / "winners.csv", winners);
      std::cout << "wrote gof outputs to " << gf_out << "\n";
    } else if (ex->parsed()) {
      std::map<std::string, std::string> kv;
      if (!ex_config.empty()) kv = parse_config_file(ex_config);
      if (ex_seed) kv["seed"] = std::to_string(*ex_seed);
      if (ex_out) kv["out"] = *ex_out;
      if (ex_preset) kv["preset"] = *ex_preset;
      if (ex_resolution) kv["resolution"] = format_double(*ex_resolution);
      if (ex_clusters) kv["clusters"] = std::to_string(*ex_clusters);
      if (ex_replicates) kv["replicates"] = std::to_string(*ex_replicates);
      if (ex_observations) kv["observations"] = std::to_string(*ex_observations);
      if (ex_nu || ex_alpha) {
        GlobalParams g;
        g.nu = ex_nu.value_or(5.0);
        g.alpha = ex_alpha.value_or(1.0);
        kv["globals"] = format_double(g.nu) + ":" + format_double(g.alpha);
      }
      const ExperimentConfig cfg = config_from_map(kv);
      const RunManifest manifest = run_experiment(cfg);
      std::cout << "experiment finished: " << manifest.files.size() << " files in "
                << cfg.out_dir.string() << "\n";
      if (!manifest.failures.empty()) {
        std::cerr << manifest.failures.size() << " stage failure(s), see manifest.json\n";
        return 1;
      }
    } else if (rd->parsed()) {
      const auto locations = read_locations_csv(rd_loc);
      const std::vector<double> values = read_values_csv(rd_values);
      HeatmapOptions opt;
      opt.title = rd_title;
      if (!rd_labels.empty()) opt.boundaries = read_labels_csv(rd_labels);
      write_text_file(rd_out, render_heatmap_svg(locations, values, opt));
      std::cout << "wrote " << rd_out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
