#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "rpcc/metrics.hpp"
#include "rpcc/path.hpp"

namespace rpcc::cli {

namespace fs = std::filesystem;

Staging::Staging(const fs::path& root, const std::string& command, const std::string& tag)
    : final_(root / command / tag), temp_(root / command / ("." + tag + ".partial")) {
  std::error_code ec;
  fs::remove_all(temp_, ec);
  fs::create_directories(temp_, ec);
  if (ec) throw IoError("cannot create " + temp_.string() + ": " + ec.message());
}

Staging::~Staging() {
  if (!committed_) {
    std::error_code ec;
    fs::remove_all(temp_, ec);
  }
}

void Staging::write(const std::string& name, const std::string& content) {
  std::ofstream out(temp_ / name, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw IoError("cannot write " + (temp_ / name).string());
  files_.push_back(name);
}

void Staging::write_json(const std::string& name, const json& doc) { write(name, doc.dump(2) + "\n"); }

fs::path Staging::commit(json manifest) {
  manifest["files"] = files_;
  write_json("manifest.json", manifest);
  std::error_code ec;
  fs::remove_all(final_, ec);
  fs::rename(temp_, final_, ec);
  if (ec) throw IoError("cannot move results to " + final_.string() + ": " + ec.message());
  committed_ = true;
  return final_;
}

namespace {

struct Instance {
  DataMatrix data;
  std::optional<Partition> truth;
};

Instance load_instance(const ExperimentConfig& cfg) {
  const auto& d = cfg.data;
  switch (d.kind) {
    case DataKind::Csv: {
      auto ld = load_csv(d.csv, d.csv_options);
      return {std::move(ld.data), std::move(ld.labels)};
    }
    case DataKind::Mixture: {
      auto [A, truth] = generate_mixture(d.mixture);
      return {std::move(A), std::move(truth)};
    }
    case DataKind::Unbalanced: {
      auto [A, truth] = unbalanced_fixture(d.unbalanced_d, d.large, d.small, d.unbalanced_seed);
      return {std::move(A), std::move(truth)};
    }
    case DataKind::Inline: {
      Instance inst{DataMatrix(d.points), std::nullopt};
      if (!d.labels.empty()) inst.truth = Partition::from_raw(d.labels);
      return inst;
    }
  }
  throw ParameterError("unknown data source");
}

const Partition& require_truth(const Instance& inst, const char* what) {
  if (!inst.truth) throw ValidationError(std::string("data: ") + what + " needs labelled data");
  return *inst.truth;
}

WeightGraph build_graph(const ExperimentConfig& cfg, const Instance& inst) {
  const auto& w = cfg.weights;
  const double phi = w.phi.value_or(1.0 / static_cast<double>(inst.data.d()));
  switch (w.mode) {
    case GraphMode::Knn:
      return knn_gaussian_weights(inst.data, w.k, phi);
    case GraphMode::Oracle:
      return oracle_experiment_graph(inst.data, require_truth(inst, "weights.mode oracle"), w.k, phi);
    case GraphMode::Uniform:
      return uniform_weights(inst.data.n());
    case GraphMode::Csv: {
      std::ifstream in(w.csv);
      if (!in) throw IoError("cannot read " + w.csv.string());
      std::stringstream ss;
      ss << in.rdbuf();
      return WeightGraph::from_csv(ss.str(), inst.data.n());
    }
  }
  throw ParameterError("unknown graph mode");
}

// JSON has no infinity; unbounded values are written as null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json interval_json(const GammaInterval& iv) {
  return {{"lo", number(iv.lo)}, {"hi", number(iv.hi)}, {"nonempty", iv.nonempty}};
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string labels_csv(const Partition& p) {
  std::string out;
  for (int l : p.labels()) out += std::to_string(l) + "\n";
  return out;
}

void require_converged(const ClusteringPath& path, const std::string& where) {
  for (const auto& p : path.points) {
    if (!p.success) {
      throw NumericFailure(where + ": solver did not converge at gamma " + fmt(p.gamma) + " (rel_gap " +
                           fmt(p.rel_gap) + ")");
    }
  }
}

std::string trial_name(Index m, int trial) { return "m" + std::to_string(m) + "_t" + std::to_string(trial); }

void cmd_gen(const ExperimentConfig& cfg, Staging& out) {
  const auto inst = load_instance(cfg);
  out.write("data.csv", format_csv(inst.data.values(), inst.truth ? &*inst.truth : nullptr));
  out.write_json("data.json", {{"n", inst.data.n()},
                               {"d", inst.data.d()},
                               {"labelled", inst.truth.has_value()},
                               {"K", inst.truth ? inst.truth->K() : 0}});
}

void cmd_weights(const ExperimentConfig& cfg, Staging& out) {
  const auto inst = load_instance(cfg);
  const auto g = build_graph(cfg, inst);
  out.write("weights.csv", g.to_csv());
  json report = {{"n", g.n()}, {"edges", g.num_edges()}};
  if (inst.truth) {
    const auto a = check_assumption2(g, *inst.truth);
    report["weight_condition"] = {{"holds", a.holds},
                                  {"margin", number(a.margin)},
                                  {"worst_cluster", a.worst_cluster},
                                  {"worst_pair", {a.worst_i + 1, a.worst_j + 1}},
                                  {"all_positive", a.all_positive}};
  }
  out.write_json("weights.json", report);
}

void cmd_project(const ExperimentConfig& cfg, Staging& out) {
  if (!cfg.projection.present) throw ValidationError("projection: block is required for project");
  const auto inst = load_instance(cfg);
  const int K = inst.truth ? inst.truth->K() : 1;
  json index = json::array();
  for (Index m : projection_dims(cfg.projection, inst.data.n(), K)) {
    for (int t = 0; t < cfg.projection.trials; ++t) {
      const auto pi = sample_projection(m, inst.data.d(), cfg.projection.family, projection_seed(cfg.projection, m, t));
      const auto name = trial_name(m, t);
      out.write("embedded_" + name + ".csv", format_csv(pi.apply(inst.data).values()));
      out.write("projection_" + name + ".json", pi.sidecar_json());
      index.push_back({{"m", m}, {"trial", t}, {"seed", pi.seed}});
    }
  }
  out.write_json("projections.json", index);
}

void cmd_solve(const ExperimentConfig& cfg, Staging& out) {
  if (!cfg.gamma) throw ValidationError("gamma: is required for solve");
  const auto inst = load_instance(cfg);
  const auto g = build_graph(cfg, inst);
  const auto res = solve({inst.data, g, *cfg.gamma}, cfg.solver);
  if (!res.success) {
    throw NumericFailure("solver did not converge in " + std::to_string(res.iterations) + " iterations (rel_gap " +
                         fmt(res.rel_gap) + ")");
  }
  const auto part = extract_partition(res);
  json report = {{"gamma", res.gamma},        {"K_found", part.K()},        {"primal", res.primal_obj},
                 {"dual", res.dual_obj},      {"rel_gap", res.rel_gap},     {"iterations", res.iterations},
                 {"tau_merge", res.tau_merge}};
  if (inst.truth && inst.truth->n() >= 2) {
    report["ARI"] = adjusted_rand_index(part, *inst.truth);
    report["RI"] = rand_index(part, *inst.truth);
  }
  out.write("centroids.csv", format_csv(res.X));
  out.write("labels.csv", labels_csv(part));
  out.write_json("solve.json", report);
}

json recovery_json(const RecoveryReport& rep) {
  json j = {{"recovering_gammas", rep.gammas}, {"recovered", !rep.gammas.empty()}};
  if (rep.practical_upper) j["practical_upper"] = *rep.practical_upper;
  if (rep.interval_recovered) {
    j["interval_recovered"] = *rep.interval_recovered;
    j["vacuous"] = rep.vacuous;
  }
  if (!rep.warning.empty()) j["warning"] = rep.warning;
  return j;
}

json path_summary(const ClusteringPath& path, const Partition* truth) {
  json j = {{"instance_hash", path.instance_hash},
            {"points", path.points.size()},
            {"monotonicity_violations", path.monotonicity_violations}};
  if (truth) {
    double best = -1.0;
    for (const auto& p : path.points) best = std::max(best, p.adjusted_rand_index);
    j["max_ARI"] = best;
    j["recovery"] = recovery_json(detect_perfect_recovery(path, *truth));
  }
  return j;
}

void cmd_path(const ExperimentConfig& cfg, Staging& out) {
  const auto inst = load_instance(cfg);
  const auto g = build_graph(cfg, inst);
  const Partition* truth = inst.truth ? &*inst.truth : nullptr;
  json summary;
  if (!cfg.projection.present) {
    const auto path = sweep(inst.data, g, cfg.grid, truth, cfg.solver);
    require_converged(path, "path");
    out.write("path.csv", path.to_csv());
    summary = path_summary(path, truth);
  } else {
    summary = json::array();
    for (Index m : projection_dims(cfg.projection, inst.data.n(), truth ? truth->K() : 1)) {
      for (int t = 0; t < cfg.projection.trials; ++t) {
        const auto pi =
            sample_projection(m, inst.data.d(), cfg.projection.family, projection_seed(cfg.projection, m, t));
        const auto path = sweep(pi.apply(inst.data), g, cfg.grid, truth, cfg.solver);
        require_converged(path, "path " + trial_name(m, t));
        out.write("path_" + trial_name(m, t) + ".csv", path.to_csv());
        auto s = path_summary(path, truth);
        s["m"] = m;
        s["trial"] = t;
        s["seed"] = pi.seed;
        summary.push_back(s);
      }
    }
  }
  out.write_json("path.json", summary);
}

json thresholds_json(const EpsilonThresholds& t) {
  json j = {{"eps_min", t.eps_min},
            {"eps_sup", t.eps_sup},
            {"window_nonempty", t.window_nonempty()},
            {"hypothesis", t.hypothesis}};
  if (t.eps_sup2) j["eps_sup2"] = *t.eps_sup2;
  if (t.hypothesis2) j["hypothesis2"] = *t.hypothesis2;
  if (t.variant == ThresholdVariant::LogK) j["C0"] = t.C0;
  return j;
}

void cmd_bounds(const ExperimentConfig& cfg, Staging& out) {
  const auto inst = load_instance(cfg);
  const auto& truth = require_truth(inst, "bounds");
  const auto g = build_graph(cfg, inst);
  const auto gb = gamma_bounds(inst.data, g, truth);
  const auto& b = cfg.bounds;
  const Index n = inst.data.n(), d = inst.data.d();
  const int K = truth.K();

  json doc = {{"n", n},
              {"d", d},
              {"K", K},
              {"gamma_min", number(gb.gamma_min)},
              {"gamma_max", number(gb.gamma_max)},
              {"gamma_max2", number(gb.gamma_max2)},
              {"r", number(gb.r)},
              {"r2", number(gb.r2)},
              {"gamma_min_pair", {gb.min_i + 1, gb.min_j + 1}},
              {"gamma_min_cluster", gb.min_cluster},
              {"gamma_max_clusters", {gb.max_alpha, gb.max_beta}},
              {"gamma_max2_cluster", gb.max2_cluster},
              {"cluster_size_condition", check_assumption3(n, K)},
              {"exact_interval", interval_json(exact_interval(gb))},
              {"exact_coarsening_interval", interval_json(exact_interval(gb, IntervalKind::Coarsening))}};
  if (!gb.diagnostic.empty()) doc["diagnostic"] = gb.diagnostic;

  const std::optional<double> r2 = std::isfinite(gb.r2) ? std::optional<double>(gb.r2) : std::nullopt;
  try {
    doc["thresholds_logn"] = thresholds_json(epsilon_thresholds_logn(gb.r, r2, d, n, b.C));
  } catch (const ParameterError& e) {
    doc["thresholds_logn"] = {{"unavailable", e.what()}};
  }
  try {
    doc["thresholds_logk"] = thresholds_json(epsilon_thresholds_logk(gb.r, r2, d, K, b.C_logk, b.profile));
  } catch (const ParameterError& e) {
    doc["thresholds_logk"] = {{"unavailable", e.what()}};
  }

  json logn = json::array();
  for (double eps : b.epsilons) {
    logn.push_back({{"epsilon", eps},
                    {"m", embedding_dim_logn(eps, n, b.C)},
                    {"recovery", interval_json(recovery_interval_logn(gb, eps))},
                    {"coarsening", interval_json(recovery_interval_logn(gb, eps, IntervalKind::Coarsening))}});
  }
  doc["intervals_logn"] = logn;

  json logk = json::array();
  for (double eps : b.epsilons_logk) {
    if (K < 2) throw ValidationError("bounds.epsilon_logk: needs K >= 2");
    const Index m = embedding_dim_logk(eps, K, b.C_logk);
    logk.push_back({{"epsilon", eps},
                    {"m", m},
                    {"recovery", interval_json(recovery_interval_logk(gb, eps, m, d, b.profile))},
                    {"coarsening",
                     interval_json(recovery_interval_logk(gb, eps, m, d, b.profile, IntervalKind::Coarsening))}});
  }
  doc["intervals_logk"] = logk;

  const auto sizes = build_difference_sets(inst.data, truth);
  try {
    const auto cr = conditional_recovery_probability(sizes.N1, sizes.N2, b.p, n);
    doc["probability_bound"] = {{"p", b.p},
                                {"N1", sizes.N1},
                                {"N2", sizes.N2},
                                {"by_set_sizes", cr.by_set_sizes},
                                {"by_point_count", cr.by_point_count ? json(*cr.by_point_count) : json(nullptr)}};
  } catch (const ParameterError& e) {
    doc["probability_bound"] = {{"unavailable", e.what()}};
  }
  out.write_json("bounds.json", doc);
}

void cmd_verify_jl(const ExperimentConfig& cfg, Staging& out) {
  const auto inst = load_instance(cfg);
  const auto& A = inst.data.values();
  const Index n = inst.data.n(), d = inst.data.d();
  const PairwiseIsometryChecker all(A, all_pairs(n));
  std::optional<PairwiseIsometryChecker> within;
  Matrix centroid_diffs;
  if (inst.truth) {
    const auto sets = build_difference_sets(inst.data, *inst.truth);
    within.emplace(A, sets.within_pairs());
    centroid_diffs = sets.centroid_differences();
  }

  std::string table = "dimension,epsilon,trials,p_XA,XA_pct,p_XV,XV_pct,p_XC,XC_pct,p_S\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double eps : cfg.verify.epsilons) {
    const Index m = embedding_dim_logn(eps, n, cfg.verify.C);
    struct Tally {
      int all = 0;
      double pct = 0.0;
      void add(const IsometryReport& r) {
        all += r.all_preserved;
        pct += r.fraction;
      }
    } xa, xv, xc;
    int sing = 0;
    for (int t = 0; t < cfg.verify.trials; ++t) {
      const auto pi = sample_projection(m, d, cfg.projection.family, projection_seed(cfg.projection, m, t));
      const Matrix projected = pi.apply(inst.data).values();
      xa.add(all.check_embedded(projected, eps));
      if (within) {
        xv.add(within->check_embedded(projected, eps));
        xc.add(verify_isometry(pi, centroid_diffs, eps));
      }
      if (m <= d) sing += check_singular_bounds(pi, cfg.bounds.profile);
    }
    const double T = cfg.verify.trials;
    table += std::to_string(m) + "," + fmt(eps) + "," + std::to_string(cfg.verify.trials) + "," + fmt(xa.all / T) +
             "," + fmt(100.0 * xa.pct / T) + "," + fmt(within ? xv.all / T : nan) + "," +
             fmt(within ? 100.0 * xv.pct / T : nan) + "," + fmt(within ? xc.all / T : nan) + "," +
             fmt(within ? 100.0 * xc.pct / T : nan) + "," + fmt(m <= d ? sing / T : nan) + "\n";
  }
  out.write("verify_jl.csv", table);
}

KMeansConfig kmeans_config(const ExperimentConfig& cfg, const Instance& inst) {
  KMeansConfig k = cfg.kmeans;
  if (cfg.kmeans_K) {
    k.K = *cfg.kmeans_K;
  } else if (inst.truth) {
    k.K = inst.truth->K();
  } else {
    throw ValidationError("kmeans.K: is required for unlabelled data");
  }
  return k;
}

void cmd_kmeans(const ExperimentConfig& cfg, Staging& out) {
  const auto inst = load_instance(cfg);
  const auto kc = kmeans_config(cfg, inst);
  std::string table = "m,trial,seed,inertia,RI,ARI\n";
  auto record = [&](const std::string& name, Index m, int trial, Seed seed, const KMeansResult& r) {
    out.write("labels_" + name + ".csv", labels_csv(r.partition));
    const bool scored = inst.truth && inst.truth->n() >= 2;
    table += std::to_string(m) + "," + std::to_string(trial) + "," + std::to_string(seed) + "," + fmt(r.inertia) +
             "," + fmt(scored ? rand_index(r.partition, *inst.truth) : std::nan("")) + "," +
             fmt(scored ? adjusted_rand_index(r.partition, *inst.truth) : std::nan("")) + "\n";
  };
  if (!cfg.projection.present) {
    record("full", inst.data.d(), 0, 0, kmeans(inst.data, kc));
  } else {
    for (Index m : projection_dims(cfg.projection, inst.data.n(), kc.K)) {
      for (int t = 0; t < cfg.projection.trials; ++t) {
        const auto pi =
            sample_projection(m, inst.data.d(), cfg.projection.family, projection_seed(cfg.projection, m, t));
        record(trial_name(m, t), m, t, pi.seed, rp_kmeans(inst.data, pi, kc));
      }
    }
  }
  out.write("kmeans.csv", table);
}

void cmd_compare(const ExperimentConfig& cfg, Staging& out) {
  if (!cfg.projection.present) throw ValidationError("projection: block is required for compare");
  const auto inst = load_instance(cfg);
  const auto& truth = require_truth(inst, "compare");
  const auto g = build_graph(cfg, inst);
  const auto kc = kmeans_config(cfg, inst);

  std::string runs = "m,trial,seed,rpccm_recovered,rpccm_max_ARI,rpccm_max_RI,kmeans_ARI,kmeans_RI\n";
  std::string summary = "m,trials,rpccm_recovered,rpccm_mean_max_ARI,kmeans_mean_ARI,kmeans_mean_RI\n";
  for (Index m : projection_dims(cfg.projection, inst.data.n(), truth.K())) {
    int recovered = 0;
    double sum_path = 0.0, sum_ari = 0.0, sum_ri = 0.0;
    for (int t = 0; t < cfg.projection.trials; ++t) {
      const auto pi =
          sample_projection(m, inst.data.d(), cfg.projection.family, projection_seed(cfg.projection, m, t));
      const auto path = sweep(pi.apply(inst.data), g, cfg.grid, &truth, cfg.solver);
      require_converged(path, "compare " + trial_name(m, t));
      double best_ari = -1.0, best_ri = 0.0;
      for (const auto& p : path.points) {
        best_ari = std::max(best_ari, p.adjusted_rand_index);
        best_ri = std::max(best_ri, p.rand_index);
      }
      const bool ok = !detect_perfect_recovery(path, truth).gammas.empty();
      const auto km = rp_kmeans(inst.data, pi, kc);
      const double ari = adjusted_rand_index(km.partition, truth), ri = rand_index(km.partition, truth);
      recovered += ok;
      sum_path += best_ari;
      sum_ari += ari;
      sum_ri += ri;
      runs += std::to_string(m) + "," + std::to_string(t) + "," + std::to_string(pi.seed) + "," + (ok ? "1" : "0") +
              "," + fmt(best_ari) + "," + fmt(best_ri) + "," + fmt(ari) + "," + fmt(ri) + "\n";
    }
    const double T = cfg.projection.trials;
    summary += std::to_string(m) + "," + std::to_string(cfg.projection.trials) + "," + std::to_string(recovered) +
               "," + fmt(sum_path / T) + "," + fmt(sum_ari / T) + "," + fmt(sum_ri / T) + "\n";
  }
  out.write("compare_runs.csv", runs);
  out.write("compare.csv", summary);
}

}  // namespace

Command find_command(const std::string& name) {
  static const std::pair<const char*, Command> table[] = {
      {"gen", cmd_gen},       {"weights", cmd_weights}, {"project", cmd_project},
      {"solve", cmd_solve},   {"path", cmd_path},       {"bounds", cmd_bounds},
      {"verify-jl", cmd_verify_jl}, {"kmeans", cmd_kmeans}, {"compare", cmd_compare}};
  for (const auto& [n, c] : table) {
    if (name == n) return c;
  }
  return nullptr;
}

}  // namespace rpcc::cli
