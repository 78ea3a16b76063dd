#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "rpcc/error.hpp"
#include "rpcc/path.hpp"

namespace rpcc::cli {

namespace {

// Reads fields by dotted name and records every rule that fails.
class Fields {
 public:
  explicit Fields(const json& root) : root_(root) {}

  const json* find(const std::string& name) const {
    const json* node = &root_;
    std::size_t start = 0;
    while (start <= name.size()) {
      const auto dot = name.find('.', start);
      const auto key = name.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (!node->is_object()) return nullptr;
      const auto it = node->find(key);
      if (it == node->end() || it->is_null()) return nullptr;
      node = &*it;
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    return node;
  }

  bool has(const std::string& name) const { return find(name) != nullptr; }

  void fail(const std::string& name, const std::string& rule) { errors_.push_back(name + ": " + rule); }

  double number(const std::string& name, double fallback, const std::function<bool(double)>& ok,
                const std::string& rule) {
    const json* v = find(name);
    if (!v) return fallback;
    if (!v->is_number()) {
      fail(name, "must be a number");
      return fallback;
    }
    const double x = v->get<double>();
    if (!ok(x)) fail(name, rule);
    return x;
  }

  std::optional<double> optional_number(const std::string& name, const std::function<bool(double)>& ok,
                                        const std::string& rule) {
    if (!has(name)) return std::nullopt;
    return number(name, 0.0, ok, rule);
  }

  long long integer(const std::string& name, long long fallback, long long lo, const std::string& rule) {
    const json* v = find(name);
    if (!v) return fallback;
    if (!v->is_number_integer()) {
      fail(name, "must be an integer");
      return fallback;
    }
    const auto x = v->get<long long>();
    if (x < lo) fail(name, rule);
    return x;
  }

  Seed seed(const std::string& name, Seed fallback) {
    const json* v = find(name);
    if (!v) return fallback;
    if (!v->is_number_unsigned()) {
      fail(name, "must be a non-negative integer");
      return fallback;
    }
    return v->get<Seed>();
  }

  bool boolean(const std::string& name, bool fallback) {
    const json* v = find(name);
    if (!v) return fallback;
    if (!v->is_boolean()) {
      fail(name, "must be true or false");
      return fallback;
    }
    return v->get<bool>();
  }

  std::string string(const std::string& name, const std::string& fallback) {
    const json* v = find(name);
    if (!v) return fallback;
    if (!v->is_string()) {
      fail(name, "must be a string");
      return fallback;
    }
    return v->get<std::string>();
  }

  // A number or an array of numbers.
  std::vector<double> numbers(const std::string& name, std::vector<double> fallback,
                              const std::function<bool(double)>& ok, const std::string& rule) {
    const json* v = find(name);
    if (!v) return fallback;
    std::vector<double> out;
    auto take = [&](const json& x) {
      if (!x.is_number()) {
        fail(name, "must be a number or an array of numbers");
        return;
      }
      out.push_back(x.get<double>());
      if (!ok(out.back())) fail(name, rule);
    };
    if (v->is_array()) {
      if (v->empty()) fail(name, "must not be empty");
      for (const auto& x : *v) take(x);
    } else {
      take(*v);
    }
    return out;
  }

  std::filesystem::path file(const std::string& name, const std::filesystem::path& base) {
    const auto text = string(name, "");
    if (text.empty()) {
      fail(name, "is required");
      return {};
    }
    std::filesystem::path p(text);
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::is_regular_file(p)) fail(name, "file not found: " + p.string());
    return p;
  }

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  const json& root_;
  std::vector<std::string> errors_;
};

const auto positive = [](double x) { return x > 0.0; };
const auto nonnegative = [](double x) { return x >= 0.0; };
const auto unit_open = [](double x) { return x > 0.0 && x < 1.0; };

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void read_data(Fields& f, ExperimentConfig& cfg, const std::filesystem::path& base) {
  auto& d = cfg.data;
  const int kinds = f.has("data.csv") + f.has("data.mixture") + f.has("data.unbalanced") + f.has("data.points");
  if (kinds != 1) {
    f.fail("data", "exactly one of csv, mixture, unbalanced, points is required");
    return;
  }
  if (f.has("data.csv")) {
    d.kind = DataKind::Csv;
    d.csv = f.file("data.csv", base);
    d.csv_options.has_labels = f.boolean("data.labels", false);
    d.csv_options.skip_header = f.boolean("data.header", false);
  } else if (f.has("data.mixture")) {
    d.kind = DataKind::Mixture;
    const auto dim = f.integer("data.mixture.d", 0, 1, "must be >= 1");
    const auto K = f.integer("data.mixture.K", 0, 1, "must be >= 1");
    const double var = f.number("data.mixture.variance", 0.005, nonnegative, "must be >= 0");
    const auto n = f.integer("data.mixture.n", 0, 1, "must be >= 1");
    const Seed seed = f.seed("data.mixture.seed", cfg.seed);
    if (!f.has("data.mixture.d")) f.fail("data.mixture.d", "is required");
    if (!f.has("data.mixture.K")) f.fail("data.mixture.K", "is required");
    if (!f.has("data.mixture.n")) f.fail("data.mixture.n", "is required");
    if (dim >= 1 && K >= 1 && K <= dim) {
      d.mixture = MixtureSpec::basis_means(dim, static_cast<int>(K), var, std::max<long long>(n, 1), seed);
      d.mixture.n = n;
      d.mixture.balanced = f.boolean("data.mixture.balanced", true);
      try {
        d.mixture.validate();
      } catch (const ValidationError& e) {
        f.fail("data.mixture", e.what());
      }
    } else if (K > dim) {
      f.fail("data.mixture.K", "must be <= d (means are basis vectors)");
    }
  } else if (f.has("data.unbalanced")) {
    d.kind = DataKind::Unbalanced;
    d.unbalanced_d = f.integer("data.unbalanced.d", 200, 1, "must be >= 1");
    d.large = f.integer("data.unbalanced.large", 200, 1, "must be >= 1");
    d.small = f.integer("data.unbalanced.small", 10, 1, "must be >= 1");
    d.unbalanced_seed = f.seed("data.unbalanced.seed", cfg.seed);
  } else {
    d.kind = DataKind::Inline;
    const json& pts = *f.find("data.points");
    if (!pts.is_array() || pts.empty() || !pts[0].is_array() || pts[0].empty()) {
      f.fail("data.points", "must be a non-empty array of equal-length numeric rows");
      return;
    }
    d.points.resize(static_cast<Index>(pts.size()), static_cast<Index>(pts[0].size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!pts[i].is_array() || pts[i].size() != pts[0].size()) {
        f.fail("data.points", "row " + std::to_string(i + 1) + " has the wrong length");
        return;
      }
      for (std::size_t c = 0; c < pts[i].size(); ++c) {
        if (!pts[i][c].is_number()) {
          f.fail("data.points", "row " + std::to_string(i + 1) + " is not numeric");
          return;
        }
        d.points(static_cast<Index>(i), static_cast<Index>(c)) = pts[i][c].get<double>();
      }
    }
    if (const json* lab = f.find("data.labels")) {
      if (!lab->is_array() || lab->size() != pts.size()) {
        f.fail("data.labels", "must list one integer label per point");
      } else {
        for (const auto& x : *lab) {
          if (!x.is_number_integer()) {
            f.fail("data.labels", "must be integers");
            break;
          }
          d.labels.push_back(x.get<long>());
        }
      }
    }
  }
}

void read_weights(Fields& f, ExperimentConfig& cfg, const std::filesystem::path& base) {
  auto& w = cfg.weights;
  const auto mode = f.string("weights.mode", "knn");
  if (mode == "knn") {
    w.mode = GraphMode::Knn;
  } else if (mode == "oracle") {
    w.mode = GraphMode::Oracle;
  } else if (mode == "uniform") {
    w.mode = GraphMode::Uniform;
  } else if (mode == "csv") {
    w.mode = GraphMode::Csv;
    w.csv = f.file("weights.csv", base);
  } else {
    f.fail("weights.mode", "must be one of knn, oracle, uniform, csv");
  }
  w.k = f.integer("weights.k", 10, 1, "must be >= 1");
  w.phi = f.optional_number("weights.phi", positive, "must be > 0");
}

void read_projection(Fields& f, ExperimentConfig& cfg) {
  auto& p = cfg.projection;
  p.present = f.has("projection");
  const auto family = f.string("projection.family", "gaussian");
  try {
    p.family = parse_family(family);
  } catch (const Error&) {
    f.fail("projection.family", "must be gaussian or rademacher");
  }
  p.logk = f.string("projection.variant", "logn") == "logk";
  if (const auto v = f.string("projection.variant", "logn"); v != "logn" && v != "logk") {
    f.fail("projection.variant", "must be logn or logk");
  }
  p.C = f.number("projection.C", p.logk ? 10.0 : 9.0, positive, "must be > 0");
  for (double m : f.numbers("projection.m", {}, [](double x) { return x >= 1 && x == std::floor(x); },
                            "must be positive integers")) {
    p.dims.push_back(static_cast<Index>(m));
  }
  p.epsilons = f.numbers("projection.epsilon", {}, unit_open, "must lie in (0, 1)");
  if (p.present && p.dims.empty() && p.epsilons.empty()) {
    f.fail("projection", "needs m or epsilon");
  }
  p.seed = f.seed("projection.seed", cfg.seed);
  p.trials = static_cast<int>(f.integer("projection.trials", 1, 1, "must be >= 1"));
}

}  // namespace

ExperimentConfig load_config(const json& doc, std::optional<Seed> seed_override,
                             const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ValidationError("config: top level must be a JSON object");
  ExperimentConfig cfg;
  cfg.resolved = doc;
  if (seed_override) cfg.resolved["seed"] = *seed_override;
  Fields f(cfg.resolved);

  cfg.seed = f.seed("seed", 0);
  read_data(f, cfg, base_dir);
  read_weights(f, cfg, base_dir);
  read_projection(f, cfg);

  cfg.grid_text = f.string("grid", cfg.grid_text);
  try {
    cfg.grid = parse_grid(cfg.grid_text);
  } catch (const ParameterError& e) {
    f.fail("grid", e.what());
  }
  cfg.gamma = f.optional_number("gamma", nonnegative, "must be >= 0");

  auto& s = cfg.solver;
  s.tol = f.number("solver.tol", s.tol, positive, "must be > 0");
  s.rho = f.number("solver.rho", s.rho, positive, "must be > 0");
  s.max_iter = static_cast<int>(f.integer("solver.max_iter", s.max_iter, 1, "must be >= 1"));
  s.tau_merge = f.optional_number("solver.tau_merge", nonnegative, "must be >= 0");
  s.residual_tol = f.number("solver.residual_tol", 0.0, nonnegative, "must be >= 0");

  auto& b = cfg.bounds;
  b.p = f.number("bounds.p", b.p, positive, "must be > 0");
  b.C = f.number("bounds.C", b.C, positive, "must be > 0");
  b.C_logk = f.number("bounds.C_logk", b.C_logk, positive, "must be > 0");
  b.profile.c_kappa_sq = f.number("bounds.c_kappa_sq", 1.0, positive, "must be > 0");
  b.profile.t = f.number("bounds.t", 2.0, positive, "must be > 0");
  b.epsilons = f.numbers("bounds.epsilon", b.epsilons, unit_open, "must lie in (0, 1)");
  b.epsilons_logk = f.numbers("bounds.epsilon_logk", {}, unit_open, "must lie in (0, 1)");

  if (f.has("kmeans.K")) cfg.kmeans_K = static_cast<int>(f.integer("kmeans.K", 1, 1, "must be >= 1"));
  cfg.kmeans.replicates = static_cast<int>(f.integer("kmeans.replicates", 30, 1, "must be >= 1"));
  cfg.kmeans.max_iter = static_cast<int>(f.integer("kmeans.max_iter", 10000, 1, "must be >= 1"));
  cfg.kmeans.seed = f.seed("kmeans.seed", cfg.seed);

  cfg.verify.epsilons = f.numbers("verify.epsilon", cfg.verify.epsilons, unit_open, "must lie in (0, 1)");
  cfg.verify.trials = static_cast<int>(f.integer("verify.trials", 1000, 1, "must be >= 1"));
  cfg.verify.C = f.number("verify.C", 9.0, positive, "must be > 0");

  const bool labelled = (cfg.data.kind == DataKind::Csv && cfg.data.csv_options.has_labels) ||
                        cfg.data.kind == DataKind::Mixture || cfg.data.kind == DataKind::Unbalanced ||
                        (cfg.data.kind == DataKind::Inline && !cfg.data.labels.empty());
  if (cfg.weights.mode == GraphMode::Oracle && !labelled) f.fail("weights.mode", "oracle needs labelled data");

  static const char* known[] = {"seed", "data", "weights", "projection", "grid", "gamma",
                                "solver", "bounds", "kmeans", "verify"};
  for (const auto& [key, value] : cfg.resolved.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) f.fail(key, "unknown field");
  }

  if (!f.errors().empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : f.errors()) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  cfg.hash = fnv1a_hex(cfg.resolved.dump());
  return cfg;
}

std::vector<Index> projection_dims(const ProjectionConfig& cfg, Index n, int K) {
  std::vector<Index> dims = cfg.dims;
  for (double eps : cfg.epsilons) {
    dims.push_back(cfg.logk ? embedding_dim_logk(eps, K, cfg.C) : embedding_dim_logn(eps, n, cfg.C));
  }
  return dims;
}

Seed projection_seed(const ProjectionConfig& cfg, Index m, int trial) {
  return replicate_seed(replicate_seed(cfg.seed, static_cast<int>(m)), trial);
}

}  // namespace rpcc::cli
