#include "rpcc/bounds.hpp"

#include <cmath>
#include <limits>
#include <tuple>

#include "rpcc/error.hpp"

namespace rpcc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct MinCandidate {
  double value = -kInf;
  Index i = -1;
  Index j = -1;
  int cluster = 0;

  // Larger value wins; ties go to the lexicographically first pair.
  bool beats(const MinCandidate& o) const {
    if (value != o.value) return value > o.value;
    return std::tie(i, j) < std::tie(o.i, o.j);
  }
};

GammaBounds evaluate(const Matrix& A, const WeightGraph& graph, const Partition& truth) {
  if (graph.n() != A.rows() || truth.n() != A.rows()) {
    throw ParameterError("data, graph and partition sizes disagree");
  }
  const auto report = check_assumption2(graph, truth);
  if (!report.holds) {
    throw AssumptionError("weight condition violated (margin " + std::to_string(report.margin) +
                              " at cluster " + std::to_string(report.worst_cluster) + ")",
                          report);
  }

  const int K = truth.K();
  const auto members = truth.members();
  Matrix centroids = Matrix::Zero(K + 1, A.cols());
  centroids.row(0) = A.colwise().mean();
  for (int a = 0; a < K; ++a) {
    for (Index i : members[static_cast<std::size_t>(a)]) centroids.row(a + 1) += A.row(i);
    centroids.row(a + 1) /= static_cast<double>(members[static_cast<std::size_t>(a)].size());
  }
  // With K = 1 the grand mean is the only centroid, so only K >= 2 compares a^(0).
  const int first = K >= 2 ? 0 : 1;
  for (int a = first; a <= K; ++a) {
    for (int b = a + 1; b <= K; ++b) {
      if (centroids.row(a) == centroids.row(b)) {
        throw AssumptionError("centroids a^(" + std::to_string(a) + ") and a^(" +
                              std::to_string(b) + ") coincide");
      }
    }
  }

  const ClusterWeightSums sums(graph, truth);
  GammaBounds gb;

  MinCandidate best;
  for (int a = 0; a < K; ++a) {
    const auto& idx = members[static_cast<std::size_t>(a)];
    const auto n_alpha = static_cast<double>(idx.size());
    const auto cnt = static_cast<Index>(idx.size());
#pragma omp parallel
    {
      MinCandidate local;
      std::vector<double> row;
#pragma omp for schedule(dynamic, 8) nowait
      for (Index p = 0; p < cnt; ++p) {
        const Index i = idx[static_cast<std::size_t>(p)];
        graph.weight_row(i, row);
        for (Index q = p + 1; q < cnt; ++q) {
          const Index j = idx[static_cast<std::size_t>(q)];
          const double denom = n_alpha * row[static_cast<std::size_t>(j)] - sums.mu(i, j, a + 1);
          const MinCandidate c{std::sqrt(kernels::sq_dist(A, i, A, j)) / denom, i, j, a + 1};
          if (c.beats(local)) local = c;
        }
      }
#pragma omp critical
      if (local.beats(best)) best = local;
    }
  }
  if (best.i < 0) {
    gb.gamma_min = 0.0;
    gb.diagnostic = "no cluster has two members; gamma_min = 0. ";
  } else {
    gb.gamma_min = best.value;
    gb.min_cluster = best.cluster;
    gb.min_i = best.i;
    gb.min_j = best.j;
  }

  std::vector<double> wbar(static_cast<std::size_t>(K));
  for (int a = 1; a <= K; ++a) wbar[static_cast<std::size_t>(a - 1)] = sums.mean_external(a);

  if (K == 1) {
    gb.diagnostic += "K = 1: gamma_max and gamma_max2 undefined, reported as +inf.";
  } else {
    gb.gamma_max = kInf;
    for (int a = 1; a <= K; ++a) {
      for (int b = a + 1; b <= K; ++b) {
        const double denom = wbar[static_cast<std::size_t>(a - 1)] + wbar[static_cast<std::size_t>(b - 1)];
        const double v = denom > 0.0 ? (centroids.row(a) - centroids.row(b)).norm() / denom : kInf;
        if (v < gb.gamma_max || gb.max_alpha == 0) {
          gb.gamma_max = v;
          gb.max_alpha = a;
          gb.max_beta = b;
        }
      }
    }
    gb.gamma_max2 = -kInf;
    for (int a = 1; a <= K; ++a) {
      const double w = wbar[static_cast<std::size_t>(a - 1)];
      const double v = w > 0.0 ? (centroids.row(0) - centroids.row(a)).norm() / w : kInf;
      if (v > gb.gamma_max2) {
        gb.gamma_max2 = v;
        gb.max2_cluster = a;
      }
    }
    if (std::isinf(gb.gamma_max)) gb.diagnostic += "no weight between clusters: gamma_max = +inf.";
  }
  gb.r = gb.gamma_max / gb.gamma_min;
  gb.r2 = gb.gamma_max2 / gb.gamma_min;
  return gb;
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("distortion epsilon must lie in (0, 1)");
}

double eps_min_from(double C, Index count, Index d) {
  if (!(C > 0.0)) throw ParameterError("constant C must be > 0");
  if (count < 2 || d < 1) throw ParameterError("need count >= 2 and d >= 1");
  const double v = C * std::log(static_cast<double>(count)) / static_cast<double>(d);
  if (v >= 1.0) throw NoDistortionWindow("no valid distortion window: C ln(count) >= d");
  return std::sqrt(v);
}

double eps_sup_logn(double r) {
  if (std::isinf(r)) return 1.0;
  const double r2 = r * r;
  return (r2 - 1.0) / (r2 + 1.0);
}

// r C0 sqrt(r^2 C0^2 / 4 + b + 1) - b - r^2 C0^2 / 2 with b = C_k^2 C0, in the
// cancellation-free form r C0 (b + 1) / (s + r C0 / 2) - b.
double eps_sup_logk(double r, double C0, double c_kappa_sq) {
  const double b = c_kappa_sq * C0;
  if (std::isinf(r)) return 1.0;
  const double x = r * C0;
  const double s = std::sqrt(x * x / 4.0 + b + 1.0);
  return x * (b + 1.0) / (s + x / 2.0) - b;
}

}  // namespace

GammaBounds gamma_bounds(const DataMatrix& data, const WeightGraph& graph, const Partition& truth) {
  return evaluate(data.values(), graph, truth);
}

GammaBounds hat_gamma_bounds(const DataMatrix& embedded, const WeightGraph& graph,
                             const Partition& truth) {
  return evaluate(embedded.values(), graph, truth);
}

EpsilonThresholds epsilon_thresholds_logn(double r, std::optional<double> r2, Index d, Index n,
                                          double C) {
  if (!(r > 0.0)) throw ParameterError("ratio r must be > 0");
  EpsilonThresholds t;
  t.variant = ThresholdVariant::LogN;
  t.eps_min = eps_min_from(C, n, d);
  t.eps_sup = eps_sup_logn(r);
  const double need = std::sqrt((1.0 + t.eps_min) / (1.0 - t.eps_min));
  t.hypothesis = r > need;
  if (r2) {
    if (!(*r2 > 0.0)) throw ParameterError("ratio r2 must be > 0");
    t.eps_sup2 = eps_sup_logn(*r2);
    t.hypothesis2 = *r2 > need;
  }
  return t;
}

EpsilonThresholds epsilon_thresholds_logk(double r, std::optional<double> r2, Index d, Index K,
                                          double C, const SubgaussianProfile& profile) {
  profile.validate();
  if (!(r > 0.0)) throw ParameterError("ratio r must be > 0");
  EpsilonThresholds t;
  t.variant = ThresholdVariant::LogK;
  t.profile = profile;
  t.eps_min = eps_min_from(C, K, d);
  const double sd = std::sqrt(static_cast<double>(d));
  t.C0 = std::sqrt(C * std::log(static_cast<double>(K))) / (sd + profile.c_kappa_sq * profile.t);
  t.eps_sup = eps_sup_logk(r, t.C0, profile.c_kappa_sq);
  const double need = (1.0 + profile.c_kappa_sq + profile.c_kappa_sq * profile.t / sd) /
                      std::sqrt(1.0 - t.eps_min);
  t.hypothesis = r > need;
  if (r2) {
    if (!(*r2 > 0.0)) throw ParameterError("ratio r2 must be > 0");
    t.eps_sup2 = eps_sup_logk(*r2, t.C0, profile.c_kappa_sq);
    t.hypothesis2 = *r2 > need;
  }
  return t;
}

bool GammaInterval::subset_of(const GammaInterval& other, double slack) const {
  if (!nonempty) return true;
  return other.lo <= lo + slack && hi <= other.hi + slack;
}

GammaInterval make_interval(double lo, double hi, IntervalKind kind) {
  return {lo, hi, lo < hi, kind};
}

GammaInterval recovery_interval_logn(const GammaBounds& gb, double epsilon, IntervalKind kind) {
  check_epsilon(epsilon);
  const double upper = kind == IntervalKind::PerfectRecovery ? gb.gamma_max : gb.gamma_max2;
  return make_interval(std::sqrt(1.0 + epsilon) * gb.gamma_min, std::sqrt(1.0 - epsilon) * upper, kind);
}

GammaInterval recovery_interval_logk(const GammaBounds& gb, double epsilon, Index m, Index d,
                                     const SubgaussianProfile& profile, IntervalKind kind) {
  check_epsilon(epsilon);
  const double s_upper = singular_bounds(m, d, profile).upper;
  const double upper = kind == IntervalKind::PerfectRecovery ? gb.gamma_max : gb.gamma_max2;
  return make_interval(s_upper * gb.gamma_min, std::sqrt(1.0 - epsilon) * upper, kind);
}

GammaInterval exact_interval(const GammaBounds& gb, IntervalKind kind) {
  return make_interval(gb.gamma_min, kind == IntervalKind::PerfectRecovery ? gb.gamma_max : gb.gamma_max2,
                       kind);
}

bool check_assumption3(Index n, Index K) { return n > K * (K + 1); }

}  // namespace rpcc
