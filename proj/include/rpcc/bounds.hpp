#pragma once

#include <limits>
#include <optional>
#include <string>

#include "rpcc/dataset.hpp"
#include "rpcc/error.hpp"
#include "rpcc/projection.hpp"
#include "rpcc/weights.hpp"

namespace rpcc {

/// Perfect-recovery window [gamma_min, gamma_max) of convex clustering and
/// the coarsening bound gamma_max2, with the pairs / clusters attaining them.
struct GammaBounds {
  double gamma_min = 0.0;
  double gamma_max = std::numeric_limits<double>::infinity();
  double gamma_max2 = std::numeric_limits<double>::infinity();
  double r = std::numeric_limits<double>::infinity();
  double r2 = std::numeric_limits<double>::infinity();

  // 1-based cluster ids, 0-based point ids.
  int min_cluster = 0;
  Index min_i = -1;
  Index min_j = -1;
  int max_alpha = 0;
  int max_beta = 0;
  int max2_cluster = 0;
  /// Set when a bound is +inf (K = 1, or clusters with no external weight).
  std::string diagnostic;
};

/// Raised when a recovery precondition fails; carries the weight report when
/// the cause is the weight condition.
class AssumptionError : public Error {
 public:
  AssumptionError(const std::string& what, std::optional<AssumptionReport> report = std::nullopt)
      : Error(what), report_(std::move(report)) {}
  const std::optional<AssumptionReport>& report() const noexcept { return report_; }

 private:
  std::optional<AssumptionReport> report_;
};

/// Exact evaluation on `data` with `graph`'s weights. Throws AssumptionError
/// when the weight condition fails or when a^(0), ..., a^(K) are not distinct.
GammaBounds gamma_bounds(const DataMatrix& data, const WeightGraph& graph, const Partition& truth);

/// Same quantities on embedded data Pi A; weights stay those of the original
/// data (pass the graph built on A).
GammaBounds hat_gamma_bounds(const DataMatrix& embedded, const WeightGraph& graph,
                             const Partition& truth);

enum class ThresholdVariant { LogN, LogK };

struct EpsilonThresholds {
  ThresholdVariant variant = ThresholdVariant::LogN;
  double eps_min = 0.0;
  double eps_sup = 0.0;
  std::optional<double> eps_sup2;
  /// LogK only.
  double C0 = 0.0;
  SubgaussianProfile profile;
  /// The ratio hypothesis holds for r (resp. r2), which implies
  /// eps_min < eps_sup (resp. eps_sup2).
  bool hypothesis = false;
  std::optional<bool> hypothesis2;
  bool window_nonempty() const { return eps_min < eps_sup; }
};

/// Raised when C ln(n) >= d (or C ln(K) >= d): eps_min would be >= 1.
class NoDistortionWindow : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// eps_min = sqrt(C ln n / d), eps_sup = (r^2 - 1) / (r^2 + 1).
EpsilonThresholds epsilon_thresholds_logn(double r, std::optional<double> r2, Index d, Index n,
                                          double C);

/// C0 = sqrt(C ln K) / (sqrt(d) + C_k^2 t), eps_min = sqrt(C ln K / d),
/// eps_sup = r C0 sqrt(r^2 C0^2 / 4 + C_k^2 C0 + 1) - C_k^2 C0 - r^2 C0^2 / 2.
EpsilonThresholds epsilon_thresholds_logk(double r, std::optional<double> r2, Index d, Index K,
                                          double C, const SubgaussianProfile& profile);

enum class IntervalKind { PerfectRecovery, Coarsening };

/// [lo, hi): left closed, right open.
struct GammaInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool nonempty = false;
  IntervalKind kind = IntervalKind::PerfectRecovery;

  bool contains(double gamma) const { return lo <= gamma && gamma < hi; }
  /// this subset of other (an empty interval is a subset of anything).
  bool subset_of(const GammaInterval& other, double slack = 0.0) const;
};

GammaInterval make_interval(double lo, double hi, IntervalKind kind);

/// [sqrt(1+eps) gamma_min, sqrt(1-eps) gamma_max) (gamma_max2 for coarsening).
GammaInterval recovery_interval_logn(const GammaBounds& gb, double epsilon,
                                     IntervalKind kind = IntervalKind::PerfectRecovery);

/// [S_upper(m, d, t) gamma_min, sqrt(1-eps) gamma_max) (gamma_max2 for coarsening).
GammaInterval recovery_interval_logk(const GammaBounds& gb, double epsilon, Index m, Index d,
                                     const SubgaussianProfile& profile,
                                     IntervalKind kind = IntervalKind::PerfectRecovery);

/// [gamma_min, gamma_max) straight from the bounds (gamma_max2 for coarsening).
GammaInterval exact_interval(const GammaBounds& gb, IntervalKind kind = IntervalKind::PerfectRecovery);

/// n > K (K + 1)
bool check_assumption3(Index n, Index K);

}  // namespace rpcc
