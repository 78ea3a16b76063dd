#include "rpcc/path.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cctype>
#include <functional>
#include <limits>

#include "rpcc/error.hpp"
#include "rpcc/metrics.hpp"

namespace rpcc {

namespace {

double parse_number(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParameterError("bad grid value '" + std::string(s) + "'");
  }
  return v;
}

// Removes the last-bit noise of a - k s.
double snap(double v) {
  if (v == 0.0) return 0.0;
  const double scale = std::pow(10.0, 12 - static_cast<int>(std::ceil(std::log10(std::abs(v)))));
  return std::round(v * scale) / scale;
}

void mix(std::uint64_t& h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t k = 0; k < bytes; ++k) {
    h ^= p[k];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

std::vector<double> expand_range(double a, double s, double b) {
  if (!(s != 0.0) || !std::isfinite(s)) throw ParameterError("grid step must be nonzero");
  if ((b - a) * s < 0.0) throw ParameterError("grid step points away from the end value");
  const double steps = (b - a) / s;
  const double whole = std::round(steps);
  const auto count = static_cast<long long>(std::abs(steps - whole) < 1e-9 * std::max(1.0, whole)
                                                ? whole
                                                : std::floor(steps)) + 1;
  if (count > 10'000'000) throw ParameterError("grid too large");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long long k = 0; k < count; ++k) out.push_back(snap(a + static_cast<double>(k) * s));
  return out;
}

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      ++pos;
      continue;
    }
    if (c == '[') {
      const auto close = text.find(']', pos);
      if (close == std::string_view::npos) throw ParameterError("unterminated '[' in grid");
      const auto body = text.substr(pos + 1, close - pos - 1);
      const auto c1 = body.find(':');
      const auto c2 = c1 == std::string_view::npos ? c1 : body.find(':', c1 + 1);
      if (c2 == std::string_view::npos || body.find(':', c2 + 1) != std::string_view::npos) {
        throw ParameterError("grid range must look like [a:s:b]");
      }
      const auto range = expand_range(parse_number(body.substr(0, c1)),
                                      parse_number(body.substr(c1 + 1, c2 - c1 - 1)),
                                      parse_number(body.substr(c2 + 1)));
      out.insert(out.end(), range.begin(), range.end());
      pos = close + 1;
      continue;
    }
    auto end = text.find_first_of(", \t\n", pos);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(parse_number(text.substr(pos, end - pos)));
    pos = end;
  }
  if (out.empty()) throw ParameterError("empty gamma grid");
  return out;
}

bool ClusteringPath::all_converged() const {
  return std::all_of(points.begin(), points.end(), [](const PathPoint& p) { return p.success; });
}

std::string ClusteringPath::to_csv() const {
  std::string out = "gamma,K_found,RI,ARI,accuracy,rel_gap\n";
  char buf[256];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.17g,%.17g\n", p.gamma, p.K_found, p.rand_index,
                  p.adjusted_rand_index, p.accuracy, p.rel_gap);
    out += buf;
  }
  return out;
}

std::uint64_t instance_fingerprint(const DataMatrix& data, const WeightGraph& graph) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::int64_t dims[2] = {data.n(), data.d()};
  mix(h, dims, sizeof dims);
  mix(h, data.values().data(), sizeof(double) * static_cast<std::size_t>(data.values().size()));
  for (const auto& e : graph.edges()) {
    const std::int64_t ij[2] = {e.i, e.j};
    mix(h, ij, sizeof ij);
    mix(h, &e.w, sizeof e.w);
  }
  return h;
}

ClusteringPath sweep(const DataMatrix& data, const WeightGraph& graph, std::vector<double> grid,
                     const Partition* truth, const SolverSettings& settings) {
  if (grid.empty()) throw ParameterError("empty gamma grid");
  for (double g : grid) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw ParameterError("gamma grid values must be finite and >= 0");
  }
  if (truth && truth->n() != data.n()) throw ParameterError("truth partition size differs from data");

  ClusteringPath path;
  path.grid = grid;
  path.settings = settings;
  path.instance_hash = instance_fingerprint(data, graph);

  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  ConvexClusteringSolver solver(data, graph, settings);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double g : grid) {
    const SolveResult r = solver.solve(g);
    PathPoint p;
    p.gamma = g;
    p.partition = extract_partition(r);
    p.K_found = p.partition.K();
    p.rel_gap = r.rel_gap;
    p.iterations = r.iterations;
    p.success = r.success;
    if (truth) {
      p.rand_index = data.n() >= 2 ? rand_index(p.partition, *truth) : 1.0;
      p.adjusted_rand_index = data.n() >= 2 ? adjusted_rand_index(p.partition, *truth) : 1.0;
      p.accuracy = accuracy(p.partition, *truth);
    } else {
      p.rand_index = p.adjusted_rand_index = p.accuracy = nan;
    }
    // Descending order: a larger K than the previous (larger) gamma breaks
    // the expected agglomeration.
    if (!path.points.empty() && p.K_found < path.points.back().K_found) {
      path.monotonicity_violations.push_back(path.points.back().gamma);
    }
    path.points.push_back(std::move(p));
  }
  return path;
}

RecoveryReport detect_perfect_recovery(const ClusteringPath& path, const Partition& truth,
                                       const std::optional<GammaInterval>& interval) {
  RecoveryReport rep;
  std::vector<const PathPoint*> asc;
  for (const auto& p : path.points) {
    if (p.partition.n() != truth.n()) throw ParameterError("path and truth disagree on n");
    asc.push_back(&p);
  }
  std::sort(asc.begin(), asc.end(), [](const PathPoint* a, const PathPoint* b) { return a->gamma < b->gamma; });

  std::size_t first = asc.size();
  for (std::size_t k = 0; k < asc.size(); ++k) {
    if (asc[k]->partition.same_clusters(truth)) {
      rep.gammas.push_back(asc[k]->gamma);
      if (first == asc.size()) first = k;
    }
  }
  if (first < asc.size()) {
    std::size_t k = first;
    while (k + 1 < asc.size() && asc[k + 1]->partition.same_clusters(truth)) ++k;
    rep.practical_upper = asc[k]->gamma;
  }

  if (interval) {
    bool all = true;
    bool any = false;
    for (const auto* p : asc) {
      if (!interval->contains(p->gamma)) continue;
      any = true;
      all = all && p->partition.same_clusters(truth);
    }
    rep.interval_recovered = all;
    if (!any) {
      rep.vacuous = true;
      rep.warning = "no grid value lies inside the interval; recovery holds vacuously";
    }
  }
  return rep;
}

CoarseningCheck is_coarsening(const Partition& candidate, const Partition& truth) {
  if (candidate.n() != truth.n()) throw ParameterError("partitions have different sizes");
  std::vector<int> host(static_cast<std::size_t>(truth.K()), 0);
  CoarseningCheck out;
  for (Index i = 0; i < truth.n(); ++i) {
    int& h = host[static_cast<std::size_t>(truth.label(i) - 1)];
    if (h == 0) {
      h = candidate.label(i);
    } else if (h != candidate.label(i)) {
      return out;
    }
  }
  out.coarsening = true;
  out.nontrivial = candidate.K() > 1;
  return out;
}

}  // namespace rpcc
