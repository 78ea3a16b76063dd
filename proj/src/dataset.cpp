#include "rpcc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "rpcc/error.hpp"

namespace rpcc {

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw ParameterError("data matrix needs n >= 1 and d >= 1");
  }
  if (!values_.allFinite()) throw ParameterError("data matrix has non-finite entries");
}

Vector DataMatrix::mean() const { return values_.colwise().mean().transpose(); }

Partition::Partition(std::vector<int> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ParameterError("partition of zero points");
  K_ = *std::max_element(labels_.begin(), labels_.end());
  std::vector<char> seen(static_cast<std::size_t>(std::max(K_, 0)), 0);
  for (int l : labels_) {
    if (l < 1) throw ParameterError("partition labels must be >= 1");
    seen[static_cast<std::size_t>(l - 1)] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw ParameterError("partition labels must cover 1..K without gaps");
  }
}

Partition Partition::from_raw(std::span<const long> raw) {
  std::unordered_map<long, int> ids;
  std::vector<int> labels;
  labels.reserve(raw.size());
  for (long v : raw) {
    auto [it, inserted] = ids.emplace(v, static_cast<int>(ids.size()) + 1);
    labels.push_back(it->second);
  }
  return Partition(std::move(labels));
}

Partition Partition::singletons(Index n) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  std::iota(labels.begin(), labels.end(), 1);
  return Partition(std::move(labels));
}

Partition Partition::single_cluster(Index n) {
  return Partition(std::vector<int>(static_cast<std::size_t>(n), 1));
}

std::vector<Index> Partition::sizes() const {
  std::vector<Index> out(static_cast<std::size_t>(K_), 0);
  for (int l : labels_) ++out[static_cast<std::size_t>(l - 1)];
  return out;
}

std::vector<std::vector<Index>> Partition::members() const {
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(K_));
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    out[static_cast<std::size_t>(labels_[i] - 1)].push_back(static_cast<Index>(i));
  }
  return out;
}

Partition Partition::canonical() const {
  std::vector<long> raw(labels_.begin(), labels_.end());
  return from_raw(raw);
}

bool Partition::same_clusters(const Partition& other) const {
  return n() == other.n() && K_ == other.K_ && canonical() == other.canonical();
}

void MixtureSpec::validate() const {
  std::vector<std::string> bad;
  if (d < 1) bad.emplace_back("d (must be >= 1)");
  if (K < 1) bad.emplace_back("K (must be >= 1)");
  if (n < 1) bad.emplace_back("n (must be >= 1)");
  const auto k = static_cast<std::size_t>(std::max(K, 0));
  if (means.size() != k) {
    bad.emplace_back("means (need K vectors)");
  } else {
    for (const auto& mu : means) {
      if (mu.size() != d || !mu.allFinite()) {
        bad.emplace_back("means (each must be a finite vector of length d)");
        break;
      }
    }
    bool distinct = true;
    for (std::size_t a = 0; a < means.size() && distinct; ++a) {
      for (std::size_t b = a + 1; b < means.size(); ++b) {
        if (means[a].size() == means[b].size() && means[a] == means[b]) {
          distinct = false;
          break;
        }
      }
    }
    if (!distinct) bad.emplace_back("means (must be pairwise distinct)");
  }
  if (variances.size() != k) {
    bad.emplace_back("variances (need K values)");
  } else if (std::any_of(variances.begin(), variances.end(),
                         [](double v) { return !(v >= 0.0) || !std::isfinite(v); })) {
    // sigma = 0 is accepted for exact analytic fixtures.
    bad.emplace_back("variances (must be finite and >= 0)");
  }
  if (mix_weights.size() != k) {
    bad.emplace_back("mix_weights (need K values)");
  } else {
    const double total = std::accumulate(mix_weights.begin(), mix_weights.end(), 0.0);
    const bool negative = std::any_of(mix_weights.begin(), mix_weights.end(),
                                      [](double w) { return !(w >= 0.0); });
    if (negative || std::abs(total - 1.0) > 1e-12) {
      bad.emplace_back("mix_weights (must be non-negative and sum to 1)");
    }
  }
  if (!bad.empty()) {
    std::string msg = "invalid mixture spec:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw ValidationError(msg);
  }
}

MixtureSpec MixtureSpec::basis_means(Index d, int K, double variance, Index n, Seed seed) {
  if (K > d) throw ParameterError("basis means need K <= d");
  MixtureSpec spec;
  spec.d = d;
  spec.K = K;
  spec.n = n;
  spec.seed = seed;
  for (int k = 0; k < K; ++k) spec.means.push_back(Vector::Unit(d, k));
  spec.variances.assign(static_cast<std::size_t>(K), variance);
  spec.mix_weights.assign(static_cast<std::size_t>(K), 1.0 / K);
  return spec;
}

namespace {

// Largest-remainder apportionment of n over the weights.
std::vector<Index> balanced_counts(Index n, const std::vector<double>& w) {
  const std::size_t K = w.size();
  std::vector<Index> counts(K);
  std::vector<std::pair<double, std::size_t>> rem(K);
  Index assigned = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const double exact = static_cast<double>(n) * w[k];
    // Guard against 1e-15 noise in products such as 1000 * 0.05.
    const double snapped = std::abs(exact - std::round(exact)) < 1e-9 ? std::round(exact) : exact;
    counts[k] = static_cast<Index>(std::floor(snapped));
    rem[k] = {snapped - static_cast<double>(counts[k]), k};
    assigned += counts[k];
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < n; ++r, ++assigned) ++counts[rem[r % K].second];
  return counts;
}

}  // namespace

std::pair<DataMatrix, Partition> generate_mixture(const MixtureSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(spec.n));
  if (spec.balanced) {
    const auto counts = balanced_counts(spec.n, spec.mix_weights);
    for (std::size_t k = 0; k < counts.size(); ++k) {
      labels.insert(labels.end(), static_cast<std::size_t>(counts[k]), static_cast<int>(k) + 1);
    }
  } else {
    std::discrete_distribution<int> pick(spec.mix_weights.begin(), spec.mix_weights.end());
    for (Index i = 0; i < spec.n; ++i) labels.push_back(pick(rng) + 1);
  }

  Matrix values(spec.n, spec.d);
  std::normal_distribution<double> z(0.0, 1.0);
  for (Index i = 0; i < spec.n; ++i) {
    const auto k = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)] - 1);
    const double sigma = std::sqrt(spec.variances[k]);
    for (Index j = 0; j < spec.d; ++j) values(i, j) = spec.means[k][j] + sigma * z(rng);
  }
  // Multinomial sampling can leave a component empty; relabel so K counts
  // only clusters actually present.
  std::vector<long> raw(labels.begin(), labels.end());
  Partition part = spec.balanced ? Partition(std::move(labels)) : Partition::from_raw(raw);
  return {DataMatrix(std::move(values)), std::move(part)};
}

std::pair<DataMatrix, Partition> unbalanced_fixture(Index d, Index large_size, Index small_size,
                                                    Seed seed) {
  constexpr int K = 20;
  if (d < 1) throw ParameterError("unbalanced fixture needs d >= 1");
  if (large_size < 1 || small_size < 1) throw ParameterError("cluster sizes must be >= 1");
  MixtureSpec spec;
  spec.d = d;
  spec.K = K;
  spec.seed = seed;
  spec.balanced = true;
  spec.n = 3 * large_size + 17 * small_size;
  for (int k = 0; k < K; ++k) {
    // e_k while k <= d; beyond that the basis is reused at larger radii.
    spec.means.push_back(static_cast<double>(1 + k / d) * Vector::Unit(d, k % d));
    spec.variances.push_back(0.005);
    spec.mix_weights.push_back(static_cast<double>(k < 3 ? large_size : small_size) /
                               static_cast<double>(spec.n));
  }
  // Renormalise exactly so validation is not at the mercy of rounding.
  const double total = std::accumulate(spec.mix_weights.begin(), spec.mix_weights.end(), 0.0);
  for (auto& w : spec.mix_weights) w /= total;
  spec.mix_weights.back() += 1.0 - std::accumulate(spec.mix_weights.begin(), spec.mix_weights.end(), 0.0);
  return generate_mixture(spec);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_cell(std::string_view cell, std::size_t row) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError("non-numeric cell '" + std::string(cell) + "'", row);
  }
  if (!std::isfinite(v)) throw ParseError("non-finite value", row);
  return v;
}

}  // namespace

LabelledData parse_csv(const std::string& text, CsvOptions opts) {
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::size_t line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (opts.skip_header && line_no == 1) continue;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = view.find(',', start);
      row.push_back(parse_cell(view.substr(start, comma - start), line_no));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      throw ParseError("ragged row: expected " + std::to_string(width) + " columns, got " +
                           std::to_string(row.size()),
                       line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty file", 1);
  const std::size_t d = opts.has_labels ? width - 1 : width;
  if (d < 1) throw ParseError("no feature columns", 1);

  Matrix values(static_cast<Index>(rows.size()), static_cast<Index>(d));
  std::vector<long> raw;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    if (opts.has_labels) {
      const double l = rows[i][d];
      if (l != std::floor(l)) throw ParseError("label is not an integer", i + 1);
      raw.push_back(static_cast<long>(l));
    }
  }
  LabelledData out{DataMatrix(std::move(values)), std::nullopt};
  if (opts.has_labels) out.labels = Partition::from_raw(raw);
  return out;
}

LabelledData load_csv(const std::filesystem::path& path, CsvOptions opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), opts);
}

std::string format_csv(const Matrix& values, const Partition* labels) {
  if (labels && labels->n() != values.rows()) {
    throw ParameterError("label count does not match row count");
  }
  std::string out;
  char cell[32];
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out += ',';
      std::snprintf(cell, sizeof cell, "%.17g", values(i, j));
      out += cell;
    }
    if (labels) {
      out += ',';
      out += std::to_string(labels->label(i));
    }
    out += '\n';
  }
  return out;
}

void save_csv(const std::filesystem::path& path, const Matrix& values, const Partition* labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << format_csv(values, labels);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace rpcc
