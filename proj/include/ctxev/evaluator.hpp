#pragma once

// Silhouette coefficients for clusterings of scalar score points.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ctxev {

class NegativeDistance : public std::domain_error {
 public:
  NegativeDistance() : std::domain_error("silhouette distances must be non-negative") {}
};

class SingleCluster : public std::domain_error {
 public:
  SingleCluster() : std::domain_error("silhouette needs at least two clusters") {}
};

/// (b - a) / max(a, b); 0 when both distances are 0.
inline double silhouette(double a, double b) {
  if (a < 0 || b < 0 || std::isnan(a) || std::isnan(b)) throw NegativeDistance();
  const double m = std::max(a, b);
  if (m == 0) return 0.0;
  return (b - a) / m;
}

struct ScoredCluster {
  std::string label;
  std::vector<double> points;
};

struct ScoredClustering {
  std::vector<ScoredCluster> clusters;

  std::size_t point_count() const {
    std::size_t n = 0;
    for (const auto& c : clusters) n += c.points.size();
    return n;
  }
};

struct SilhouetteRow {
  std::string cluster;
  double sample = 0;
  double a = 0;
  double b = 0;
  double coefficient = 0;
};

struct AbsoluteDifference {
  double operator()(double x, double y) const { return std::abs(x - y); }
};

namespace detail {

inline void validate(const ScoredClustering& c) {
  for (const auto& cl : c.clusters) {
    if (cl.points.empty()) throw std::invalid_argument("cluster '" + cl.label + "' is empty");
    for (double p : cl.points) {
      if (!std::isfinite(p)) throw std::invalid_argument("cluster '" + cl.label + "' has a non-finite point");
    }
  }
  if (c.clusters.size() < 2) throw SingleCluster();
}

template <class Metric>
double mean_distance(double p, const std::vector<double>& points, Metric metric, std::size_t skip) {
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i == skip) continue;
    sum += metric(p, points[i]);
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace detail

/// Silhouette of point `point` in cluster `cluster`. A singleton cluster has a = 0.
template <class Metric = AbsoluteDifference>
SilhouetteRow point_silhouette(const ScoredClustering& clustering, std::size_t cluster, std::size_t point,
                               Metric metric = {}) {
  detail::validate(clustering);
  const ScoredCluster& own = clustering.clusters.at(cluster);
  const double p = own.points.at(point);

  SilhouetteRow row{own.label, p, detail::mean_distance(p, own.points, metric, point),
                    std::numeric_limits<double>::infinity(), 0};
  for (std::size_t c = 0; c < clustering.clusters.size(); ++c) {
    if (c == cluster) continue;
    row.b = std::min(row.b, detail::mean_distance(p, clustering.clusters[c].points, metric, std::size_t(-1)));
  }
  row.coefficient = silhouette(row.a, row.b);
  return row;
}

/// Looks `p` up by value; the first cluster containing it wins.
inline SilhouetteRow point_silhouette(double p, const ScoredClustering& clustering) {
  for (std::size_t c = 0; c < clustering.clusters.size(); ++c) {
    const auto& pts = clustering.clusters[c].points;
    auto it = std::find(pts.begin(), pts.end(), p);
    if (it != pts.end()) return point_silhouette(clustering, c, static_cast<std::size_t>(it - pts.begin()));
  }
  throw std::invalid_argument("point is not in the clustering");
}

template <class Metric = AbsoluteDifference>
std::vector<SilhouetteRow> silhouette_rows(const ScoredClustering& clustering, Metric metric = {}) {
  detail::validate(clustering);
  std::vector<SilhouetteRow> rows;
  for (std::size_t c = 0; c < clustering.clusters.size(); ++c) {
    for (std::size_t i = 0; i < clustering.clusters[c].points.size(); ++i)
      rows.push_back(point_silhouette(clustering, c, i, metric));
  }
  return rows;
}

inline double mean_silhouette(const std::vector<SilhouetteRow>& rows) {
  if (rows.empty()) throw SingleCluster();
  double sum = 0;
  for (const auto& r : rows) sum += r.coefficient;
  return sum / static_cast<double>(rows.size());
}

template <class Metric = AbsoluteDifference>
double mean_silhouette(const ScoredClustering& clustering, Metric metric = {}) {
  return mean_silhouette(silhouette_rows(clustering, metric));
}

/// Interpretation bands; each is closed on its lower edge.
inline std::string_view quality_band(double s) {
  if (s >= 0.7) return "excellent";
  if (s >= 0.5) return "clear";
  if (s >= 0.25) return "noisy";
  return "no-significant-centers";
}

/// A published (sample, a, b, coefficient) row checked against the formula.
struct ReferenceRow {
  double sample;
  double a;
  double b;
  double printed;
  int printed_decimals;
  double computed = 0;
  bool consistent = false;
};

inline constexpr double kReferenceTolerance = 0.005;

/// Agreement within +-0.005, or equality once the computed value is truncated to
/// the printed number of decimals (0.6667 printed as 0.66).
inline bool agrees_with_printed(double computed, double printed, int printed_decimals) {
  if (std::abs(computed - printed) <= kReferenceTolerance + 1e-12) return true;
  const double scale = std::pow(10.0, printed_decimals);
  return std::abs(std::floor(computed * scale + 1e-9) / scale - printed) < 1e-9;
}

/// Six reference rows from the original evaluation. The last row's printed
/// coefficient (0.8) does not follow from its a and b; the formula gives 0.444.
inline std::vector<ReferenceRow> reference_table_check() {
  std::vector<ReferenceRow> rows = {
      {0.45, 0.025, 0.093, 0.731, 3}, {0.57, 0.036, 0.045, 0.2, 1}, {0.66, 0.0, 0.62, 1.0, 0},
      {0.72, 0.02, 0.06, 0.66, 2},    {0.82, 0.02, 0.1, 0.8, 1},    {0.91, 0.05, 0.09, 0.8, 1},
  };
  for (auto& r : rows) {
    r.computed = silhouette(r.a, r.b);
    r.consistent = agrees_with_printed(r.computed, r.printed, r.printed_decimals);
  }
  return rows;
}

namespace detail {

inline std::string fixed(double v, int digits = 3) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

}  // namespace detail

inline std::string format_reference_check(const std::vector<ReferenceRow>& rows) {
  std::string out = "sample\ta\tb\tprinted\tcomputed\tstatus\n";
  for (const auto& r : rows) {
    out += detail::fixed(r.sample, 2) + "\t" + detail::fixed(r.a) + "\t" + detail::fixed(r.b) + "\t" +
           detail::fixed(r.printed) + "\t" + detail::fixed(r.computed) + "\t" +
           (r.consistent ? "ok" : "INCONSISTENT: printed value does not satisfy (b-a)/max(a,b)") + "\n";
  }
  return out;
}

/// TSV of per-point rows followed by `mean` and `band` lines.
inline std::string format_eval_report(const std::vector<SilhouetteRow>& rows) {
  std::string out = "cluster\tsample\ta\tb\tcoefficient\n";
  for (const auto& r : rows) {
    out += r.cluster + "\t" + detail::fixed(r.sample) + "\t" + detail::fixed(r.a) + "\t" + detail::fixed(r.b) + "\t" +
           detail::fixed(r.coefficient) + "\n";
  }
  if (rows.empty()) {
    out += "mean\tundefined\n";
    out += "band\tundefined (fewer than two non-empty clusters)\n";
  } else {
    const double m = mean_silhouette(rows);
    out += "mean\t" + detail::fixed(m) + "\n";
    out += "band\t" + std::string(quality_band(m)) + "\n";
  }
  return out;
}

/// point,coefficient CSV for external plotting.
inline std::string format_point_csv(const std::vector<SilhouetteRow>& rows) {
  std::string out = "cluster,point,coefficient\n";
  for (const auto& r : rows) out += r.cluster + "," + detail::fixed(r.sample) + "," + detail::fixed(r.coefficient) + "\n";
  return out;
}

}  // namespace ctxev
