#include "ctrace/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ctrace/error.hpp"

namespace ctrace {

double separation_unit(double n) { return std::sqrt(n) * std::log(n); }

SeparatedPartition::SeparatedPartition(std::vector<double> points,
                                       std::vector<int> cluster_of_point, double C, double n)
    : points_(std::move(points)), cluster_of_point_(std::move(cluster_of_point)), C_(C), n_(n) {
  if (points_.size() != cluster_of_point_.size()) {
    throw Error("InvalidArgument", "cluster labels do not match the point count");
  }
  cluster_count_ = cluster_of_point_.empty()
                       ? 0
                       : *std::max_element(cluster_of_point_.begin(), cluster_of_point_.end());
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return points_[a] < points_[b]; });
}

double SeparatedPartition::merge_threshold() const { return 2.0 * C_ * separation_unit(n_); }

int SeparatedPartition::assign(double value) const {
  // order_ is sorted by (value, index), so the first of equally distant
  // candidates is the lower value / lower index one.
  const auto it = std::lower_bound(order_.begin(), order_.end(), value,
                                   [&](std::size_t i, double v) { return points_[i] < v; });
  std::size_t best;
  if (it == order_.end()) {
    best = order_.back();
  } else if (it == order_.begin()) {
    best = *it;
  } else {
    // Leftmost point of the lower value's run of duplicates.
    const double below = points_[*std::prev(it)];
    const auto run = std::lower_bound(order_.begin(), it, below,
                                      [&](std::size_t i, double v) { return points_[i] < v; });
    best = value - below <= points_[*it] - value ? *run : *it;
  }
  return cluster_of_point_[best];
}

SeparatedPartition build_partition(std::vector<double> points, double C, double n) {
  if (points.empty()) throw Error("InvalidArgument", "partition needs at least one point");
  if (!(C > 0.0)) throw Error("InvalidArgument", "separation constant C must be > 0");
  if (!(n >= 2.0)) throw Error("InvalidArgument", "string length n must be >= 2");
  const double threshold = 2.0 * C * separation_unit(n);

  std::vector<std::vector<std::size_t>> clusters(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) clusters[i] = {i};

  const auto close = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    for (std::size_t u : a) {
      for (std::size_t v : b) {
        if (std::abs(points[u] - points[v]) <= threshold) return true;
      }
    }
    return false;
  };

  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < clusters.size() && !merged; ++i) {
      if (clusters[i].empty()) continue;
      for (std::size_t j = i + 1; j < clusters.size() && !merged; ++j) {
        if (clusters[j].empty() || !close(clusters[i], clusters[j])) continue;
        clusters[i].insert(clusters[i].end(), clusters[j].begin(), clusters[j].end());
        clusters[j].clear();
        merged = true;
      }
    }
  }

  std::vector<const std::vector<std::size_t>*> live;
  for (const auto& c : clusters) {
    if (!c.empty()) live.push_back(&c);
  }
  const auto min_value = [&](const std::vector<std::size_t>* c) {
    double m = points[c->front()];
    for (std::size_t i : *c) m = std::min(m, points[i]);
    return m;
  };
  std::stable_sort(live.begin(), live.end(),
                   [&](auto* a, auto* b) { return min_value(a) < min_value(b); });
  std::vector<int> labels(points.size(), 0);
  for (std::size_t id = 0; id < live.size(); ++id) {
    for (std::size_t i : *live[id]) labels[i] = static_cast<int>(id + 1);
  }
  return SeparatedPartition(std::move(points), std::move(labels), C, n);
}

std::map<int, double> cluster_means(const SeparatedPartition& part,
                                    std::optional<std::span<const double>> weights) {
  const auto& pts = part.points();
  if (weights && weights->size() != pts.size()) {
    throw Error("InvalidArgument", "weights must match the point count");
  }
  std::map<int, std::pair<double, double>> acc;  // id -> (weighted sum, total weight)
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double w = weights ? (*weights)[i] : 1.0;
    auto& [sum, total] = acc[part.cluster_of_point()[i]];
    sum += w * pts[i];
    total += w;
  }
  std::map<int, double> means;
  for (const auto& [id, st] : acc) means[id] = st.first / st.second;
  return means;
}

std::optional<std::string> check_partition_conditions(const SeparatedPartition& part,
                                                      std::span<const double> queries) {
  const auto& pts = part.points();
  const auto& label = part.cluster_of_point();
  const double sep = part.merge_threshold();
  const double spread = part.C() * static_cast<double>(pts.size()) * 2.0 *
                        separation_unit(part.n());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = std::abs(pts[i] - pts[j]);
      if (label[i] != label[j] && !(d > sep)) {
        return "condition 1: points " + std::to_string(i) + "," + std::to_string(j) +
               " in different clusters are within the separation threshold";
      }
      if (label[i] == label[j] && d > spread) {
        return "condition 2: points " + std::to_string(i) + "," + std::to_string(j) +
               " in one cluster exceed the diameter bound";
      }
    }
  }
  for (double v : queries) {
    double best = INFINITY;
    for (double p : pts) best = std::min(best, std::abs(p - v));
    const int got = part.assign(v);
    bool matches_nearest = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (std::abs(pts[i] - v) == best && label[i] == got) matches_nearest = true;
    }
    if (!matches_nearest) {
      return "condition 3: value " + std::to_string(v) + " not assigned to a nearest point's cluster";
    }
  }
  return std::nullopt;
}

}  // namespace ctrace
