#pragma once

#include <map>
#include <optional>
#include <string>
#include <span>
#include <vector>

namespace ctrace {

inline constexpr double kDefaultSeparation = 3.0;

// sqrt(n) * ln(n): the concentration scale of a gap in a length-n string.
double separation_unit(double n);

// C-separated partition of real points: points in different clusters are
// more than 2*C*sqrt(n)*ln(n) apart, a cluster spans at most
// 2*C*(size-1)*sqrt(n)*ln(n), and any real is assigned the cluster of its
// nearest input point. Cluster ids run 1..m by ascending smallest member.
class SeparatedPartition {
 public:
  SeparatedPartition(std::vector<double> points, std::vector<int> cluster_of_point, double C,
                     double n);

  const std::vector<double>& points() const { return points_; }
  const std::vector<int>& cluster_of_point() const { return cluster_of_point_; }
  int cluster_count() const { return cluster_count_; }
  double C() const { return C_; }
  double n() const { return n_; }
  // 2 * C * sqrt(n) * ln(n)
  double merge_threshold() const;

  // Nearest input point's cluster; ties go to the lower point value, then to
  // the lower point index.
  int assign(double value) const;

 private:
  std::vector<double> points_;
  std::vector<int> cluster_of_point_;
  int cluster_count_ = 0;
  double C_;
  double n_;
  std::vector<std::size_t> order_;  // point indices sorted by (value, index)
};

// Algorithm: start from singletons and, scanning cluster pairs in ascending
// index order, merge the first pair with members within the threshold;
// restart after each merge. Throws Error("InvalidArgument") for C <= 0,
// n < 2 or no points.
SeparatedPartition build_partition(std::vector<double> points, double C, double n);

inline int assign(const SeparatedPartition& part, double value) { return part.assign(value); }

// Mean of member points per cluster id. With weights, a weighted mean.
std::map<int, double> cluster_means(const SeparatedPartition& part,
                                    std::optional<std::span<const double>> weights = std::nullopt);

// Checks the three defining conditions; returns a description of the first
// violation, or nullopt. Condition 3 is probed at the given query values.
std::optional<std::string> check_partition_conditions(const SeparatedPartition& part,
                                                      std::span<const double> queries);

}  // namespace ctrace
