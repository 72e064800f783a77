#include "agora/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "agora/error.hpp"
#include "agora/rng.hpp"

namespace agora {

Projection reduce(const WillMatrix& matrix, std::size_t dims, Impute impute) {
  const std::size_t n = matrix.n_participants();
  const std::size_t m = matrix.n_statements();
  if (n < 2) throw DomainError("TooFewRows", "need at least 2 participants");
  if (dims < 1 || dims > std::min(n, m))
    throw DomainError("BadSpec", "dims must be in [1, min(n, m)]");

  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, m);
  if (impute == Impute::RowMean) {
    std::vector<double> sum(n, 0.0);
    std::vector<std::size_t> cnt(n, 0);
    for (const auto& [key, value] : matrix.entries()) {
      sum[key.first] += value;
      ++cnt[key.first];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double mean = cnt[i] ? sum[i] / cnt[i] : 0.0;
      for (std::size_t j = 0; j < m; ++j) dense(i, j) = mean;
    }
  }
  for (const auto& [key, value] : matrix.entries())
    dense(key.first, key.second) = value;

  // Center each column.
  Eigen::RowVectorXd col_mean = dense.colwise().mean();
  dense.rowwise() -= col_mean;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(
      dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();

  Projection proj;
  proj.total_variance = dense.squaredNorm() / static_cast<double>(n - 1);
  proj.components.resize(dims);
  proj.coordinates.assign(n, std::vector<double>(dims, 0.0));
  proj.explained_variance.resize(dims);

  for (std::size_t c = 0; c < dims; ++c) {
    Eigen::VectorXd comp = svd.matrixV().col(c);
    Eigen::VectorXd coord = svd.matrixU().col(c) * sv(c);
    // Sign canonicalization: largest-magnitude loading made positive.
    Eigen::Index arg = 0;
    comp.cwiseAbs().maxCoeff(&arg);
    if (comp(arg) < 0.0) {
      comp = -comp;
      coord = -coord;
    }
    proj.components[c].assign(comp.data(), comp.data() + comp.size());
    for (std::size_t i = 0; i < n; ++i) proj.coordinates[i][c] = coord(i);
    proj.explained_variance[c] = sv(c) * sv(c) / static_cast<double>(n - 1);
  }
  return proj;
}

namespace {

double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

struct KmeansResult {
  std::vector<std::size_t> assignment;
  std::vector<std::vector<double>> centroids;
};

void assign_points(const std::vector<std::vector<double>>& pts,
                   const std::vector<std::vector<double>>& centroids,
                   std::vector<std::size_t>& out, Exec exec) {
  const std::int64_t n = static_cast<std::int64_t>(pts.size());
  const std::size_t k = centroids.size();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    double best_d = sqdist(pts[i], centroids[0]);
    for (std::size_t c = 1; c < k; ++c) {
      const double d = sqdist(pts[i], centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    out[i] = best;
  }
}

KmeansResult kmeans(const std::vector<std::vector<double>>& pts, std::size_t k,
                    std::uint64_t seed, Exec exec) {
  const std::size_t n = pts.size();
  const std::size_t d = pts.front().size();
  Rng rng(seed);

  // Farthest-point seeding: random first center, then repeatedly the point
  // farthest from its nearest chosen center (ties to the smallest index).
  std::vector<std::size_t> seeds{static_cast<std::size_t>(rng.below(n))};
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (seeds.size() < k) {
    for (std::size_t i = 0; i < n; ++i)
      nearest[i] = std::min(nearest[i], sqdist(pts[i], pts[seeds.back()]));
    std::size_t far = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (nearest[i] > nearest[far]) far = i;
    seeds.push_back(far);
  }

  KmeansResult res;
  res.centroids.resize(k);
  for (std::size_t c = 0; c < k; ++c) res.centroids[c] = pts[seeds[c]];
  res.assignment.assign(n, 0);

  std::vector<std::size_t> prev(n, SIZE_MAX);
  for (int iter = 0; iter < 200; ++iter) {
    assign_points(pts, res.centroids, res.assignment, exec);

    // Empty-cluster repair: steal the point farthest from its centroid.
    for (std::size_t c = 0; c < k; ++c) {
      bool empty = true;
      for (std::size_t i = 0; i < n; ++i)
        if (res.assignment[i] == c) {
          empty = false;
          break;
        }
      if (!empty) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d2 = sqdist(pts[i], res.centroids[res.assignment[i]]);
        if (d2 > far_d) {
          far_d = d2;
          far = i;
        }
      }
      res.assignment[far] = c;
    }

    if (res.assignment == prev) break;
    prev = res.assignment;

    // Centroid update, accumulated in index order.
    std::vector<std::vector<double>> sum(k, std::vector<double>(d, 0.0));
    std::vector<std::size_t> cnt(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) sum[res.assignment[i]][j] += pts[i][j];
      ++cnt[res.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t j = 0; j < d; ++j)
        res.centroids[c][j] = sum[c][j] / static_cast<double>(cnt[c]);
  }
  return res;
}

double mean_silhouette(const std::vector<std::vector<double>>& pts,
                       const std::vector<std::size_t>& assignment,
                       std::size_t k, Exec exec) {
  const std::int64_t n = static_cast<std::int64_t>(pts.size());
  std::vector<std::size_t> size(k, 0);
  for (std::size_t a : assignment) ++size[a];

  std::vector<double> s(n, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    const std::size_t own = assignment[i];
    if (size[own] <= 1) {
      s[i] = 0.0;
      continue;
    }
    std::vector<double> dist_sum(k, 0.0);
    for (std::int64_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dist_sum[assignment[j]] += std::sqrt(sqdist(pts[i], pts[j]));
    }
    const double a = dist_sum[own] / static_cast<double>(size[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c == own || size[c] == 0) continue;
      b = std::min(b, dist_sum[c] / static_cast<double>(size[c]));
    }
    const double denom = std::max(a, b);
    s[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  double total = 0.0;
  for (std::int64_t i = 0; i < n; ++i) total += s[i];
  return total / static_cast<double>(n);
}

}  // namespace

OpinionGroups cluster(const Projection& projection, std::size_t k_max,
                      std::uint64_t seed, Exec exec) {
  const auto& pts = projection.coordinates;
  const std::size_t n = pts.size();
  if (k_max < 2) throw DomainError("BadSpec", "k_max must be at least 2");
  bool all_same = true;
  for (std::size_t i = 1; i < n && all_same; ++i)
    if (pts[i] != pts[0]) all_same = false;
  if (n < 2 || all_same)
    throw DomainError("DegenerateInput", "projected points are all identical");

  OpinionGroups best;
  double best_sil = -std::numeric_limits<double>::infinity();
  const std::size_t hi = std::min(k_max, n);
  for (std::size_t k = 2; k <= hi; ++k) {
    KmeansResult res = kmeans(pts, k, seed, exec);
    const double sil = mean_silhouette(pts, res.assignment, k, exec);
    best.silhouette_by_k.push_back(sil);
    if (sil > best_sil) {  // strict: ties keep the smaller k
      best_sil = sil;
      best.k = k;
      best.assignment = std::move(res.assignment);
      best.centroids = std::move(res.centroids);
      best.silhouette = sil;
    }
  }
  return best;
}

namespace {

struct Tally {
  std::size_t n = 0;  // matching votes
  std::size_t t = 0;  // votes counted in the denominator
};

Tally tally_group(const WillMatrix& matrix, const OpinionGroups& groups,
                  std::size_t col, double vote_value, std::size_t group,
                  bool in_group, bool count_pass_in_t) {
  Tally out;
  for (std::size_t i = 0; i < matrix.n_participants(); ++i) {
    const bool member = groups.assignment[i] == group;
    if (member != in_group) continue;
    const auto v = matrix.value(i, col);
    if (!v) continue;
    if (*v == 0.0 && !count_pass_in_t) continue;
    ++out.t;
    if (*v == vote_value) ++out.n;
  }
  return out;
}

double smoothed(std::size_t n, std::size_t t) {
  return (2.0 + static_cast<double>(n)) / (1.0 + static_cast<double>(t));
}

}  // namespace

RepnessReport repness(const WillMatrix& matrix, const OpinionGroups& groups,
                      const std::string& statement_id, double vote_value,
                      std::size_t group, bool count_pass_in_t,
                      RepnessOrientation orientation) {
  if (vote_value != 1.0 && vote_value != -1.0)
    throw DomainError("BadSpec", "vote_value must be +1 or -1");
  if (groups.assignment.size() != matrix.n_participants())
    throw DomainError("BadSpec", "groups do not cover the matrix");
  const std::size_t col = matrix.col_of(statement_id);

  bool complement_nonempty = false;
  for (std::size_t a : groups.assignment)
    if (a != group) {
      complement_nonempty = true;
      break;
    }
  if (!complement_nonempty)
    throw DomainError("EmptyComplement", "every participant is in the group");

  const Tally in =
      tally_group(matrix, groups, col, vote_value, group, true, count_pass_in_t);
  const Tally out = tally_group(matrix, groups, col, vote_value, group, false,
                                count_pass_in_t);

  RepnessReport r;
  r.statement = statement_id;
  r.group = group;
  r.vote_value = vote_value;
  r.n_g = in.n;
  r.t_g = in.t;
  r.n_gprime = out.n;
  r.t_gprime = out.t;
  r.p_g = smoothed(in.n, in.t);
  r.p_gprime = smoothed(out.n, out.t);
  r.ratio = orientation == RepnessOrientation::PaperLiteral
                ? r.p_gprime / r.p_g
                : r.p_g / r.p_gprime;
  r.anomaly = r.p_g > 1.0 || r.p_gprime > 1.0;
  return r;
}

ConsensusRanking group_informed_consensus(const WillMatrix& matrix,
                                          const OpinionGroups& groups,
                                          bool count_pass_in_t) {
  if (groups.k < 2)
    throw DomainError("BadSpec", "need at least 2 groups");
  if (groups.assignment.size() != matrix.n_participants())
    throw DomainError("BadSpec", "groups do not cover the matrix");

  ConsensusRanking out;
  for (std::size_t col = 0; col < matrix.n_statements(); ++col) {
    std::vector<std::size_t> agree(groups.k, 0), total(groups.k, 0);
    std::size_t any = 0;
    for (std::size_t i = 0; i < matrix.n_participants(); ++i) {
      const auto v = matrix.value(i, col);
      if (!v) continue;
      ++any;
      if (*v == 0.0 && !count_pass_in_t) continue;
      ++total[groups.assignment[i]];
      if (*v == 1.0) ++agree[groups.assignment[i]];
    }
    const std::string& id = matrix.statements()[col].id;
    if (any == 0) {
      out.unvoted.push_back(id);
      continue;
    }
    double score = 1.0;
    for (std::size_t g = 0; g < groups.k; ++g)
      score *= smoothed(agree[g], total[g]);
    out.ranking.push_back({id, score});
  }
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [](const ConsensusEntry& a, const ConsensusEntry& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.statement < b.statement;
                   });
  return out;
}

}  // namespace agora
