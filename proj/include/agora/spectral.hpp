#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agora/core.hpp"
#include "agora/exec.hpp"

namespace agora {

enum class Impute { Zero, RowMean };

struct Projection {
  // components[c] is an orthonormal direction over statement-space (length m).
  std::vector<std::vector<double>> components;
  // coordinates[i] is participant i's position (length d').
  std::vector<std::vector<double>> coordinates;
  std::vector<double> explained_variance;  // non-increasing
  double total_variance = 0.0;
};

struct OpinionGroups {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;  // participant index -> group
  std::vector<std::vector<double>> centroids;
  double silhouette = 0.0;
  std::vector<double> silhouette_by_k;  // index 0 corresponds to k=2
};

struct RepnessReport {
  std::string statement;
  std::size_t group = 0;
  double vote_value = 0.0;
  std::size_t n_g = 0, t_g = 0;
  std::size_t n_gprime = 0, t_gprime = 0;
  double p_g = 0.0, p_gprime = 0.0;
  double ratio = 0.0;
  bool anomaly = false;  // a smoothed pseudo-probability exceeded 1
};

struct ConsensusEntry {
  std::string statement;
  double score = 0.0;
};

struct ConsensusRanking {
  std::vector<ConsensusEntry> ranking;      // score descending
  std::vector<std::string> unvoted;         // excluded statements
};

// Ratio orientation for repness. Paper form is P(g')/P(g); the conventional
// "how much more likely inside than outside" reading is P(g)/P(g').
enum class RepnessOrientation { PaperLiteral, Polis };

// PCA of the imputed, column-centered ternary matrix. Component signs are
// canonicalized: the largest-magnitude loading of each component is positive.
Projection reduce(const WillMatrix& matrix, std::size_t dims,
                  Impute impute = Impute::Zero);

// k-means over projected coordinates for k in 2..k_max; the k with the best
// mean silhouette wins, ties toward smaller k. Deterministic in seed.
OpinionGroups cluster(const Projection& projection, std::size_t k_max,
                      std::uint64_t seed, Exec exec = default_exec());

RepnessReport repness(const WillMatrix& matrix, const OpinionGroups& groups,
                      const std::string& statement_id, double vote_value,
                      std::size_t group, bool count_pass_in_t = true,
                      RepnessOrientation orientation =
                          RepnessOrientation::PaperLiteral);

ConsensusRanking group_informed_consensus(const WillMatrix& matrix,
                                          const OpinionGroups& groups,
                                          bool count_pass_in_t = true);

}  // namespace agora
