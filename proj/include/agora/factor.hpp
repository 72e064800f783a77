#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agora/core.hpp"
#include "agora/exec.hpp"

namespace agora {

// Parameters of v_un = mu + i_u + i_n + f_u * f_n.
struct LatentFactors {
  double mu = 0.0;
  std::vector<double> user_intercepts;
  std::vector<double> item_intercepts;
  std::vector<double> user_factors;
  std::vector<double> item_factors;
};

struct FitOptions {
  double lambda_intercept = 0.15;
  double lambda_factor = 0.03;
  int epochs = 200;
  std::uint64_t seed = 0;
};

struct FitReport {
  double objective = 0.0;
  std::vector<double> trace;  // objective after each sweep, non-increasing
  FitOptions options;
};

enum class NoteStatus { Helpful, NotHelpful, NeedsMoreRatings };

struct BridgingEntry {
  std::string statement;
  double score = 0.0;                    // min over groups of approval rate
  std::vector<double> group_approval;    // per group, group-name order
};

struct BridgingRanking {
  std::vector<std::string> group_names;  // sorted attribute values
  std::vector<BridgingEntry> ranking;    // score descending
  std::vector<std::string> unranked;     // statements lacking votes in a group
};

// Alternating least squares on the regularized squared loss. Ternary votes
// map {-1 -> 0, 0 -> 0.5, +1 -> 1}; rating schemas rescale to [0, 1].
// Each closed-form sub-step lowers the objective; the trace proves it.
std::pair<LatentFactors, FitReport> fit(const WillMatrix& matrix,
                                        const FitOptions& options,
                                        Exec exec = default_exec());

double predict(const LatentFactors& factors, std::size_t user,
               std::size_t item);

// Helpful needs a high intercept earned without leaning on the polarity
// factor: i_n >= threshold and |f_n| <= cap.
std::vector<NoteStatus> helpfulness_status(const LatentFactors& factors,
                                           double helpful_threshold,
                                           double polarity_cap);

// Remesh-style min-approval bridging across the groups induced by a
// demographic attribute.
BridgingRanking bridging_minapproval(const WillMatrix& matrix,
                                     const std::string& attribute,
                                     bool count_pass_in_denominator = true);

void save_factors(const LatentFactors& factors, const std::string& path);
LatentFactors load_factors(const std::string& path);

}  // namespace agora
