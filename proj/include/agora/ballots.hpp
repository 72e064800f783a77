#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace agora {

// Strict total orders over a shared candidate set.
struct RankingProfile {
  std::vector<std::string> candidates;
  // rankings[v] lists candidate ids, best first; each a permutation of
  // candidates.
  std::vector<std::vector<std::string>> rankings;
};

// Validates the permutation invariant; throws InvalidRanking.
void validate(const RankingProfile& profile);

struct PairwiseMatrix {
  std::vector<std::string> candidates;
  // d[x][y] = number of voters ranking x above y.
  std::vector<std::vector<std::size_t>> d;
};

PairwiseMatrix pairwise(const RankingProfile& profile);

struct BallotResult {
  std::string rule;
  std::string winner;
  bool tie = false;
  std::map<std::string, double> scores;      // plurality / borda
  std::vector<std::string> order;            // full order where defined
};

BallotResult plurality(const RankingProfile& profile);
BallotResult borda(const RankingProfile& profile);

struct CondorcetResult {
  std::optional<std::string> winner;  // empty means a cycle / no winner
  bool cycle = false;
  PairwiseMatrix pairwise;
};

CondorcetResult condorcet(const RankingProfile& profile);

struct SchulzeResult {
  BallotResult result;  // rule = "schulze", winner + full order
  PairwiseMatrix pairwise;
  std::vector<std::vector<std::size_t>> strength;  // widest-path p[x][y]
};

// Winning-votes link strength; widest-path strengths via the
// Floyd-Warshall-style recurrence; residual ties lexicographic and flagged.
SchulzeResult schulze(const RankingProfile& profile);

struct CloneReport {
  std::string winner_before;
  std::string winner_after;       // clone ids mapped back to the original
  std::string raw_winner_after;   // possibly a clone id
  bool independent = false;       // winner unchanged up to clone identity
  // Residual-tie flags. With ties the winner is a lexicographic pick among
  // equals, which the clone axiom does not protect.
  bool tie_before = false;
  bool tie_after = false;
};

// Inserts n_clones copies adjacent to the candidate in every ranking, with a
// seeded random within-block order, and re-runs Schulze.
CloneReport clone_test(const RankingProfile& profile,
                       const std::string& candidate, std::size_t n_clones,
                       std::uint64_t seed);

// JSONL rankings file: {"participant": "...", "ranking": ["s1", ...]}.
RankingProfile load_rankings(const std::string& path);

}  // namespace agora
