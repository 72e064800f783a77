#pragma once

#include <optional>
#include <string>
#include <vector>

namespace agora {

// Dense utility table: participants x candidate pool.
struct UtilityTable {
  std::vector<std::string> participants;
  std::vector<std::string> pool;
  // utilities[p][s], all finite.
  std::vector<std::vector<double>> utilities;

  std::size_t n() const { return participants.size(); }
  std::size_t m() const { return pool.size(); }
};

struct Slate {
  std::vector<std::string> selected;  // selection order
  // matched[r] = participants labeled satisfied by selected[r].
  std::vector<std::vector<std::string>> matched;
  std::vector<std::string> unmatched;  // remainder, when k does not divide n
};

struct JRWitness {
  std::vector<std::string> group;
  std::string candidate;  // common approved / dominating non-committee item
};

struct JRVerdict {
  bool satisfied = true;
  std::optional<JRWitness> witness;
};

struct MatchedSlack {
  std::string participant;
  std::string matched_statement;
  double slack = 0.0;  // own utility minus best other committee utility
};

struct MatchedVerdict {
  bool satisfied = true;
  std::vector<MatchedSlack> report;  // one per matched participant
};

// Greedy n/k rule: each round selects the statement maximizing the q-th
// highest utility among active participants, q = ceil(|A| / rounds left),
// then removes its top-q supporters. Ties lexicographic throughout.
Slate greedy_slate(const UtilityTable& utilities, std::size_t k);

// Approval JR: a group of >= ceil(n/k) voters who approve a common candidate
// and nothing in the committee is a violation.
JRVerdict jr_check_approval(const std::vector<std::vector<bool>>& approvals,
                            const std::vector<std::string>& participants,
                            const std::vector<std::string>& pool,
                            const std::vector<std::string>& committee,
                            std::size_t k);

// Rating JR: a non-committee item rated strictly above every committee item
// by >= ceil(n/k) participants is a violation.
JRVerdict jr_check_rating(const UtilityTable& utilities,
                          const std::vector<std::string>& committee,
                          std::size_t k);

// Strengthened matched check: every matched participant must rate their
// matched statement highest within the slate.
MatchedVerdict matched_jr_check(const Slate& slate,
                                const UtilityTable& utilities);

UtilityTable load_utilities(const std::string& path);

}  // namespace agora
