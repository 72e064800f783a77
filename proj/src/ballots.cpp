#include "agora/ballots.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

#include "agora/error.hpp"
#include "agora/rng.hpp"
#include "json.hpp"

namespace agora {

using json = nlohmann::json;

void validate(const RankingProfile& profile) {
  if (profile.rankings.empty())
    throw DomainError("InvalidRanking", "profile has no rankings");
  if (profile.candidates.empty())
    throw DomainError("InvalidRanking", "profile has no candidates");
  const std::set<std::string> universe(profile.candidates.begin(),
                                       profile.candidates.end());
  if (universe.size() != profile.candidates.size())
    throw DomainError("InvalidRanking", "duplicate candidate id");
  for (const auto& r : profile.rankings) {
    std::set<std::string> seen(r.begin(), r.end());
    if (seen.size() != r.size() || seen != universe)
      throw DomainError("InvalidRanking",
                        "ranking is not a strict total order over the "
                        "candidate set");
  }
}

namespace {

std::unordered_map<std::string, std::size_t> index_of(
    const std::vector<std::string>& candidates) {
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < candidates.size(); ++i) idx[candidates[i]] = i;
  return idx;
}

// argmax over scores, lexicographic winner on ties, tie flag out.
std::string pick_winner(const std::vector<std::string>& candidates,
                        const std::map<std::string, double>& scores,
                        bool& tie) {
  double best_score = scores.at(candidates.front());
  for (const auto& c : candidates)
    best_score = std::max(best_score, scores.at(c));
  std::string best;
  std::size_t at_top = 0;
  for (const auto& c : candidates) {
    if (scores.at(c) != best_score) continue;
    ++at_top;
    if (best.empty() || c < best) best = c;
  }
  tie = at_top > 1;
  return best;
}

}  // namespace

PairwiseMatrix pairwise(const RankingProfile& profile) {
  validate(profile);
  const std::size_t n = profile.candidates.size();
  auto idx = index_of(profile.candidates);
  PairwiseMatrix pm;
  pm.candidates = profile.candidates;
  pm.d.assign(n, std::vector<std::size_t>(n, 0));
  for (const auto& r : profile.rankings) {
    for (std::size_t a = 0; a < r.size(); ++a)
      for (std::size_t b = a + 1; b < r.size(); ++b)
        ++pm.d[idx[r[a]]][idx[r[b]]];
  }
  return pm;
}

BallotResult plurality(const RankingProfile& profile) {
  validate(profile);
  BallotResult res;
  res.rule = "plurality";
  for (const auto& c : profile.candidates) res.scores[c] = 0.0;
  for (const auto& r : profile.rankings) res.scores[r.front()] += 1.0;
  res.winner = pick_winner(profile.candidates, res.scores, res.tie);
  return res;
}

BallotResult borda(const RankingProfile& profile) {
  validate(profile);
  BallotResult res;
  res.rule = "borda";
  const double top = static_cast<double>(profile.candidates.size()) - 1.0;
  for (const auto& c : profile.candidates) res.scores[c] = 0.0;
  for (const auto& r : profile.rankings)
    for (std::size_t pos = 0; pos < r.size(); ++pos)
      res.scores[r[pos]] += top - static_cast<double>(pos);
  res.winner = pick_winner(profile.candidates, res.scores, res.tie);
  return res;
}

CondorcetResult condorcet(const RankingProfile& profile) {
  CondorcetResult res;
  res.pairwise = pairwise(profile);
  const std::size_t n = res.pairwise.candidates.size();
  for (std::size_t x = 0; x < n; ++x) {
    bool beats_all = true;
    for (std::size_t y = 0; y < n && beats_all; ++y)
      if (x != y && res.pairwise.d[x][y] <= res.pairwise.d[y][x])
        beats_all = false;
    if (beats_all) {
      res.winner = res.pairwise.candidates[x];
      return res;
    }
  }
  res.cycle = true;
  return res;
}

SchulzeResult schulze(const RankingProfile& profile) {
  SchulzeResult out;
  out.pairwise = pairwise(profile);
  const auto& d = out.pairwise.d;
  const std::size_t n = d.size();

  // Link strength: winning votes where x beats y pairwise, else 0.
  auto& p = out.strength;
  p.assign(n, std::vector<std::size_t>(n, 0));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (x != y && d[x][y] > d[y][x]) p[x][y] = d[x][y];

  // Widest-path recurrence.
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t x = 0; x < n; ++x) {
      if (x == k) continue;
      for (std::size_t y = 0; y < n; ++y) {
        if (y == k || y == x) continue;
        p[x][y] = std::max(p[x][y], std::min(p[x][k], p[k][y]));
      }
    }

  // x above y iff p[x][y] > p[y][x]; order by wins, residual ties
  // lexicographic and flagged.
  std::vector<std::size_t> wins(n, 0);
  bool tie = false;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      if (p[x][y] > p[y][x]) ++wins[x];
      if (x < y && p[x][y] == p[y][x]) tie = true;
    }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (wins[a] != wins[b]) return wins[a] > wins[b];
                     return out.pairwise.candidates[a] <
                            out.pairwise.candidates[b];
                   });

  out.result.rule = "schulze";
  out.result.tie = tie;
  for (std::size_t i : order)
    out.result.order.push_back(out.pairwise.candidates[i]);
  out.result.winner = out.result.order.front();
  return out;
}

CloneReport clone_test(const RankingProfile& profile,
                       const std::string& candidate, std::size_t n_clones,
                       std::uint64_t seed) {
  validate(profile);
  if (n_clones < 1) throw DomainError("BadSpec", "n_clones must be >= 1");
  if (std::find(profile.candidates.begin(), profile.candidates.end(),
                candidate) == profile.candidates.end())
    throw DomainError("UnknownId", "candidate not in profile: " + candidate);

  CloneReport report;
  const auto before = schulze(profile);
  report.winner_before = before.result.winner;
  report.tie_before = before.result.tie;

  // Clone block: the original plus n_clones copies with derived ids.
  std::vector<std::string> block{candidate};
  for (std::size_t c = 0; c < n_clones; ++c)
    block.push_back(candidate + "~clone" + std::to_string(c));

  RankingProfile cloned;
  cloned.candidates = profile.candidates;
  for (std::size_t c = 1; c < block.size(); ++c)
    cloned.candidates.push_back(block[c]);

  Rng rng(seed);
  for (const auto& r : profile.rankings) {
    // Random within-block order, fresh per ranking.
    std::vector<std::string> shuffled = block;
    for (std::size_t i = shuffled.size() - 1; i > 0; --i)
      std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
    std::vector<std::string> expanded;
    for (const auto& c : r) {
      if (c == candidate)
        expanded.insert(expanded.end(), shuffled.begin(), shuffled.end());
      else
        expanded.push_back(c);
    }
    cloned.rankings.push_back(std::move(expanded));
  }

  const auto after = schulze(cloned);
  report.raw_winner_after = after.result.winner;
  report.tie_after = after.result.tie;
  report.winner_after =
      report.raw_winner_after.rfind(candidate + "~clone", 0) == 0
          ? candidate
          : report.raw_winner_after;
  report.independent = report.winner_after == report.winner_before;
  return report;
}

RankingProfile load_rankings(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("IoError", "cannot open " + path);
  RankingProfile profile;
  std::string line;
  int lineno = 0;
  std::set<std::string> candidates;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw DomainError("ParseError", "malformed JSON in " + path +
                                          " at line " + std::to_string(lineno));
    auto ranking = j.at("ranking").get<std::vector<std::string>>();
    for (const auto& c : ranking) candidates.insert(c);
    profile.rankings.push_back(std::move(ranking));
  }
  profile.candidates.assign(candidates.begin(), candidates.end());
  validate(profile);
  return profile;
}

}  // namespace agora
