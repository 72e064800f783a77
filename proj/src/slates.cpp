#include "agora/slates.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "agora/error.hpp"
#include "json.hpp"

namespace agora {

using json = nlohmann::json;

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

std::size_t pool_index(const std::vector<std::string>& pool,
                       const std::string& id) {
  auto it = std::find(pool.begin(), pool.end(), id);
  if (it == pool.end())
    throw DomainError("UnknownId", "statement not in pool: " + id);
  return static_cast<std::size_t>(it - pool.begin());
}

}  // namespace

Slate greedy_slate(const UtilityTable& table, std::size_t k) {
  const std::size_t n = table.n();
  const std::size_t m = table.m();
  if (k < 1) throw DomainError("BadSpec", "k must be at least 1");
  if (m < k) throw DomainError("PoolExhausted", "pool smaller than k");
  if (n < k) throw DomainError("BadSpec", "need at least k participants");

  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), 0);
  std::vector<bool> taken(m, false);

  Slate slate;
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t remaining = k - r;
    const std::size_t q = ceil_div(active.size(), remaining);

    // Pick the statement with the best q-th highest utility among active
    // participants; ties by lexicographic statement id.
    std::size_t best = m;
    double best_val = 0.0;
    std::vector<double> vals;
    for (std::size_t s = 0; s < m; ++s) {
      if (taken[s]) continue;
      vals.clear();
      for (std::size_t p : active) vals.push_back(table.utilities[p][s]);
      std::nth_element(vals.begin(), vals.begin() + (q - 1), vals.end(),
                       std::greater<double>());
      const double v = vals[q - 1];
      if (best == m || v > best_val ||
          (v == best_val && table.pool[s] < table.pool[best])) {
        best = s;
        best_val = v;
      }
    }

    taken[best] = true;
    slate.selected.push_back(table.pool[best]);

    // Top-q supporters in the active set; utility ties at the boundary
    // broken by participant id.
    std::vector<std::size_t> order = active;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       const double ua = table.utilities[a][best];
                       const double ub = table.utilities[b][best];
                       if (ua != ub) return ua > ub;
                       return table.participants[a] < table.participants[b];
                     });
    std::vector<std::string> matched;
    std::set<std::size_t> removed;
    for (std::size_t i = 0; i < q; ++i) {
      matched.push_back(table.participants[order[i]]);
      removed.insert(order[i]);
    }
    slate.matched.push_back(std::move(matched));
    std::vector<std::size_t> next;
    for (std::size_t p : active)
      if (!removed.count(p)) next.push_back(p);
    active = std::move(next);
  }
  for (std::size_t p : active) slate.unmatched.push_back(table.participants[p]);
  return slate;
}

JRVerdict jr_check_approval(const std::vector<std::vector<bool>>& approvals,
                            const std::vector<std::string>& participants,
                            const std::vector<std::string>& pool,
                            const std::vector<std::string>& committee,
                            std::size_t k) {
  const std::size_t n = participants.size();
  const std::size_t threshold = ceil_div(n, k);

  std::vector<std::size_t> committee_idx;
  for (const auto& c : committee) committee_idx.push_back(pool_index(pool, c));

  std::vector<bool> covered(n, false);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t c : committee_idx)
      if (approvals[p][c]) {
        covered[p] = true;
        break;
      }

  // Candidates visited in lexicographic id order for a deterministic witness.
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pool[a] < pool[b];
  });

  for (std::size_t c : order) {
    std::vector<std::string> group;
    for (std::size_t p = 0; p < n; ++p)
      if (!covered[p] && approvals[p][c]) group.push_back(participants[p]);
    if (group.size() >= threshold) {
      std::sort(group.begin(), group.end());
      JRVerdict verdict;
      verdict.satisfied = false;
      verdict.witness = JRWitness{std::move(group), pool[c]};
      return verdict;
    }
  }
  return {};
}

JRVerdict jr_check_rating(const UtilityTable& table,
                          const std::vector<std::string>& committee,
                          std::size_t k) {
  const std::size_t n = table.n();
  const std::size_t threshold = ceil_div(n, k);

  std::vector<std::size_t> committee_idx;
  for (const auto& c : committee)
    committee_idx.push_back(pool_index(table.pool, c));
  std::set<std::size_t> in_committee(committee_idx.begin(),
                                     committee_idx.end());

  std::vector<double> best_committee(n);
  for (std::size_t p = 0; p < n; ++p) {
    double best = table.utilities[p][committee_idx.front()];
    for (std::size_t c : committee_idx)
      best = std::max(best, table.utilities[p][c]);
    best_committee[p] = best;
  }

  std::vector<std::size_t> order(table.m());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.pool[a] < table.pool[b];
  });

  for (std::size_t j : order) {
    if (in_committee.count(j)) continue;
    std::vector<std::string> group;
    for (std::size_t p = 0; p < n; ++p)
      if (table.utilities[p][j] > best_committee[p])
        group.push_back(table.participants[p]);
    if (group.size() >= threshold) {
      std::sort(group.begin(), group.end());
      JRVerdict verdict;
      verdict.satisfied = false;
      verdict.witness = JRWitness{std::move(group), table.pool[j]};
      return verdict;
    }
  }
  return {};
}

MatchedVerdict matched_jr_check(const Slate& slate, const UtilityTable& table) {
  std::map<std::string, std::size_t> pidx;
  for (std::size_t p = 0; p < table.n(); ++p) pidx[table.participants[p]] = p;

  std::vector<std::size_t> slate_idx;
  for (const auto& s : slate.selected)
    slate_idx.push_back(pool_index(table.pool, s));

  MatchedVerdict verdict;
  for (std::size_t r = 0; r < slate.selected.size(); ++r) {
    const std::size_t own = slate_idx[r];
    for (const auto& participant : slate.matched[r]) {
      const std::size_t p = pidx.at(participant);
      const double mine = table.utilities[p][own];
      double best_other = -std::numeric_limits<double>::infinity();
      for (std::size_t other : slate_idx)
        if (other != own)
          best_other = std::max(best_other, table.utilities[p][other]);
      MatchedSlack ms;
      ms.participant = participant;
      ms.matched_statement = slate.selected[r];
      ms.slack = slate_idx.size() == 1 ? 0.0 : mine - best_other;
      if (ms.slack < 0.0) verdict.satisfied = false;
      verdict.report.push_back(std::move(ms));
    }
  }
  return verdict;
}

UtilityTable load_utilities(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("IoError", "cannot open " + path);
  std::map<std::string, std::map<std::string, double>> rows;
  std::set<std::string> pool;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw DomainError("ParseError", "malformed JSON in " + path +
                                          " at line " + std::to_string(lineno));
    const auto p = j.at("participant").get<std::string>();
    const auto s = j.at("statement").get<std::string>();
    rows[p][s] = j.at("utility").get<double>();
    pool.insert(s);
  }
  UtilityTable table;
  table.pool.assign(pool.begin(), pool.end());
  for (const auto& [p, row] : rows) {
    table.participants.push_back(p);
    std::vector<double> u;
    for (const auto& s : table.pool) {
      auto it = row.find(s);
      if (it == row.end())
        throw DomainError("SchemaViolation",
                          "utility table must be dense; missing (" + p + ", " +
                              s + ")");
      u.push_back(it->second);
    }
    table.utilities.push_back(std::move(u));
  }
  return table;
}

}  // namespace agora
