#include "agora/factor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "agora/error.hpp"
#include "agora/rng.hpp"
#include "json.hpp"

namespace agora {

using json = nlohmann::ordered_json;

namespace {

struct Obs {
  std::size_t user, item;
  double target;  // rescaled to [0, 1]
};

double rescale(const Schema& schema, double v) {
  if (schema.is_ternary()) return (v + 1.0) / 2.0;  // {-1,0,1} -> {0,.5,1}
  return (v - schema.min) / (schema.max - schema.min);
}

double objective(const std::vector<Obs>& obs, const LatentFactors& p,
                 double li, double lf) {
  double loss = 0.0;
  for (const auto& o : obs) {
    const double r = o.target - p.mu - p.user_intercepts[o.user] -
                     p.item_intercepts[o.item] -
                     p.user_factors[o.user] * p.item_factors[o.item];
    loss += r * r;
  }
  for (double x : p.user_intercepts) loss += li * x * x;
  for (double x : p.item_intercepts) loss += li * x * x;
  for (double x : p.user_factors) loss += lf * x * x;
  for (double x : p.item_factors) loss += lf * x * x;
  return loss;
}

}  // namespace

std::pair<LatentFactors, FitReport> fit(const WillMatrix& matrix,
                                        const FitOptions& options,
                                        Exec exec) {
  if (matrix.n_votes() == 0)
    throw DomainError("BadSpec", "cannot fit an empty matrix");
  if (options.lambda_intercept < 0 || options.lambda_factor < 0)
    throw DomainError("BadSpec", "lambdas must be non-negative");

  const std::size_t n = matrix.n_participants();
  const std::size_t m = matrix.n_statements();
  std::vector<Obs> obs;
  obs.reserve(matrix.n_votes());
  for (const auto& [key, value] : matrix.entries())
    obs.push_back({key.first, key.second, rescale(matrix.schema(), value)});

  // Index observations by user and by item for the closed-form sweeps.
  std::vector<std::vector<std::size_t>> by_user(n), by_item(m);
  for (std::size_t k = 0; k < obs.size(); ++k) {
    by_user[obs[k].user].push_back(k);
    by_item[obs[k].item].push_back(k);
  }

  LatentFactors p;
  p.user_intercepts.assign(n, 0.0);
  p.item_intercepts.assign(m, 0.0);
  p.user_factors.assign(n, 0.0);
  p.item_factors.assign(m, 0.0);
  Rng rng(options.seed);
  for (auto& f : p.user_factors) f = 1e-3 * rng.gaussian();
  for (auto& f : p.item_factors) f = 1e-3 * rng.gaussian();

  const double li = options.lambda_intercept;
  const double lf = options.lambda_factor;

  FitReport report;
  report.options = options;
  double prev = objective(obs, p, li, lf);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    // mu (unregularized).
    double acc = 0.0;
    for (const auto& o : obs)
      acc += o.target - p.user_intercepts[o.user] - p.item_intercepts[o.item] -
             p.user_factors[o.user] * p.item_factors[o.item];
    p.mu = acc / static_cast<double>(obs.size());

    const std::int64_t ni = static_cast<std::int64_t>(n);
    const std::int64_t mi = static_cast<std::int64_t>(m);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
    for (std::int64_t u = 0; u < ni; ++u) {
      if (by_user[u].empty()) continue;
      double s = 0.0;
      for (std::size_t k : by_user[u]) {
        const auto& o = obs[k];
        s += o.target - p.mu - p.item_intercepts[o.item] -
             p.user_factors[u] * p.item_factors[o.item];
      }
      p.user_intercepts[u] = s / (static_cast<double>(by_user[u].size()) + li);
    }

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
    for (std::int64_t i = 0; i < mi; ++i) {
      if (by_item[i].empty()) continue;
      double s = 0.0;
      for (std::size_t k : by_item[i]) {
        const auto& o = obs[k];
        s += o.target - p.mu - p.user_intercepts[o.user] -
             p.user_factors[o.user] * p.item_factors[i];
      }
      p.item_intercepts[i] = s / (static_cast<double>(by_item[i].size()) + li);
    }

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
    for (std::int64_t u = 0; u < ni; ++u) {
      if (by_user[u].empty()) continue;
      double num = 0.0, den = lf;
      for (std::size_t k : by_user[u]) {
        const auto& o = obs[k];
        const double fn = p.item_factors[o.item];
        num += (o.target - p.mu - p.user_intercepts[u] -
                p.item_intercepts[o.item]) *
               fn;
        den += fn * fn;
      }
      p.user_factors[u] = den > 0.0 ? num / den : 0.0;
    }

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
    for (std::int64_t i = 0; i < mi; ++i) {
      if (by_item[i].empty()) continue;
      double num = 0.0, den = lf;
      for (std::size_t k : by_item[i]) {
        const auto& o = obs[k];
        const double fu = p.user_factors[o.user];
        num += (o.target - p.mu - p.user_intercepts[o.user] -
                p.item_intercepts[i]) *
               fu;
        den += fu * fu;
      }
      p.item_factors[i] = den > 0.0 ? num / den : 0.0;
    }

    const double cur = objective(obs, p, li, lf);
    if (!std::isfinite(cur))
      throw DomainError("NonFinite", "ALS objective diverged");
    report.trace.push_back(cur);
    if (prev - cur < 1e-10) break;
    prev = cur;
  }
  report.objective = report.trace.empty() ? prev : report.trace.back();
  return {std::move(p), std::move(report)};
}

double predict(const LatentFactors& factors, std::size_t user,
               std::size_t item) {
  if (user >= factors.user_intercepts.size() ||
      item >= factors.item_intercepts.size())
    throw DomainError("IndexOutOfRange", "user or item index out of range");
  return factors.mu + factors.user_intercepts[user] +
         factors.item_intercepts[item] +
         factors.user_factors[user] * factors.item_factors[item];
}

std::vector<NoteStatus> helpfulness_status(const LatentFactors& factors,
                                           double helpful_threshold,
                                           double polarity_cap) {
  if (!std::isfinite(helpful_threshold) || !std::isfinite(polarity_cap))
    throw DomainError("BadSpec", "thresholds must be finite");
  std::vector<NoteStatus> out(factors.item_intercepts.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double in = factors.item_intercepts[i];
    const double fn = factors.item_factors[i];
    if (in >= helpful_threshold && std::fabs(fn) <= polarity_cap)
      out[i] = NoteStatus::Helpful;
    else if (in <= -helpful_threshold)
      out[i] = NoteStatus::NotHelpful;
    else
      out[i] = NoteStatus::NeedsMoreRatings;
  }
  return out;
}

BridgingRanking bridging_minapproval(const WillMatrix& matrix,
                                     const std::string& attribute,
                                     bool count_pass_in_denominator) {
  if (!matrix.schema().is_ternary())
    throw DomainError("BadSpec", "bridging requires the ternary schema");

  // Group participants by attribute value, sorted group-name order.
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < matrix.n_participants(); ++i) {
    const auto& demo = matrix.participants()[i].demographics;
    auto it = demo.find(attribute);
    if (it == demo.end())
      throw DomainError("MissingAttribute",
                        "participant " + matrix.participants()[i].id +
                            " lacks attribute " + attribute);
    groups[it->second].push_back(i);
  }
  if (groups.size() < 2)
    throw DomainError("EmptyGroup", "need at least 2 groups under " + attribute);

  BridgingRanking out;
  std::vector<const std::vector<std::size_t>*> members;
  for (const auto& [name, idx] : groups) {
    out.group_names.push_back(name);
    members.push_back(&idx);
  }

  for (std::size_t col = 0; col < matrix.n_statements(); ++col) {
    BridgingEntry e;
    e.statement = matrix.statements()[col].id;
    bool rankable = true;
    for (const auto* idx : members) {
      std::size_t agree = 0, voters = 0;
      for (std::size_t i : *idx) {
        const auto v = matrix.value(i, col);
        if (!v) continue;
        if (*v == 0.0 && !count_pass_in_denominator) continue;
        ++voters;
        if (*v == 1.0) ++agree;
      }
      if (voters == 0) {
        rankable = false;
        break;
      }
      e.group_approval.push_back(static_cast<double>(agree) /
                                 static_cast<double>(voters));
    }
    if (!rankable) {
      out.unranked.push_back(e.statement);
      continue;
    }
    e.score = *std::min_element(e.group_approval.begin(),
                                e.group_approval.end());
    out.ranking.push_back(std::move(e));
  }
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [](const BridgingEntry& a, const BridgingEntry& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.statement < b.statement;
                   });
  return out;
}

void save_factors(const LatentFactors& factors, const std::string& path) {
  json j;
  j["mu"] = factors.mu;
  j["user_intercepts"] = factors.user_intercepts;
  j["item_intercepts"] = factors.item_intercepts;
  j["user_factors"] = factors.user_factors;
  j["item_factors"] = factors.item_factors;
  std::ofstream f(path);
  f << j.dump(2) << "\n";
}

LatentFactors load_factors(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("IoError", "cannot open " + path);
  json j = json::parse(f, nullptr, false);
  if (j.is_discarded())
    throw DomainError("ParseError", "malformed factors file: " + path);
  LatentFactors p;
  p.mu = j.at("mu").get<double>();
  p.user_intercepts = j.at("user_intercepts").get<std::vector<double>>();
  p.item_intercepts = j.at("item_intercepts").get<std::vector<double>>();
  p.user_factors = j.at("user_factors").get<std::vector<double>>();
  p.item_factors = j.at("item_factors").get<std::vector<double>>();
  return p;
}

}  // namespace agora
