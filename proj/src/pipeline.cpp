#include "agora/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "agora/error.hpp"
#include "agora/rng.hpp"
#include "json.hpp"

namespace agora {

using json = nlohmann::ordered_json;

namespace {

double dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

std::size_t medoid_index(const std::vector<Point>& pts) {
  std::size_t best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) sum += dist(pts[i], pts[j]);
    if (sum < best_sum) {
      best_sum = sum;
      best = i;
    }
  }
  return best;
}

Point centroid(const std::vector<Point>& pts) {
  Point c(pts.front().size(), 0.0);
  for (const auto& p : pts)
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += p[k];
  for (double& x : c) x /= static_cast<double>(pts.size());
  return c;
}

std::string candidate_id(std::size_t i, std::size_t count) {
  std::size_t width = 1;
  for (std::size_t x = count > 0 ? count - 1 : 0; x >= 10; x /= 10) ++width;
  std::string digits = std::to_string(i);
  return "c" + std::string(width - digits.size(), '0') + digits;
}

}  // namespace

GeneratorPort default_generator() {
  return [](const std::vector<Point>& opinions, std::size_t n_candidates,
            std::uint64_t seed) {
    std::vector<Point> out;
    out.push_back(opinions[medoid_index(opinions)]);
    if (out.size() < n_candidates) out.push_back(centroid(opinions));
    Rng rng(seed);
    while (out.size() < n_candidates) {
      const std::size_t a = rng.below(opinions.size());
      const std::size_t b = rng.below(opinions.size());
      const double w = rng.uniform();
      Point p(opinions[a].size());
      for (std::size_t k = 0; k < p.size(); ++k)
        p[k] = w * opinions[a][k] + (1.0 - w) * opinions[b][k];
      out.push_back(std::move(p));
    }
    out.resize(n_candidates);
    return out;
  };
}

PredictorPort exact_predictor() {
  return [](const Point& opinion, const Point& candidate) {
    return -dist(opinion, candidate);
  };
}

PredictorPort noisy_predictor(double noise_scale, std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [rng, noise_scale](const Point& opinion, const Point& candidate) {
    return -dist(opinion, candidate) + rng->gaussian(0.0, noise_scale);
  };
}

double dispersion(const std::vector<Point>& positions) {
  const Point c = centroid(positions);
  double sum = 0.0;
  for (const auto& p : positions) sum += dist(p, c);
  return sum / static_cast<double>(positions.size());
}

namespace {

// Scores -> strict per-participant rankings, ties by candidate id.
RankingProfile rankings_from_scores(
    const std::vector<std::string>& candidate_ids,
    const std::vector<std::vector<double>>& scores) {
  RankingProfile profile;
  profile.candidates = candidate_ids;
  for (const auto& row : scores) {
    std::vector<std::size_t> order(candidate_ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       if (row[a] != row[b]) return row[a] > row[b];
                       return candidate_ids[a] < candidate_ids[b];
                     });
    std::vector<std::string> ranking;
    for (std::size_t i : order) ranking.push_back(candidate_ids[i]);
    profile.rankings.push_back(std::move(ranking));
  }
  return profile;
}

}  // namespace

RoundRecord run_round(const std::vector<Point>& positions,
                      const RoundConfig& config, std::size_t round_index,
                      const GeneratorPort& generator,
                      const PredictorPort& predictor) {
  if (positions.empty()) throw DomainError("EmptyInput", "no participants");
  if (config.top_m > config.n_candidates || config.eta < 0.0 ||
      config.eta > 1.0)
    throw DomainError("BadSpec", "top_m <= n_candidates and eta in [0,1]");

  RoundRecord rec;
  rec.round = round_index;

  // Per-round generator seed derived from the config seed.
  const std::uint64_t round_seed =
      config.seed * 0x9e3779b97f4a7c15ULL + round_index;
  rec.candidate_points = generator(positions, config.n_candidates, round_seed);
  if (rec.candidate_points.size() != config.n_candidates)
    throw DomainError("PortFailure", "generator returned wrong cardinality");
  const std::size_t dims = positions.front().size();
  for (const auto& p : rec.candidate_points) {
    if (p.size() != dims)
      throw DomainError("PortFailure", "generator dimension mismatch");
    for (double x : p)
      if (!std::isfinite(x))
        throw DomainError("PortFailure", "generator emitted non-finite point");
  }
  for (std::size_t c = 0; c < config.n_candidates; ++c)
    rec.candidate_ids.push_back(candidate_id(c, config.n_candidates));

  // Stage 3: predictor scores all pairs, assembled in participant order.
  rec.scores.assign(positions.size(),
                    std::vector<double>(config.n_candidates, 0.0));
  for (std::size_t p = 0; p < positions.size(); ++p)
    for (std::size_t c = 0; c < config.n_candidates; ++c) {
      const double s = predictor(positions[p], rec.candidate_points[c]);
      if (!std::isfinite(s))
        throw DomainError("PortFailure", "predictor emitted non-finite score");
      rec.scores[p][c] = s;
    }

  // Stage 4: Schulze over inferred rankings.
  rec.inferred_rankings = rankings_from_scores(rec.candidate_ids, rec.scores);
  rec.schulze_order = schulze(rec.inferred_rankings).result.order;

  // Stage 5: top_m candidates (Schulze order) re-ranked by true utilities.
  std::vector<std::string> top(rec.schulze_order.begin(),
                               rec.schulze_order.begin() +
                                   std::min(config.top_m,
                                            rec.schulze_order.size()));
  std::vector<std::size_t> top_idx;
  for (const auto& id : top)
    top_idx.push_back(static_cast<std::size_t>(
        std::find(rec.candidate_ids.begin(), rec.candidate_ids.end(), id) -
        rec.candidate_ids.begin()));
  std::vector<std::vector<double>> true_scores(positions.size());
  for (std::size_t p = 0; p < positions.size(); ++p) {
    for (std::size_t i : top_idx)
      true_scores[p].push_back(-dist(positions[p], rec.candidate_points[i]));
  }
  rec.rerank_ballots = rankings_from_scores(top, true_scores);
  rec.winner = schulze(rec.rerank_ballots).result.winner;
  rec.winner_point = rec.candidate_points[static_cast<std::size_t>(
      std::find(rec.candidate_ids.begin(), rec.candidate_ids.end(),
                rec.winner) -
      rec.candidate_ids.begin())];

  rec.dispersion_before = dispersion(positions);

  // Stage 6 stand-in: convex movement toward the winner.
  rec.positions_after = positions;
  for (auto& pos : rec.positions_after)
    for (std::size_t k = 0; k < dims; ++k)
      pos[k] = (1.0 - config.eta) * pos[k] + config.eta * rec.winner_point[k];
  rec.dispersion_after = dispersion(rec.positions_after);
  return rec;
}

RoundTrace run_pipeline(const SyntheticWorld& world, const RoundConfig& config,
                        const GeneratorPort& generator,
                        const PredictorPort& predictor) {
  RoundTrace trace;
  trace.config = config;
  std::vector<Point> positions;
  for (const auto& a : world.agents) positions.push_back(a.ideal_point);
  for (std::size_t r = 0; r < config.rounds; ++r) {
    RoundRecord rec = run_round(positions, config, r, generator, predictor);
    positions = rec.positions_after;
    trace.rounds.push_back(std::move(rec));
  }
  return trace;
}

SynthesisRecord reflect_skeleton(const std::vector<Point>& opinions,
                                 const GeneratorPort& generator,
                                 std::uint64_t seed) {
  if (opinions.empty())
    throw DomainError("EmptyInput", "no opinions to synthesize");
  SynthesisRecord rec;
  rec.synthesis = generator(opinions, 1, seed).front();
  for (std::size_t i = 0; i < opinions.size(); ++i) rec.provenance.push_back(i);
  return rec;
}

namespace {

json profile_to_json(const RankingProfile& profile) {
  json j;
  j["candidates"] = profile.candidates;
  j["rankings"] = profile.rankings;
  return j;
}

}  // namespace

void save_trace(const RoundTrace& trace, const std::string& path) {
  json j;
  j["config"] = {{"n_candidates", trace.config.n_candidates},
                 {"top_m", trace.config.top_m},
                 {"eta", trace.config.eta},
                 {"rounds", trace.config.rounds},
                 {"seed", trace.config.seed}};
  json rounds = json::array();
  for (const auto& r : trace.rounds) {
    json rj;
    rj["round"] = r.round;
    rj["candidate_ids"] = r.candidate_ids;
    rj["candidate_points"] = r.candidate_points;
    rj["scores"] = r.scores;
    rj["inferred_rankings"] = profile_to_json(r.inferred_rankings);
    rj["schulze_order"] = r.schulze_order;
    rj["rerank_ballots"] = profile_to_json(r.rerank_ballots);
    rj["winner"] = r.winner;
    rj["winner_point"] = r.winner_point;
    rj["dispersion_before"] = r.dispersion_before;
    rj["dispersion_after"] = r.dispersion_after;
    rj["positions_after"] = r.positions_after;
    rounds.push_back(std::move(rj));
  }
  j["rounds"] = rounds;
  std::ofstream f(path);
  f << j.dump(2) << "\n";
}

}  // namespace agora
