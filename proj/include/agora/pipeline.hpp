#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "agora/ballots.hpp"
#include "agora/synthpop.hpp"

namespace agora {

using Point = std::vector<double>;

struct RoundConfig {
  std::size_t n_candidates = 5;
  std::size_t top_m = 4;
  double eta = 0.3;  // revision step in [0, 1]
  std::size_t rounds = 1;
  std::uint64_t seed = 0;
};

// Ports. Implementations must be deterministic given the seed they receive.
using GeneratorPort = std::function<std::vector<Point>(
    const std::vector<Point>& opinions, std::size_t n_candidates,
    std::uint64_t seed)>;
using PredictorPort =
    std::function<double(const Point& opinion, const Point& candidate)>;

// Default generator: medoid opinion, centroid, then seeded convex
// combinations of opinion pairs.
GeneratorPort default_generator();
// Default predictor: negative Euclidean distance (the synthpop utility).
PredictorPort exact_predictor();
// Predictor with seeded Gaussian deviation, for inference-error experiments.
PredictorPort noisy_predictor(double noise_scale, std::uint64_t seed);

struct RoundRecord {
  std::size_t round = 0;
  std::vector<std::string> candidate_ids;
  std::vector<Point> candidate_points;
  std::vector<std::vector<double>> scores;  // participant x candidate
  RankingProfile inferred_rankings;
  std::vector<std::string> schulze_order;
  RankingProfile rerank_ballots;  // true-utility ballots over the top_m
  std::string winner;
  Point winner_point;
  double dispersion_before = 0.0;  // measured after selection
  double dispersion_after = 0.0;   // measured after revision
  std::vector<Point> positions_after;
};

struct RoundTrace {
  RoundConfig config;
  std::vector<RoundRecord> rounds;
};

// Mean distance of positions to their centroid.
double dispersion(const std::vector<Point>& positions);

RoundRecord run_round(const std::vector<Point>& positions,
                      const RoundConfig& config, std::size_t round_index,
                      const GeneratorPort& generator,
                      const PredictorPort& predictor);

RoundTrace run_pipeline(const SyntheticWorld& world, const RoundConfig& config,
                        const GeneratorPort& generator,
                        const PredictorPort& predictor);

struct SynthesisRecord {
  Point synthesis;
  std::vector<std::size_t> provenance;  // indices of the opinions that fed it
};

// Two-step reflector skeleton: elicitation record -> synthesis via the
// generator port (first emitted candidate). Default generator's first
// candidate is the medoid opinion.
SynthesisRecord reflect_skeleton(const std::vector<Point>& opinions,
                                 const GeneratorPort& generator,
                                 std::uint64_t seed = 0);

void save_trace(const RoundTrace& trace, const std::string& path);

}  // namespace agora
