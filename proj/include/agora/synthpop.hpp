#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agora/core.hpp"

namespace agora {

struct AgentSpec {
  std::vector<double> ideal_point;
  double noise_scale = 0.0;
  double pass_band = 0.0;
};

struct ClusterSpec {
  std::vector<double> center;
  std::size_t count = 0;
  double spread = 0.0;  // stddev of the isotropic Gaussian around the center
};

struct SyntheticWorld {
  std::vector<AgentSpec> agents;
  std::vector<std::size_t> cluster_labels;  // ground truth, one per agent
  std::vector<std::vector<double>> statement_points;
  std::uint64_t seed = 0;
  std::size_t dims() const {
    return agents.empty() ? 0 : agents.front().ideal_point.size();
  }
};

struct WorldParams {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t d = 1;
  double noise_scale = 0.0;
  double pass_band = 0.2;
};

// Agents drawn Gaussian around their cluster centers, statement points
// uniform in [-1,1]^d. Pure function of (params, clusters, seed).
SyntheticWorld generate_world(const WorldParams& params,
                              const std::vector<ClusterSpec>& clusters,
                              std::uint64_t seed);

// Ternary votes: score = <ideal, point> + noise; +1 above the pass band,
// -1 below, 0 inside. Pairs sampled uniformly without replacement.
WillMatrix cast_votes(const SyntheticWorld& world, double density,
                      std::uint64_t seed);

// Preference oracle: negative Euclidean distance, higher is better.
double utility(const SyntheticWorld& world, std::size_t agent,
               std::size_t statement);

void save_world(const SyntheticWorld& world, const std::string& path);
SyntheticWorld load_world(const std::string& path);

}  // namespace agora
