// Benchmark: serial reference kernels vs the OpenMP variants.
// The parallel path must be bit-identical to serial; this tool reports
// wall times and verifies the outputs match while it is at it.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "agora/exec.hpp"
#include "agora/factor.hpp"
#include "agora/spectral.hpp"
#include "agora/synthpop.hpp"

using namespace agora;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

WillMatrix make_matrix(std::size_t n, std::size_t m, std::uint64_t seed) {
  WorldParams params{.n = n, .m = m, .d = 3, .noise_scale = 0.3,
                     .pass_band = 0.2};
  std::vector<ClusterSpec> clusters{{{-1, 0, 0}, n / 2, 0.4},
                                    {{1, 0, 0}, n - n / 2, 0.4}};
  auto world = generate_world(params, clusters, seed);
  return cast_votes(world, 0.6, seed + 1);
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const double t0 = now_ms();
    f();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n = 600, m = 200;
  int reps = 3;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--n")
      n = std::strtoul(argv[i + 1], nullptr, 10);
    else if (flag == "--m")
      m = std::strtoul(argv[i + 1], nullptr, 10);
    else if (flag == "--reps")
      reps = std::atoi(argv[i + 1]);
    else {
      std::fprintf(stderr, "usage: agora_bench [--n N] [--m M] [--reps R]\n");
      return 2;
    }
  }

  std::printf("threads available: %zu\n", hardware_threads());
  auto matrix = make_matrix(n, m, 42);
  std::printf("matrix: %zu x %zu, %zu votes\n", matrix.n_participants(),
              matrix.n_statements(), matrix.n_votes());

  auto projection = reduce(matrix, 2);

  OpinionGroups gs, gp;
  const double t_cluster_s = time_best_of(
      reps, [&] { gs = cluster(projection, 6, 1, Exec::Serial); });
  const double t_cluster_p = time_best_of(
      reps, [&] { gp = cluster(projection, 6, 1, Exec::Parallel); });
  const bool cluster_ok = gs.assignment == gp.assignment &&
                          gs.silhouette == gp.silhouette && gs.k == gp.k;
  std::printf("cluster   serial %8.2f ms  parallel %8.2f ms  speedup %.2fx  "
              "identical %s\n",
              t_cluster_s, t_cluster_p, t_cluster_s / t_cluster_p,
              cluster_ok ? "yes" : "NO");

  FitOptions opts;
  opts.epochs = 30;
  opts.seed = 1;
  LatentFactors fs, fp;
  double obj_s = 0, obj_p = 0;
  const double t_fit_s = time_best_of(reps, [&] {
    auto [f, r] = fit(matrix, opts, Exec::Serial);
    fs = f;
    obj_s = r.objective;
  });
  const double t_fit_p = time_best_of(reps, [&] {
    auto [f, r] = fit(matrix, opts, Exec::Parallel);
    fp = f;
    obj_p = r.objective;
  });
  const bool fit_ok = fs.user_intercepts == fp.user_intercepts &&
                      fs.item_intercepts == fp.item_intercepts &&
                      fs.user_factors == fp.user_factors &&
                      fs.item_factors == fp.item_factors && obj_s == obj_p;
  std::printf("als fit   serial %8.2f ms  parallel %8.2f ms  speedup %.2fx  "
              "identical %s\n",
              t_fit_s, t_fit_p, t_fit_s / t_fit_p, fit_ok ? "yes" : "NO");

  return (cluster_ok && fit_ok) ? 0 : 1;
}
