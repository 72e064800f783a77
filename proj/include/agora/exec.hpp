#pragma once

namespace agora {

// Execution policy for the data-parallel kernels (k-means assignment,
// silhouette, ALS sweeps, utility scoring). Serial is the reference mode:
// every acceptance test runs it, and the parallel variants must reproduce
// its output bit for bit (per-element work is independent; reductions are
// assembled in fixed index order).
enum class Exec { Serial, Parallel };

Exec default_exec();
void set_default_exec(Exec e);

int hardware_threads();

}  // namespace agora
