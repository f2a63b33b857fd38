#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace esi {

// Execution policy for the data-parallel kernels. Every kernel taking an
// Exec produces bitwise-identical results under both policies; reductions
// use a fixed chunk tree independent of the thread count.
enum class Exec { serial, parallel };

template <class F>
void par_for(Exec ex, std::int64_t n, F&& f) {
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) f(i);
  } else {
    for (std::int64_t i = 0; i < n; ++i) f(i);
  }
}

// Deterministic sum: partial sums over fixed-size chunks, combined in index
// order, so the summation tree does not depend on Exec or thread count.
template <class F>
double par_sum(Exec ex, std::int64_t n, F&& f) {
  if (n == 0) return 0.0;
  const std::int64_t chunk = 4096;
  const std::int64_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(static_cast<std::size_t>(n_chunks), 0.0);
  par_for(ex, n_chunks, [&](std::int64_t c) {
    const std::int64_t lo = c * chunk;
    const std::int64_t hi = lo + chunk < n ? lo + chunk : n;
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += f(i);
    partial[static_cast<std::size_t>(c)] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace esi
