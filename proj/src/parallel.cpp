#include "derham/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <string>

namespace derham {

int thread_cap() {
  if (const char* env = std::getenv("DERHAM_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (...) {
    }
  }
  return std::max(1, omp_get_max_threads());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, Execution mode) {
  if (mode == Execution::serial || count < 2 || thread_cap() == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  std::mutex mu;
  std::atomic<bool> failed{false};
  const long n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_cap())
  for (long i = 0; i < n; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!first) first = std::current_exception();
      failed = true;
    }
  }
  if (first) std::rethrow_exception(first);
}

std::vector<std::vector<double>> bogovskii_T_batch(const BogovskiiContext& ctx, const SampledForm& u,
                                                   const std::vector<std::vector<double>>& points, Execution mode) {
  std::vector<std::vector<double>> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) { out[i] = bogovskii_T(ctx, u, points[i]); }, mode);
  return out;
}

DefectBatch homotopy_defect_batch(const PoincareContext& ctx, int l, int count, int max_degree, std::uint64_t seed,
                                  Execution mode) {
  const int n = ctx.dimension();
  std::vector<char> bad(count, 0);
  std::vector<int> deg(count, 0);
  parallel_for(
      count,
      [&](std::size_t i) {
        std::mt19937_64 rng(seed + i);
        const PolyForm u = random_polyform(n, l, max_degree, rng);
        deg[i] = total_degree(u);
        bad[i] = homotopy_defect_R(ctx, u).empty() ? 0 : 1;
      },
      mode);
  DefectBatch r;
  r.forms = count;
  for (int i = 0; i < count; ++i) {
    r.nonzero += bad[i];
    r.max_degree_seen = std::max(r.max_degree_seen, deg[i]);
  }
  return r;
}

}  // namespace derham
