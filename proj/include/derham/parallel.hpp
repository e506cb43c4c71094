#pragma once

// Thread control and batch drivers. Every batch has a serial reference path;
// both paths produce identical results (work items are independent and
// seeded by index).

#include <cstdint>
#include <functional>
#include <vector>

#include "derham/bogovskii.hpp"
#include "derham/poincare.hpp"

namespace derham {

enum class Execution { serial, parallel };

/// Worker count: DERHAM_THREADS if set (>= 1), else the OpenMP default.
int thread_cap();

/// Runs body(i) for i in [0, count). The first exception thrown by any item
/// is rethrown after the loop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  Execution mode = Execution::parallel);

std::vector<std::vector<double>> bogovskii_T_batch(const BogovskiiContext& ctx, const SampledForm& u,
                                                   const std::vector<std::vector<double>>& points, Execution mode);

struct DefectBatch {
  int forms = 0;
  int nonzero = 0;
  int max_degree_seen = 0;
};

/// Exact homotopy defects for `count` random l-forms; form i is drawn from a
/// generator seeded with seed + i.
DefectBatch homotopy_defect_batch(const PoincareContext& ctx, int l, int count, int max_degree, std::uint64_t seed,
                                  Execution mode);

}  // namespace derham
