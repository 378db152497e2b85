#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace selfbh {

/// Serial is the reference path; Parallel must produce bit-identical
/// results because every index owns its state and reductions happen after
/// the loop, in index order.
enum class Execution { Serial, Parallel };

/// Calls body(i) for i in [0, n). With Execution::Parallel and OpenMP
/// available the iterations run concurrently. An exception from any
/// iteration is rethrown after the loop (lowest index wins).
template <typename Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
#if defined(SELFBH_HAVE_OPENMP)
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
#else
  for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

/// Pairwise (cascade) summation; order-fixed so results do not depend on
/// how the terms were produced.
inline double pairwise_sum(const double* first, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += first[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(first, half) + pairwise_sum(first + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

}  // namespace selfbh
