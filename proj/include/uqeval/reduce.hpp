#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace uqeval {

/// Pairwise (tree) summation. The split points depend only on the length,
/// so the result is reproducible regardless of how the caller is scheduled.
double pairwise_sum(std::span<const double> values) noexcept;

inline double pairwise_mean(std::span<const double> values) noexcept {
  return values.empty() ? 0.0 : pairwise_sum(values) / static_cast<double>(values.size());
}

/// Runs body(i) for i in [0, count) on up to `threads` workers. Work is
/// claimed dynamically; callers write results into pre-sized slots so the
/// output never depends on scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

/// Worker count from UQEVAL_THREADS, else hardware concurrency, else 1.
std::size_t default_thread_count() noexcept;

}  // namespace uqeval
