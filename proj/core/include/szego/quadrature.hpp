#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace szego {

/// Gauss-Legendre rule on the open interval (0, 1). `sigma[i] = 1 - node[i]`
/// is stored separately so endpoint-clustered maps can use it without
/// cancellation.
struct GaussLegendreRule {
  std::vector<double> node;
  std::vector<double> sigma;
  std::vector<double> weight;

  [[nodiscard]] std::size_t size() const noexcept { return node.size(); }
};

/// N-point rule, computed once per N and cached for the process lifetime.
const GaussLegendreRule& gauss_legendre(std::size_t points);

/// Sum in a fixed pairwise tree; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

/// log(sum exp(v_i)) with max-shift stabilisation and pairwise summation.
/// Returns -inf for an empty input or when every term is -inf.
double log_sum_exp(std::span<const double> log_terms);

/// Runs fn(i) for i in [0, count) on up to `workers` threads using static
/// contiguous chunks. fn must only write to state owned by index i. The
/// first exception thrown by any chunk is rethrown after all threads join.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  const std::size_t threads =
      workers <= 1 ? 1 : std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t begin = count * t / threads;
      const std::size_t end = count * (t + 1) / threads;
      pool.emplace_back([&, begin, end] {
        try {
          for (std::size_t i = begin; i < end; ++i) fn(i);
        } catch (...) {
          std::lock_guard lock(guard);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace szego
