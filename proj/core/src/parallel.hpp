#pragma once

#include <cstddef>
#include <vector>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

namespace mingap::detail {

/// out[i] = fn(i) for i in [0, n). Each slot is written by exactly one task,
/// so any later reduction over `out` in index order is thread-count independent.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n), [&](const auto& range) {
    for (std::size_t i = range.begin(); i != range.end(); ++i) {
      out[i] = fn(i);
    }
  });
  return out;
}

} // namespace mingap::detail
