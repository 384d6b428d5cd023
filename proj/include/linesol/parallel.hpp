// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <future>
#include <vector>

namespace linesol {

/// fn(x) for every x concurrently; results in input order, so the output does
/// not depend on scheduling. Exceptions propagate from the first failing x.
template <class T, class Fn>
auto parallel_map(const std::vector<T>& xs, Fn fn) {
  using R = decltype(fn(xs.front()));
  std::vector<std::future<R>> fut;
  fut.reserve(xs.size());
  for (const T& x : xs) fut.push_back(std::async(std::launch::async, fn, x));
  std::vector<R> out;
  out.reserve(xs.size());
  for (auto& f : fut) out.push_back(f.get());
  return out;
}

}  // namespace linesol
