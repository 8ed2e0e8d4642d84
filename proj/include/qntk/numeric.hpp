#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace qntk {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Absolute tolerance used for unitarity and realness checks.
inline constexpr double kDefaultTolerance = 1e-10;

/// Relative cutoff separating numerical nullspace from signal eigenvalues.
inline constexpr double kRankCutoff = 1e-9;

/// Sum with a fixed binary tree shape so results do not depend on scheduling.
template <class T>
T pairwise_sum(std::span<const T> v) {
  if (v.size() <= 8) {
    T s{};
    for (const T& x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

}  // namespace qntk

namespace qntk {

/// Pairwise reduction of f(0) + ... + f(n-1) with the same tree shape as pairwise_sum.
template <class T, class F>
T pairwise_reduce(std::size_t begin, std::size_t end, const F& f) {
  if (end - begin <= 8) {
    T s{};
    for (std::size_t i = begin; i < end; ++i) s += f(i);
    return s;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_reduce<T>(begin, mid, f) + pairwise_reduce<T>(mid, end, f);
}

}  // namespace qntk
