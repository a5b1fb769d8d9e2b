#pragma once

#include <cstddef>
#include <vector>

namespace usdr {

// M circular windows of length w, stride d, over N time-ordered samples.
// Window j covers {(j*d + t) mod N : t in [0, w)}; every sample lies in
// exactly m_train = w/d windows.
struct SubsetPlan {
  std::size_t n = 0;
  std::size_t w = 0;
  std::size_t d = 0;
  std::size_t m = 0;
  std::size_t m_train = 0;
  std::vector<std::vector<std::size_t>> windows;

  bool contains(std::size_t j, std::size_t i) const noexcept;
};

struct Membership {
  std::vector<std::size_t> in_subsets;
  std::vector<std::size_t> out_subsets;
};

// Requires 1 <= d <= w <= n, d | n, d | w and w/d < n/d.
SubsetPlan build_plan(std::size_t n, std::size_t w, std::size_t d);

// Plan with `m` subsets each containing every sample `m_train` times. The
// series length used is n trimmed down to a multiple of m.
SubsetPlan build_plan_from_counts(std::size_t n, std::size_t m, std::size_t m_train);

Membership membership(const SubsetPlan& plan, std::size_t i);

}  // namespace usdr
