#include "usdr/subsetting.hpp"

#include "usdr/error.hpp"

#include <string>

namespace usdr {

bool SubsetPlan::contains(std::size_t j, std::size_t i) const noexcept {
  // offset of i from the window start, measured forward around the circle
  const std::size_t start = j * d;
  const std::size_t offset = (i + n - start % n) % n;
  return offset < w;
}

SubsetPlan build_plan(std::size_t n, std::size_t w, std::size_t d) {
  if (d == 0 || w == 0 || n == 0)
    throw Error(Errc::InvalidArgument, "plan sizes must be positive");
  if (w > n)
    throw Error(Errc::WindowTooLarge,
                "window " + std::to_string(w) + " exceeds series length " + std::to_string(n));
  if (d > w)
    throw Error(Errc::InvalidArgument,
                "stride " + std::to_string(d) + " exceeds window " + std::to_string(w));
  if (n % d != 0 || w % d != 0)
    throw Error(Errc::NonDivisible, "stride " + std::to_string(d) + " must divide both n=" +
                                        std::to_string(n) + " and w=" + std::to_string(w));
  SubsetPlan plan;
  plan.n = n;
  plan.w = w;
  plan.d = d;
  plan.m = n / d;
  plan.m_train = w / d;
  if (plan.m_train >= plan.m)
    throw Error(Errc::DegeneratePlan, "every sample would be in every subset (M_train=" +
                                          std::to_string(plan.m_train) +
                                          ", M=" + std::to_string(plan.m) + ")");
  plan.windows.resize(plan.m);
  for (std::size_t j = 0; j < plan.m; ++j) {
    auto& win = plan.windows[j];
    win.reserve(w);
    for (std::size_t t = 0; t < w; ++t) win.push_back((j * d + t) % n);
  }
  return plan;
}

SubsetPlan build_plan_from_counts(std::size_t n, std::size_t m, std::size_t m_train) {
  if (m == 0 || m_train == 0)
    throw Error(Errc::InvalidArgument, "subset counts must be positive");
  if (n < m)
    throw Error(Errc::WindowTooLarge, "series of length " + std::to_string(n) +
                                          " is shorter than the subset count " +
                                          std::to_string(m));
  const std::size_t d = n / m;
  return build_plan(d * m, d * m_train, d);
}

Membership membership(const SubsetPlan& plan, std::size_t i) {
  if (i >= plan.n)
    throw Error(Errc::IndexOutOfRange, "sample index " + std::to_string(i) +
                                           " out of range for n=" + std::to_string(plan.n));
  Membership out;
  out.in_subsets.reserve(plan.m_train);
  out.out_subsets.reserve(plan.m - plan.m_train);
  for (std::size_t j = 0; j < plan.m; ++j)
    (plan.contains(j, i) ? out.in_subsets : out.out_subsets).push_back(j);
  return out;
}

}  // namespace usdr
