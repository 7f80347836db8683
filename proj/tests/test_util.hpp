#pragma once

#include <algorithm>
#include <vector>

#include "alglift/generate.hpp"
#include "alglift/linalg.hpp"
#include "alglift/types.hpp"

namespace alglift::test {

inline CMatrix mat(std::initializer_list<std::initializer_list<Complex>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.begin()->size());
  CMatrix m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (const auto& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline double dist(const CMatrix& a, const CMatrix& b) { return linalg::op_norm(a - b); }

// Sorted (re, im) pairs, for multiset comparisons.
inline std::vector<std::pair<double, double>> sorted_values(const std::vector<Complex>& v) {
  std::vector<std::pair<double, double>> out;
  for (const auto& z : v) out.emplace_back(z.real(), z.imag());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace alglift::test
