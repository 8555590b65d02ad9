#include "semscale/solvers/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "semscale/error.hpp"

namespace semscale::solvers {

CsrMatrix CsrMatrix::from_triplets(int n, std::span<const Triplet> entries) {
  std::vector<Triplet> t(entries.begin(), entries.end());
  for (const auto& e : t)
    if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n) throw InvalidArgument("CsrMatrix: index out of range");
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.n = n;
  m.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t i = 0; i < t.size();) {
    std::size_t j = i;
    double s = 0.0;
    while (j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col) s += t[j++].value;
    m.col.push_back(t[i].col);
    m.val.push_back(s);
    ++m.row_ptr[static_cast<std::size_t>(t[i].row) + 1];
    i = j;
  }
  for (int i = 0; i < n; ++i) m.row_ptr[static_cast<std::size_t>(i) + 1] += m.row_ptr[static_cast<std::size_t>(i)];
  return m;
}

void CsrMatrix::apply(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = row_ptr[static_cast<std::size_t>(i)]; k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
      s += val[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(col[static_cast<std::size_t>(k)])];
    y[static_cast<std::size_t>(i)] = s;
  }
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = at(i, i);
  return d;
}

double CsrMatrix::at(int i, int j) const {
  const auto b = col.begin() + row_ptr[static_cast<std::size_t>(i)];
  const auto e = col.begin() + row_ptr[static_cast<std::size_t>(i) + 1];
  const auto it = std::lower_bound(b, e, j);
  return (it != e && *it == j) ? val[static_cast<std::size_t>(it - col.begin())] : 0.0;
}

std::vector<double> CsrMatrix::dense() const {
  std::vector<double> d(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = row_ptr[static_cast<std::size_t>(i)]; k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
      d[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(col[static_cast<std::size_t>(k)])] =
          val[static_cast<std::size_t>(k)];
  return d;
}

bool CsrMatrix::symmetric(double tol) const {
  for (int i = 0; i < n; ++i)
    for (int k = row_ptr[static_cast<std::size_t>(i)]; k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
      if (std::abs(val[static_cast<std::size_t>(k)] - at(col[static_cast<std::size_t>(k)], i)) > tol) return false;
  return true;
}

} // namespace semscale::solvers
