#include "cavreg/assignment.hpp"

#include <limits>

#include "cavreg/error.hpp"

namespace cavreg {

Assignment solve_assignment(const std::vector<double>& cost, std::size_t rows, std::size_t cols) {
  if (rows > cols) fail(ErrorKind::invalid_parameters, "assignment needs rows <= cols");
  if (cost.size() != rows * cols) fail(ErrorKind::invalid_parameters, "cost matrix size mismatch");

  Assignment out;
  if (rows == 0) return out;

  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t none = 0;
  // 1-based internally; row_of_col[0] is the virtual root.
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> row_of_col(cols + 1, none), way(cols + 1, 0);

  for (std::size_t i = 1; i <= rows; ++i) {
    row_of_col[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<char> used(cols + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of_col[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != none);
    do {
      const std::size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  out.column_of_row.assign(rows, 0);
  for (std::size_t j = 1; j <= cols; ++j)
    if (row_of_col[j] != none) out.column_of_row[row_of_col[j] - 1] = j - 1;
  for (std::size_t i = 0; i < rows; ++i) out.cost += cost[i * cols + out.column_of_row[i]];
  return out;
}

}  // namespace cavreg
