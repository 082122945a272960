#pragma once

#include <cstddef>
#include <vector>

namespace cavreg {

struct Assignment {
  std::vector<std::size_t> column_of_row;  // one distinct column per row
  double cost = 0.0;
};

// Exact minimum-cost assignment of every row to a distinct column
// (rows <= columns), shortest augmenting path with potentials, O(r^2 c).
// cost is row-major, rows x cols.
Assignment solve_assignment(const std::vector<double>& cost, std::size_t rows, std::size_t cols);

}  // namespace cavreg
