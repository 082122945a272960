#include <doctest.h>

#include <random>
#include <set>

#include "cavreg/assignment.hpp"
#include "support.hpp"

using namespace cavreg;

TEST_SUITE("assignment") {

TEST_CASE("small known instance") {
  // rows x cols = 3 x 3
  const std::vector<double> cost{4, 1, 3,  //
                                 2, 0, 5,  //
                                 3, 2, 2};
  const auto a = solve_assignment(cost, 3, 3);
  CHECK(a.cost == doctest::Approx(5.0));
  CHECK(a.column_of_row == std::vector<std::size_t>{1, 0, 2});
}

TEST_CASE("matches brute force on random rectangular instances") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  std::uniform_real_distribution<double> value(0.0, 10.0);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t rows = size(rng);
    const std::size_t cols = rows + size(rng) % 3;
    std::vector<double> cost(rows * cols);
    for (double& c : cost) c = value(rng);
    const auto a = solve_assignment(cost, rows, cols);
    CHECK(a.cost == doctest::Approx(testing::brute_force_assignment(cost, rows, cols)).epsilon(1e-12));

    std::set<std::size_t> distinct(a.column_of_row.begin(), a.column_of_row.end());
    CHECK(distinct.size() == rows);
    double sum = 0.0;
    for (std::size_t r = 0; r < rows; ++r) sum += cost[r * cols + a.column_of_row[r]];
    CHECK(sum == doctest::Approx(a.cost));
  }
}

TEST_CASE("more rows than columns is rejected") {
  CHECK_THROWS(solve_assignment({1, 2}, 2, 1));
}

}
