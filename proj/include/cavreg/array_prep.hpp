#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cavreg/cavity_model.hpp"
#include "cavreg/register_layout.hpp"
#include "cavreg/seeding.hpp"
#include "cavreg/stats.hpp"

namespace cavreg {

// Static tweezer lattice. Rectangular grids record their geometry so the
// planner can place staging positions one pitch outside the array.
struct TweezerGrid {
  std::vector<AtomPosition> site_positions;
  std::vector<bool> occupancy;
  double fill_probability = 0.55;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double spacing = 0.0;

  // rows along y, columns along x, centred on x = 0 with row 0 at y = 0.
  static TweezerGrid rectangular(std::size_t rows, std::size_t cols, double spacing,
                                 double fill_probability);

  void validate() const;
  std::size_t occupied_count() const noexcept;
  std::optional<std::size_t> site_at(const AtomPosition& pos) const noexcept;
};

struct TargetPattern {
  std::vector<AtomPosition> target_sites;
  double spacing_x = 5.5e-6;

  // n consecutive sites of one grid row, centred in x.
  static TargetPattern centered_row(const TweezerGrid& grid, std::size_t n, std::size_t row = 0);
};

struct Move {
  AtomPosition from;
  AtomPosition to;
  double start_time = 0.0;
  double length = 0.0;
  bool to_staging = false;
};

struct MovePlan {
  std::vector<Move> moves;
  double assignment_cost = 0.0;     // optimal matching cost (no staging detours)
  double total_path_length = 0.0;   // including staging detours
  double duration = 0.0;
  double expected_survival = 1.0;
};

struct PrepConfig {
  double move_speed = 5e-3;              // m/s (5 um/ms)
  double per_move_survival = 1.0;        // calibrated
  double hop_rate = 0.5;                 // Hz, along the cavity axis
  double tracking_rate = 3.0;            // Hz
  double tweezer_waist = 1.40e-6;        // collision exclusion radius
  double arrangement_overhead = 0.3;     // s per move (imaging + tweezer handover)
  double baseline_fill_probability = 0.15;  // per-site load without tweezers
  double lattice_period = 385e-9;        // intra-cavity trap period along y

  void validate() const;
};

TweezerGrid load_stochastic(const TweezerGrid& grid, std::uint64_t seed);
TweezerGrid load_stochastic(const TweezerGrid& grid, Rng& rng);

// Optimal (min total Euclidean distance) assignment followed by a
// collision-free execution order. Throws insufficient_atoms / unroutable.
MovePlan plan_rearrangement(const TweezerGrid& grid, const TargetPattern& target,
                            const PrepConfig& config);

// Shortest distance from p to the segment [a, b].
double segment_distance(const AtomPosition& p, const AtomPosition& a,
                        const AtomPosition& b) noexcept;

struct PrepTrial {
  bool success = false;
  bool loaded_directly = false;  // every target filled by the stochastic load itself
  double duration = 0.0;
};

// One Monte-Carlo attempt: load, plan, execute with per-move loss, and one
// replanning round with surplus atoms.
PrepTrial run_preparation_trial(const TweezerGrid& grid, const TargetPattern& target,
                                const PrepConfig& config, Rng& rng);

struct PrepStats {
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::size_t direct_loads = 0;
  double success_probability = 0.0;
  Interval confidence{0.0, 0.0};
  double mean_duration = 0.0;  // averaged over all trials
};

PrepStats simulate_preparation(const TweezerGrid& grid, const TargetPattern& target,
                               const PrepConfig& config, std::size_t trials, std::uint64_t seed);

struct BaselineStats {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_probability = 0.0;
};

// Stochastic-only loading: every target site must be filled directly, each
// with baseline_fill_probability.
BaselineStats simulate_baseline(std::size_t n_targets, const PrepConfig& config,
                                std::size_t trials, std::uint64_t seed);

struct ImprovementFactor {
  double ratio = 0.0;
  Interval confidence{0.0, 0.0};
  bool lower_bound_only = false;  // baseline never succeeded; ratio is a lower bound
  PrepStats rearranged;
  BaselineStats baseline;
};

ImprovementFactor improvement_factor(std::size_t n, const TweezerGrid& grid,
                                     const PrepConfig& config, std::size_t trials,
                                     std::uint64_t seed);

struct HopEvent {
  double time;
  std::size_t atom_index;
  AtomPosition new_position;
};

std::vector<HopEvent> simulate_hopping(const RegisterLayout& layout, double duration,
                                       const PrepConfig& config, std::uint64_t seed);

// Fraction of atom-time during which the addressed position is stale: from a
// hop until the next tracking tick (ticks at k / tracking_rate).
double stale_address_fraction(const std::vector<HopEvent>& events, std::size_t n_atoms,
                              double duration, double tracking_rate);

namespace serial {
PrepStats simulate_preparation(const TweezerGrid& grid, const TargetPattern& target,
                               const PrepConfig& config, std::size_t trials, std::uint64_t seed);
BaselineStats simulate_baseline(std::size_t n_targets, const PrepConfig& config,
                                std::size_t trials, std::uint64_t seed);
}  // namespace serial

}  // namespace cavreg
