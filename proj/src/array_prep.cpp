#include "cavreg/array_prep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>

#include "cavreg/assignment.hpp"
#include "cavreg/error.hpp"

namespace cavreg {

namespace {

constexpr double kSiteTolerance = 1e-10;  // metres

bool same_place(const AtomPosition& a, const AtomPosition& b) noexcept {
  return distance(a, b) < kSiteTolerance;
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorKind::invalid_parameters, what);
}

struct PendingMove {
  std::size_t atom;
  AtomPosition to;
  bool staged = false;
};

class Router {
 public:
  Router(std::vector<AtomPosition> atoms, double waist) : atoms_(std::move(atoms)), waist_(waist) {}

  bool clear(std::size_t mover, const AtomPosition& from, const AtomPosition& to) const {
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
      if (k == mover) continue;
      if (segment_distance(atoms_[k], from, to) < waist_) return false;
    }
    return true;
  }

  bool occupied(const AtomPosition& p) const {
    return std::any_of(atoms_.begin(), atoms_.end(),
                       [&](const AtomPosition& a) { return distance(a, p) < waist_; });
  }

  const AtomPosition& at(std::size_t atom) const { return atoms_[atom]; }
  void place(std::size_t atom, const AtomPosition& p) { atoms_[atom] = p; }

 private:
  std::vector<AtomPosition> atoms_;
  double waist_;
};

double array_pitch(const TweezerGrid& grid) {
  if (grid.spacing > 0.0) return grid.spacing;
  double best = std::numeric_limits<double>::infinity();
  const auto& s = grid.site_positions;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) best = std::min(best, distance(s[i], s[j]));
  return std::isfinite(best) ? best : 1.0;
}

// Free positions one pitch outside the array, above and below, at every
// column x. Used only when no direct move is collision-free.
std::vector<AtomPosition> staging_positions(const TweezerGrid& grid) {
  std::vector<double> xs;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -y_min;
  for (const auto& p : grid.site_positions) {
    xs.push_back(p.x);
    y_min = std::min(y_min, p.y);
    y_max = std::max(y_max, p.y);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [](double a, double b) { return std::abs(a - b) < kSiteTolerance; }),
           xs.end());
  const double pitch = array_pitch(grid);
  std::vector<AtomPosition> out;
  for (double y : {y_min - pitch, y_max + pitch})
    for (double x : xs) out.push_back({x, y});
  return out;
}

}  // namespace

TweezerGrid TweezerGrid::rectangular(std::size_t rows, std::size_t cols, double spacing,
                                     double fill_probability) {
  TweezerGrid g;
  g.rows = rows;
  g.cols = cols;
  g.spacing = spacing;
  g.fill_probability = fill_probability;
  const double x0 = -0.5 * static_cast<double>(cols - 1) * spacing;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      g.site_positions.push_back({x0 + static_cast<double>(c) * spacing,
                                  static_cast<double>(r) * spacing});
  g.occupancy.assign(g.site_positions.size(), false);
  g.validate();
  return g;
}

void TweezerGrid::validate() const {
  require(!site_positions.empty(), "grid has no sites");
  require(occupancy.size() == site_positions.size(), "occupancy length must equal site count");
  require(fill_probability >= 0.0 && fill_probability <= 1.0, "fill_probability must be in [0,1]");
  for (std::size_t i = 0; i < site_positions.size(); ++i)
    for (std::size_t j = i + 1; j < site_positions.size(); ++j)
      require(!same_place(site_positions[i], site_positions[j]), "grid sites must be distinct");
}

std::size_t TweezerGrid::occupied_count() const noexcept {
  return static_cast<std::size_t>(std::count(occupancy.begin(), occupancy.end(), true));
}

std::optional<std::size_t> TweezerGrid::site_at(const AtomPosition& pos) const noexcept {
  for (std::size_t i = 0; i < site_positions.size(); ++i)
    if (same_place(site_positions[i], pos)) return i;
  return std::nullopt;
}

TargetPattern TargetPattern::centered_row(const TweezerGrid& grid, std::size_t n, std::size_t row) {
  require(grid.rows > 0 && grid.cols > 0, "centered_row needs a rectangular grid");
  require(row < grid.rows, "target row outside grid");
  require(n <= grid.cols, "target row longer than grid row");
  TargetPattern t;
  t.spacing_x = grid.spacing;
  const std::size_t first = (grid.cols - n) / 2;
  for (std::size_t c = first; c < first + n; ++c)
    t.target_sites.push_back(grid.site_positions[row * grid.cols + c]);
  return t;
}

void PrepConfig::validate() const {
  require(move_speed > 0.0, "move_speed must be > 0");
  require(per_move_survival >= 0.0 && per_move_survival <= 1.0,
          "per_move_survival must be in [0,1]");
  require(hop_rate >= 0.0, "hop_rate must be >= 0");
  require(tracking_rate > 0.0, "tracking_rate must be > 0");
  require(tweezer_waist > 0.0, "tweezer_waist must be > 0");
  require(arrangement_overhead >= 0.0, "arrangement_overhead must be >= 0");
  require(baseline_fill_probability >= 0.0 && baseline_fill_probability <= 1.0,
          "baseline_fill_probability must be in [0,1]");
  require(lattice_period > 0.0, "lattice_period must be > 0");
}

TweezerGrid load_stochastic(const TweezerGrid& grid, Rng& rng) {
  TweezerGrid out = grid;
  std::bernoulli_distribution fill(grid.fill_probability);
  for (std::size_t i = 0; i < out.occupancy.size(); ++i) out.occupancy[i] = fill(rng);
  return out;
}

TweezerGrid load_stochastic(const TweezerGrid& grid, std::uint64_t seed) {
  Rng rng(seed);
  return load_stochastic(grid, rng);
}

double segment_distance(const AtomPosition& p, const AtomPosition& a,
                        const AtomPosition& b) noexcept {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

MovePlan plan_rearrangement(const TweezerGrid& grid, const TargetPattern& target,
                            const PrepConfig& config) {
  grid.validate();
  config.validate();

  std::vector<std::size_t> target_site;
  for (const auto& t : target.target_sites) {
    auto site = grid.site_at(t);
    if (!site) fail(ErrorKind::invalid_parameters, "target site is not a grid position");
    if (std::find(target_site.begin(), target_site.end(), *site) != target_site.end())
      fail(ErrorKind::invalid_parameters, "duplicate target site");
    target_site.push_back(*site);
  }

  std::vector<AtomPosition> atoms;
  std::vector<std::size_t> atom_site;
  for (std::size_t i = 0; i < grid.site_positions.size(); ++i) {
    if (!grid.occupancy[i]) continue;
    atoms.push_back(grid.site_positions[i]);
    atom_site.push_back(i);
  }
  if (atoms.size() < target_site.size())
    fail(ErrorKind::insufficient_atoms, std::to_string(atoms.size()) + " atoms for " +
                                            std::to_string(target_site.size()) + " targets");

  // Atoms already on a target stay there; by the triangle inequality some
  // optimal matching always keeps them.
  std::vector<char> atom_fixed(atoms.size(), 0);
  std::vector<std::size_t> open_targets;
  for (std::size_t j = 0; j < target_site.size(); ++j) {
    auto it = std::find(atom_site.begin(), atom_site.end(), target_site[j]);
    if (it != atom_site.end())
      atom_fixed[static_cast<std::size_t>(it - atom_site.begin())] = 1;
    else
      open_targets.push_back(j);
  }
  std::vector<std::size_t> free_atoms;
  for (std::size_t a = 0; a < atoms.size(); ++a)
    if (!atom_fixed[a]) free_atoms.push_back(a);

  std::vector<double> cost(open_targets.size() * free_atoms.size());
  for (std::size_t r = 0; r < open_targets.size(); ++r)
    for (std::size_t c = 0; c < free_atoms.size(); ++c)
      cost[r * free_atoms.size() + c] =
          distance(target.target_sites[open_targets[r]], atoms[free_atoms[c]]);
  const Assignment assignment = solve_assignment(cost, open_targets.size(), free_atoms.size());

  MovePlan plan;
  plan.assignment_cost = assignment.cost;

  std::vector<PendingMove> pending;
  for (std::size_t r = 0; r < open_targets.size(); ++r)
    pending.push_back({free_atoms[assignment.column_of_row[r]],
                       target.target_sites[open_targets[r]]});

  Router router(atoms, config.tweezer_waist);
  const std::vector<AtomPosition> staging = staging_positions(grid);
  double clock = 0.0;

  auto emit = [&](std::size_t atom, const AtomPosition& to, bool to_staging) {
    Move m{router.at(atom), to, clock, distance(router.at(atom), to), to_staging};
    clock += m.length / config.move_speed + config.arrangement_overhead;
    plan.total_path_length += m.length;
    plan.moves.push_back(m);
    router.place(atom, to);
  };

  while (!pending.empty()) {
    auto ready = std::find_if(pending.begin(), pending.end(), [&](const PendingMove& p) {
      return router.clear(p.atom, router.at(p.atom), p.to);
    });
    if (ready != pending.end()) {
      emit(ready->atom, ready->to, false);
      pending.erase(ready);
      continue;
    }

    // Two-phase fallback: park one blocked atom on a free staging position.
    bool staged_one = false;
    for (auto& p : pending) {
      if (p.staged) continue;
      const AtomPosition from = router.at(p.atom);
      const AtomPosition* best = nullptr;
      double best_len = std::numeric_limits<double>::infinity();
      for (const auto& s : staging) {
        if (router.occupied(s) || !router.clear(p.atom, from, s)) continue;
        const double len = distance(from, s) + distance(s, p.to);
        if (len < best_len) {
          best_len = len;
          best = &s;
        }
      }
      if (best == nullptr) continue;
      emit(p.atom, *best, true);
      p.staged = true;
      staged_one = true;
      break;
    }
    if (!staged_one)
      fail(ErrorKind::unroutable,
           std::to_string(pending.size()) + " moves blocked with no free staging path");
  }

  plan.duration = clock;
  plan.expected_survival =
      std::pow(config.per_move_survival, static_cast<double>(plan.moves.size()));
  return plan;
}

namespace {

bool all_targets_filled(const TweezerGrid& grid, const TargetPattern& target) {
  return std::all_of(target.target_sites.begin(), target.target_sites.end(),
                     [&](const AtomPosition& t) {
                       auto s = grid.site_at(t);
                       return s && grid.occupancy[*s];
                     });
}

// Replays a plan with Bernoulli per-move survival; returns elapsed time.
double execute_plan(const MovePlan& plan, TweezerGrid& grid, const PrepConfig& config, Rng& rng) {
  std::vector<AtomPosition> atoms;
  for (std::size_t i = 0; i < grid.site_positions.size(); ++i)
    if (grid.occupancy[i]) atoms.push_back(grid.site_positions[i]);

  std::bernoulli_distribution survive(config.per_move_survival);
  double elapsed = 0.0;
  for (const Move& m : plan.moves) {
    auto it = std::find_if(atoms.begin(), atoms.end(),
                           [&](const AtomPosition& a) { return same_place(a, m.from); });
    if (it == atoms.end()) continue;  // atom lost on an earlier leg
    elapsed += m.length / config.move_speed + config.arrangement_overhead;
    if (survive(rng))
      *it = m.to;
    else
      atoms.erase(it);
  }

  std::fill(grid.occupancy.begin(), grid.occupancy.end(), false);
  for (const auto& a : atoms)
    if (auto s = grid.site_at(a)) grid.occupancy[*s] = true;
  return elapsed;
}

template <bool Parallel>
PrepStats simulate_preparation_impl(const TweezerGrid& grid, const TargetPattern& target,
                                    const PrepConfig& config, std::size_t trials,
                                    std::uint64_t seed) {
  grid.validate();
  config.validate();
  if (trials == 0) fail(ErrorKind::invalid_parameters, "trials must be >= 1");

  std::vector<PrepTrial> results(trials);
  const auto n = static_cast<std::int64_t>(trials);
  const std::uint64_t key = target.target_sites.size();
  if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t t = 0; t < n; ++t) {
      Rng rng = make_rng(seed, "prepare", static_cast<std::uint64_t>(t), key);
      results[static_cast<std::size_t>(t)] = run_preparation_trial(grid, target, config, rng);
    }
  } else {
    for (std::int64_t t = 0; t < n; ++t) {
      Rng rng = make_rng(seed, "prepare", static_cast<std::uint64_t>(t), key);
      results[static_cast<std::size_t>(t)] = run_preparation_trial(grid, target, config, rng);
    }
  }

  PrepStats stats;
  stats.trials = trials;
  double total_duration = 0.0;
  for (const auto& r : results) {
    stats.successes += r.success ? 1 : 0;
    stats.direct_loads += r.loaded_directly ? 1 : 0;
    total_duration += r.duration;
  }
  stats.success_probability = static_cast<double>(stats.successes) / static_cast<double>(trials);
  stats.confidence = wilson_interval(stats.successes, trials);
  stats.mean_duration = total_duration / static_cast<double>(trials);
  return stats;
}

template <bool Parallel>
BaselineStats simulate_baseline_impl(std::size_t n_targets, const PrepConfig& config,
                                     std::size_t trials, std::uint64_t seed) {
  config.validate();
  if (trials == 0) fail(ErrorKind::invalid_parameters, "trials must be >= 1");
  std::vector<char> ok(trials, 0);
  const auto n = static_cast<std::int64_t>(trials);
  auto one = [&](std::int64_t t) {
    Rng rng = make_rng(seed, "baseline", static_cast<std::uint64_t>(t), n_targets);
    std::bernoulli_distribution fill(config.baseline_fill_probability);
    bool all = true;
    for (std::size_t k = 0; k < n_targets; ++k) all = fill(rng) && all;
    ok[static_cast<std::size_t>(t)] = all ? 1 : 0;
  };
  if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < n; ++t) one(t);
  } else {
    for (std::int64_t t = 0; t < n; ++t) one(t);
  }
  BaselineStats out;
  out.trials = trials;
  out.successes = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 1));
  out.success_probability = static_cast<double>(out.successes) / static_cast<double>(trials);
  return out;
}

}  // namespace

PrepTrial run_preparation_trial(const TweezerGrid& grid, const TargetPattern& target,
                                const PrepConfig& config, Rng& rng) {
  TweezerGrid current = load_stochastic(grid, rng);
  PrepTrial out;
  out.loaded_directly = all_targets_filled(current, target);

  // First plan plus one replanning round for atoms lost in transit.
  for (int round = 0; round < 2; ++round) {
    MovePlan plan;
    try {
      plan = plan_rearrangement(current, target, config);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::insufficient_atoms || e.kind() == ErrorKind::unroutable)
        return out;
      throw;
    }
    out.duration += execute_plan(plan, current, config, rng);
    if (all_targets_filled(current, target)) {
      out.success = true;
      return out;
    }
  }
  return out;
}

PrepStats simulate_preparation(const TweezerGrid& grid, const TargetPattern& target,
                               const PrepConfig& config, std::size_t trials, std::uint64_t seed) {
  return simulate_preparation_impl<true>(grid, target, config, trials, seed);
}

BaselineStats simulate_baseline(std::size_t n_targets, const PrepConfig& config,
                                std::size_t trials, std::uint64_t seed) {
  return simulate_baseline_impl<true>(n_targets, config, trials, seed);
}

namespace serial {
PrepStats simulate_preparation(const TweezerGrid& grid, const TargetPattern& target,
                               const PrepConfig& config, std::size_t trials, std::uint64_t seed) {
  return simulate_preparation_impl<false>(grid, target, config, trials, seed);
}
BaselineStats simulate_baseline(std::size_t n_targets, const PrepConfig& config,
                                std::size_t trials, std::uint64_t seed) {
  return simulate_baseline_impl<false>(n_targets, config, trials, seed);
}
}  // namespace serial

ImprovementFactor improvement_factor(std::size_t n, const TweezerGrid& grid,
                                     const PrepConfig& config, std::size_t trials,
                                     std::uint64_t seed) {
  if (n == 0) fail(ErrorKind::invalid_parameters, "n must be >= 1");
  ImprovementFactor out;
  out.rearranged =
      simulate_preparation(grid, TargetPattern::centered_row(grid, n), config, trials, seed);
  out.baseline = simulate_baseline(n, config, trials, seed);

  const Interval r = out.rearranged.confidence;
  if (out.baseline.successes == 0) {
    out.lower_bound_only = true;
    out.ratio = r.low / zero_success_upper_bound(trials);
    out.confidence = {out.ratio, std::numeric_limits<double>::infinity()};
    return out;
  }
  const Interval b = wilson_interval(out.baseline.successes, trials);
  out.ratio = out.rearranged.success_probability / out.baseline.success_probability;
  out.confidence = {r.low / b.high, b.low > 0.0 ? r.high / b.low
                                                : std::numeric_limits<double>::infinity()};
  return out;
}

std::vector<HopEvent> simulate_hopping(const RegisterLayout& layout, double duration,
                                       const PrepConfig& config, std::uint64_t seed) {
  config.validate();
  if (duration < 0.0) fail(ErrorKind::invalid_parameters, "duration must be >= 0");
  std::vector<HopEvent> events;
  if (config.hop_rate <= 0.0) return events;

  for (const auto& atom : layout.atoms) {
    Rng rng = make_rng(seed, "hop", 0, atom.index);
    std::exponential_distribution<double> wait(config.hop_rate);
    std::bernoulli_distribution up(0.5);
    AtomPosition pos = atom.position;
    for (double t = wait(rng); t <= duration; t += wait(rng)) {
      pos.y += up(rng) ? config.lattice_period : -config.lattice_period;
      events.push_back({t, atom.index, pos});
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const HopEvent& a, const HopEvent& b) {
    return a.time < b.time || (a.time == b.time && a.atom_index < b.atom_index);
  });
  return events;
}

double stale_address_fraction(const std::vector<HopEvent>& events, std::size_t n_atoms,
                              double duration, double tracking_rate) {
  if (n_atoms == 0 || duration <= 0.0) return 0.0;
  if (tracking_rate <= 0.0) fail(ErrorKind::invalid_parameters, "tracking_rate must be > 0");
  const double tick = 1.0 / tracking_rate;

  std::map<std::size_t, double> stale_until;
  double stale = 0.0;
  for (const auto& e : events) {
    auto [it, fresh] = stale_until.try_emplace(e.atom_index, -1.0);
    if (e.time < it->second) continue;  // already stale in this tick interval
    const double next_tick = std::min(duration, (std::floor(e.time / tick) + 1.0) * tick);
    stale += next_tick - e.time;
    it->second = next_tick;
  }
  return stale / (static_cast<double>(n_atoms) * duration);
}

}  // namespace cavreg
