#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cavreg {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t stable_hash(std::string_view text) noexcept;

// Seed fan-out: every random stream is keyed by (master seed, stream name,
// trial index, atom index) so results never depend on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t trial, std::uint64_t atom = 0) noexcept;

inline Rng make_rng(std::uint64_t master, std::string_view stream,
                    std::uint64_t trial, std::uint64_t atom = 0) {
  return Rng(derive_seed(master, stream, trial, atom));
}

// Thin wrappers so callers (tests, CLI) can pin the OpenMP worker count.
int worker_count() noexcept;
void set_worker_count(int n) noexcept;

}  // namespace cavreg
