#include "cavreg/seeding.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cavreg {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stable_hash(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t trial, std::uint64_t atom) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ stable_hash(stream));
  h = splitmix64(h ^ trial);
  h = splitmix64(h ^ (atom * 0xd6e8feb86659fd93ULL));
  return h;
}

int worker_count() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_worker_count(int n) noexcept {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace cavreg
