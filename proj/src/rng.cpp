#include "hdmean/rng.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace hdmean::rng {

std::vector<std::int64_t> sample_without_replacement(std::int64_t n,
                                                     std::int64_t k,
                                                     Engine& gen) {
  if (n < 0 || k < 0 || k > n) {
    throw std::invalid_argument("sample_without_replacement: need 0 <= k <= n");
  }
  std::vector<std::int64_t> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), std::int64_t{0});
  for (std::int64_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::int64_t> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)],
              pool[static_cast<std::size_t>(pick(gen))]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace hdmean::rng
