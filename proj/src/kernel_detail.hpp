#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pgadget/types.hpp"

namespace pgadget::kernels::detail {

struct EmbedLayout {
  std::size_t total = 1;
  std::vector<std::size_t> block_offsets;  // flat offset of each block basis index
  std::vector<std::size_t> rest_offsets;   // flat offset of each complement configuration

  static EmbedLayout make(std::span<const int> dims, std::span<const int> support, const CMatrix& block);
};

/// Flat offsets of all configurations of `sites`, first listed site most significant.
std::vector<std::size_t> configuration_offsets(std::span<const int> dims,
                                               std::span<const std::size_t> strides,
                                               std::span<const int> sites);

inline std::size_t pow3(int n) {
  std::size_t p = 1;
  for (int i = 0; i < n; ++i) p *= 3;
  return p;
}

inline int tiling_sites(int interactions) {
  if (interactions < 1) throw DomainError("tiling: need at least one interaction");
  if (interactions > 30) throw ResourceError("tiling: register too large", static_cast<double>(interactions));
  return interactions + 2;
}

/// Forbidden neighbouring pairs (left, right): 21, 20, 10, 11.
inline bool penalized_pair(int left, int right) {
  return (left == 2 && (right == 0 || right == 1)) || (left == 1 && (right == 0 || right == 1));
}

}  // namespace pgadget::kernels::detail
