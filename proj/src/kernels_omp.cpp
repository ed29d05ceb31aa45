#include "pgadget/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstddef>

#include "kernel_detail.hpp"

namespace pgadget::kernels {

void embed_accumulate(std::span<const int> dims, std::span<const int> support,
                      const CMatrix& block, Complex scale, CMatrix& out) {
  const auto layout = detail::EmbedLayout::make(dims, support, block);
  if (static_cast<std::size_t>(out.rows()) != layout.total ||
      static_cast<std::size_t>(out.cols()) != layout.total) {
    throw DimensionError("embed_accumulate: output has wrong size");
  }
  const auto rest_count = static_cast<std::ptrdiff_t>(layout.rest_offsets.size());
  const auto bd = static_cast<Eigen::Index>(layout.block_offsets.size());
  // Distinct rest configurations write disjoint entries.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rest_count; ++r) {
    const std::size_t base = layout.rest_offsets[static_cast<std::size_t>(r)];
    for (Eigen::Index b = 0; b < bd; ++b) {
      const auto col = static_cast<Eigen::Index>(base + layout.block_offsets[static_cast<std::size_t>(b)]);
      for (Eigen::Index a = 0; a < bd; ++a) {
        const Complex v = block(a, b);
        if (v == Complex{}) continue;
        out(static_cast<Eigen::Index>(base + layout.block_offsets[static_cast<std::size_t>(a)]), col) += scale * v;
      }
    }
  }
}

std::vector<Triplet> embed_triplets(std::span<const int> dims, std::span<const int> support,
                                    const CMatrix& block, Complex scale) {
  const auto layout = detail::EmbedLayout::make(dims, support, block);
  const auto bd = static_cast<Eigen::Index>(layout.block_offsets.size());
  std::vector<std::pair<Eigen::Index, Eigen::Index>> nonzeros;
  for (Eigen::Index b = 0; b < bd; ++b)
    for (Eigen::Index a = 0; a < bd; ++a)
      if (block(a, b) != Complex{}) nonzeros.emplace_back(a, b);

  const std::size_t per_rest = nonzeros.size();
  const auto rest_count = static_cast<std::ptrdiff_t>(layout.rest_offsets.size());
  std::vector<Triplet> out(per_rest * layout.rest_offsets.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rest_count; ++r) {
    const std::size_t base = layout.rest_offsets[static_cast<std::size_t>(r)];
    std::size_t slot = static_cast<std::size_t>(r) * per_rest;
    for (const auto& [a, b] : nonzeros) {
      out[slot++] = Triplet(static_cast<Eigen::Index>(base + layout.block_offsets[static_cast<std::size_t>(a)]),
                            static_cast<Eigen::Index>(base + layout.block_offsets[static_cast<std::size_t>(b)]),
                            scale * block(a, b));
    }
  }
  return out;
}

std::vector<std::int64_t> tiling_diagonal(int interactions) {
  const int sites = detail::tiling_sites(interactions);
  const std::size_t total = detail::pow3(sites);
  std::vector<std::int64_t> diag(total);
  const auto count = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t x = 0; x < count; ++x) {
    int digits[64];
    std::size_t rem = static_cast<std::size_t>(x);
    for (int s = sites - 1; s >= 0; --s) {
      digits[s] = static_cast<int>(rem % 3);
      rem /= 3;
    }
    std::int64_t e = 0;
    for (int s = 0; s + 1 < sites; ++s)
      if (detail::penalized_pair(digits[s], digits[s + 1])) e += 2;
    for (int s = 0; s + 2 < sites; ++s)
      if (digits[s] == 0 && digits[s + 1] == 1 && digits[s + 2] == 2) e -= 1;
    diag[static_cast<std::size_t>(x)] = e;
  }
  return diag;
}

}  // namespace pgadget::kernels
