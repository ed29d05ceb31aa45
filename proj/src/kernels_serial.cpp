#include <algorithm>
#include <cstddef>

#include "kernel_detail.hpp"
#include "pgadget/kernels.hpp"

namespace pgadget::kernels {

namespace detail {

std::vector<std::size_t> configuration_offsets(std::span<const int> dims,
                                               std::span<const std::size_t> strides,
                                               std::span<const int> sites) {
  std::vector<std::size_t> offsets{0};
  for (int site : sites) {
    std::vector<std::size_t> next;
    next.reserve(offsets.size() * static_cast<std::size_t>(dims[static_cast<std::size_t>(site)]));
    for (std::size_t base : offsets)
      for (int v = 0; v < dims[static_cast<std::size_t>(site)]; ++v)
        next.push_back(base + static_cast<std::size_t>(v) * strides[static_cast<std::size_t>(site)]);
    offsets = std::move(next);
  }
  return offsets;
}

EmbedLayout EmbedLayout::make(std::span<const int> dims, std::span<const int> support, const CMatrix& block) {
  const int n = static_cast<int>(dims.size());
  std::vector<std::size_t> strides(dims.size());
  EmbedLayout layout;
  for (int s = n - 1; s >= 0; --s) {
    strides[static_cast<std::size_t>(s)] = layout.total;
    layout.total *= static_cast<std::size_t>(dims[static_cast<std::size_t>(s)]);
  }
  std::vector<bool> used(dims.size(), false);
  std::size_t block_dim = 1;
  for (int s : support) {
    if (s < 0 || s >= n) throw DimensionError("embed: support index out of range");
    if (used[static_cast<std::size_t>(s)]) throw DimensionError("embed: repeated support index");
    used[static_cast<std::size_t>(s)] = true;
    block_dim *= static_cast<std::size_t>(dims[static_cast<std::size_t>(s)]);
  }
  if (static_cast<std::size_t>(block.rows()) != block_dim || static_cast<std::size_t>(block.cols()) != block_dim)
    throw DimensionError("embed: block dimension " + std::to_string(block.rows()) + " does not match support dimension " +
                         std::to_string(block_dim));
  std::vector<int> rest;
  for (int s = 0; s < n; ++s)
    if (!used[static_cast<std::size_t>(s)]) rest.push_back(s);
  layout.block_offsets = configuration_offsets(dims, strides, support);
  layout.rest_offsets = configuration_offsets(dims, strides, rest);
  return layout;
}

}  // namespace detail

namespace serial {

namespace {

struct Decoder {
  std::vector<int> dims;
  std::vector<int> digits(std::size_t index) const {
    std::vector<int> d(dims.size());
    for (std::size_t s = dims.size(); s-- > 0;) {
      d[s] = static_cast<int>(index % static_cast<std::size_t>(dims[s]));
      index /= static_cast<std::size_t>(dims[s]);
    }
    return d;
  }
};

// Entry of the embedded operator by digit comparison.
Complex embedded_entry(const Decoder& dec, std::span<const int> support, const CMatrix& block, std::size_t row,
                       std::size_t col) {
  const auto r = dec.digits(row);
  const auto c = dec.digits(col);
  std::vector<bool> in_support(r.size(), false);
  for (int s : support) in_support[static_cast<std::size_t>(s)] = true;
  for (std::size_t s = 0; s < r.size(); ++s)
    if (!in_support[s] && r[s] != c[s]) return {};
  Eigen::Index a = 0, b = 0;
  for (int s : support) {
    a = a * dec.dims[static_cast<std::size_t>(s)] + r[static_cast<std::size_t>(s)];
    b = b * dec.dims[static_cast<std::size_t>(s)] + c[static_cast<std::size_t>(s)];
  }
  return block(a, b);
}

}  // namespace

void embed_accumulate(std::span<const int> dims, std::span<const int> support, const CMatrix& block, Complex scale,
                      CMatrix& out) {
  const auto layout = detail::EmbedLayout::make(dims, support, block);  // validation only
  if (static_cast<std::size_t>(out.rows()) != layout.total || static_cast<std::size_t>(out.cols()) != layout.total)
    throw DimensionError("embed_accumulate: output has wrong size");
  const Decoder dec{std::vector<int>(dims.begin(), dims.end())};
  for (std::size_t col = 0; col < layout.total; ++col)
    for (std::size_t row = 0; row < layout.total; ++row)
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) +=
          scale * embedded_entry(dec, support, block, row, col);
}

std::vector<Triplet> embed_triplets(std::span<const int> dims, std::span<const int> support, const CMatrix& block,
                                    Complex scale) {
  const auto layout = detail::EmbedLayout::make(dims, support, block);
  const Decoder dec{std::vector<int>(dims.begin(), dims.end())};
  std::vector<Triplet> out;
  for (std::size_t col = 0; col < layout.total; ++col)
    for (std::size_t row = 0; row < layout.total; ++row) {
      const Complex v = embedded_entry(dec, support, block, row, col);
      if (v != Complex{})
        out.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col), scale * v);
    }
  return out;
}

std::vector<std::int64_t> tiling_diagonal(int interactions) {
  const int sites = detail::tiling_sites(interactions);
  const std::size_t total = detail::pow3(sites);
  std::vector<std::int64_t> diag(total, 0);
  std::vector<std::size_t> stride(static_cast<std::size_t>(sites));
  std::size_t s_acc = 1;
  for (int s = sites - 1; s >= 0; --s) {
    stride[static_cast<std::size_t>(s)] = s_acc;
    s_acc *= 3;
  }
  auto digit = [&](std::size_t x, int s) { return static_cast<int>((x / stride[static_cast<std::size_t>(s)]) % 3); };
  // One local term at a time.
  for (int s = 0; s + 1 < sites; ++s)
    for (std::size_t x = 0; x < total; ++x)
      if (detail::penalized_pair(digit(x, s), digit(x, s + 1))) diag[x] += 2;
  for (int s = 0; s + 2 < sites; ++s)
    for (std::size_t x = 0; x < total; ++x)
      if (digit(x, s) == 0 && digit(x, s + 1) == 1 && digit(x, s + 2) == 2) diag[x] -= 1;
  return diag;
}

}  // namespace serial

}  // namespace pgadget::kernels
