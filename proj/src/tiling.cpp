#include "pgadget/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pgadget/kernels.hpp"

namespace pgadget {

namespace {

constexpr int kMaxTilingInteractions = 12;

void check_interactions(int N) {
  if (N < 1) throw DomainError("tiling: N must be >= 1");
  if (N > kMaxTilingInteractions)
    throw ResourceError("tiling: 3^(N+2) tile register exceeds the materialization limit",
                        std::pow(3.0, N + 2));
}

}  // namespace

std::size_t TileSignature::basis_index() const {
  std::size_t idx = 0;
  for (char c : string) idx = 3 * idx + static_cast<std::size_t>(c - '0');
  return idx;
}

std::string ternary_string(std::size_t index, int length) {
  std::string s(static_cast<std::size_t>(length), '0');
  for (int k = length - 1; k >= 0; --k) {
    s[static_cast<std::size_t>(k)] = static_cast<char>('0' + index % 3);
    index /= 3;
  }
  return s;
}

MultipartiteOperator build_tiling(int N) {
  check_interactions(N);
  const auto diag = kernels::tiling_diagonal(N);
  const SiteSystem tiles(std::vector<int>(static_cast<std::size_t>(N + 2), 3));
  const auto n = static_cast<Eigen::Index>(diag.size());
  CSparse m(n, n);
  m.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Eigen::Index k = 0; k < n; ++k)
    if (diag[static_cast<std::size_t>(k)] != 0) m.insert(k, k) = static_cast<double>(diag[static_cast<std::size_t>(k)]);
  m.makeCompressed();
  return {tiles, std::move(m)};
}

TileSignature signature(int N, int i) {
  if (N < 1) throw DomainError("tiling: N must be >= 1");
  if (i < 1 || i > N) throw DomainError("tiling: signature index out of range");
  TileSignature sig{N, i, std::string(static_cast<std::size_t>(i), '0')};
  sig.string += '1';
  sig.string += std::string(static_cast<std::size_t>(N + 1 - i), '2');
  return sig;
}

std::vector<TileSignature> ground_signatures(int N) {
  std::vector<TileSignature> out;
  for (int i = 1; i <= N; ++i) out.push_back(signature(N, i));
  return out;
}

MultipartiteOperator signature_projector(int N, int i) {
  check_interactions(N);
  const TileSignature sig = signature(N, i);
  const SiteSystem tiles(std::vector<int>(static_cast<std::size_t>(N + 2), 3));
  const auto n = static_cast<Eigen::Index>(tiles.total_dim());
  CSparse m(n, n);
  m.insert(static_cast<Eigen::Index>(sig.basis_index()), static_cast<Eigen::Index>(sig.basis_index())) = 1.0;
  m.makeCompressed();
  return {tiles, std::move(m)};
}

TilingScan scan_tiling(int N) {
  check_interactions(N);
  const auto diag = kernels::tiling_diagonal(N);
  TilingScan scan;
  scan.ground_energy = *std::min_element(diag.begin(), diag.end());
  scan.first_excited = std::numeric_limits<std::int64_t>::max();
  for (std::size_t k = 0; k < diag.size(); ++k) {
    if (diag[k] == scan.ground_energy) {
      ++scan.degeneracy;
      scan.ground_strings.push_back(ternary_string(k, N + 2));
    } else {
      scan.first_excited = std::min(scan.first_excited, diag[k]);
    }
  }
  return scan;
}

}  // namespace pgadget
