#pragma once

// Data-parallel inner loops. Every kernel has an OpenMP implementation in
// pgadget::kernels and a straightforward serial reference with the same
// signature in pgadget::kernels::serial; the tests compare the two and the
// benchmark target times them.

#include <cstdint>
#include <span>
#include <vector>

#include "pgadget/types.hpp"

namespace pgadget::kernels {

using Triplet = Eigen::Triplet<Complex>;

/// out += scale * (block on `support`, identity elsewhere). `dims` in
/// Kronecker order; out must be square of size prod(dims).
void embed_accumulate(std::span<const int> dims, std::span<const int> support,
                      const CMatrix& block, Complex scale, CMatrix& out);

/// Nonzero entries of scale * (block on `support`). Entry order is
/// implementation defined.
std::vector<Triplet> embed_triplets(std::span<const int> dims, std::span<const int> support,
                                    const CMatrix& block, Complex scale);

/// Diagonal of the tiling Hamiltonian on N+2 qutrits (qutrit 0 most significant).
std::vector<std::int64_t> tiling_diagonal(int interactions);

namespace serial {

void embed_accumulate(std::span<const int> dims, std::span<const int> support,
                      const CMatrix& block, Complex scale, CMatrix& out);
std::vector<Triplet> embed_triplets(std::span<const int> dims, std::span<const int> support,
                                    const CMatrix& block, Complex scale);
std::vector<std::int64_t> tiling_diagonal(int interactions);

}  // namespace serial

}  // namespace pgadget::kernels
