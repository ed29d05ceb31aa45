#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pgadget/operator_core.hpp"

namespace pgadget {

/// Ground string 0^i 1 2^{N+1-i} of the tiling Hamiltonian.
struct TileSignature {
  int N = 1;
  int index = 1;  // position of the '1', 1 <= index <= N
  std::string string;

  /// Flat basis index on the N+2 qutrits (qutrit 0 most significant).
  std::size_t basis_index() const;
};

/// Diagonal tiling Hamiltonian on N+2 qutrits.
MultipartiteOperator build_tiling(int N);

std::vector<TileSignature> ground_signatures(int N);
TileSignature signature(int N, int i);

/// Rank-1 projector onto signature i.
MultipartiteOperator signature_projector(int N, int i);

struct TilingScan {
  std::int64_t ground_energy = 0;
  std::int64_t first_excited = 0;
  std::size_t degeneracy = 0;
  std::vector<std::string> ground_strings;  // ascending basis index
};

/// Exhaustive scan of all 3^{N+2} diagonal entries, integer arithmetic.
TilingScan scan_tiling(int N);

std::string ternary_string(std::size_t index, int length);

}  // namespace pgadget
