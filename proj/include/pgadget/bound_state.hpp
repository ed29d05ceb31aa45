#pragma once

#include <vector>

#include "pgadget/operator_core.hpp"

namespace pgadget {

/// Biased chain of `length` sites with coupling site T (1-based). Normally
/// length = M*T; chains solved as a family share a longer length.
struct BoundChainParams {
  double b = 2.0;
  int T = 4;
  int M = 4;
  int length = 16;
};

struct BiasInterval {
  double lo = 1.0;
  double hi = 3.0;
};

struct ClockSpectrum {
  BoundChainParams params;
  double ground_energy = 0.0;  // unshifted mu_0
  RVector energies;            // ascending, shifted so energies(0) = 0
  RMatrix eigenvectors;        // column k is Psi_k, real
  RVector overlaps;            // p_k = <T|Psi_k>
  RVector penalized;           // sum_{k>0} Psi_k p_k
};

struct OverlapReport {
  double exact = 0.0;
  double predicted = 0.0;
  double residual_norm = 0.0;  // ||Psi_0 - ansatz||
};

struct FamilySolution {
  int M = 4;
  int T_max = 0;
  int length = 0;
  std::vector<BoundChainParams> chains;
};

/// Path Laplacian on `length` nodes minus bias*|1><1|.
RMatrix bound_chain_matrix(double bias, int length);
MultipartiteOperator build_bound_chain(double bias, int length);

/// Normalized A (b+1)^{-t}, t = 1..length.
RVector ansatz_state(double bias, int length);

ClockSpectrum clock_spectrum(const BoundChainParams& params);

/// |<Psi_0|t>|^2 of the chain described by params (site t is 1-based).
OverlapReport exact_overlap(const BoundChainParams& params, int t);

BoundChainParams solve_params(double r, int M = 4, BiasInterval interval = {});
FamilySolution solve_family(const std::vector<double>& r_list, int M = 4, BiasInterval interval = {});

struct UnaryTerm {
  std::vector<int> support;
  CMatrix block;
};

struct UnaryEncoding {
  MultipartiteOperator op;
  std::vector<UnaryTerm> terms;
};

/// Qubit encoding |t> -> 1^t 0^{L-t} with illegal strings lifted by
/// 2-local penalties of the given weight.
UnaryEncoding unary_encode(const BoundChainParams& params, double penalty_weight = 2.0);
/// Flat index of the legal string for chain state t (1-based).
std::size_t unary_index(int t, int length);

double amplification_ratio(double b, double b_ref, int T);

}  // namespace pgadget
