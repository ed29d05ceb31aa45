#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pgadget/bound_state.hpp"
#include "pgadget/operator_core.hpp"

namespace pgadget {

struct LocalTerm {
  std::string name;
  std::vector<int> support;
  double coefficient = 1.0;
  CMatrix block;
};

/// H_0 = sum_i coefficient_i * block_i.
struct TargetHamiltonian {
  SiteSystem system;
  std::vector<LocalTerm> terms;

  int num_terms() const { return static_cast<int>(terms.size()); }
  /// Largest support size.
  int locality() const;
  /// Throws DimensionError / DomainError on malformed terms.
  void validate() const;
  MultipartiteOperator assemble() const;
};

/// d^2 hermitian matrices squaring to the identity: f_i, then f_{ij}, then
/// f'_{ij} (i < j, lexicographic).
std::vector<CMatrix> involution_basis(int d);

struct InvolutionTerm {
  double coefficient = 0.0;  // > 0
  CMatrix involution;
};

std::vector<InvolutionTerm> decompose_involutions(const CMatrix& block);

struct NormalizedTarget {
  TargetHamiltonian target;      // involutory blocks, coefficients r'_i
  double r_scale = 0.0;          // max_i |r_i| after decomposition
  std::vector<int> source_term;  // original term index of each output term
};

NormalizedTarget normalize_target(const TargetHamiltonian& t);

enum class Mode { TileFree, Tiled };

std::string mode_name(Mode m);
Mode parse_mode(const std::string& s);

struct CompileOptions {
  double delta = 1.0;
  Mode mode = Mode::TileFree;
  int M = 4;
  std::optional<double> c_override;
  bool shared_length = true;
  std::size_t dim_cap = std::size_t{1} << 20;
  BiasInterval bias;
  /// false builds the V = 0 artifact (clock terms only, predicted H_eff = 0).
  bool coupled = true;
};

/// Largest N for which the tile register is materialized.
inline constexpr int kMaxTiledTerms = 6;

struct GadgetTerm {
  std::string name;
  std::vector<int> support;
  double r_prime = 0.0;
  CMatrix involution;
  BoundChainParams chain;
};

/// Support of one assembled summand, as register indices of the simulator.
struct AssembledTerm {
  std::string name;
  std::vector<int> registers;
};

struct GadgetArtifact {
  TargetHamiltonian target;  // as supplied
  Mode mode = Mode::TileFree;
  double delta = 1.0;
  double C = 4.0;
  int M = 4;
  bool coupled = true;
  double r_scale = 1.0;
  std::vector<GadgetTerm> terms;
  std::vector<ClockSpectrum> clocks;  // one per term
  SiteSystem system;                  // system sites, clocks, then tiles (tiled mode)
  std::vector<AssembledTerm> assembled;

  int N() const { return static_cast<int>(terms.size()); }
  int num_system_sites() const { return target.system.num_sites(); }
  int clock_register(int i) const { return num_system_sites() + i; }
  int tile_register(int q) const { return num_system_sites() + N() + q; }
  std::size_t system_dim() const { return target.system.total_dim(); }
  /// System plus clocks, without the tile qutrits.
  SiteSystem core_system() const;
  std::vector<double> shifts() const;  // mu_0 per clock
};

GadgetArtifact compile(const TargetHamiltonian& t, const CompileOptions& options);
/// Rebuild from stored chain parameters (no solving).
GadgetArtifact assemble(const TargetHamiltonian& t, const CompileOptions& options,
                        const std::vector<BoundChainParams>& chains);

/// C * sum_i (H_clock^(i) - mu_0^(i)) (+ H_tile in tiled mode).
MultipartiteOperator strong_part(const GadgetArtifact& a);
/// sum_i h_i (x) |T_i><T_i| (x |1><1|_i in tiled mode); zero when uncoupled.
MultipartiteOperator coupling_part(const GadgetArtifact& a);
MultipartiteOperator build_simulator(const GadgetArtifact& a);

/// sum_i r'_i h_i on the system sites (zero when uncoupled).
CMatrix effective_on_system(const GadgetArtifact& a);
/// effective_on_system (x) Pi_- on system plus clocks.
MultipartiteOperator predicted_effective(const GadgetArtifact& a);
/// Eigenvalues the low band should reproduce, ascending. Tile-free: spectrum of
/// sum_i r'_i h_i. Tiled: union over signatures of -1 + spectrum of r'_i h_i.
RVector heff_band_eigenvalues(const GadgetArtifact& a);

/// Block of the tiled simulator on signature i (1-based), on system plus clocks.
MultipartiteOperator restricted_block(const GadgetArtifact& a, int i);

/// Minus: system (x) clock ground states. Plus: explicit product basis of the
/// remaining clock eigenstates. Both on system plus clocks.
ProjectorPair clock_ground_projector(const GadgetArtifact& a);

/// Simulator (or one signature block) written in the product eigenbasis of the
/// clocks: the strong part is diagonal, the coupling reads h_i (x) |p_i><p_i|
/// with p_i the overlap vector of clock i.
struct EigenbasisModel {
  SiteSystem system;
  RVector strong_diag;
  MultipartiteOperator coupling;
  std::vector<std::size_t> minus_indices;  // system (x) all clocks in k = 0

  CMatrix full() const;
};

/// signature = 0: all terms (tile-free H~); signature = i: restricted block i.
EigenbasisModel eigenbasis_model(const GadgetArtifact& a, int signature = 0);

}  // namespace pgadget
