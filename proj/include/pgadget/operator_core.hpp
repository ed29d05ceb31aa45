#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "pgadget/types.hpp"

namespace pgadget {

/// Layout of a multipartite Hilbert space.
///
/// Basis states are ordered in standard Kronecker order: site 0 is the most
/// significant (slowest varying) index, the last site varies fastest. The
/// flat index of a configuration (s_0, ..., s_{n-1}) is sum_k s_k * stride(k)
/// with stride(k) = prod_{j>k} dims[j].
class SiteSystem {
 public:
  SiteSystem() = default;
  explicit SiteSystem(std::vector<int> dims);

  std::span<const int> dims() const { return dims_; }
  int num_sites() const { return static_cast<int>(dims_.size()); }
  int dim(int site) const { return dims_.at(static_cast<std::size_t>(site)); }
  std::size_t total_dim() const { return total_dim_; }
  std::size_t stride(int site) const { return strides_.at(static_cast<std::size_t>(site)); }

  /// Product of dims without constructing (returns +inf-like sentinel as double on overflow).
  static double dimension_estimate(std::span<const int> dims);

  /// Concatenation: this system's sites first, then other's.
  SiteSystem operator+(const SiteSystem& other) const;

  bool operator==(const SiteSystem& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::size_t total_dim_ = 1;
};

/// Hermitian operator on a SiteSystem. Storage is dense up to kSparseThreshold
/// and sparse above it; the choice is made on construction.
class MultipartiteOperator {
 public:
  static constexpr std::size_t kSparseThreshold = 4096;
  static constexpr double kHermiticityTol = 1e-12;

  MultipartiteOperator() = default;
  MultipartiteOperator(SiteSystem system, CMatrix entries);
  MultipartiteOperator(SiteSystem system, CSparse entries);

  static MultipartiteOperator zero(const SiteSystem& system);
  static MultipartiteOperator identity(const SiteSystem& system);

  const SiteSystem& system() const { return system_; }
  std::size_t dim() const { return system_.total_dim(); }
  bool is_sparse() const { return std::holds_alternative<CSparse>(storage_); }

  CMatrix dense() const;
  CSparse sparse() const;
  Complex entry(std::size_t row, std::size_t col) const;

  /// True when every imaginary part vanishes exactly.
  bool is_real() const;
  /// max |A - A^dagger| over entries.
  double hermiticity_defect() const;
  /// max |A_ij| over entries.
  double max_abs() const;

  MultipartiteOperator operator+(const MultipartiteOperator& other) const;
  MultipartiteOperator operator-(const MultipartiteOperator& other) const;
  MultipartiteOperator operator*(double scale) const;
  MultipartiteOperator& operator+=(const MultipartiteOperator& other);

  /// Matrix product as a plain matrix (the product need not be hermitian).
  CMatrix times(const MultipartiteOperator& other) const;
  CVector apply(const CVector& v) const;

 private:
  void validate() const;

  SiteSystem system_;
  std::variant<CMatrix, CSparse> storage_;
};

struct SpectralDecomposition {
  RVector eigenvalues;  // ascending
  CMatrix eigenvectors;  // orthonormal columns
  double degeneracy_tol = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
  CMatrix reconstruct() const;
};

/// Orthonormal bases of a designated low subspace and its complement.
class ProjectorPair {
 public:
  ProjectorPair() = default;
  ProjectorPair(CMatrix minus_basis, CMatrix plus_basis);
  /// Complement computed by Householder QR.
  static ProjectorPair from_minus_basis(const CMatrix& minus_basis);

  const CMatrix& minus_basis() const { return minus_basis_; }
  const CMatrix& plus_basis() const { return plus_basis_; }
  std::size_t dim() const { return static_cast<std::size_t>(minus_basis_.rows()); }
  std::size_t minus_rank() const { return static_cast<std::size_t>(minus_basis_.cols()); }
  std::size_t plus_rank() const { return static_cast<std::size_t>(plus_basis_.cols()); }

  CMatrix minus() const { return minus_basis_ * minus_basis_.adjoint(); }
  CMatrix plus() const { return plus_basis_ * plus_basis_.adjoint(); }

 private:
  CMatrix minus_basis_;
  CMatrix plus_basis_;
};

/// Blocks of an operator in the (minus, plus) bases of a ProjectorPair.
struct BlockDecomposition {
  CMatrix minus;       // A_-
  CMatrix plus;        // A_+
  CMatrix minus_plus;  // A_{-+}
  CMatrix plus_minus;  // A_{+-}
};

struct EighOptions {
  bool check_residual = true;
  /// Dense diagonalization refuses anything larger.
  std::size_t max_dim = 8192;
};

MultipartiteOperator embed_local(const SiteSystem& system, std::span<const int> support,
                                 const CMatrix& block);

/// Full eigendecomposition. Eigenvalues ascending; every eigenvector's first
/// non-negligible component is real and positive; inside a degenerate cluster
/// vectors are ordered by the index of that component.
SpectralDecomposition eigh(const MultipartiteOperator& op, const EighOptions& options = {});
SpectralDecomposition eigh(const CMatrix& hermitian, const EighOptions& options = {});
/// Eigenvalues only.
RVector eigvalsh(const CMatrix& hermitian);

ProjectorPair ground_space_projector(const SpectralDecomposition& dec, double gap_tol);

BlockDecomposition block_restrict(const MultipartiteOperator& op, const ProjectorPair& proj);
BlockDecomposition block_restrict(const CMatrix& op, const ProjectorPair& proj);
CMatrix reassemble(const BlockDecomposition& blocks, const ProjectorPair& proj);

/// D - C A^{-1} B for the block matrix [[A, B], [C, D]] with A = plus block,
/// D = minus block.
CMatrix schur_complement(const BlockDecomposition& blocks);
/// Schur complement of (z - op) onto the minus subspace, i.e.
/// z - op_- - op_{-+} (z - op_+)^{-1} op_{+-}, which equals ([(z - op)^{-1}]_-)^{-1}.
CMatrix schur_lower_right(const BlockDecomposition& op_blocks, Complex z);

/// Operator 2-norm (largest singular value).
double spectral_norm(const CMatrix& a);

/// Kronecker product, a the slow index.
CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace pgadget
