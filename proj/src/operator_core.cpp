#include "pgadget/operator_core.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pgadget/kernels.hpp"

namespace pgadget {

// ---------------------------------------------------------------- SiteSystem

SiteSystem::SiteSystem(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DimensionError("SiteSystem: at least one site required");
  for (int d : dims_)
    if (d < 2) throw DimensionError("SiteSystem: every local dimension must be >= 2");
  if (dimension_estimate(dims_) > static_cast<double>(std::numeric_limits<std::size_t>::max() / 4))
    throw ResourceError("SiteSystem: total dimension overflows", dimension_estimate(dims_));
  strides_.resize(dims_.size());
  total_dim_ = 1;
  for (std::size_t s = dims_.size(); s-- > 0;) {
    strides_[s] = total_dim_;
    total_dim_ *= static_cast<std::size_t>(dims_[s]);
  }
}

double SiteSystem::dimension_estimate(std::span<const int> dims) {
  double d = 1.0;
  for (int x : dims) d *= static_cast<double>(x);
  return d;
}

SiteSystem SiteSystem::operator+(const SiteSystem& other) const {
  std::vector<int> dims = dims_;
  dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
  return SiteSystem(std::move(dims));
}

// ------------------------------------------------------ MultipartiteOperator

MultipartiteOperator::MultipartiteOperator(SiteSystem system, CMatrix entries) : system_(std::move(system)) {
  const auto n = static_cast<Eigen::Index>(system_.total_dim());
  if (entries.rows() != n || entries.cols() != n)
    throw DimensionError("MultipartiteOperator: matrix size does not match system dimension");
  if (system_.total_dim() > kSparseThreshold)
    storage_ = CSparse(entries.sparseView());
  else
    storage_ = std::move(entries);
  validate();
}

MultipartiteOperator::MultipartiteOperator(SiteSystem system, CSparse entries) : system_(std::move(system)) {
  const auto n = static_cast<Eigen::Index>(system_.total_dim());
  if (entries.rows() != n || entries.cols() != n)
    throw DimensionError("MultipartiteOperator: matrix size does not match system dimension");
  entries.makeCompressed();
  if (system_.total_dim() > kSparseThreshold)
    storage_ = std::move(entries);
  else
    storage_ = CMatrix(entries);
  validate();
}

MultipartiteOperator MultipartiteOperator::zero(const SiteSystem& system) {
  const auto n = static_cast<Eigen::Index>(system.total_dim());
  if (system.total_dim() > kSparseThreshold) return {system, CSparse(n, n)};
  return {system, CMatrix::Zero(n, n)};
}

MultipartiteOperator MultipartiteOperator::identity(const SiteSystem& system) {
  const auto n = static_cast<Eigen::Index>(system.total_dim());
  if (system.total_dim() > kSparseThreshold) {
    CSparse id(n, n);
    id.setIdentity();
    return {system, std::move(id)};
  }
  return {system, CMatrix::Identity(n, n)};
}

void MultipartiteOperator::validate() const {
  const double defect = hermiticity_defect();
  if (defect > kHermiticityTol * std::max(1.0, max_abs())) {
    std::ostringstream msg;
    msg << "MultipartiteOperator: not hermitian (max |A - A^dagger| = " << defect << ")";
    throw DomainError(msg.str());
  }
}

CMatrix MultipartiteOperator::dense() const {
  if (const auto* d = std::get_if<CMatrix>(&storage_)) return *d;
  return CMatrix(std::get<CSparse>(storage_));
}

CSparse MultipartiteOperator::sparse() const {
  if (const auto* s = std::get_if<CSparse>(&storage_)) return *s;
  return std::get<CMatrix>(storage_).sparseView();
}

Complex MultipartiteOperator::entry(std::size_t row, std::size_t col) const {
  const auto r = static_cast<Eigen::Index>(row);
  const auto c = static_cast<Eigen::Index>(col);
  if (const auto* d = std::get_if<CMatrix>(&storage_)) return (*d)(r, c);
  return std::get<CSparse>(storage_).coeff(r, c);
}

bool MultipartiteOperator::is_real() const {
  if (const auto* d = std::get_if<CMatrix>(&storage_)) return d->imag().isZero(0.0);
  const auto& s = std::get<CSparse>(storage_);
  for (Eigen::Index k = 0; k < s.nonZeros(); ++k)
    if (s.valuePtr()[k].imag() != 0.0) return false;
  return true;
}

double MultipartiteOperator::hermiticity_defect() const {
  if (const auto* d = std::get_if<CMatrix>(&storage_)) {
    if (d->size() == 0) return 0.0;
    return (*d - d->adjoint()).cwiseAbs().maxCoeff();
  }
  const auto& s = std::get<CSparse>(storage_);
  CSparse diff = s - CSparse(s.adjoint());
  double m = 0.0;
  for (Eigen::Index k = 0; k < diff.nonZeros(); ++k) m = std::max(m, std::abs(diff.valuePtr()[k]));
  return m;
}

double MultipartiteOperator::max_abs() const {
  if (const auto* d = std::get_if<CMatrix>(&storage_)) return d->size() == 0 ? 0.0 : d->cwiseAbs().maxCoeff();
  const auto& s = std::get<CSparse>(storage_);
  double m = 0.0;
  for (Eigen::Index k = 0; k < s.nonZeros(); ++k) m = std::max(m, std::abs(s.valuePtr()[k]));
  return m;
}

MultipartiteOperator MultipartiteOperator::operator+(const MultipartiteOperator& other) const {
  if (!(system_ == other.system_)) throw DimensionError("operator+: systems differ");
  if (!is_sparse() && !other.is_sparse())
    return {system_, CMatrix(std::get<CMatrix>(storage_) + std::get<CMatrix>(other.storage_))};
  return {system_, CSparse(sparse() + other.sparse())};
}

MultipartiteOperator MultipartiteOperator::operator-(const MultipartiteOperator& other) const {
  return *this + other * -1.0;
}

MultipartiteOperator MultipartiteOperator::operator*(double scale) const {
  if (const auto* d = std::get_if<CMatrix>(&storage_)) return {system_, CMatrix(*d * scale)};
  return {system_, CSparse(std::get<CSparse>(storage_) * Complex(scale))};
}

MultipartiteOperator& MultipartiteOperator::operator+=(const MultipartiteOperator& other) {
  if (!(system_ == other.system_)) throw DimensionError("operator+=: systems differ");
  if (auto* d = std::get_if<CMatrix>(&storage_); d && !other.is_sparse()) {
    *d += std::get<CMatrix>(other.storage_);
    return *this;
  }
  *this = *this + other;
  return *this;
}

CMatrix MultipartiteOperator::times(const MultipartiteOperator& other) const {
  if (!(system_ == other.system_)) throw DimensionError("times: systems differ");
  if (is_sparse() || other.is_sparse()) return CMatrix(sparse() * other.sparse());
  return std::get<CMatrix>(storage_) * std::get<CMatrix>(other.storage_);
}

CVector MultipartiteOperator::apply(const CVector& v) const {
  if (static_cast<std::size_t>(v.size()) != dim()) throw DimensionError("apply: vector size mismatch");
  if (const auto* d = std::get_if<CMatrix>(&storage_)) return *d * v;
  return std::get<CSparse>(storage_) * v;
}

CMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

// ------------------------------------------------------------- embed_local

MultipartiteOperator embed_local(const SiteSystem& system, std::span<const int> support, const CMatrix& block) {
  if (block.rows() != block.cols()) throw DimensionError("embed_local: block must be square");
  if (block.size() > 0) {
    const double defect = (block - block.adjoint()).cwiseAbs().maxCoeff();
    if (defect > MultipartiteOperator::kHermiticityTol * std::max(1.0, block.cwiseAbs().maxCoeff()))
      throw DomainError("embed_local: block is not hermitian");
  }
  if (system.total_dim() > MultipartiteOperator::kSparseThreshold) {
    const auto triplets = kernels::embed_triplets(system.dims(), support, block, Complex(1.0));
    const auto n = static_cast<Eigen::Index>(system.total_dim());
    CSparse m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return {system, std::move(m)};
  }
  const auto n = static_cast<Eigen::Index>(system.total_dim());
  CMatrix out = CMatrix::Zero(n, n);
  kernels::embed_accumulate(system.dims(), support, block, Complex(1.0), out);
  return {system, std::move(out)};
}

// -------------------------------------------------------------------- eigh

namespace {

void lapack_check(int info, const char* routine) {
  if (info != 0) {
    std::ostringstream msg;
    msg << "eigh: " << routine << " failed to converge (info = " << info << ")";
    throw NumericalError(msg.str());
  }
}

// Make every eigenvector's first significant component real positive and
// order degenerate clusters by the position of that component.
void canonicalize(SpectralDecomposition& dec) {
  const auto n = dec.eigenvalues.size();
  std::vector<Eigen::Index> pivot(static_cast<std::size_t>(n), 0);
  for (Eigen::Index k = 0; k < n; ++k) {
    auto col = dec.eigenvectors.col(k);
    const double cutoff = 1e-8 * col.cwiseAbs().maxCoeff();
    Eigen::Index p = 0;
    while (p < col.size() && std::abs(col(p)) <= cutoff) ++p;
    if (p == col.size()) continue;
    pivot[static_cast<std::size_t>(k)] = p;
    const Complex phase = std::conj(col(p)) / std::abs(col(p));
    col *= phase;
    col(p) = Complex(col(p).real(), 0.0);
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && dec.eigenvalues(end) - dec.eigenvalues(end - 1) <= dec.degeneracy_tol) ++end;
    std::stable_sort(order.begin() + start, order.begin() + end,
                     [&](Eigen::Index a, Eigen::Index b) { return pivot[static_cast<std::size_t>(a)] < pivot[static_cast<std::size_t>(b)]; });
    start = end;
  }
  CMatrix vecs(dec.eigenvectors.rows(), n);
  RVector vals(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    vecs.col(k) = dec.eigenvectors.col(order[static_cast<std::size_t>(k)]);
    vals(k) = dec.eigenvalues(order[static_cast<std::size_t>(k)]);
  }
  dec.eigenvectors = std::move(vecs);
  dec.eigenvalues = std::move(vals);
}

}  // namespace

SpectralDecomposition eigh(const CMatrix& a, const EighOptions& options) {
  if (a.rows() != a.cols()) throw DimensionError("eigh: matrix must be square");
  const auto n = static_cast<std::size_t>(a.rows());
  if (n > options.max_dim)
    throw ResourceError("eigh: dimension " + std::to_string(n) + " exceeds the dense eigensolver limit",
                        static_cast<double>(n));
  SpectralDecomposition dec;
  if (n == 0) return dec;
  const int ni = static_cast<int>(n);
  const bool real = a.imag().isZero(0.0);
  double residual = 0.0;
  double scale = 0.0;
  if (real) {
    RMatrix v = a.real();
    RVector w(ni);
    lapack_check(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', ni, v.data(), ni, w.data()), "dsyevd");
    scale = w.cwiseAbs().maxCoeff();
    if (options.check_residual) {
      const RMatrix ar = a.real();
      residual = ((ar * v) - v * w.asDiagonal()).colwise().norm().maxCoeff();
    }
    dec.eigenvalues = std::move(w);
    dec.eigenvectors = v.cast<Complex>();
  } else {
    CMatrix v = a;
    RVector w(ni);
    lapack_check(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', ni, reinterpret_cast<lapack_complex_double*>(v.data()),
                                ni, w.data()),
                 "zheevd");
    scale = w.cwiseAbs().maxCoeff();
    if (options.check_residual) residual = ((a * v) - v * w.cast<Complex>().asDiagonal()).colwise().norm().maxCoeff();
    dec.eigenvalues = std::move(w);
    dec.eigenvectors = std::move(v);
  }
  if (options.check_residual && residual > 1e-10 * std::max(scale, 1e-4)) {
    std::ostringstream msg;
    msg << "eigh: residual " << residual << " exceeds 1e-10 * ||A|| (" << scale << ")";
    throw NumericalError(msg.str());
  }
  dec.degeneracy_tol = 1e-9 * std::max(scale, 1.0);
  canonicalize(dec);
  return dec;
}

SpectralDecomposition eigh(const MultipartiteOperator& op, const EighOptions& options) {
  if (op.dim() > options.max_dim)
    throw ResourceError("eigh: dimension " + std::to_string(op.dim()) + " exceeds the dense eigensolver limit",
                        static_cast<double>(op.dim()));
  return eigh(op.dense(), options);
}

RVector eigvalsh(const CMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("eigvalsh: matrix must be square");
  const int n = static_cast<int>(a.rows());
  RVector w(n);
  if (n == 0) return w;
  if (a.imag().isZero(0.0)) {
    RMatrix v = a.real();
    lapack_check(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, v.data(), n, w.data()), "dsyevd");
  } else {
    CMatrix v = a;
    lapack_check(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, reinterpret_cast<lapack_complex_double*>(v.data()), n,
                                w.data()),
                 "zheevd");
  }
  return w;
}

// ----------------------------------------------------------- ProjectorPair

ProjectorPair::ProjectorPair(CMatrix minus_basis, CMatrix plus_basis)
    : minus_basis_(std::move(minus_basis)), plus_basis_(std::move(plus_basis)) {
  const auto n = minus_basis_.rows();
  if (plus_basis_.rows() != n || minus_basis_.cols() + plus_basis_.cols() != n)
    throw DimensionError("ProjectorPair: bases do not partition the space");
  const double tol = 1e-10;
  auto defect = [](const CMatrix& g) { return g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff(); };
  if (defect(minus_basis_.adjoint() * minus_basis_ - CMatrix::Identity(minus_basis_.cols(), minus_basis_.cols())) > tol)
    throw DomainError("ProjectorPair: minus basis is not orthonormal");
  if (defect(minus_basis_.adjoint() * plus_basis_) > tol)
    throw DomainError("ProjectorPair: minus and plus bases are not orthogonal");
  if (n <= 1024 &&
      defect(plus_basis_.adjoint() * plus_basis_ - CMatrix::Identity(plus_basis_.cols(), plus_basis_.cols())) > tol)
    throw DomainError("ProjectorPair: plus basis is not orthonormal");
}

ProjectorPair ProjectorPair::from_minus_basis(const CMatrix& minus_basis) {
  const auto n = minus_basis.rows();
  const auto m = minus_basis.cols();
  Eigen::HouseholderQR<CMatrix> qr(minus_basis);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  return {minus_basis, q.rightCols(n - m)};
}

ProjectorPair ground_space_projector(const SpectralDecomposition& dec, double gap_tol) {
  const auto n = dec.eigenvalues.size();
  if (n == 0) throw DimensionError("ground_space_projector: empty decomposition");
  const double lmin = dec.eigenvalues(0);
  Eigen::Index m = 1;
  while (m < n && dec.eigenvalues(m) - lmin <= dec.degeneracy_tol) ++m;
  if (m == n) throw NumericalError("ground_space_projector: no gap, the whole spectrum is one cluster");
  const double gap = dec.eigenvalues(m) - dec.eigenvalues(m - 1);
  if (gap < gap_tol) {
    std::ostringstream msg;
    msg << "ground_space_projector: gap " << gap << " above the ground cluster is below " << gap_tol;
    throw NumericalError(msg.str());
  }
  return {dec.eigenvectors.leftCols(m), dec.eigenvectors.rightCols(n - m)};
}

// ------------------------------------------------------------ block algebra

BlockDecomposition block_restrict(const CMatrix& op, const ProjectorPair& proj) {
  if (static_cast<std::size_t>(op.rows()) != proj.dim() || op.rows() != op.cols())
    throw DimensionError("block_restrict: projector dimension does not match operator");
  const CMatrix a_minus = op * proj.minus_basis();
  const CMatrix a_plus = op * proj.plus_basis();
  return {proj.minus_basis().adjoint() * a_minus, proj.plus_basis().adjoint() * a_plus,
          proj.minus_basis().adjoint() * a_plus, proj.plus_basis().adjoint() * a_minus};
}

BlockDecomposition block_restrict(const MultipartiteOperator& op, const ProjectorPair& proj) {
  if (op.dim() != proj.dim()) throw DimensionError("block_restrict: projector dimension does not match operator");
  if (!op.is_sparse()) return block_restrict(op.dense(), proj);
  const CSparse s = op.sparse();
  const CMatrix a_minus = s * proj.minus_basis();
  const CMatrix a_plus = s * proj.plus_basis();
  return {proj.minus_basis().adjoint() * a_minus, proj.plus_basis().adjoint() * a_plus,
          proj.minus_basis().adjoint() * a_plus, proj.plus_basis().adjoint() * a_minus};
}

CMatrix reassemble(const BlockDecomposition& b, const ProjectorPair& proj) {
  const auto& qm = proj.minus_basis();
  const auto& qp = proj.plus_basis();
  return qm * b.minus * qm.adjoint() + qm * b.minus_plus * qp.adjoint() + qp * b.plus_minus * qm.adjoint() +
         qp * b.plus * qp.adjoint();
}

CMatrix schur_complement(const BlockDecomposition& x) {
  if (x.plus.rows() == 0) return x.minus;
  Eigen::PartialPivLU<CMatrix> lu(x.plus);
  const double norm1 = x.plus.cwiseAbs().colwise().sum().maxCoeff();
  const double smin_estimate = lu.rcond() * norm1;
  if (!(smin_estimate > 1e-10)) {
    std::ostringstream msg;
    msg << "schur_complement: plus block is near-singular (smallest singular value ~ " << smin_estimate << ")";
    throw NumericalError(msg.str());
  }
  return x.minus - x.minus_plus * lu.solve(x.plus_minus);
}

CMatrix schur_lower_right(const BlockDecomposition& op, Complex z) {
  BlockDecomposition x;
  x.plus = z * CMatrix::Identity(op.plus.rows(), op.plus.cols()) - op.plus;
  x.minus = z * CMatrix::Identity(op.minus.rows(), op.minus.cols()) - op.minus;
  x.minus_plus = -op.minus_plus;
  x.plus_minus = -op.plus_minus;
  return schur_complement(x);
}

double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (std::min(a.rows(), a.cols()) <= 1024) {
    const CMatrix gram = a.rows() <= a.cols() ? CMatrix(a * a.adjoint()) : CMatrix(a.adjoint() * a);
    const RVector w = eigvalsh(gram);
    return std::sqrt(std::max(0.0, w.maxCoeff()));
  }
  // Power iteration on a^dagger a; the Gram route takes over if it stalls.
  CVector v = CVector::Ones(a.cols()) / std::sqrt(static_cast<double>(a.cols()));
  double sigma = 0.0;
  for (int it = 0; it < 400; ++it) {
    CVector w = a.adjoint() * (a * v);
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    v = w / nrm;
    const double next = std::sqrt(nrm);
    if (std::abs(next - sigma) <= 1e-13 * next) return next;
    sigma = next;
  }
  const CMatrix gram = a.adjoint() * a;
  return std::sqrt(std::max(0.0, eigvalsh(gram).maxCoeff()));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace pgadget
