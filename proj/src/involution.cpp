#include <cmath>
#include <sstream>

#include "pgadget/gadget.hpp"

namespace pgadget {

namespace {

bool is_involution(const CMatrix& m, double tol) {
  const CMatrix sq = m * m;
  return (sq - CMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

// Real coordinates of a hermitian matrix: diagonal, then Re and Im of the
// strict upper triangle.
RVector hermitian_coordinates(const CMatrix& m) {
  const auto d = m.rows();
  RVector v(d * d);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i) v(k++) = m(i, i).real();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      v(k++) = m(i, j).real();
      v(k++) = m(i, j).imag();
    }
  return v;
}

}  // namespace

std::vector<CMatrix> involution_basis(int d) {
  if (d < 2) throw DomainError("involution_basis: d must be >= 2");
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<CMatrix> basis;
  for (int i = 0; i < d; ++i) {
    CMatrix f = CMatrix::Identity(d, d);
    f(i, i) = -1.0;
    basis.push_back(f);
  }
  for (int imag = 0; imag < 2; ++imag)
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        CMatrix f = CMatrix::Identity(d, d);
        f(i, i) = -s;
        f(j, j) = s;
        f(i, j) = imag ? Complex(0.0, s) : Complex(s, 0.0);
        f(j, i) = std::conj(f(i, j));
        basis.push_back(f);
      }
  return basis;
}

std::vector<InvolutionTerm> decompose_involutions(const CMatrix& block) {
  if (block.rows() != block.cols() || block.rows() < 1) throw DimensionError("decompose_involutions: block must be square");
  const double defect = (block - block.adjoint()).cwiseAbs().maxCoeff();
  if (defect > MultipartiteOperator::kHermiticityTol * std::max(1.0, block.cwiseAbs().maxCoeff()))
    throw DomainError("decompose_involutions: block is not hermitian");
  const double norm = spectral_norm(block);
  if (norm == 0.0) return {};
  const CMatrix unit = block / norm;
  if (is_involution(unit, 1e-10)) return {{norm, unit}};

  const auto d = static_cast<int>(block.rows());
  std::vector<CMatrix> basis = involution_basis(d);
  // For d = 2 f_1 = -f_2; the identity takes the redundant slot.
  if (d == 2) basis[1] = CMatrix::Identity(2, 2);
  RMatrix a(d * d, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) a.col(static_cast<Eigen::Index>(k)) = hermitian_coordinates(basis[k]);
  const RVector coeffs = a.colPivHouseholderQr().solve(hermitian_coordinates(block));

  std::vector<InvolutionTerm> out;
  CMatrix recon = CMatrix::Zero(d, d);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double c = coeffs(static_cast<Eigen::Index>(k));
    if (std::abs(c) < 1e-12 * norm) continue;
    out.push_back({std::abs(c), c < 0 ? CMatrix(-basis[k]) : basis[k]});
    recon += c * basis[k];
  }
  const double err = (recon - block).cwiseAbs().maxCoeff();
  if (err > 1e-10 * std::max(1.0, norm)) {
    std::ostringstream msg;
    msg << "decompose_involutions: reconstruction error " << err;
    throw NumericalError(msg.str());
  }
  return out;
}

}  // namespace pgadget
