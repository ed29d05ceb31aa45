#include "pgadget/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pgadget {

namespace {

double max_entry(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Eigen::PartialPivLU<CMatrix> checked_lu(const CMatrix& a, const char* what) {
  Eigen::PartialPivLU<CMatrix> lu(a);
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  // rcond() is unreliable once a pivot is exactly zero
  const double pivot = a.rows() ? lu.matrixLU().diagonal().cwiseAbs().minCoeff() : 1.0;
  const double smin = std::min(lu.rcond() * norm1, pivot);
  if (!(smin > 1e-10)) {
    std::ostringstream msg;
    msg << what << ": z lies at or near a pole (smallest singular value ~ " << smin << ")";
    throw NumericalError(msg.str());
  }
  return lu;
}

bool is_diagonal(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != Complex(0.0)) return false;
  return true;
}

}  // namespace

// --------------------------------------------------------------- resolvent

CMatrix resolvent(const CMatrix& op, Complex z) {
  if (op.rows() != op.cols()) throw DimensionError("resolvent: operator must be square");
  const auto n = op.rows();
  const CMatrix a = z * CMatrix::Identity(n, n) - op;
  const auto lu = checked_lu(a, "resolvent");
  CMatrix r = lu.solve(CMatrix::Identity(n, n));
  const double residual = max_entry(a * r - CMatrix::Identity(n, n));
  if (residual > 1e-9) {
    std::ostringstream msg;
    msg << "resolvent: residual " << residual << " exceeds 1e-9";
    throw NumericalError(msg.str());
  }
  return r;
}

CMatrix resolvent(const MultipartiteOperator& op, Complex z) { return resolvent(op.dense(), z); }

// ------------------------------------------------------------- self-energy

SelfEnergyProblem::SelfEnergyProblem(const CMatrix& H, const CMatrix& V, const ProjectorPair& proj)
    : h_(block_restrict(H, proj)), v_(block_restrict(V, proj)), v_norm_(spectral_norm(V)) {
  h_diagonal_ = is_diagonal(h_.plus);
}

CMatrix SelfEnergyProblem::exact(Complex z) const {
  BlockDecomposition a{h_.minus + v_.minus, h_.plus + v_.plus, h_.minus_plus + v_.minus_plus,
                       h_.plus_minus + v_.plus_minus};
  const auto m = a.minus.rows();
  return z * CMatrix::Identity(m, m) - schur_lower_right(a, z);
}

SeriesResult SelfEnergyProblem::series(Complex z, int order) const {
  if (order < 0) throw DomainError("series_self_energy: order must be >= 0");
  const double h_scale = std::max({1.0, max_entry(h_.minus), max_entry(h_.plus)});
  if (max_entry(h_.minus_plus) > 1e-10 * h_scale)
    throw DomainError("series_self_energy: H must commute with the projector");
  const auto p = h_.plus.rows();
  CMatrix g;
  if (h_diagonal_) {
    g = CMatrix::Zero(p, p);
    for (Eigen::Index k = 0; k < p; ++k) {
      const Complex d = z - h_.plus(k, k);
      if (std::abs(d) <= 1e-10) throw NumericalError("series_self_energy: z lies on a pole of G_+");
      g(k, k) = 1.0 / d;
    }
  } else {
    g = checked_lu(z * CMatrix::Identity(p, p) - h_.plus, "series_self_energy").solve(CMatrix::Identity(p, p));
  }
  const CMatrix gv = g * v_.plus;
  SeriesResult res;
  res.ratio = spectral_norm(gv);
  if (res.ratio >= 1.0) {
    std::ostringstream msg;
    msg << "series_self_energy: ||G_+ V_+|| = " << res.ratio << " >= 1, the series does not converge";
    throw DivergenceError(msg.str(), res.ratio);
  }
  CMatrix x = g * v_.plus_minus;
  CMatrix acc = x;
  for (int m = 1; m <= order; ++m) {
    x = gv * x;
    acc += x;
  }
  res.sigma = h_.minus + v_.minus + v_.minus_plus * acc;
  res.tail_bound = std::pow(res.ratio, order + 1) * v_norm_ * v_norm_ * spectral_norm(g) / (1.0 - res.ratio);
  return res;
}

CMatrix exact_self_energy(const CMatrix& H, const CMatrix& V, const ProjectorPair& proj, Complex z) {
  return SelfEnergyProblem(H, V, proj).exact(z);
}

SeriesResult series_self_energy(const CMatrix& H, const CMatrix& V, const ProjectorPair& proj, Complex z, int order) {
  return SelfEnergyProblem(H, V, proj).series(z, order);
}

CMatrix self_energy_from_spectrum(const SpectralDecomposition& dec, const CMatrix& minus_basis, Complex z) {
  const CMatrix u = minus_basis.adjoint() * dec.eigenvectors;
  CVector inv(dec.eigenvalues.size());
  for (Eigen::Index k = 0; k < inv.size(); ++k) {
    const Complex d = z - dec.eigenvalues(k);
    if (std::abs(d) <= 1e-10) throw NumericalError("self_energy_from_spectrum: z lies on an eigenvalue");
    inv(k) = 1.0 / d;
  }
  const CMatrix g_minus = u * inv.asDiagonal() * u.adjoint();
  const auto m = g_minus.rows();
  return z * CMatrix::Identity(m, m) - checked_lu(g_minus, "self_energy_from_spectrum").inverse();
}

// -------------------------------------------------------------- closed form

Complex eta(const GadgetArtifact& a, int term, Complex z) {
  if (term < 0 || term >= a.N()) throw DomainError("eta: term index out of range");
  const auto& cs = a.clocks[static_cast<std::size_t>(term)];
  Complex s = 0.0;
  for (Eigen::Index k = 1; k < cs.energies.size(); ++k) s += cs.overlaps(k) * cs.overlaps(k) / (z - a.C * cs.energies(k));
  return s;
}

ClosedFormResult closed_form_self_energy(const GadgetArtifact& a, int signature, Complex z, int max_order) {
  if (signature < 0 || signature > a.N()) throw DomainError("closed_form_self_energy: signature index out of range");
  const auto d = static_cast<Eigen::Index>(a.system_dim());
  ClosedFormResult res;
  res.sigma = CMatrix::Zero(d, d);
  res.shift = CMatrix::Zero(d, d);
  for (int i = 0; i < a.N(); ++i) {
    const Complex e = eta(a, i, z);
    res.eta.push_back(e);
    if (!a.coupled || (signature > 0 && i != signature - 1)) continue;
    const auto& term = a.terms[static_cast<std::size_t>(i)];
    const double p0 = a.clocks[static_cast<std::size_t>(i)].overlaps(0);
    const CMatrix h = embed_local(a.target.system, term.support, term.involution).dense();
    CMatrix power = h;  // h^{l+1}
    Complex weight = p0 * p0;  // p0^2 eta^l
    const double scale = p0 * p0;
    int l = 0;
    for (;; ++l) {
      if (max_order >= 0 && l > max_order) break;
      if (max_order < 0 && std::abs(weight) <= 1e-17 * scale) break;
      if (l > 10000) throw NumericalError("closed_form_self_energy: eta series does not converge");
      res.sigma += weight * power;
      if (l == 1) res.shift += weight * power;
      power = power * h;
      weight *= e;
    }
    res.terms_summed = std::max(res.terms_summed, l - 1);
  }
  return res;
}

// ------------------------------------------------------------ error budget

ErrorBudget series_error_bound(const GadgetArtifact& a) {
  ErrorBudget eb;
  eb.N = a.N();
  eb.C = a.C;
  eb.q = 4.0 / a.C;
  const double n = eb.N;
  auto geometric = [n](double ratio, double base) -> std::optional<double> {
    if (!(ratio < 1.0)) return std::nullopt;
    return n / 100.0 * base * base / (1.0 - ratio);
  };
  eb.epsilon = geometric(eb.q, eb.q);
  eb.epsilon_prime = geometric(n * eb.q, n * eb.q);
  double r_max = 0.0;
  for (const auto& t : a.terms) r_max = std::max(r_max, t.r_prime);
  eb.eta_bound = eb.q * (1.0 + r_max);
  double mu1 = std::numeric_limits<double>::infinity();
  double qm = 0.0;
  bool finite = true;
  for (const auto& cs : a.clocks) {
    mu1 = std::min(mu1, cs.energies(1));
    double s = 0.0;
    for (Eigen::Index k = 1; k < cs.energies.size(); ++k) {
      const double den = a.C * cs.energies(k) - 1.0;
      if (!(den > 0.0)) finite = false;
      s += cs.overlaps(k) * cs.overlaps(k) / den;
    }
    qm = std::max(qm, s);
  }
  eb.lambda_plus = a.C * mu1;
  if (finite) {
    eb.q_measured = qm;
    eb.epsilon_measured = geometric(qm, qm);
    eb.epsilon_prime_measured = geometric(n * qm, n * qm);
  }
  return eb;
}

BandSpec detect_band(const RVector& ev, std::size_t band_size) {
  if (band_size == 0 || band_size >= static_cast<std::size_t>(ev.size()))
    throw DimensionError("detect_band: band dimension does not fit the spectrum");
  BandSpec b;
  const auto m = static_cast<Eigen::Index>(band_size);
  b.size = band_size;
  b.a_band = ev(0);
  b.b_band = ev(m - 1);
  b.midpoint = 0.5 * (b.a_band + b.b_band);
  b.gap = ev(m) - ev(m - 1);
  b.z0 = b.midpoint;
  b.w_eff = 0.5 * (b.b_band - b.a_band);
  b.rho = 1.0;
  return b;
}

Pert1Comparison pert1_compare(const GadgetArtifact& a, const RVector& sim) {
  Pert1Comparison c;
  c.heff = heff_band_eigenvalues(a);
  if (sim.size() < c.heff.size()) throw DimensionError("pert1_compare: simulator band smaller than H_eff spectrum");
  c.simulator = sim.head(c.heff.size());
  c.deviations = c.simulator - c.heff;
  c.max_abs = c.deviations.size() ? c.deviations.cwiseAbs().maxCoeff() : 0.0;
  return c;
}

double pert2_bound(const Pert2Inputs& in) {
  const double d1 = in.lambda_plus - in.heff_norm - in.epsilon;
  const double d2 = (in.rho - in.w_eff) * (in.rho - in.w_eff - in.epsilon);
  if (!(in.rho > in.w_eff + in.epsilon)) throw DomainError("pert2_bound: disc radius must exceed w_eff + epsilon");
  if (!(d1 > 0.0)) throw DomainError("pert2_bound: lambda_plus must exceed ||H_eff|| + epsilon");
  return 3.0 * (in.heff_norm + in.epsilon) * in.v_norm / d1 + in.rho * (in.rho + in.z0) * in.epsilon / d2;
}

double coupling_norm(const GadgetArtifact& a) {
  if (!a.coupled) return 0.0;
  const int n = a.N();
  if (n > 20) throw ResourceError("coupling_norm: too many terms for the subset maximum", std::ldexp(1.0, n));
  std::vector<CMatrix> h;
  for (const auto& t : a.terms) h.push_back(embed_local(a.target.system, t.support, t.involution).dense());
  double best = 0.0;
  for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
    CMatrix s = CMatrix::Zero(h[0].rows(), h[0].cols());
    for (int i = 0; i < n; ++i)
      if (mask & (1ul << i)) s += h[static_cast<std::size_t>(i)];
    best = std::max(best, spectral_norm(s));
  }
  return best;
}

}  // namespace pgadget
