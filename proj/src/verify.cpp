#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pgadget/kernels.hpp"
#include "pgadget/perturbation.hpp"
#include "pgadget/tiling.hpp"

namespace pgadget {

namespace {

// Series of an eigenbasis model: H is diagonal so G_+ is too.
class EigenbasisSeries {
 public:
  explicit EigenbasisSeries(const EigenbasisModel& m) {
    const auto n = static_cast<std::size_t>(m.strong_diag.size());
    std::vector<bool> is_minus(n, false);
    for (auto k : m.minus_indices) is_minus[k] = true;
    for (std::size_t k = 0; k < n; ++k) (is_minus[k] ? minus_ : plus_).push_back(static_cast<Eigen::Index>(k));
    const CMatrix v = m.coupling.dense();
    v_norm_ = spectral_norm(v);
    h_minus_ = m.strong_diag(minus_);
    h_plus_ = m.strong_diag(plus_);
    v_minus_ = v(minus_, minus_);
    v_plus_ = v(plus_, plus_);
    v_mp_ = v(minus_, plus_);
    v_pm_ = v(plus_, minus_);
  }

  SeriesResult eval(Complex z, int order) const {
    CVector g(h_plus_.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) g(k) = 1.0 / (z - h_plus_(k));
    const CMatrix gv = g.asDiagonal() * v_plus_;
    SeriesResult res;
    res.ratio = spectral_norm(gv);
    if (res.ratio >= 1.0) throw DivergenceError("series: ||G_+ V_+|| >= 1", res.ratio);
    CMatrix x = g.asDiagonal() * v_pm_;
    CMatrix acc = x;
    for (int m = 1; m <= order; ++m) {
      x = gv * x;
      acc += x;
    }
    res.sigma = v_minus_ + v_mp_ * acc;
    res.sigma.diagonal() += h_minus_.cast<Complex>();
    res.tail_bound =
        std::pow(res.ratio, order + 1) * v_norm_ * v_norm_ * g.cwiseAbs().maxCoeff() / (1.0 - res.ratio);
    return res;
  }

 private:
  std::vector<Eigen::Index> minus_, plus_;
  RVector h_minus_, h_plus_;
  CMatrix v_minus_, v_plus_, v_mp_, v_pm_;
  double v_norm_ = 0.0;
};

CMatrix unit_columns(std::size_t n, const std::vector<std::size_t>& idx) {
  CMatrix w = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) w(static_cast<Eigen::Index>(idx[j]), static_cast<Eigen::Index>(j)) = 1.0;
  return w;
}

struct Defect {
  double raw = 0.0;
  double shifted = 0.0;
  double shift = 0.0;
};

// ||U L U^dagger - W heff W^dagger|| evaluated inside span[U W].
Defect band_defect(const CMatrix& u, const RVector& lambda, const CMatrix& w, const CMatrix& heff) {
  CMatrix uw(u.rows(), u.cols() + w.cols());
  uw << u, w;
  Eigen::HouseholderQR<CMatrix> qr(uw);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(uw.rows(), uw.cols());
  const CMatrix qu = q.adjoint() * u;
  const CMatrix qw = q.adjoint() * w;
  const CMatrix b = qw * heff * qw.adjoint();
  Defect d;
  d.raw = spectral_norm(qu * lambda.cast<Complex>().asDiagonal() * qu.adjoint() - b);
  d.shift = lambda.mean() - eigvalsh(heff).mean();
  const RVector shifted = lambda.array() - d.shift;
  d.shifted = spectral_norm(qu * shifted.cast<Complex>().asDiagonal() * qu.adjoint() - b);
  return d;
}

double hermiticity(const CMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

struct Sector {
  EigenbasisModel model;
  SpectralDecomposition dec;
  CMatrix heff;   // on the system
  Defect defect;
};

Sector analyse_sector(const GadgetArtifact& a, int signature) {
  Sector s;
  s.model = eigenbasis_model(a, signature);
  s.dec = eigh(s.model.full());
  const auto d = static_cast<Eigen::Index>(a.system_dim());
  if (signature == 0) {
    s.heff = effective_on_system(a);
  } else {
    const auto& term = a.terms[static_cast<std::size_t>(signature - 1)];
    s.heff = a.coupled ? CMatrix(term.r_prime * embed_local(a.target.system, term.support, term.involution).dense())
                       : CMatrix::Zero(d, d);
  }
  const CMatrix w = unit_columns(s.model.system.total_dim(), s.model.minus_indices);
  s.defect = band_defect(s.dec.eigenvectors.leftCols(d), s.dec.eigenvalues.head(d), w, s.heff);
  return s;
}

}  // namespace

VerifyReport check_low_energy_approximation(const GadgetArtifact& a, const VerifyOptions& options) {
  VerifyReport rep;
  rep.mode = mode_name(a.mode);
  rep.delta = a.delta;
  rep.C = a.C;
  rep.M = a.M;
  rep.coupled = a.coupled;
  rep.r_scale = a.r_scale;
  rep.terms = a.terms;

  const auto d = static_cast<Eigen::Index>(a.system_dim());
  std::vector<Sector> sectors;
  if (a.mode == Mode::TileFree) {
    sectors.push_back(analyse_sector(a, 0));
  } else {
    for (int i = 1; i <= a.N(); ++i) sectors.push_back(analyse_sector(a, i));
  }

  // Low band and its window.
  RVector band;
  double next = std::numeric_limits<double>::infinity();
  if (a.mode == Mode::TileFree) {
    const auto& ev = sectors[0].dec.eigenvalues;
    rep.band = detect_band(ev, static_cast<std::size_t>(d));
    band = ev.head(d);
    next = ev(d);
    rep.required_gap = a.C / 4.0;
  } else {
    band.resize(d * a.N());
    for (int i = 0; i < a.N(); ++i) {
      const auto& ev = sectors[static_cast<std::size_t>(i)].dec.eigenvalues;
      band.segment(i * d, d) = ev.head(d).array() - 1.0;
      next = std::min(next, ev(d) - 1.0);
    }
    std::sort(band.begin(), band.end());
    // Excited tile strings: tile energy plus a lower bound of the sector block.
    std::vector<CMatrix> h;
    for (const auto& t : a.terms) h.push_back(embed_local(a.target.system, t.support, t.involution).dense());
    const auto diag = kernels::tiling_diagonal(a.N());
    const auto ground = ground_signatures(a.N());
    for (std::size_t x = 0; x < diag.size(); ++x) {
      const std::string str = ternary_string(x, a.N() + 2);
      if (std::any_of(ground.begin(), ground.end(), [&](const TileSignature& g) { return g.string == str; })) continue;
      std::vector<int> active;
      for (int i = 1; i <= a.N(); ++i)
        if (str[static_cast<std::size_t>(i)] == '1') active.push_back(i);
      double low = 0.0;
      if (a.coupled && active.size() == 1) {
        low = sectors[static_cast<std::size_t>(active[0] - 1)].dec.eigenvalues(0);
      } else if (a.coupled && active.size() > 1) {
        CMatrix s = CMatrix::Zero(d, d);
        for (int i : active) s += h[static_cast<std::size_t>(i - 1)];
        low = -spectral_norm(s);
      }
      next = std::min(next, static_cast<double>(diag[x]) + low);
    }
    rep.band.size = static_cast<std::size_t>(band.size());
    rep.band.a_band = band(0);
    rep.band.b_band = band(band.size() - 1);
    rep.band.midpoint = 0.5 * (rep.band.a_band + rep.band.b_band);
    rep.band.z0 = rep.band.midpoint;
    rep.band.w_eff = 0.5 * (rep.band.b_band - rep.band.a_band);
    rep.band.gap = next - rep.band.b_band;
    rep.required_gap = 0.5;
  }
  rep.band_window = rep.band.gap >= rep.required_gap;
  if (!rep.band_window) {
    std::ostringstream msg;
    msg << "no band window: gap " << rep.band.gap << " < " << rep.required_gap;
    rep.reasons.push_back(msg.str());
  }

  // Eigenvalue comparison.
  const Pert1Comparison p1 = pert1_compare(a, band);
  rep.max_deviation = p1.max_abs;
  for (Eigen::Index k = 0; k < p1.heff.size(); ++k)
    rep.eigenvalues.push_back({static_cast<int>(k), p1.simulator(k), p1.heff(k), p1.deviations(k)});

  // Error budget and the eigenvalue bound.
  rep.budget = series_error_bound(a);
  double w_eff = 0.0;
  if (a.mode == Mode::TileFree) {
    rep.v_norm = coupling_norm(a);
    rep.heff_norm = spectral_norm(sectors[0].heff);
    const RVector he = eigvalsh(sectors[0].heff);
    w_eff = 0.5 * (he.maxCoeff() - he.minCoeff());
  } else {
    rep.v_norm = a.coupled ? 1.0 : 0.0;
    for (const auto& s : sectors) {
      rep.heff_norm = std::max(rep.heff_norm, spectral_norm(s.heff));
      const RVector he = eigvalsh(s.heff);
      w_eff = std::max(w_eff, 0.5 * (he.maxCoeff() - he.minCoeff()));
    }
  }
  const auto& eps = a.mode == Mode::TileFree ? rep.budget.epsilon_prime_measured : rep.budget.epsilon_measured;
  if (!eps) {
    rep.reasons.push_back("measured eta series diverges on |z| <= 1");
  } else {
    try {
      rep.pert2 = pert2_bound({rep.heff_norm, *eps, rep.v_norm, rep.budget.lambda_plus, 0.0, w_eff, 1.0});
    } catch (const DomainError& e) {
      rep.reasons.push_back(std::string("eigenvalue bound not applicable: ") + e.what());
    }
  }

  // Self-energy on the z grid.
  std::vector<EigenbasisSeries> series;
  std::vector<CMatrix> minus_cols;
  for (const auto& s : sectors) {
    series.emplace_back(s.model);
    minus_cols.push_back(unit_columns(s.model.system.total_dim(), s.model.minus_indices));
  }
  for (double zr : options.z_grid) {
    SelfEnergyPoint pt;
    pt.z = zr;
    const Complex z(zr, 0.0);
    for (std::size_t si = 0; si < sectors.size(); ++si) {
      const auto& s = sectors[si];
      const int signature = a.mode == Mode::TileFree ? 0 : static_cast<int>(si) + 1;
      CMatrix exact;
      try {
        exact = self_energy_from_spectrum(s.dec, minus_cols[si], z);
      } catch (const NumericalError&) {
        continue;
      }
      pt.hermiticity = std::max(pt.hermiticity, hermiticity(exact));
      for (int i = 0; i < a.N(); ++i) pt.eta_max = std::max(pt.eta_max, std::abs(eta(a, i, z)));
      if (pt.eta_max < 1.0) {
        const ClosedFormResult cf = closed_form_self_energy(a, signature, z);
        pt.exact_vs_closed = std::max(pt.exact_vs_closed.value_or(0.0), spectral_norm(exact - cf.sigma));
        pt.shift = std::max(pt.shift, std::abs(cf.shift(0, 0)));
      }
      try {
        const SeriesResult sr = series[si].eval(z, options.order);
        pt.exact_vs_series = std::max(pt.exact_vs_series.value_or(0.0), spectral_norm(exact - sr.sigma));
        pt.series_ratio = std::max(pt.series_ratio.value_or(0.0), sr.ratio);
        pt.series_tail = std::max(pt.series_tail.value_or(0.0), sr.tail_bound);
      } catch (const DivergenceError& e) {
        pt.series_ratio = std::max(pt.series_ratio.value_or(0.0), e.ratio());
      }
    }
    rep.eta_max = std::max(rep.eta_max, pt.eta_max);
    rep.self_energy.push_back(pt);
  }

  // Effective-block defect.
  double shift_sum = 0.0;
  for (const auto& s : sectors) {
    rep.defect_raw = std::max(rep.defect_raw, s.defect.raw);
    rep.defect_shift_removed = std::max(rep.defect_shift_removed, s.defect.shifted);
    shift_sum += s.defect.shift;
  }
  rep.mean_shift = shift_sum / static_cast<double>(sectors.size());
  const double scale = 200.0 * a.r_scale;
  rep.scaled_defect = scale * rep.defect_shift_removed;
  if (options.tol)
    rep.tolerance = *options.tol;
  else if (rep.pert2)
    rep.tolerance = scale * *rep.pert2;

  if (rep.pert2 && rep.max_deviation > *rep.pert2) {
    std::ostringstream msg;
    msg << "eigenvalue deviation " << rep.max_deviation << " exceeds the bound " << *rep.pert2;
    rep.reasons.push_back(msg.str());
  }
  if (!rep.tolerance) {
    rep.reasons.push_back("no tolerance available for the effective-block defect");
  } else if (rep.scaled_defect > *rep.tolerance) {
    std::ostringstream msg;
    msg << "effective-block defect " << rep.scaled_defect << " exceeds the tolerance " << *rep.tolerance;
    rep.reasons.push_back(msg.str());
  }
  rep.pass = rep.reasons.empty();
  return rep;
}

}  // namespace pgadget
