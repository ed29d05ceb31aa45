#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pgadget/gadget.hpp"
#include "pgadget/operator_core.hpp"

namespace pgadget {

/// (z - op)^{-1}, checked by its residual.
CMatrix resolvent(const CMatrix& op, Complex z);
CMatrix resolvent(const MultipartiteOperator& op, Complex z);

struct SeriesResult {
  CMatrix sigma;
  double ratio = 0.0;       // ||G_+ V_+||
  double tail_bound = 0.0;  // ratio^{order+1} ||V||^2 ||G_+|| / (1 - ratio)
};

/// Self-energy of H + V on the minus subspace of `proj`. Blocks are
/// restricted once; every evaluation point reuses them.
class SelfEnergyProblem {
 public:
  SelfEnergyProblem(const CMatrix& H, const CMatrix& V, const ProjectorPair& proj);
  /// H_- + V_- + V_{-+}(G_+^{-1}(z) - V_+)^{-1} V_{+-}.
  CMatrix exact(Complex z) const;
  /// H_- + V_- + sum_{m=0}^{order} V_{-+}(G_+ V_+)^m G_+ V_{+-}.
  /// Throws DivergenceError (carrying ||G_+ V_+||) when the ratio is >= 1.
  SeriesResult series(Complex z, int order) const;

  double v_norm() const { return v_norm_; }

 private:
  BlockDecomposition h_;
  BlockDecomposition v_;
  double v_norm_ = 0.0;
  bool h_diagonal_ = false;
};

CMatrix exact_self_energy(const CMatrix& H, const CMatrix& V, const ProjectorPair& proj, Complex z);
SeriesResult series_self_energy(const CMatrix& H, const CMatrix& V, const ProjectorPair& proj, Complex z, int order);

/// eta_i(z) = sum_{k>0} p_{k,i}^2 / (z - C mu_{k,i}).
Complex eta(const GadgetArtifact& a, int term, Complex z);

struct ClosedFormResult {
  CMatrix sigma;             // on the system, i.e. the minus subspace in the system (x) Psi_0 basis
  CMatrix shift;             // l = 1 contribution, proportional to the identity for involutions
  std::vector<Complex> eta;  // per term
  int terms_summed = 0;      // highest l actually used
};

/// sum_i p_{0,i}^2 sum_{l=0}^{max_order} eta_i^l h_i^{l+1}; signature = 0 sums all
/// terms, signature = i keeps term i only. max_order < 0 sums until the terms
/// fall below 1e-17 relative.
ClosedFormResult closed_form_self_energy(const GadgetArtifact& a, int signature, Complex z, int max_order = -1);

struct ErrorBudget {
  int N = 0;
  double C = 0.0;
  double q = 0.0;  // 4 / C
  std::optional<double> epsilon;
  std::optional<double> epsilon_prime;
  /// sup_{|z|<=1} max_i |eta_i(z)| = max_i sum_{k>0} p_{k,i}^2 / (C mu_{k,i} - 1).
  std::optional<double> q_measured;
  std::optional<double> epsilon_measured;
  std::optional<double> epsilon_prime_measured;
  double eta_bound = 0.0;
  double lambda_plus = 0.0;
};

ErrorBudget series_error_bound(const GadgetArtifact& a);

struct BandSpec {
  double a_band = 0.0;
  double b_band = 0.0;
  double midpoint = 0.0;
  double gap = 0.0;  // distance from the band top to the next eigenvalue
  double z0 = 0.0;
  double w_eff = 0.0;
  double rho = 1.0;
  std::size_t size = 0;
};

/// Lowest `band_size` eigenvalues of `eigenvalues` (ascending) as a band.
BandSpec detect_band(const RVector& eigenvalues, std::size_t band_size);

struct Pert1Comparison {
  RVector simulator;
  RVector heff;
  RVector deviations;  // simulator - heff
  double max_abs = 0.0;
};

/// Pairs the lowest band of the simulator spectrum with the H_eff spectrum in order.
Pert1Comparison pert1_compare(const GadgetArtifact& a, const RVector& simulator_eigenvalues);

struct Pert2Inputs {
  double heff_norm = 0.0;
  double epsilon = 0.0;
  double v_norm = 0.0;
  double lambda_plus = 0.0;
  double z0 = 0.0;
  double w_eff = 0.0;
  double rho = 1.0;
};

double pert2_bound(const Pert2Inputs& in);

/// ||V|| of the simulator coupling: max over subsets S of ||sum_{i in S} h_i||.
double coupling_norm(const GadgetArtifact& a);

/// Sigma(z) = z - ([(z - H)^{-1}]_-)^{-1} from a full eigendecomposition of H,
/// the minus subspace given by orthonormal columns W.
CMatrix self_energy_from_spectrum(const SpectralDecomposition& dec, const CMatrix& minus_basis, Complex z);

struct VerifyOptions {
  std::vector<double> z_grid{-1.0, -0.5, 0.0, 0.5, 1.0};
  int order = 12;
  std::optional<double> tol;  // in target units (scaled by 200 r_scale)
};

struct SelfEnergyPoint {
  double z = 0.0;
  std::optional<double> exact_vs_closed;  // empty when the eta series diverges
  std::optional<double> exact_vs_series;
  std::optional<double> series_ratio;
  std::optional<double> series_tail;
  double hermiticity = 0.0;
  double shift = 0.0;  // l = 1 term (energy shift) per unit of identity
  double eta_max = 0.0;
};

struct EigenvalueRow {
  int index = 0;
  double simulator = 0.0;
  double heff = 0.0;
  double deviation = 0.0;
};

struct VerifyReport {
  std::string mode;
  double delta = 0.0;
  double C = 0.0;
  int M = 0;
  bool coupled = true;
  double r_scale = 0.0;
  std::vector<GadgetTerm> terms;

  BandSpec band;
  double required_gap = 0.0;
  bool band_window = false;

  ErrorBudget budget;
  double v_norm = 0.0;
  double heff_norm = 0.0;
  std::optional<double> pert2;
  double eta_max = 0.0;

  std::vector<EigenvalueRow> eigenvalues;
  double max_deviation = 0.0;

  std::vector<SelfEnergyPoint> self_energy;

  double defect_raw = 0.0;
  double defect_shift_removed = 0.0;
  double mean_shift = 0.0;
  double scaled_defect = 0.0;  // 200 r_scale * defect_shift_removed
  std::optional<double> tolerance;  // scaled units

  bool pass = false;
  std::vector<std::string> reasons;
};

/// Both low-energy conditions: a band window and a small effective-block
/// defect. Eigenvalue deviations are checked against pert2_bound.
VerifyReport check_low_energy_approximation(const GadgetArtifact& a, const VerifyOptions& options = {});

}  // namespace pgadget
