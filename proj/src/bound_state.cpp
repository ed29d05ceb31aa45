#include "pgadget/bound_state.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

namespace pgadget {

namespace {

struct ChainEigen {
  RVector values;
  RMatrix vectors;
};

// Tridiagonal eigensolve; every eigenvector has a positive first component
// (never zero for an unreduced tridiagonal matrix).
ChainEigen chain_eigen(double bias, int length) {
  RVector d = RVector::Constant(length, 2.0);
  d(0) = 1.0 - bias;
  d(length - 1) = 1.0;
  if (length == 1) d(0) = -bias;
  RVector e = RVector::Constant(std::max(length - 1, 1), -1.0);
  RMatrix z(length, length);
  const int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', length, d.data(), e.data(), z.data(), length);
  if (info != 0) throw NumericalError("bound chain: tridiagonal eigensolver failed (info = " + std::to_string(info) + ")");
  for (int k = 0; k < length; ++k)
    if (z(0, k) < 0.0) z.col(k) *= -1.0;
  return {std::move(d), std::move(z)};
}

void check_chain(double bias, int length) {
  if (!(bias > 0.0) || !std::isfinite(bias)) throw DomainError("bound chain: bias must be positive");
  if (length < 2) throw DomainError("bound chain: length must be >= 2");
}

double ground_overlap(double bias, int T, int length) {
  const ChainEigen ce = chain_eigen(bias, length);
  const double p = ce.vectors(T - 1, 0);
  return p * p;
}

struct Root {
  bool found = false;
  double b = 0.0;
  double overlap = 0.0;
};

// Bisection on the exact overlap, which decreases in b for fixed T and length.
Root bisect(double r, int T, int length, BiasInterval iv) {
  double lo = iv.lo;
  double hi = iv.hi;
  double f_lo = ground_overlap(lo, T, length) - r;
  double f_hi = ground_overlap(hi, T, length) - r;
  if (f_lo < 0.0 || f_hi > 0.0) return {};
  for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = ground_overlap(mid, T, length) - r;
    if (f == 0.0) return {true, mid, f + r};
    if (f > 0.0) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
      f_hi = f;
    }
    if (std::abs(f) <= 1e-13 * r) return {true, mid, f + r};
  }
  if (std::abs(f_lo) <= std::abs(f_hi)) return {true, lo, f_lo + r};
  return {true, hi, f_hi + r};
}

void check_target(double r) {
  if (!(r > 0.0 && r < 0.01)) {
    std::ostringstream msg;
    msg << "target overlap r = " << r << " violates the precondition 0 < r < 1/100";
    throw DomainError(msg.str());
  }
}

void check_interval(int M, BiasInterval iv) {
  if (M <= 3) throw DomainError("length multiplier M must be > 3");
  if (!(iv.lo > 0.0 && iv.hi > iv.lo) || !std::isfinite(iv.hi)) throw DomainError("bias interval must satisfy 0 < b_lo < b_hi");
}

// Leading-order coupling site for bias b: b(b+2)/(b+1)^{2T} = r.
double leading_site(double r, double b) { return std::log(b * (b + 2.0) / r) / (2.0 * std::log(b + 1.0)); }

// Among the coupling sites admitting a root, take the one whose bias lies
// closest to the middle of the interval.
Root best_root(double r, int t_first, int t_last, int M, int fixed_length, BiasInterval iv, int& chosen_T) {
  const double mid = 0.5 * (iv.lo + iv.hi);
  Root best;
  for (int T = t_first; T <= t_last; ++T) {
    const int length = fixed_length > 0 ? fixed_length : M * T;
    if (T > length) continue;
    const Root root = bisect(r, T, length, iv);
    if (!root.found) continue;
    if (!best.found || std::abs(root.b - mid) < std::abs(best.b - mid)) {
      best = root;
      chosen_T = T;
    }
  }
  return best;
}

void require_exact(const Root& root, double r) {
  if (std::abs(root.overlap - r) > 1e-10 * r) {
    std::ostringstream msg;
    msg << "bias bisection stalled: achieved overlap " << root.overlap << " for target " << r;
    throw NumericalError(msg.str());
  }
}

}  // namespace

RMatrix bound_chain_matrix(double bias, int length) {
  check_chain(bias, length);
  RMatrix h = RMatrix::Zero(length, length);
  for (int t = 0; t + 1 < length; ++t) {
    h(t, t) += 1.0;
    h(t + 1, t + 1) += 1.0;
    h(t, t + 1) = -1.0;
    h(t + 1, t) = -1.0;
  }
  h(0, 0) -= bias;
  return h;
}

MultipartiteOperator build_bound_chain(double bias, int length) {
  return {SiteSystem({length}), CMatrix(bound_chain_matrix(bias, length).cast<Complex>())};
}

RVector ansatz_state(double bias, int length) {
  check_chain(bias, length);
  const double q = 1.0 / (bias + 1.0);
  const double a = std::sqrt(bias * (2.0 + bias) / (1.0 - std::pow(q, 2.0 * length)));
  RVector v(length);
  double amp = a;
  for (int t = 0; t < length; ++t) {
    amp *= q;
    v(t) = amp;
  }
  // The closed-form A already normalizes; this removes rounding drift.
  return v / v.norm();
}

ClockSpectrum clock_spectrum(const BoundChainParams& params) {
  check_chain(params.b, params.length);
  if (params.T < 1 || params.T > params.length) throw DomainError("clock_spectrum: coupling site outside the chain");
  ChainEigen ce = chain_eigen(params.b, params.length);
  ClockSpectrum cs;
  cs.params = params;
  cs.ground_energy = ce.values(0);
  cs.energies = ce.values.array() - ce.values(0);
  cs.overlaps = ce.vectors.row(params.T - 1).transpose();
  cs.penalized = RVector::Zero(params.length);
  cs.penalized(params.T - 1) = 1.0;
  cs.penalized -= cs.overlaps(0) * ce.vectors.col(0);
  cs.eigenvectors = std::move(ce.vectors);
  return cs;
}

OverlapReport exact_overlap(const BoundChainParams& params, int t) {
  check_chain(params.b, params.length);
  if (t < 1 || t > params.length) throw DomainError("exact_overlap: site outside the chain");
  const ChainEigen ce = chain_eigen(params.b, params.length);
  if (ce.values(1) - ce.values(0) <= 1e-12 * std::max(1.0, std::abs(ce.values(0))))
    throw NumericalError("exact_overlap: ground state of the bound chain is degenerate");
  OverlapReport rep;
  const double p = ce.vectors(t - 1, 0);
  rep.exact = std::clamp(p * p, 0.0, 1.0);
  rep.predicted = params.b * (params.b + 2.0) / std::pow(params.b + 1.0, 2.0 * t);
  rep.residual_norm = (ce.vectors.col(0) - ansatz_state(params.b, params.length)).norm();
  return rep;
}

BoundChainParams solve_params(double r, int M, BiasInterval interval) {
  check_target(r);
  check_interval(M, interval);
  const double t_small = leading_site(r, interval.hi);
  const double t_large = leading_site(r, interval.lo);
  const int t_first = std::max(2, static_cast<int>(std::floor(std::min(t_small, t_large))) - 1);
  const int t_last = std::max(t_first, static_cast<int>(std::ceil(std::max(t_small, t_large))) + 1);
  int T = 0;
  const Root root = best_root(r, t_first, t_last, M, 0, interval, T);
  if (!root.found) {
    std::ostringstream msg;
    msg << "solve_params: no coupling site in [" << t_first << ", " << t_last << "] admits a bias in ["
        << interval.lo << ", " << interval.hi << "] for r = " << r;
    throw NumericalError(msg.str());
  }
  require_exact(root, r);
  return {root.b, T, M, M * T};
}

FamilySolution solve_family(const std::vector<double>& r_list, int M, BiasInterval interval) {
  if (r_list.empty()) throw DomainError("solve_family: empty target list");
  for (double r : r_list) check_target(r);
  check_interval(M, interval);
  const double r_min = *std::min_element(r_list.begin(), r_list.end());
  FamilySolution fam;
  fam.M = M;
  fam.T_max = solve_params(r_min, M, interval).T;
  fam.length = M * fam.T_max;
  fam.chains.resize(r_list.size());
  std::vector<std::exception_ptr> errors(r_list.size());
  const int n = static_cast<int>(r_list.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      const double r = r_list[static_cast<std::size_t>(i)];
      int T = 0;
      const Root root = best_root(r, 2, fam.T_max, M, fam.length, interval, T);
      if (!root.found) {
        std::ostringstream msg;
        msg << "solve_family: no coupling site <= " << fam.T_max << " admits a bias for r = " << r;
        throw NumericalError(msg.str());
      }
      require_exact(root, r);
      fam.chains[static_cast<std::size_t>(i)] = {root.b, T, M, fam.length};
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return fam;
}

std::size_t unary_index(int t, int length) {
  if (t < 1 || t > length) throw DomainError("unary_index: state outside the chain");
  // 1^t 0^{L-t} with qubit 1 most significant.
  return ((std::size_t{1} << t) - 1) << (length - t);
}

UnaryEncoding unary_encode(const BoundChainParams& params, double penalty_weight) {
  check_chain(params.b, params.length);
  if (!(penalty_weight >= 1.0)) throw DomainError("unary_encode: penalty weight must be >= 1");
  const int L = params.length;
  if (L > 24) throw ResourceError("unary_encode: 2^L exceeds the qubit register limit", std::ldexp(1.0, L));
  UnaryEncoding enc;
  auto ket = [](int dim, std::initializer_list<int> idx) {
    CVector v = CVector::Zero(dim);
    int sign = 1;
    for (int i : idx) {
      v(i) = static_cast<double>(sign);
      sign = -sign;
    }
    return v;
  };
  // Bonus on t = 1: |10> on qubits (1, 2).
  {
    CMatrix blk = CMatrix::Zero(4, 4);
    blk(2, 2) = -params.b;
    enc.terms.push_back({{0, 1}, blk});
  }
  // Hopping edges (t, t+1).
  for (int t = 1; t < L; ++t) {
    if (t + 2 <= L) {
      const CVector v = ket(8, {0b100, 0b110});
      enc.terms.push_back({{t - 1, t, t + 1}, v * v.adjoint()});
    } else {
      const CVector v = ket(4, {0b10, 0b11});
      enc.terms.push_back({{t - 1, t}, v * v.adjoint()});
    }
  }
  // Illegal strings: a leading 0 or any "01".
  {
    CMatrix blk = CMatrix::Zero(2, 2);
    blk(0, 0) = penalty_weight;
    enc.terms.push_back({{0}, blk});
  }
  for (int j = 0; j + 1 < L; ++j) {
    CMatrix blk = CMatrix::Zero(4, 4);
    blk(1, 1) = penalty_weight;
    enc.terms.push_back({{j, j + 1}, blk});
  }
  const SiteSystem qubits(std::vector<int>(static_cast<std::size_t>(L), 2));
  enc.op = MultipartiteOperator::zero(qubits);
  for (const auto& term : enc.terms) enc.op += embed_local(qubits, term.support, term.block);
  return enc;
}

double amplification_ratio(double b, double b_ref, int T) {
  if (!(b >= 1.0) || !(b_ref >= 1.0)) throw DomainError("amplification_ratio: biases must be >= 1");
  if (T < 1) throw DomainError("amplification_ratio: T must be >= 1");
  return (b * (b + 2.0)) / (b_ref * (b_ref + 2.0)) * std::pow((b_ref + 1.0) / (b + 1.0), 2.0 * T);
}

}  // namespace pgadget
