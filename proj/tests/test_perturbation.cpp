#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "pgadget/perturbation.hpp"

using namespace pgadget;
using namespace pgadget::test;

namespace {

ProjectorPair first_basis_vector(int n) {
  return {CMatrix::Identity(n, n).leftCols(1), CMatrix::Identity(n, n).rightCols(n - 1)};
}

TargetHamiltonian two_term_qubit() {
  TargetHamiltonian t;
  t.system = SiteSystem({2});
  t.terms.push_back({"z", {0}, 1.0, pauli_z()});
  t.terms.push_back({"x", {0}, 2.0, pauli_x()});
  return t;
}

CompileOptions with_c(double c) {
  CompileOptions o;
  o.c_override = c;
  return o;
}

}  // namespace

TEST_CASE("resolvent examples") {
  std::mt19937 rng(37);
  CHECK(max_abs(resolvent(CMatrix::Zero(3, 3), 1.0) - CMatrix::Identity(3, 3)) < 1e-15);
  CMatrix d = CMatrix::Zero(3, 3);
  d.diagonal() << -1.0, 0.5, 2.0;
  const Complex z(0.2, 0.1);
  const CMatrix g = resolvent(d, z);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(g(k, k) - 1.0 / (z - d(k, k))) < 1e-15);
  const CMatrix a = random_hermitian(8, rng);
  const CMatrix ga = resolvent(a, Complex(0.0, 1.0));
  CHECK(max_abs((Complex(0.0, 1.0) * CMatrix::Identity(8, 8) - a) * ga - CMatrix::Identity(8, 8)) <= 1e-9);
  CHECK_THROWS_AS(resolvent(d, 0.5), NumericalError);
}

TEST_CASE("self-energy examples") {
  std::mt19937 rng(41);
  const CMatrix h = random_hermitian(5, rng);
  const auto p = ProjectorPair::from_minus_basis(eigh(h).eigenvectors.leftCols(2));
  const SelfEnergyProblem zero_v(h, CMatrix::Zero(5, 5), p);
  const CMatrix h_minus = block_restrict(h, p).minus;
  for (double z : {-3.0, 0.1, 4.0}) CHECK(max_abs(zero_v.exact(z) - h_minus) < 1e-10);
  for (int order : {0, 3}) CHECK(max_abs(zero_v.series(-10.0, order).sigma - h_minus) < 1e-10);

  const double delta = 3.0, v = 0.4;
  CMatrix h2 = CMatrix::Zero(2, 2);
  h2(1, 1) = delta;
  const SelfEnergyProblem two(h2, v * pauli_x(), first_basis_vector(2));
  for (double z : {-1.0, 0.0, 1.0}) {
    CHECK(std::abs(two.exact(z)(0, 0) - v * v / (z - delta)) < 1e-14);
    CHECK(std::abs(two.series(z, 0).sigma(0, 0) - v * v / (z - delta)) < 1e-14);
  }
}

TEST_CASE("series tail bound holds at order 8") {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix h = CMatrix::Zero(6, 6);
    h.diagonal() << 0, 0, 5, 6, 7, 9;
    const CMatrix v = 0.6 * random_hermitian(6, rng) / 2.0;
    const ProjectorPair p(CMatrix::Identity(6, 6).leftCols(2), CMatrix::Identity(6, 6).rightCols(4));
    const SelfEnergyProblem prob(h, v, p);
    for (double z : {-1.0, 0.0, 1.0}) {
      try {
        const SeriesResult s = prob.series(z, 8);
        CHECK(s.ratio < 1.0);
        CHECK(spectral_norm(s.sigma - prob.exact(z)) <= s.tail_bound * (1.0 + 1e-9) + 1e-13);
      } catch (const DivergenceError& e) {
        CHECK(e.ratio() >= 1.0);
      }
    }
  }
  CMatrix h = CMatrix::Zero(2, 2);
  h(1, 1) = 0.5;
  const SelfEnergyProblem strong(h, 2.0 * CMatrix::Identity(2, 2), first_basis_vector(2));
  CHECK_THROWS_AS(strong.series(0.0, 4), DivergenceError);
}

TEST_CASE("exact self-energy matches the spectral route") {
  std::mt19937 rng(47);
  const CMatrix h = random_hermitian(7, rng), v = 0.3 * random_hermitian(7, rng);
  const auto p = ProjectorPair::from_minus_basis(eigh(h).eigenvectors.leftCols(3));
  const auto dec = eigh(CMatrix(h + v));
  const SelfEnergyProblem prob(h, v, p);
  for (Complex z : {Complex(0.0, 1.0), Complex(-0.3, 0.2)})
    CHECK(max_abs(prob.exact(z) - self_energy_from_spectrum(dec, p.minus_basis(), z)) < 1e-9);
}

TEST_CASE("three self-energies agree on the sigma_z instance") {
  const GadgetArtifact a = compile(sigma_z_target(), {});
  const CMatrix sim = build_simulator(a).dense();
  const CMatrix h = strong_part(a).dense();
  const ProjectorPair p = clock_ground_projector(a);
  const SelfEnergyProblem prob(h, CMatrix(sim - h), p);
  for (double zr : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const Complex z(zr, 0.0);
    const CMatrix ex = prob.exact(z);
    const ClosedFormResult cf = closed_form_self_energy(a, 0, z);
    CHECK(spectral_norm(ex - cf.sigma) <= 1e-9);
    CHECK(max_abs(ex - ex.adjoint()) <= 1e-10);
    const SeriesResult s = prob.series(z, 12);
    CHECK(spectral_norm(ex - s.sigma) <= s.tail_bound);
    // the l = 1 term is the energy shift, proportional to the identity
    CHECK(max_abs(cf.shift - cf.shift(0, 0) * CMatrix::Identity(2, 2)) < 1e-15);
  }
}

TEST_CASE("closed form: l = 0 is the effective Hamiltonian") {
  const GadgetArtifact a = compile(desk_target(), {});
  const ClosedFormResult cf = closed_form_self_energy(a, 0, 0.3, 0);
  CHECK(max_abs(cf.sigma - effective_on_system(a)) < 1e-14);
  CHECK(cf.eta.size() == 2);
}

TEST_CASE("eta stays below 1.1 * 4/C") {
  std::vector<GadgetArtifact> arts;
  arts.push_back(compile(sigma_z_target(), {}));
  arts.push_back(compile(desk_target(), {}));
  arts.push_back(compile(two_term_qubit(), {}));
  CompileOptions o;
  o.delta = 0.5;
  arts.push_back(compile(desk_target(), o));
  for (const auto& a : arts) {
    const ErrorBudget eb = series_error_bound(a);
    for (int i = 0; i < a.N(); ++i)
      for (int k = 0; k < 16; ++k) {
        const Complex z = std::polar(1.0, 2.0 * M_PI * k / 16.0);
        CHECK(std::abs(eta(a, i, z)) <= 1.1 * 4.0 / a.C);
        CHECK(std::abs(eta(a, i, 0.5 * z)) <= 1.1 * 4.0 / a.C);
        CHECK(std::abs(eta(a, i, z)) <= *eb.q_measured + 1e-15);
      }
    CHECK(*eb.q_measured <= eb.eta_bound);
  }
}

TEST_CASE("error budget examples") {
  const ErrorBudget n2 = series_error_bound(compile(desk_target(), {}));
  CHECK(n2.C == doctest::Approx(32.0));
  CHECK(*n2.epsilon == doctest::Approx(0.02 / 56.0).epsilon(1e-12));
  CHECK(*n2.epsilon == doctest::Approx(3.571e-4).epsilon(1e-3));
  CHECK(*n2.epsilon_prime == doctest::Approx(0.02 * 0.0625 / 0.75).epsilon(1e-12));
  CHECK(n2.lambda_plus > 0.0);

  const ErrorBudget n1 = series_error_bound(compile(sigma_z_target(), {}));
  CHECK(n1.C == doctest::Approx(4.0));
  CHECK_FALSE(n1.epsilon.has_value());
  CHECK_FALSE(n1.epsilon_prime.has_value());
  CHECK(n1.epsilon_measured.has_value());

  // epsilon'/epsilon grows with N at a fixed ratio 4/C
  double prev = 1.0;
  for (int n : {2, 4, 8}) {
    TargetHamiltonian t;
    t.system = SiteSystem({2});
    for (int k = 0; k < n; ++k) t.terms.push_back({"z" + std::to_string(k), {0}, 1.0 + 0.1 * k, pauli_z()});
    GadgetArtifact a;
    a.target = t;
    a.terms.resize(static_cast<std::size_t>(n));
    a.C = 4.0 * 16.0 * 16.0;
    const ErrorBudget eb = series_error_bound(a);
    const double ratio = *eb.epsilon_prime / *eb.epsilon;
    CHECK(ratio > prev * 1.9);
    prev = ratio;
  }
}

TEST_CASE("pert2 bound examples") {
  CHECK(pert2_bound({0.0, 0.0, 1.0, 100.0, 0.0, 0.02, 1.0}) == 0.0);
  const double want = 3.0 * 0.0101 / 99.9899 + 1e-4 / (0.98 * 0.9799);
  CHECK(pert2_bound({0.01, 1e-4, 1.0, 100.0, 0.0, 0.02, 1.0}) == doctest::Approx(want).epsilon(1e-14));
  CHECK(want == doctest::Approx(4.071e-4).epsilon(1e-3));
  CHECK_THROWS_AS(pert2_bound({0.01, 1e-4, 1.0, 100.0, 0.0, 0.99999, 1.0}), DomainError);
  CHECK_THROWS_AS(pert2_bound({0.01, 1e-4, 1.0, 0.005, 0.0, 0.02, 1.0}), DomainError);
}

TEST_CASE("coupling norm") {
  CHECK(coupling_norm(compile(sigma_z_target(), {})) == doctest::Approx(1.0));
  CHECK(coupling_norm(compile(desk_target(), {})) == doctest::Approx(std::sqrt(2.0)));
  CompileOptions o;
  o.coupled = false;
  CHECK(coupling_norm(compile(desk_target(), o)) == 0.0);
}

TEST_CASE("pert1 comparison") {
  CompileOptions o;
  o.coupled = false;
  const GadgetArtifact z = compile(sigma_z_target(), o);
  const Pert1Comparison c0 = pert1_compare(z, eigvalsh(build_simulator(z).dense()));
  CHECK(c0.max_abs < 1e-10);

  for (double c : {4.0, 16.0}) {
    const GadgetArtifact a = compile(sigma_z_target(), with_c(c));
    const ErrorBudget eb = series_error_bound(a);
    const Pert1Comparison p = pert1_compare(a, eigvalsh(build_simulator(a).dense()));
    // the budget covers l >= 2; the l = 1 term is a uniform shift of the band
    const double shift = p.deviations.mean();
    const double residual = (p.deviations.array() - shift).abs().maxCoeff();
    CHECK(residual <= *eb.epsilon_prime_measured);
    if (eb.epsilon_prime) CHECK(residual <= *eb.epsilon_prime);
  }
  CHECK_THROWS_AS(pert1_compare(z, RVector::Zero(1)), DimensionError);
}

TEST_CASE("deviations shrink when C is quadrupled") {
  double prev = 0.0;
  for (double c : {64.0, 256.0}) {
    const GadgetArtifact a = compile(sigma_z_target(), with_c(c));
    const Pert1Comparison p = pert1_compare(a, eigvalsh(build_simulator(a).dense()));
    if (prev > 0.0) CHECK(p.max_abs <= prev / 2.0);
    prev = p.max_abs;
  }
}

TEST_CASE("detect band") {
  RVector ev(5);
  ev << -0.1, 0.1, 3.0, 3.5, 4.0;
  const BandSpec b = detect_band(ev, 2);
  CHECK(b.a_band == -0.1);
  CHECK(b.b_band == 0.1);
  CHECK(b.gap == doctest::Approx(2.9));
  CHECK(b.w_eff == doctest::Approx(0.1));
  CHECK(b.rho > b.w_eff);
  CHECK_THROWS_AS(detect_band(ev, 5), DimensionError);
}

TEST_CASE("verify: sigma_z instance passes at delta 2") {
  CompileOptions o;
  o.delta = 2.0;
  const VerifyReport r = check_low_energy_approximation(compile(sigma_z_target(), o));
  CHECK(r.pass);
  CHECK(r.band_window);
  REQUIRE(r.pert2.has_value());
  CHECK(r.max_deviation <= *r.pert2);
  for (const auto& pt : r.self_energy) {
    REQUIRE(pt.exact_vs_closed.has_value());
    CHECK(*pt.exact_vs_closed <= 1e-9);
    CHECK(pt.hermiticity <= 1e-10);
    CHECK(pt.eta_max <= 1.1 * 4.0 / r.C);
  }
  // two rows, symmetric about the mean shift
  REQUIRE(r.eigenvalues.size() == 2);
  CHECK(std::abs(r.eigenvalues[0].simulator + r.eigenvalues[1].simulator - 2.0 * r.mean_shift) < 1e-6);
}

TEST_CASE("verify: uncoupled target has zero defect") {
  CompileOptions o;
  o.coupled = false;
  const VerifyReport r = check_low_energy_approximation(compile(desk_target(), o));
  CHECK(r.defect_raw < 1e-12);
  CHECK(r.max_deviation < 1e-10);
  CHECK(r.pass);
}

TEST_CASE("verify: tiny C fails") {
  CompileOptions o;
  o.delta = 0.0;
  o.c_override = 0.5;
  const VerifyReport r = check_low_energy_approximation(compile(desk_target(), o));
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.budget.epsilon_prime.has_value());
  CHECK_FALSE(r.reasons.empty());
}

TEST_CASE("verify: tiled blocks agree three ways") {
  CompileOptions o;
  o.mode = Mode::Tiled;
  const GadgetArtifact a = compile(two_term_qubit(), o);
  const VerifyReport r = check_low_energy_approximation(a);
  CHECK(r.band_window);
  CHECK(r.required_gap == 0.5);
  CHECK(r.eigenvalues.size() == 4);
  for (const auto& pt : r.self_energy) {
    REQUIRE(pt.exact_vs_closed.has_value());
    CHECK(*pt.exact_vs_closed <= 1e-9);
    REQUIRE(pt.exact_vs_series.has_value());
    CHECK(*pt.exact_vs_series <= *pt.series_tail + 1e-12);
  }
  REQUIRE(r.pert2.has_value());
  CHECK(r.max_deviation <= *r.pert2);
  CHECK(r.pass);
}
