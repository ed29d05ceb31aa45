// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "pgadget/bound_state.hpp"
#include "pgadget/cli.hpp"
#include "pgadget/gadget.hpp"
#include "pgadget/perturbation.hpp"
#include "pgadget/tiling.hpp"

using namespace pgadget;

namespace {

constexpr double kRoundoff = 1e-12;

struct Outcome {
  bool ok = true;
  std::string detail;
};

class Check {
 public:
  void require(bool cond, const std::string& what) {
    if (!cond && out_.ok) {
      out_.ok = false;
      out_.detail = what;
    }
  }
  void note(const std::string& s) {
    if (out_.ok) out_.detail = s;
  }
  Outcome result() const { return out_; }

 private:
  Outcome out_;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

CMatrix pauli_x() { CMatrix m(2, 2); m << 0, 1, 1, 0; return m; }
CMatrix pauli_z() { CMatrix m(2, 2); m << 1, 0, 0, -1; return m; }

TargetHamiltonian sigma_z_target() {
  TargetHamiltonian t;
  t.system = SiteSystem({2});
  t.terms.push_back({"z", {0}, 1.0, pauli_z()});
  return t;
}

TargetHamiltonian two_term_qubit() {
  TargetHamiltonian t;
  t.system = SiteSystem({2});
  t.terms.push_back({"z", {0}, 1.0, pauli_z()});
  t.terms.push_back({"x", {0}, 2.0, pauli_x()});
  return t;
}

TargetHamiltonian desk_target() {
  TargetHamiltonian t;
  t.system = SiteSystem({2, 2});
  t.terms.push_back({"z0", {0}, 1.0, pauli_z()});
  t.terms.push_back({"xx", {0, 1}, 50.0, kron(pauli_x(), pauli_x())});
  return t;
}

// ------------------------------------------------------------------ criteria

Outcome bound_state_spectrum() {
  Check c;
  for (double b : {1.0, 2.0, 3.0})
    for (int L : {4, 8, 16}) {
      const RVector ev = eigvalsh(build_bound_chain(b, L).dense());
      int negative = 0;
      for (Eigen::Index k = 0; k < ev.size(); ++k)
        if (ev(k) < -1e-10) ++negative;
      c.require(negative == 1, "b=" + fmt("%g", b) + " L=" + std::to_string(L) + ": negative count != 1");
      c.require(ev(0) < -b * b / (b + 1.0) + 1e-10, "ground energy not below -b^2/(b+1)");
      c.require(ev(1) >= -1e-10, "second eigenvalue negative");
    }
  c.note("9 chains, one bound state each");
  return c.result();
}

Outcome overlap_formula() {
  Check c;
  const int M = 4;
  double worst = 0.0;
  for (int T = 3; T <= 6; ++T)
    for (int k = 0; k <= 20; ++k) {
      const double b = 1.0 + 0.1 * k;
      const OverlapReport rep = exact_overlap({b, T, M, M * T}, T);
      const double rel = std::abs(rep.exact - rep.predicted) / rep.predicted;
      const double allowed = 4.0 * std::pow(b + 1.0, -(M - 2) * T);
      worst = std::max(worst, rel / allowed);
      c.require(rel <= allowed, "relative error above 4(b+1)^{-(M-2)T} at b=" + fmt("%g", b));
    }
  const OverlapReport anchor = exact_overlap({2.0, 4, 4, 16}, 4);
  c.require(std::abs(anchor.predicted - 8.0 / 6561.0) < 1e-18, "anchor prediction is not 8/6561");
  // the quoted decimal is good to one unit in its last digit (8/6561 = 1.21933e-3)
  c.require(std::abs(anchor.predicted - 1.2194e-3) <= 1e-7, "anchor prediction differs from 1.2194e-3");
  c.note("anchor " + fmt("%.5e", anchor.predicted) + ", worst error/allowed " + fmt("%.3f", worst));
  return c.result();
}

Outcome solver_exactness() {
  Check c;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(std::log(1e-6), std::log(1e-2));
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double r = std::exp(u(rng));
    const BoundChainParams p = solve_params(r);
    const double rel = std::abs(exact_overlap(p, p.T).exact - r) / r;
    worst = std::max(worst, rel);
    c.require(rel <= 1e-10, "round trip failed for r=" + fmt("%.6e", r));
  }
  std::vector<double> mixed;
  for (int k = 0; k < 8; ++k) mixed.push_back(std::exp(u(rng)));
  const FamilySolution f = solve_family(mixed);
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    const auto& ch = f.chains[i];
    c.require(ch.M == f.M && ch.length == f.M * f.T_max, "family members do not share (M, T_max)");
    c.require(ch.T <= f.T_max, "family member beyond T_max");
    c.require(std::abs(exact_overlap(ch, ch.T).exact - mixed[i]) <= 1e-10 * mixed[i], "family member not exact");
  }
  c.note("worst relative error " + fmt("%.2e", worst) + ", family T_max " + std::to_string(f.T_max));
  return c.result();
}

Outcome tiling_ground_space() {
  Check c;
  for (int N = 1; N <= 6; ++N) {
    const TilingScan s = scan_tiling(N);
    c.require(s.ground_energy == -1, "ground energy != -1 at N=" + std::to_string(N));
    c.require(s.degeneracy == static_cast<std::size_t>(N), "degeneracy != N at N=" + std::to_string(N));
    c.require(s.first_excited - s.ground_energy == 1, "gap != 1 at N=" + std::to_string(N));
    for (const auto& g : ground_signatures(N))
      c.require(std::find(s.ground_strings.begin(), s.ground_strings.end(), g.string) != s.ground_strings.end(),
                "signature missing from the ground space");
  }
  c.note("N = 1..6");
  return c.result();
}

// Strong part and coupling of signature block i written in the site basis.
Outcome self_energy_agreement() {
  Check c;
  CompileOptions tiled;
  tiled.mode = Mode::Tiled;
  CompileOptions free_clocks = tiled;
  free_clocks.coupled = false;
  double worst_closed = 0.0, worst_series_ratio = 0.0;
  std::size_t largest = 0;
  for (const auto& target : {sigma_z_target(), two_term_qubit()}) {
    const GadgetArtifact a = compile(target, tiled);
    const GadgetArtifact bare = compile(target, free_clocks);
    const ProjectorPair proj = clock_ground_projector(a);
    for (int i = 1; i <= a.N(); ++i) {
      const CMatrix h = restricted_block(bare, i).dense();
      const CMatrix v = restricted_block(a, i).dense() - h;
      largest = std::max(largest, static_cast<std::size_t>(h.rows()));
      c.require(h.rows() <= 2048, "block dimension above 2048");
      const SelfEnergyProblem prob(h, v, proj);
      for (double zr : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        const Complex z(zr, 0.0);
        const CMatrix exact = prob.exact(z);
        const double dc = spectral_norm(exact - closed_form_self_energy(a, i, z).sigma);
        worst_closed = std::max(worst_closed, dc);
        c.require(dc <= 1e-9, "exact vs closed form " + fmt("%.3e", dc));
        const SeriesResult s = prob.series(z, 12);
        const double ds = spectral_norm(exact - s.sigma);
        // the tail can sit far below double precision, so allow a fixed roundoff floor
        const double allowed = s.tail_bound + kRoundoff;
        worst_series_ratio = std::max(worst_series_ratio, ds / allowed);
        c.require(ds <= allowed, "exact vs series(12) " + fmt("%.3e", ds) + " above tail " +
                                     fmt("%.3e", s.tail_bound) + " + roundoff");
      }
    }
  }
  c.note("3 blocks up to dim " + std::to_string(largest) + ", max |exact-closed| " + fmt("%.2e", worst_closed) +
         ", max series/tail " + fmt("%.2e", worst_series_ratio));
  return c.result();
}

Outcome eta_bound() {
  Check c;
  std::vector<GadgetArtifact> arts;
  CompileOptions o;
  arts.push_back(compile(sigma_z_target(), o));
  arts.push_back(compile(two_term_qubit(), o));
  for (double delta : {0.0, 0.5, 1.0, 2.0}) {
    o.delta = delta;
    arts.push_back(compile(desk_target(), o));
  }
  o = {};
  o.mode = Mode::Tiled;
  arts.push_back(compile(two_term_qubit(), o));
  arts.push_back(compile(desk_target(), o));
  double worst = 0.0;
  for (const auto& a : arts)
    for (int i = 0; i < a.N(); ++i)
      for (double rad : {0.0, 0.25, 0.5, 0.75, 1.0})
        for (int k = 0; k < 32; ++k) {
          const Complex z = std::polar(rad, 2.0 * M_PI * k / 32.0);
          const double ratio = std::abs(eta(a, i, z)) / (4.0 / a.C);
          worst = std::max(worst, ratio);
          c.require(ratio <= 1.1, "|eta| above 1.1 * 4/C at C=" + fmt("%g", a.C));
        }
  c.note(std::to_string(arts.size()) + " artifacts, max |eta| C/4 = " + fmt("%.4f", worst));
  return c.result();
}

Outcome end_to_end() {
  Check c;
  const GadgetArtifact a = compile(desk_target(), {});
  c.require(a.C == 32.0, "C != 32");
  c.require(a.system.total_dim() <= 4096, "dimension above 4096");
  const VerifyReport r = check_low_energy_approximation(a);
  c.require(r.band_window, "no band window");
  c.require(r.pert2.has_value(), "pert2 bound unavailable");
  c.require(r.budget.epsilon_prime.has_value(), "epsilon' diverges");
  // H_eff spectrum from the target directly
  const RVector h0 = eigvalsh(desk_target().assemble().dense());
  for (Eigen::Index k = 0; k < h0.size(); ++k) {
    const double want = h0(k) / (200.0 * 50.0);
    c.require(std::abs(r.eigenvalues[static_cast<std::size_t>(k)].heff - want) < 1e-15, "H_eff spectrum mismatch");
    const double dev = std::abs(r.eigenvalues[static_cast<std::size_t>(k)].simulator - want);
    c.require(r.pert2 && dev <= *r.pert2, "deviation above pert2 bound");
    c.require(r.budget.epsilon_prime && dev <= *r.budget.epsilon_prime, "deviation above epsilon'");
  }
  c.require(r.pass, "verdict fail");
  c.note("dim " + std::to_string(a.system.total_dim()) + ", max deviation " + fmt("%.3e", r.max_deviation) +
         ", pert2 " + fmt("%.3e", r.pert2.value_or(NAN)) + ", eps' " +
         fmt("%.3e", r.budget.epsilon_prime.value_or(NAN)));
  return c.result();
}

Outcome c_scaling() {
  Check c;
  const std::string target = std::string(PGADGET_TEST_DATA) + "/desk_n2.json";
  std::ostringstream out, err;
  const int code = run_cli({"sweep", target, "--c-mults", "1,4,16"}, out, err);
  c.require(code == 0, "sweep exit code " + std::to_string(code));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  std::vector<double> C, d;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() < 6 || cells[5].rfind("error", 0) == 0) continue;
    C.push_back(std::stod(cells[0]));
    d.push_back(std::stod(cells[3]));
  }
  c.require(C.size() == 3, "sweep did not return three points");
  if (C.size() != 3) return c.result();
  c.require(C[0] == 16.0 && C[1] == 64.0 && C[2] == 256.0, "unexpected C values");
  // least-squares slope of log d against log C
  double mx = 0, my = 0;
  for (int k = 0; k < 3; ++k) {
    mx += std::log(C[k]) / 3.0;
    my += std::log(d[k]) / 3.0;
  }
  double sxy = 0, sxx = 0;
  for (int k = 0; k < 3; ++k) {
    sxy += (std::log(C[k]) - mx) * (std::log(d[k]) - my);
    sxx += (std::log(C[k]) - mx) * (std::log(C[k]) - mx);
  }
  const double slope = sxy / sxx;
  c.require(slope >= -1.3 && slope <= -0.7, "slope " + fmt("%.3f", slope) + " outside [-1.3, -0.7]");
  c.note("slope " + fmt("%.3f", slope));
  return c.result();
}

Outcome unary_encoding() {
  Check c;
  double worst = 0.0;
  for (double b : {1.0, 2.0, 3.0})
    for (int L = 2; L <= 10; ++L) {
      const UnaryEncoding enc = unary_encode({b, 1, 4, L});
      for (const auto& t : enc.terms) c.require(t.support.size() <= 3, "term acts on more than 3 qubits");
      const CMatrix full = enc.op.dense();
      CMatrix legal(L, L);
      for (int s = 1; s <= L; ++s)
        for (int t = 1; t <= L; ++t) legal(s - 1, t - 1) = full(unary_index(s, L), unary_index(t, L));
      const RVector a = eigvalsh(legal), ch = eigvalsh(build_bound_chain(b, L).dense());
      const double dev = (a - ch).cwiseAbs().maxCoeff();
      worst = std::max(worst, dev);
      c.require(dev <= 1e-10, "legal-subspace spectrum differs at L=" + std::to_string(L));
    }
  c.note("L = 2..10, max spectral difference " + fmt("%.2e", worst));
  return c.result();
}

Outcome formula_evaluators() {
  Check c;
  for (int T = 1; T <= 10; ++T) c.require(std::abs(amplification_ratio(1.0, 1.0, T) - 1.0) < 1e-15, "R(1,1,T) != 1");
  c.require(std::abs(amplification_ratio(3.0, 1.0, 2) - 0.3125) < 1e-15, "R(3,1,2) != 0.3125");

  const double heff = 0.01, eps = 1e-4, v = 1.0, lam = 100.0, z0 = 0.0, w = 0.02, rho = 1.0;
  // first term: eigenvalue shift through the strong gap; second: disc contour term
  const double gap_term = 3.0 * (heff + eps) * v / (lam - (heff + eps));
  const double disc_term = rho * (rho + z0) * eps / ((rho - w) * (rho - w - eps));
  const double independent = gap_term + disc_term;
  const double lib = pert2_bound({heff, eps, v, lam, z0, w, rho});
  c.require(std::abs(lib - independent) <= 1e-14 * independent, "pert2_bound differs from the re-derivation");
  // 4.07165e-4 exactly; the quoted decimal is good to one unit in its last digit
  c.require(std::abs(independent - 4.071e-4) <= 1e-7, "re-derived anchor differs from 4.071e-4");
  c.note("pert2 " + fmt("%.6e", lib));
  return c.result();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "bound-state spectrum", 1.0, bound_state_spectrum},
      {2, "overlap formula", 5.0, overlap_formula},
      {3, "solver exactness", 30.0, solver_exactness},
      {4, "tiling ground space", 5.0, tiling_ground_space},
      {5, "self-energy three-way agreement", 60.0, self_energy_agreement},
      {6, "eta bound", 10.0, eta_bound},
      {7, "end-to-end effective Hamiltonian", 120.0, end_to_end},
      {8, "C-scaling law", 300.0, c_scaling},
      {9, "unary encoding", 10.0, unary_encoding},
      {10, "formula evaluators", 1.0, formula_evaluators},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.ok && secs > cr.limit_s) o = {false, "runtime " + fmt("%.2f", secs) + " s above " + fmt("%g", cr.limit_s) + " s"};
    if (!o.ok) ++failures;
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.ok ? "PASS" : "FAIL", cr.id, cr.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
