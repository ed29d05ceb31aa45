#pragma once

#include <random>

#include "pgadget/gadget.hpp"

namespace pgadget::test {

inline CMatrix pauli_x() { CMatrix m(2, 2); m << 0, 1, 1, 0; return m; }
inline CMatrix pauli_z() { CMatrix m(2, 2); m << 1, 0, 0, -1; return m; }
inline CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

inline CMatrix random_hermitian(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

inline double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// One qubit, sigma_z with coefficient 1.
inline TargetHamiltonian sigma_z_target() {
  TargetHamiltonian t;
  t.system = SiteSystem({2});
  t.terms.push_back({"z", {0}, 1.0, pauli_z()});
  return t;
}

/// Two qubits: sigma_z (x) 1 with r = 1 and sigma_x (x) sigma_x with r = 50.
inline TargetHamiltonian desk_target() {
  TargetHamiltonian t;
  t.system = SiteSystem({2, 2});
  t.terms.push_back({"z0", {0}, 1.0, pauli_z()});
  t.terms.push_back({"xx", {0, 1}, 50.0, kron(pauli_x(), pauli_x())});
  return t;
}

}  // namespace pgadget::test
