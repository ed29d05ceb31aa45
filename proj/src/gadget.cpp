#include "pgadget/gadget.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "pgadget/kernels.hpp"
#include "pgadget/tiling.hpp"

namespace pgadget {

// ------------------------------------------------------------------ target

int TargetHamiltonian::locality() const {
  std::size_t k = 0;
  for (const auto& t : terms) k = std::max(k, t.support.size());
  return static_cast<int>(k);
}

void TargetHamiltonian::validate() const {
  if (terms.empty()) throw DomainError("target: at least one term required");
  for (const auto& t : terms) {
    if (t.support.empty()) throw DimensionError("target term '" + t.name + "': empty support");
    std::set<int> seen;
    std::size_t dim = 1;
    for (int s : t.support) {
      if (s < 0 || s >= system.num_sites())
        throw DimensionError("target term '" + t.name + "': support site out of range");
      if (!seen.insert(s).second) throw DimensionError("target term '" + t.name + "': repeated support site");
      dim *= static_cast<std::size_t>(system.dim(s));
    }
    if (static_cast<std::size_t>(t.block.rows()) != dim || t.block.rows() != t.block.cols())
      throw DimensionError("target term '" + t.name + "': matrix dimension does not match its support");
    const double defect = (t.block - t.block.adjoint()).cwiseAbs().maxCoeff();
    if (defect > MultipartiteOperator::kHermiticityTol * std::max(1.0, t.block.cwiseAbs().maxCoeff()))
      throw DomainError("target term '" + t.name + "': matrix is not hermitian");
    if (!std::isfinite(t.coefficient)) throw DomainError("target term '" + t.name + "': coefficient is not finite");
    if (t.coefficient == 0.0) throw DomainError("target term '" + t.name + "': zero coefficient");
  }
}

MultipartiteOperator TargetHamiltonian::assemble() const {
  auto h = MultipartiteOperator::zero(system);
  for (const auto& t : terms) h += embed_local(system, t.support, t.block) * t.coefficient;
  return h;
}

NormalizedTarget normalize_target(const TargetHamiltonian& t) {
  t.validate();
  NormalizedTarget out;
  out.target.system = t.system;
  std::vector<double> magnitudes;
  for (std::size_t k = 0; k < t.terms.size(); ++k) {
    const auto& term = t.terms[k];
    const auto parts = decompose_involutions(term.coefficient * term.block);
    if (parts.empty()) throw DomainError("target term '" + term.name + "': zero coefficient after decomposition");
    for (std::size_t j = 0; j < parts.size(); ++j) {
      std::string name = term.name;
      if (parts.size() > 1) name += "[" + std::to_string(j) + "]";
      out.target.terms.push_back({name, term.support, parts[j].coefficient, parts[j].involution});
      out.source_term.push_back(static_cast<int>(k));
      magnitudes.push_back(parts[j].coefficient);
    }
  }
  out.r_scale = *std::max_element(magnitudes.begin(), magnitudes.end());
  for (auto& term : out.target.terms) term.coefficient /= 200.0 * out.r_scale;
  return out;
}

std::string mode_name(Mode m) { return m == Mode::Tiled ? "tiled" : "tile-free"; }

Mode parse_mode(const std::string& s) {
  if (s == "tiled") return Mode::Tiled;
  if (s == "tile-free") return Mode::TileFree;
  throw DomainError("unknown mode '" + s + "' (expected tile-free or tiled)");
}

// ------------------------------------------------------------------ compile

SiteSystem GadgetArtifact::core_system() const {
  std::vector<int> dims(target.system.dims().begin(), target.system.dims().end());
  for (const auto& term : terms) dims.push_back(term.chain.length);
  return SiteSystem(std::move(dims));
}

std::vector<double> GadgetArtifact::shifts() const {
  std::vector<double> s;
  for (const auto& c : clocks) s.push_back(c.ground_energy);
  return s;
}

namespace {

double strong_scale(int N, const CompileOptions& o) {
  if (!(o.delta >= 0.0) || !std::isfinite(o.delta)) throw DomainError("compile: delta must be >= 0");
  if (o.c_override) {
    if (!(*o.c_override > 0.0) || !std::isfinite(*o.c_override)) throw DomainError("compile: C override must be positive");
    return *o.c_override;
  }
  return 4.0 * std::pow(static_cast<double>(N), 2.0 + o.delta);
}

void check_tiled_policy(int N, Mode mode) {
  if (mode == Mode::Tiled && N > kMaxTiledTerms) {
    std::ostringstream msg;
    msg << "tiled mode is limited to N <= " << kMaxTiledTerms << " interactions (N = " << N << ", tile register 3^"
        << N + 2 << ")";
    throw ResourceError(msg.str(), std::pow(3.0, N + 2));
  }
}

void check_dimension(const TargetHamiltonian& t, const std::vector<BoundChainParams>& chains, Mode mode,
                     std::size_t cap) {
  double est = static_cast<double>(t.system.total_dim());
  for (const auto& c : chains) est *= c.length;
  if (mode == Mode::Tiled) est *= std::pow(3.0, static_cast<double>(chains.size()) + 2.0);
  if (est > static_cast<double>(cap)) {
    std::ostringstream msg;
    msg << "simulator dimension " << est << " exceeds the cap " << cap;
    throw ResourceError(msg.str(), est);
  }
}

std::vector<int> with_register(std::vector<int> support, int reg) {
  support.push_back(reg);
  return support;
}

CMatrix ket_bra(int dim, int k) {
  CMatrix m = CMatrix::Zero(dim, dim);
  m(k, k) = 1.0;
  return m;
}

}  // namespace

GadgetArtifact compile(const TargetHamiltonian& t, const CompileOptions& options) {
  const NormalizedTarget norm = normalize_target(t);
  const int N = norm.target.num_terms();
  check_tiled_policy(N, options.mode);
  strong_scale(N, options);
  std::vector<double> r_list;
  for (const auto& term : norm.target.terms) r_list.push_back(term.coefficient);
  std::vector<BoundChainParams> chains;
  if (options.shared_length) {
    chains = solve_family(r_list, options.M, options.bias).chains;
  } else {
    for (double r : r_list) chains.push_back(solve_params(r, options.M, options.bias));
  }
  return assemble(t, options, chains);
}

GadgetArtifact assemble(const TargetHamiltonian& t, const CompileOptions& options,
                        const std::vector<BoundChainParams>& chains) {
  const NormalizedTarget norm = normalize_target(t);
  const int N = norm.target.num_terms();
  check_tiled_policy(N, options.mode);
  if (chains.size() != static_cast<std::size_t>(N)) throw DimensionError("assemble: one chain per normalized term required");
  check_dimension(t, chains, options.mode, options.dim_cap);

  GadgetArtifact a;
  a.target = t;
  a.mode = options.mode;
  a.delta = options.delta;
  a.C = strong_scale(N, options);
  a.M = options.M;
  a.coupled = options.coupled;
  a.r_scale = norm.r_scale;
  for (int i = 0; i < N; ++i) {
    const auto& term = norm.target.terms[static_cast<std::size_t>(i)];
    a.terms.push_back({term.name, term.support, term.coefficient, term.block, chains[static_cast<std::size_t>(i)]});
    a.clocks.push_back(clock_spectrum(chains[static_cast<std::size_t>(i)]));
  }
  std::vector<int> dims(t.system.dims().begin(), t.system.dims().end());
  for (const auto& c : chains) dims.push_back(c.length);
  if (a.mode == Mode::Tiled) dims.insert(dims.end(), static_cast<std::size_t>(N + 2), 3);
  a.system = SiteSystem(std::move(dims));

  for (int i = 0; i < N; ++i) a.assembled.push_back({"clock[" + std::to_string(i) + "]", {a.clock_register(i)}});
  if (a.coupled) {
    for (int i = 0; i < N; ++i) {
      auto regs = with_register(a.terms[static_cast<std::size_t>(i)].support, a.clock_register(i));
      if (a.mode == Mode::Tiled) regs.push_back(a.tile_register(i + 1));
      a.assembled.push_back({"coupling[" + std::to_string(i) + "]", std::move(regs)});
    }
  }
  if (a.mode == Mode::Tiled) {
    for (int s = 0; s + 1 < N + 2; ++s)
      a.assembled.push_back({"tile_pair[" + std::to_string(s) + "]", {a.tile_register(s), a.tile_register(s + 1)}});
    for (int s = 0; s + 2 < N + 2; ++s)
      a.assembled.push_back({"tile_bonus[" + std::to_string(s) + "]",
                             {a.tile_register(s), a.tile_register(s + 1), a.tile_register(s + 2)}});
  }
  return a;
}

// ----------------------------------------------------------------- assembly

namespace {

MultipartiteOperator clock_sum(const GadgetArtifact& a, const SiteSystem& sys) {
  auto h = MultipartiteOperator::zero(sys);
  for (int i = 0; i < a.N(); ++i) {
    const auto& cs = a.clocks[static_cast<std::size_t>(i)];
    const int L = cs.params.length;
    const RMatrix shifted = bound_chain_matrix(cs.params.b, L) - cs.ground_energy * RMatrix::Identity(L, L);
    const int reg = a.clock_register(i);
    h += embed_local(sys, std::span<const int>(&reg, 1), CMatrix(a.C * shifted.cast<Complex>()));
  }
  return h;
}

MultipartiteOperator coupling_term(const GadgetArtifact& a, const SiteSystem& sys, int i, bool with_tile) {
  const auto& term = a.terms[static_cast<std::size_t>(i)];
  const auto& chain = term.chain;
  CMatrix block = kron(term.involution, ket_bra(chain.length, chain.T - 1));
  auto regs = with_register(term.support, a.clock_register(i));
  if (with_tile) {
    block = kron(block, ket_bra(3, 1));
    regs.push_back(a.tile_register(i + 1));
  }
  return embed_local(sys, regs, block);
}

void check_materializable(const SiteSystem& sys, std::size_t cap) {
  if (sys.total_dim() > cap) throw ResourceError("simulator dimension exceeds the cap", static_cast<double>(sys.total_dim()));
}

}  // namespace

MultipartiteOperator strong_part(const GadgetArtifact& a) {
  check_materializable(a.system, std::size_t{1} << 20);
  auto h = clock_sum(a, a.system);
  if (a.mode == Mode::Tiled) {
    const auto diag = kernels::tiling_diagonal(a.N());
    const std::size_t tile_dim = diag.size();
    const auto n = static_cast<Eigen::Index>(a.system.total_dim());
    CSparse t(n, n);
    std::vector<kernels::Triplet> trip;
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto e = diag[static_cast<std::size_t>(k) % tile_dim];
      if (e != 0) trip.emplace_back(k, k, Complex(static_cast<double>(e)));
    }
    t.setFromTriplets(trip.begin(), trip.end());
    h += MultipartiteOperator(a.system, std::move(t));
  }
  return h;
}

MultipartiteOperator coupling_part(const GadgetArtifact& a) {
  check_materializable(a.system, std::size_t{1} << 20);
  auto v = MultipartiteOperator::zero(a.system);
  if (!a.coupled) return v;
  for (int i = 0; i < a.N(); ++i) v += coupling_term(a, a.system, i, a.mode == Mode::Tiled);
  return v;
}

MultipartiteOperator build_simulator(const GadgetArtifact& a) { return strong_part(a) + coupling_part(a); }

CMatrix effective_on_system(const GadgetArtifact& a) {
  const auto d = static_cast<Eigen::Index>(a.system_dim());
  CMatrix h = CMatrix::Zero(d, d);
  if (!a.coupled) return h;
  for (const auto& term : a.terms) h += term.r_prime * embed_local(a.target.system, term.support, term.involution).dense();
  return h;
}

namespace {

CVector clock_ground_product(const GadgetArtifact& a) {
  CVector psi = CVector::Ones(1);
  for (const auto& cs : a.clocks) psi = kron(psi, cs.eigenvectors.col(0).cast<Complex>());
  return psi;
}

}  // namespace

MultipartiteOperator predicted_effective(const GadgetArtifact& a) {
  const CVector psi = clock_ground_product(a);
  return {a.core_system(), kron(effective_on_system(a), psi * psi.adjoint())};
}

RVector heff_band_eigenvalues(const GadgetArtifact& a) {
  if (a.mode == Mode::TileFree) return eigvalsh(effective_on_system(a));
  const auto d = static_cast<Eigen::Index>(a.system_dim());
  RVector out(d * a.N());
  for (int i = 0; i < a.N(); ++i) {
    const auto& term = a.terms[static_cast<std::size_t>(i)];
    RVector ev = RVector::Zero(d);
    if (a.coupled) ev = eigvalsh(term.r_prime * embed_local(a.target.system, term.support, term.involution).dense());
    out.segment(i * d, d) = ev.array() - 1.0;
  }
  std::sort(out.begin(), out.end());
  return out;
}

MultipartiteOperator restricted_block(const GadgetArtifact& a, int i) {
  if (a.mode != Mode::Tiled) throw DomainError("restricted_block: artifact is not in tiled mode");
  if (i < 1 || i > a.N()) throw DomainError("restricted_block: signature index out of range");
  const SiteSystem core = a.core_system();
  auto h = clock_sum(a, core);
  if (a.coupled) h += coupling_term(a, core, i - 1, false);
  return h;
}

ProjectorPair clock_ground_projector(const GadgetArtifact& a) {
  CMatrix basis = CMatrix::Identity(static_cast<Eigen::Index>(a.system_dim()), static_cast<Eigen::Index>(a.system_dim()));
  for (const auto& cs : a.clocks) basis = kron(basis, cs.eigenvectors.cast<Complex>());
  const EigenbasisModel model = eigenbasis_model(a, 0);
  std::vector<bool> is_minus(static_cast<std::size_t>(basis.cols()), false);
  for (auto k : model.minus_indices) is_minus[k] = true;
  CMatrix minus(basis.rows(), static_cast<Eigen::Index>(model.minus_indices.size()));
  CMatrix plus(basis.rows(), basis.cols() - minus.cols());
  Eigen::Index im = 0, ip = 0;
  for (Eigen::Index k = 0; k < basis.cols(); ++k) {
    if (is_minus[static_cast<std::size_t>(k)])
      minus.col(im++) = basis.col(k);
    else
      plus.col(ip++) = basis.col(k);
  }
  return {std::move(minus), std::move(plus)};
}

// --------------------------------------------------------- eigenbasis model

CMatrix EigenbasisModel::full() const {
  CMatrix h = coupling.dense();
  h.diagonal() += strong_diag.cast<Complex>();
  return h;
}

EigenbasisModel eigenbasis_model(const GadgetArtifact& a, int signature) {
  if (signature < 0 || signature > a.N()) throw DomainError("eigenbasis_model: signature index out of range");
  if (signature > 0 && a.mode != Mode::Tiled) throw DomainError("eigenbasis_model: signatures exist only in tiled mode");
  EigenbasisModel m;
  m.system = a.core_system();
  const auto total = m.system.total_dim();
  m.strong_diag = RVector::Zero(static_cast<Eigen::Index>(total));
  const int nsys = a.num_system_sites();
  for (std::size_t x = 0; x < total; ++x) {
    double e = 0.0;
    for (int i = 0; i < a.N(); ++i) {
      const int reg = nsys + i;
      const auto k = (x / m.system.stride(reg)) % static_cast<std::size_t>(m.system.dim(reg));
      e += a.clocks[static_cast<std::size_t>(i)].energies(static_cast<Eigen::Index>(k));
    }
    m.strong_diag(static_cast<Eigen::Index>(x)) = a.C * e;
  }
  m.coupling = MultipartiteOperator::zero(m.system);
  if (a.coupled) {
    for (int i = 0; i < a.N(); ++i) {
      if (signature > 0 && i != signature - 1) continue;
      const auto& term = a.terms[static_cast<std::size_t>(i)];
      const CVector p = a.clocks[static_cast<std::size_t>(i)].overlaps.cast<Complex>();
      m.coupling += embed_local(m.system, with_register(term.support, a.clock_register(i)),
                                kron(term.involution, p * p.adjoint()));
    }
  }
  std::size_t clock_dim = 1;
  for (const auto& term : a.terms) clock_dim *= static_cast<std::size_t>(term.chain.length);
  for (std::size_t s = 0; s < a.system_dim(); ++s) m.minus_indices.push_back(s * clock_dim);
  return m;
}

}  // namespace pgadget
