#include "pgadget/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pgadget/bound_state.hpp"
#include "pgadget/gadget.hpp"
#include "pgadget/io.hpp"
#include "pgadget/perturbation.hpp"

namespace pgadget {

namespace {

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_file_atomic(path, text);
}

std::string csv_number(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

int cmd_solve_params(double r, int m, double b_min, double b_max, std::ostream& out) {
  const BoundChainParams p = solve_params(r, m, {b_min, b_max});
  Json j;
  j["b"] = p.b;
  j["T"] = p.T;
  j["M"] = p.M;
  j["length"] = p.length;
  j["achieved_overlap"] = exact_overlap(p, p.T).exact;
  out << j.dump(2) << "\n";
  return 0;
}

struct CompileFlags {
  double delta = 1.0;
  std::string mode = "tile-free";
  int m = 4;
  std::optional<double> c_override;
  bool per_term_length = false;
  std::size_t dim_cap = std::size_t{1} << 20;
  bool uncoupled = false;
  double b_min = 1.0;
  double b_max = 3.0;

  CompileOptions options() const {
    CompileOptions o;
    o.delta = delta;
    o.mode = parse_mode(mode);
    o.M = m;
    o.c_override = c_override;
    o.shared_length = !per_term_length;
    o.dim_cap = dim_cap;
    o.coupled = !uncoupled;
    o.bias = {b_min, b_max};
    return o;
  }
};

int cmd_compile(const std::string& target_path, const CompileFlags& flags, const std::string& out_path,
                std::ostream& out) {
  const TargetHamiltonian t = parse_target(read_json_file(target_path));
  const CompileOptions o = flags.options();
  const GadgetArtifact a = compile(t, o);
  emit(out_path, params_to_json(a, o).dump(2) + "\n", out);
  return 0;
}

int cmd_spectrum(const std::string& params_path, std::optional<int> k, const std::string& out_path, std::ostream& out,
                 std::ostream& err) {
  const GadgetArtifact a = artifact_from_params(read_json_file(params_path));
  const RVector heff = heff_band_eigenvalues(a);
  const auto d = static_cast<Eigen::Index>(a.system_dim());
  RVector sim;
  if (a.mode == Mode::TileFree) {
    sim = eigh(eigenbasis_model(a, 0).full()).eigenvalues;
  } else {
    sim.resize(d * a.N());
    for (int i = 1; i <= a.N(); ++i)
      sim.segment((i - 1) * d, d) = eigh(eigenbasis_model(a, i).full()).eigenvalues.head(d).array() - 1.0;
    std::sort(sim.begin(), sim.end());
  }
  Eigen::Index rows = k ? *k : heff.size();
  if (rows < 1) throw DomainError("--k must be positive");
  if (rows > sim.size()) {
    err << "warning: --k " << rows << " exceeds the " << (a.mode == Mode::Tiled ? "signature band size " : "dimension ")
        << sim.size() << "; clipped\n";
    rows = sim.size();
  }
  std::ostringstream csv;
  csv << "index,simulator_eigenvalue,heff_eigenvalue,deviation\n";
  for (Eigen::Index i = 0; i < rows; ++i) {
    csv << i << ',' << format_double(sim(i)) << ',';
    if (i < heff.size()) csv << format_double(heff(i)) << ',' << format_double(sim(i) - heff(i));
    else csv << ',';
    csv << '\n';
  }
  emit(out_path, csv.str(), out);
  return 0;
}

int cmd_verify(const std::string& params_path, const VerifyOptions& opts, const std::string& out_path, std::ostream& out,
               std::ostream& err) {
  const GadgetArtifact a = artifact_from_params(read_json_file(params_path));
  const VerifyReport rep = check_low_energy_approximation(a, opts);
  emit(out_path, report_to_json(rep).dump(2) + "\n", out);
  err << "verdict: " << (rep.pass ? "pass" : "fail") << "\n";
  for (const auto& r : rep.reasons) err << "  " << r << "\n";
  return rep.pass ? 0 : 1;
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

int cmd_sweep(const std::string& target_path, const CompileFlags& flags, const std::vector<double>& deltas,
              const std::vector<double>& c_mults, const std::string& out_path, std::ostream& out) {
  const TargetHamiltonian t = parse_target(read_json_file(target_path));
  if (deltas.empty() == c_mults.empty()) throw DomainError("give exactly one of --delta-list and --c-mults");
  const CompileOptions base = flags.options();
  const double n = normalize_target(t).target.num_terms();
  std::vector<CompileOptions> points;
  for (double dl : deltas) {
    CompileOptions o = base;
    o.delta = dl;
    o.c_override.reset();
    points.push_back(o);
  }
  for (double m : c_mults) {
    if (!(m > 0.0)) throw DomainError("--c-mults entries must be positive");
    CompileOptions o = base;
    o.c_override = m * 4.0 * n * n;
    points.push_back(o);
  }

  struct Row {
    double C = 0.0;
    std::string text;
  };
  std::vector<Row> rows(points.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < points.size(); ++k) {
    const CompileOptions& o = points[k];
    Row& row = rows[k];
    row.C = o.c_override ? *o.c_override : 4.0 * std::pow(n, 2.0 + o.delta);
    std::ostringstream line;
    try {
      const GadgetArtifact a = compile(t, o);
      const VerifyReport rep = check_low_energy_approximation(a);
      line << format_double(a.C) << ',' << csv_number(rep.budget.epsilon) << ',' << csv_number(rep.budget.epsilon_prime)
           << ',' << format_double(rep.defect_raw) << ',' << csv_number(rep.pert2) << ','
           << (rep.pass ? "pass" : "fail");
    } catch (const std::exception& e) {
      line << format_double(row.C) << ",,,,," << sanitize(std::string("error: ") + e.what());
    }
    row.text = line.str();
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) { return x.C < y.C; });
  std::ostringstream csv;
  csv << "C,epsilon,epsilon_prime,measured_defect,pert2_bound,status\n";
  for (const auto& r : rows) csv << r.text << '\n';
  emit(out_path, csv.str(), out);
  return 0;
}

void add_compile_flags(CLI::App* cmd, CompileFlags& f) {
  cmd->add_option("--mode", f.mode, "tile-free or tiled")->check(CLI::IsMember({"tile-free", "tiled"}));
  cmd->add_option("--m", f.m, "chain length multiplier M");
  cmd->add_option("--b-min", f.b_min, "lower end of the bias interval");
  cmd->add_option("--b-max", f.b_max, "upper end of the bias interval");
  cmd->add_option("--dim-cap", f.dim_cap, "largest simulator dimension to build");
  cmd->add_flag("--per-term-length", f.per_term_length, "give each chain its own length M*T_i");
  cmd->add_flag("--uncoupled", f.uncoupled, "omit the couplings (V = 0)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perturbation-gadget compiler and verifier"};
  app.require_subcommand(1);

  double r = 0.0;
  int m = 4;
  double b_min = 1.0, b_max = 3.0;
  auto* solve = app.add_subcommand("solve-params", "solve bias and coupling site for a target overlap");
  solve->add_option("--r", r, "target overlap, 0 < r < 1/100")->required();
  solve->add_option("--m", m, "chain length multiplier M");
  solve->add_option("--b-min", b_min);
  solve->add_option("--b-max", b_max);

  CompileFlags cflags;
  std::string target_path, out_path;
  double c_override = 0.0;
  auto* comp = app.add_subcommand("compile", "compile a target Hamiltonian into simulator parameters");
  comp->add_option("target", target_path, "target JSON")->required();
  comp->add_option("--delta", cflags.delta, "exponent offset in C = 4 N^(2+delta)");
  auto* c_opt = comp->add_option("--c-override", c_override, "use this strong scale C");
  comp->add_option("-o,--output", out_path, "parameter file (stdout if omitted)");
  add_compile_flags(comp, cflags);

  std::string params_path;
  int k = 0;
  auto* spec = app.add_subcommand("spectrum", "lowest simulator eigenvalues against H_eff");
  spec->add_option("params", params_path, "parameter file")->required();
  auto* k_opt = spec->add_option("--k", k, "number of rows");
  spec->add_option("-o,--output", out_path);

  VerifyOptions vopts;
  double tol = 0.0;
  auto* ver = app.add_subcommand("verify", "verify the low-energy approximation");
  ver->add_option("params", params_path, "parameter file")->required();
  ver->add_option("--z-grid", vopts.z_grid, "real evaluation points")->delimiter(',');
  ver->add_option("--order", vopts.order, "series truncation order");
  auto* tol_opt = ver->add_option("--tol", tol, "tolerance on the scaled effective-block defect");
  ver->add_option("-o,--output", out_path, "report file (stdout if omitted)");

  CompileFlags sflags;
  std::vector<double> deltas, c_mults;
  auto* sweep = app.add_subcommand("sweep", "defect against C over a list of points");
  sweep->add_option("target", target_path, "target JSON")->required();
  sweep->add_option("--delta-list", deltas)->delimiter(',');
  sweep->add_option("--c-mults", c_mults, "multiples of 4 N^2")->delimiter(',');
  sweep->add_option("-o,--output", out_path, "CSV file (stdout if omitted)");
  add_compile_flags(sweep, sflags);

  std::vector<std::string> argv_store{"pgadget"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve) return cmd_solve_params(r, m, b_min, b_max, out);
    if (*comp) {
      if (*c_opt) cflags.c_override = c_override;
      return cmd_compile(target_path, cflags, out_path, out);
    }
    if (*spec) return cmd_spectrum(params_path, *k_opt ? std::optional<int>(k) : std::nullopt, out_path, out, err);
    if (*ver) {
      if (*tol_opt) vopts.tol = tol;
      return cmd_verify(params_path, vopts, out_path, out, err);
    }
    if (*sweep) return cmd_sweep(target_path, sflags, deltas, c_mults, out_path, out);
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << " (estimated dimension " << format_double(e.estimate()) << ")\n";
    return 1;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace pgadget
