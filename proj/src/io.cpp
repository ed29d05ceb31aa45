#include "pgadget/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pgadget {

namespace {

const Json& member(const Json& j, const char* key) {
  if (!j.is_object()) throw SchemaError(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing field '") + key + "'");
  return *it;
}

template <class T>
T field(const Json& j, const char* key) {
  const Json& v = member(j, key);
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw SchemaError("");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer()) throw SchemaError("");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw SchemaError("");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw SchemaError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw SchemaError(std::string("field '") + key + "' has the wrong type");
  }
}

std::vector<double> number_array(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_array()) throw SchemaError(std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw SchemaError(std::string("field '") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<int> int_array(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (!v.is_array()) throw SchemaError(std::string("field '") + key + "' must be an array");
  std::vector<int> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) throw SchemaError(std::string("field '") + key + "' must hold integers");
    out.push_back(x.get<int>());
  }
  return out;
}

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

std::optional<double> read_optional(const Json& j, const char* key) {
  const Json& v = member(j, key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) throw SchemaError(std::string("field '") + key + "' must be a number or null");
  return v.get<double>();
}

}  // namespace

// ------------------------------------------------------------------ target

TargetHamiltonian parse_target(const Json& j) {
  TargetHamiltonian t;
  try {
    t.system = SiteSystem(int_array(j, "sites"));
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(std::string("sites: ") + e.what());
  }
  const Json& terms = member(j, "terms");
  if (!terms.is_array() || terms.empty()) throw SchemaError("field 'terms' must be a non-empty array");
  for (const auto& tj : terms) {
    LocalTerm term;
    term.name = field<std::string>(tj, "name");
    term.support = int_array(tj, "support");
    term.coefficient = field<double>(tj, "coefficient");
    const Json& mj = member(tj, "matrix");
    const int dim = field<int>(mj, "dim");
    if (dim < 1) throw SchemaError("term '" + term.name + "': matrix dim must be positive");
    const auto re = number_array(mj, "re");
    const auto im = number_array(mj, "im");
    const auto n = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
    if (re.size() != n || im.size() != n)
      throw SchemaError("term '" + term.name + "': 're' and 'im' must hold dim^2 entries");
    term.block.resize(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) {
        const auto k = static_cast<std::size_t>(r) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c);
        term.block(r, c) = Complex(re[k], im[k]);
      }
    t.terms.push_back(std::move(term));
  }
  try {
    t.validate();
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }
  return t;
}

Json target_to_json(const TargetHamiltonian& t) {
  Json j;
  j["sites"] = std::vector<int>(t.system.dims().begin(), t.system.dims().end());
  Json terms = Json::array();
  for (const auto& term : t.terms) {
    Json tj;
    tj["name"] = term.name;
    tj["support"] = term.support;
    tj["coefficient"] = term.coefficient;
    std::vector<double> re, im;
    for (Eigen::Index r = 0; r < term.block.rows(); ++r)
      for (Eigen::Index c = 0; c < term.block.cols(); ++c) {
        re.push_back(term.block(r, c).real());
        im.push_back(term.block(r, c).imag());
      }
    tj["matrix"] = {{"dim", term.block.rows()}, {"re", re}, {"im", im}};
    terms.push_back(tj);
  }
  j["terms"] = terms;
  return j;
}

// ------------------------------------------------------------------ params

Json params_to_json(const GadgetArtifact& a, const CompileOptions& o) {
  Json j;
  j["format"] = "pgadget-params";
  j["version"] = 1;
  j["mode"] = mode_name(a.mode);
  j["delta"] = a.delta;
  j["C"] = a.C;
  j["c_override"] = optional_number(o.c_override);
  j["M"] = a.M;
  j["shared_length"] = o.shared_length;
  j["dim_cap"] = o.dim_cap;
  j["b_min"] = o.bias.lo;
  j["b_max"] = o.bias.hi;
  j["coupled"] = a.coupled;
  j["N"] = a.N();
  j["r_scale"] = a.r_scale;
  Json chains = Json::array();
  for (const auto& t : a.terms)
    chains.push_back({{"name", t.name},
                      {"support", t.support},
                      {"r_prime", t.r_prime},
                      {"b", t.chain.b},
                      {"T", t.chain.T},
                      {"length", t.chain.length}});
  j["chains"] = chains;
  j["target"] = target_to_json(a.target);
  return j;
}

CompileOptions options_from_params(const Json& j) {
  if (field<std::string>(j, "format") != "pgadget-params") throw SchemaError("not a parameter file");
  CompileOptions o;
  try {
    o.mode = parse_mode(field<std::string>(j, "mode"));
  } catch (const DomainError& e) {
    throw SchemaError(e.what());
  }
  o.delta = field<double>(j, "delta");
  o.c_override = read_optional(j, "c_override");
  o.M = field<int>(j, "M");
  o.shared_length = field<bool>(j, "shared_length");
  o.dim_cap = field<std::size_t>(j, "dim_cap");
  o.bias = {field<double>(j, "b_min"), field<double>(j, "b_max")};
  o.coupled = field<bool>(j, "coupled");
  return o;
}

GadgetArtifact artifact_from_params(const Json& j) {
  const CompileOptions o = options_from_params(j);
  const TargetHamiltonian t = parse_target(member(j, "target"));
  const Json& cj = member(j, "chains");
  if (!cj.is_array()) throw SchemaError("field 'chains' must be an array");
  std::vector<BoundChainParams> chains;
  for (const auto& c : cj) chains.push_back({field<double>(c, "b"), field<int>(c, "T"), o.M, field<int>(c, "length")});
  try {
    return assemble(t, o, chains);
  } catch (const DimensionError& e) {
    throw SchemaError(e.what());
  }
}

// ------------------------------------------------------------------ report

Json report_to_json(const VerifyReport& r) {
  Json j;
  Json art;
  art["mode"] = r.mode;
  art["delta"] = r.delta;
  art["C"] = r.C;
  art["M"] = r.M;
  art["coupled"] = r.coupled;
  art["r_scale"] = r.r_scale;
  Json terms = Json::array();
  for (const auto& t : r.terms)
    terms.push_back({{"name", t.name}, {"r_prime", t.r_prime}, {"b", t.chain.b}, {"T", t.chain.T}, {"length", t.chain.length}});
  art["terms"] = terms;
  j["artifact"] = art;

  j["band"] = {{"a", r.band.a_band},         {"b", r.band.b_band},
               {"midpoint", r.band.midpoint}, {"gap", r.band.gap},
               {"required_gap", r.required_gap}, {"window", r.band_window},
               {"size", r.band.size},         {"z0", r.band.z0},
               {"w_eff", r.band.w_eff},       {"rho", r.band.rho}};

  const auto& b = r.budget;
  j["error_budget"] = {{"N", b.N},
                       {"C", b.C},
                       {"q", b.q},
                       {"epsilon", optional_number(b.epsilon)},
                       {"epsilon_prime", optional_number(b.epsilon_prime)},
                       {"q_measured", optional_number(b.q_measured)},
                       {"epsilon_measured", optional_number(b.epsilon_measured)},
                       {"epsilon_prime_measured", optional_number(b.epsilon_prime_measured)},
                       {"eta_bound", b.eta_bound},
                       {"eta_max", r.eta_max},
                       {"lambda_plus", b.lambda_plus},
                       {"v_norm", r.v_norm},
                       {"heff_norm", r.heff_norm},
                       {"pert2_bound", optional_number(r.pert2)}};

  Json rows = Json::array();
  for (const auto& e : r.eigenvalues)
    rows.push_back({{"index", e.index}, {"simulator", e.simulator}, {"heff", e.heff}, {"deviation", e.deviation}});
  j["eigenvalues"] = rows;
  j["max_deviation"] = r.max_deviation;

  Json se = Json::array();
  for (const auto& p : r.self_energy)
    se.push_back({{"z", p.z},
                  {"exact_vs_closed", optional_number(p.exact_vs_closed)},
                  {"exact_vs_series", optional_number(p.exact_vs_series)},
                  {"series_ratio", optional_number(p.series_ratio)},
                  {"series_tail", optional_number(p.series_tail)},
                  {"hermiticity", p.hermiticity},
                  {"shift", p.shift},
                  {"eta_max", p.eta_max}});
  j["self_energy"] = se;

  j["defect"] = {{"raw", r.defect_raw},
                 {"shift_removed", r.defect_shift_removed},
                 {"mean_shift", r.mean_shift},
                 {"scaled", r.scaled_defect},
                 {"tolerance", optional_number(r.tolerance)}};
  j["verdict"] = r.pass ? "pass" : "fail";
  j["reasons"] = r.reasons;
  return j;
}

VerifyReport report_from_json(const Json& j) {
  VerifyReport r;
  const Json& art = member(j, "artifact");
  r.mode = field<std::string>(art, "mode");
  r.delta = field<double>(art, "delta");
  r.C = field<double>(art, "C");
  r.M = field<int>(art, "M");
  r.coupled = field<bool>(art, "coupled");
  r.r_scale = field<double>(art, "r_scale");
  for (const auto& t : member(art, "terms")) {
    GadgetTerm g;
    g.name = field<std::string>(t, "name");
    g.r_prime = field<double>(t, "r_prime");
    g.chain = {field<double>(t, "b"), field<int>(t, "T"), r.M, field<int>(t, "length")};
    r.terms.push_back(std::move(g));
  }

  const Json& band = member(j, "band");
  r.band.a_band = field<double>(band, "a");
  r.band.b_band = field<double>(band, "b");
  r.band.midpoint = field<double>(band, "midpoint");
  r.band.gap = field<double>(band, "gap");
  r.required_gap = field<double>(band, "required_gap");
  r.band_window = field<bool>(band, "window");
  r.band.size = field<std::size_t>(band, "size");
  r.band.z0 = field<double>(band, "z0");
  r.band.w_eff = field<double>(band, "w_eff");
  r.band.rho = field<double>(band, "rho");

  const Json& eb = member(j, "error_budget");
  r.budget.N = field<int>(eb, "N");
  r.budget.C = field<double>(eb, "C");
  r.budget.q = field<double>(eb, "q");
  r.budget.epsilon = read_optional(eb, "epsilon");
  r.budget.epsilon_prime = read_optional(eb, "epsilon_prime");
  r.budget.q_measured = read_optional(eb, "q_measured");
  r.budget.epsilon_measured = read_optional(eb, "epsilon_measured");
  r.budget.epsilon_prime_measured = read_optional(eb, "epsilon_prime_measured");
  r.budget.eta_bound = field<double>(eb, "eta_bound");
  r.eta_max = field<double>(eb, "eta_max");
  r.budget.lambda_plus = field<double>(eb, "lambda_plus");
  r.v_norm = field<double>(eb, "v_norm");
  r.heff_norm = field<double>(eb, "heff_norm");
  r.pert2 = read_optional(eb, "pert2_bound");

  for (const auto& e : member(j, "eigenvalues"))
    r.eigenvalues.push_back(
        {field<int>(e, "index"), field<double>(e, "simulator"), field<double>(e, "heff"), field<double>(e, "deviation")});
  r.max_deviation = field<double>(j, "max_deviation");

  for (const auto& p : member(j, "self_energy")) {
    SelfEnergyPoint pt;
    pt.z = field<double>(p, "z");
    pt.exact_vs_closed = read_optional(p, "exact_vs_closed");
    pt.exact_vs_series = read_optional(p, "exact_vs_series");
    pt.series_ratio = read_optional(p, "series_ratio");
    pt.series_tail = read_optional(p, "series_tail");
    pt.hermiticity = field<double>(p, "hermiticity");
    pt.shift = field<double>(p, "shift");
    pt.eta_max = field<double>(p, "eta_max");
    r.self_energy.push_back(pt);
  }

  const Json& d = member(j, "defect");
  r.defect_raw = field<double>(d, "raw");
  r.defect_shift_removed = field<double>(d, "shift_removed");
  r.mean_shift = field<double>(d, "mean_shift");
  r.scaled_defect = field<double>(d, "scaled");
  r.tolerance = read_optional(d, "tolerance");
  const auto verdict = field<std::string>(j, "verdict");
  if (verdict != "pass" && verdict != "fail") throw SchemaError("verdict must be pass or fail");
  r.pass = verdict == "pass";
  for (const auto& s : member(j, "reasons")) r.reasons.push_back(s.get<std::string>());
  return r;
}

// ---------------------------------------------------------------- plumbing

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out << contents;
    if (!out) throw Error("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("cannot rename '" + tmp + "' to '" + path + "'");
}

}  // namespace pgadget
