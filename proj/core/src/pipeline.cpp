#include "cstat/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "cstat/higgs.hpp"
#include "json.hpp"

namespace cstat {

using json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// JSON helpers

void reject_unknown_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ParseError(where + ": unknown key '" + key + "'");
}

const json& require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  return j;
}

double get_number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ParseError(where + "." + key + ": expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const char* key, int fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ParseError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const char* key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ParseError(where + "." + key + ": expected a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ParseError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

Complex parse_complex(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  if (v.is_object()) {
    reject_unknown_keys(v, where, {"re", "im"});
    return {get_number(v, "re", 0.0, where), get_number(v, "im", 0.0, where)};
  }
  throw ParseError(where + ": expected a number, [re, im] or {\"re\", \"im\"}");
}

// A bare number or {"re","im"} object is a constant; an array is a list of
// coefficients, lowest degree first.
Polynomial parse_polynomial(const json& v, const std::string& where) {
  Polynomial p;
  if (v.is_array()) {
    for (std::size_t n = 0; n < v.size(); ++n)
      p.coeffs.push_back(parse_complex(v[n], where + "[" + std::to_string(n) + "]"));
  } else {
    p.coeffs.push_back(parse_complex(v, where));
  }
  for (const Complex& c : p.coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw ParseError(where + ": non-finite coefficient");
  return p;
}

json polynomial_to_json(const Polynomial& p) {
  json arr = json::array();
  for (const Complex& c : p.coeffs) arr.push_back(json::array({c.real(), c.imag()}));
  return arr;
}

json moduli_to_json(const ModuliSpec& m) {
  json j = json::object();
  j["w"] = polynomial_to_json(m.w);
  j["q"] = polynomial_to_json(m.q);
  return j;
}

ModuliSpec moduli_from_json(const json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown_keys(j, where, {"w", "q"});
  ModuliSpec m;
  if (j.contains("w")) m.w = parse_polynomial(j.at("w"), where + ".w");
  if (j.contains("q")) m.q = parse_polynomial(j.at("q"), where + ".q");
  return m;
}

const char* kind_name(ChartKind k) { return k == ChartKind::Torus ? "torus" : "disk"; }

ChartKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "torus") return ChartKind::Torus;
  if (s == "disk") return ChartKind::Disk;
  throw ParseError(where + ".kind: expected \"torus\" or \"disk\", got \"" + s + "\"");
}

void chart_fields_to_json(json& j, const ChartSpec& c) {
  j["kind"] = kind_name(c.kind);
  j["nx"] = c.nx;
  j["ny"] = c.ny;
  if (c.kind == ChartKind::Torus)
    j["rho"] = c.rho;
  else
    j["L"] = c.half_width;
}

ChartSpec chart_from_json(const json& j, const std::string& where, bool allow_extra) {
  require_object(j, where);
  if (!allow_extra) reject_unknown_keys(j, where, {"kind", "nx", "ny", "rho", "L"});
  ChartSpec c;
  c.kind = parse_kind(get_string(j, "kind", "torus", where), where);
  c.nx = get_int(j, "nx", c.nx, where);
  c.ny = get_int(j, "ny", c.ny, where);
  c.rho = get_number(j, "rho", c.rho, where);
  c.half_width = get_number(j, "L", c.half_width, where);
  if (c.nx < Chart::kMinNodes || c.ny < Chart::kMinNodes)
    throw ParseError(where + ": nx and ny must be at least 16");
  if (!(c.rho > 0.0) || !(c.half_width > 0.0)) throw ParseError(where + ": rho and L must be positive");
  return c;
}

json norm_pair(const NormPair& p) { return json{{"sup", p.sup}, {"l2", p.l2}}; }

NormPair norm_pair_from(const json& j) { return {j.at("sup").get<double>(), j.at("l2").get<double>()}; }

template <class Fn>
void for_each_panel_entry(ResidualPanel& p, Fn&& fn) {
  fn("hitchin_residual", p.hitchin_residual);
  fn("normalization_residual", p.normalization_residual);
  fn("field_equation_residual", p.field_equation_residual);
  fn("dtau", p.dtau);
  fn("divtau", p.divtau);
  fn("dbar_q", p.dbar_q);
  fn("dbar_w", p.dbar_w);
  fn("torsion", p.torsion);
  fn("nabla_g_plus_C", p.nabla_g_plus_C);
  fn("roundtrip_w_error", p.roundtrip_w_error);
  fn("roundtrip_q_error", p.roundtrip_q_error);
}

NormPair norms(const ScalarField& f) { return {sup_norm(f, Region::Interior), l2_norm(f, Region::Interior)}; }
NormPair norms(const ComplexField& f) { return {sup_norm(f, Region::Interior), l2_norm(f, Region::Interior)}; }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

ChartPtr ChartSpec::build() const {
  return kind == ChartKind::Torus ? Chart::torus(nx, ny, rho) : Chart::disk(nx, ny, half_width);
}

Complex Polynomial::operator()(Complex z) const {
  Complex acc{};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

bool Polynomial::is_constant() const {
  for (std::size_t n = 1; n < coeffs.size(); ++n)
    if (coeffs[n] != Complex{}) return false;
  return true;
}

ComplexField Polynomial::sample(const ChartPtr& chart) const {
  ComplexField f(chart);
  for (std::size_t k : chart->active_nodes()) f[k] = (*this)(chart->z(k));
  return f;
}

JobConfig parse_job_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  require_object(root, "config");
  reject_unknown_keys(root, "config",
                      {"chart", "moduli", "solver", "outputs", "thresholds", "allow_nonholomorphic", "inputs"});
  JobConfig cfg;
  if (root.contains("chart")) cfg.chart = chart_from_json(root.at("chart"), "chart", false);
  if (root.contains("moduli")) cfg.moduli = moduli_from_json(root.at("moduli"), "moduli");
  if (root.contains("solver")) {
    const json& s = require_object(root.at("solver"), "solver");
    reject_unknown_keys(s, "solver", {"tol", "max_iter", "damping", "min_damping", "linear_tol", "max_linear_iter"});
    SolverConfig& sc = cfg.solver;
    sc.tol = get_number(s, "tol", sc.tol, "solver");
    sc.max_iter = get_int(s, "max_iter", sc.max_iter, "solver");
    sc.damping = get_number(s, "damping", sc.damping, "solver");
    sc.min_damping = get_number(s, "min_damping", std::min(sc.min_damping, sc.damping), "solver");
    sc.linear_tol = get_number(s, "linear_tol", sc.linear_tol, "solver");
    sc.max_linear_iter = get_int(s, "max_linear_iter", sc.max_linear_iter, "solver");
    try {
      sc.validate();
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
  }
  if (root.contains("outputs")) {
    const json& o = require_object(root.at("outputs"), "outputs");
    reject_unknown_keys(o, "outputs", {"dir", "dump"});
    cfg.outputs.dir = get_string(o, "dir", "", "outputs");
    cfg.outputs.dump = get_bool(o, "dump", false, "outputs");
  }
  if (root.contains("thresholds")) {
    const json& t = require_object(root.at("thresholds"), "thresholds");
    reject_unknown_keys(t, "thresholds", {"conservative", "normalized", "roundtrip"});
    cfg.thresholds.conservative = get_number(t, "conservative", cfg.thresholds.conservative, "thresholds");
    cfg.thresholds.normalized = get_number(t, "normalized", cfg.thresholds.normalized, "thresholds");
    cfg.thresholds.roundtrip = get_number(t, "roundtrip", cfg.thresholds.roundtrip, "thresholds");
    if (!(cfg.thresholds.conservative > 0.0) || !(cfg.thresholds.normalized > 0.0) ||
        !(cfg.thresholds.roundtrip > 0.0))
      throw ParseError("thresholds must be positive");
  }
  cfg.allow_nonholomorphic = get_bool(root, "allow_nonholomorphic", false, "config");
  if (root.contains("inputs")) {
    const json& i = require_object(root.at("inputs"), "inputs");
    reject_unknown_keys(i, "inputs", {"dir"});
    cfg.input_dir = get_string(i, "dir", "", "inputs");
  }
  return cfg;
}

JobConfig load_job_config(const std::filesystem::path& path) { return parse_job_config(read_text(path)); }

void validate_job(const JobConfig& cfg, JobKind kind) {
  if (kind == JobKind::Verify) {
    if (cfg.input_dir.empty()) throw ParseError("verify needs inputs.dir naming a field dump");
    return;
  }
  // Holomorphic sections over the torus chart are constants. Non-constant
  // polynomials only make sense as verification inputs.
  if (cfg.chart.kind == ChartKind::Torus && (!cfg.moduli.w.is_constant() || !cfg.moduli.q.is_constant()))
    throw ParseError(cfg.allow_nonholomorphic
                         ? "non-constant moduli on a torus are accepted for verify jobs only"
                         : "moduli on a torus chart must be constants (non-constant polynomials are not "
                           "holomorphic sections of the torus)");
}

// ---------------------------------------------------------------------------
// Panels and jobs

ResidualPanel compute_panel(const ScalarField& u, const Sym3Tensor& C, const ComplexField* w_ref,
                            const ComplexField* q_ref) {
  const ChartPtr& chart = u.chart_ptr();
  const ConformalMetric g(u);
  const TraceDecomposition dec = decompose3(C, g);
  const AbelianDifferential w_rec = extract_abelian(dec.tau);
  const CubicDifferential q_rec = extract_cubic(dec.C0);

  ResidualPanel p;
  p.hitchin_residual = norms(pde_residual(u, q_ref ? *q_ref : q_rec.q));
  p.normalization_residual = norms(normalization_residual(dec.C0, g));
  p.field_equation_residual = norms(field_equation_residual(C, g).magnitude());
  const HarmonicityResidual harm = harmonicity_residual(dec.tau, g);
  p.dtau = norms(harm.dtau);
  p.divtau = norms(harm.divtau);
  p.dbar_q = norms(wirtinger(q_rec.q).dzbar);
  p.dbar_w = norms(wirtinger(w_rec.w).dzbar);

  const ConnectionCoefficients nabla = build_nabla(C, g);
  const StatisticalConnectionResiduals sc = statistical_connection_residuals(nabla, C, g);
  p.torsion = norms(sc.torsion);
  p.nabla_g_plus_C = norms(sc.metric_residual);

  if (w_ref) p.roundtrip_w_error = norms(ComplexField(w_rec.w) - *w_ref);
  if (q_ref) p.roundtrip_q_error = norms(ComplexField(q_rec.q) - *q_ref);
  (void)chart;
  return p;
}

Verdict classify(const ResidualPanel& p, const Thresholds& t) {
  Verdict v;
  // The symmetric residual plus d(tau) together cover nabla(tr C) = 2 div C.
  v.conservative = p.field_equation_residual.sup <= t.conservative && p.dtau.sup <= t.conservative;
  v.normalized = p.normalization_residual.sup <= t.normalized;
  return v;
}

namespace {

void write_outputs(const JobResult& r, const JobConfig& cfg) {
  if (cfg.outputs.dir.empty()) return;
  write_report(r.report, cfg.outputs.dir);
  if (cfg.outputs.dump && r.fields) dump_fields(*r.fields, r.report.moduli, cfg.outputs.dir);
}

JobResult forward_impl(const JobConfig& cfg, const char* command) {
  const auto t0 = std::chrono::steady_clock::now();
  const ChartPtr chart = cfg.chart.build();
  const ComplexField q = cfg.moduli.q.sample(chart);
  const ComplexField w = cfg.moduli.w.sample(chart);

  SolveReport solve = newton_solve(q, cfg.solver);
  const ConformalMetric g(solve.final_u);
  Sym3Tensor C = build_C_from_moduli(AbelianDifferential{w}, CubicDifferential{q}, g);

  DiagnosticsReport rep;
  rep.command = command;
  rep.grid = cfg.chart;
  rep.moduli = cfg.moduli;
  rep.solver = {true,
                solve.converged,
                solve.iterations,
                solve.residual_history,
                solve.obstruction_detected,
                solve.status,
                solve.message};
  rep.panel = compute_panel(g.u, C, &w, &q);
  rep.roundtrip_reference = true;
  rep.thresholds = cfg.thresholds;
  rep.verdict = classify(rep.panel, cfg.thresholds);
  rep.exit_code = solve.obstruction_detected ? kExitObstruction : solve.converged ? kExitOk : kExitNotConverged;
  rep.wall_seconds = seconds_since(t0);
  return {std::move(rep), StructureFields{g.u, std::move(C), w, q}};
}

}  // namespace

JobResult run_forward(const JobConfig& cfg) {
  validate_job(cfg, JobKind::Solve);
  JobResult r = forward_impl(cfg, "solve");
  write_outputs(r, cfg);
  return r;
}

JobResult run_roundtrip(const JobConfig& cfg) {
  validate_job(cfg, JobKind::Roundtrip);
  const auto t0 = std::chrono::steady_clock::now();
  JobResult r = forward_impl(cfg, "roundtrip");
  const StructureFields& f = *r.fields;

  // Moduli map: tau = tr_g C = 16 Re(w' dz), q' = (3,0) part of C0.
  const ConformalMetric g(f.u);
  const TraceDecomposition dec = decompose3(f.C, g);
  const AbelianDifferential w_rec = extract_abelian(dec.tau);
  const CubicDifferential q_rec = extract_cubic(dec.C0, g);

  RoundtripSummary s;
  s.w_error_sup = sup_norm(ComplexField(w_rec.w) - f.w, Region::Interior);
  s.q_error_sup = sup_norm(ComplexField(q_rec.q) - f.q, Region::Interior);
  s.dbar_w_sup = sup_norm(wirtinger(w_rec.w).dzbar, Region::Interior);
  s.dbar_q_sup = sup_norm(wirtinger(q_rec.q).dzbar, Region::Interior);
  s.recovered = s.w_error_sup <= cfg.thresholds.roundtrip && s.q_error_sup <= cfg.thresholds.roundtrip;
  r.report.roundtrip = s;
  r.report.wall_seconds = seconds_since(t0);
  write_outputs(r, cfg);
  return r;
}

DiagnosticsReport run_verify(const StructureFields& fields, const Thresholds& t,
                             const std::optional<ModuliSpec>& reference) {
  const auto t0 = std::chrono::steady_clock::now();
  DiagnosticsReport rep;
  rep.command = "verify";
  const Chart& c = fields.u.chart();
  rep.grid.kind = c.kind();
  rep.grid.nx = c.nx();
  rep.grid.ny = c.ny();
  if (c.is_torus())
    rep.grid.rho = c.rho();
  else
    rep.grid.half_width = c.half_width();
  rep.moduli = reference;
  if (reference) {
    const ComplexField w = reference->w.sample(fields.u.chart_ptr());
    const ComplexField q = reference->q.sample(fields.u.chart_ptr());
    rep.panel = compute_panel(fields.u, fields.C, &w, &q);
    rep.roundtrip_reference = true;
  } else {
    rep.panel = compute_panel(fields.u, fields.C, nullptr, nullptr);
  }
  rep.thresholds = t;
  rep.verdict = classify(rep.panel, t);
  rep.exit_code = kExitOk;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

JobResult run_verify(const JobConfig& cfg) {
  validate_job(cfg, JobKind::Verify);
  LoadedDump dump = load_fields(cfg.input_dir);
  JobResult r{run_verify(dump.fields, cfg.thresholds, dump.moduli), std::nullopt};
  write_outputs(r, cfg);
  r.fields = std::move(dump.fields);
  return r;
}

// ---------------------------------------------------------------------------
// Report serialization

std::string report_to_json(const DiagnosticsReport& r, int indent) {
  json j = json::object();
  j["schema"] = kSchema;
  j["command"] = r.command;
  json grid = json::object();
  chart_fields_to_json(grid, r.grid);
  {
    const ChartPtr c = r.grid.build();
    grid["hx"] = c->hx();
    grid["hy"] = c->hy();
  }
  j["grid"] = grid;
  j["conventions"] = {
      {"metric", "g = e^u (dx^2 + dy^2)"},
      {"tensor_norm", "full inverse-metric contraction on all slots"},
      {"curvature", "S_g = 2K = -e^{-u} lap(u)"},
      {"trace", "last two slots"},
      {"divergence", "div(T)_jk = g^il (nabla_l T)_ijk"},
      {"pde", "lap(u) - 4 e^u + 4 |q|^2 e^{-2u} - f"},
      {"stencils", "5-point laplacian, centered first differences"},
  };
  j["moduli"] = r.moduli ? moduli_to_json(*r.moduli) : json(nullptr);
  j["solver"] = {
      {"ran", r.solver.ran},
      {"converged", r.solver.converged},
      {"status", to_string(r.solver.status)},
      {"iterations", r.solver.iterations},
      {"obstruction_detected", r.solver.obstruction_detected},
      {"residual_history", r.solver.residual_history},
      {"message", r.solver.message},
  };
  json panel = json::object();
  ResidualPanel p = r.panel;
  for_each_panel_entry(p, [&](const char* name, NormPair& v) { panel[name] = norm_pair(v); });
  j["panel"] = panel;
  j["roundtrip_reference"] = r.roundtrip_reference;
  j["thresholds"] = {{"conservative", r.thresholds.conservative},
                     {"normalized", r.thresholds.normalized},
                     {"roundtrip", r.thresholds.roundtrip}};
  j["verdict"] = {{"conservative", r.verdict.conservative}, {"normalized", r.verdict.normalized}};
  if (r.roundtrip) {
    j["roundtrip"] = {{"w_error_sup", r.roundtrip->w_error_sup},
                      {"q_error_sup", r.roundtrip->q_error_sup},
                      {"dbar_w_sup", r.roundtrip->dbar_w_sup},
                      {"dbar_q_sup", r.roundtrip->dbar_q_sup},
                      {"recovered", r.roundtrip->recovered}};
  }
  j["exit_code"] = r.exit_code;
  j["timing"] = {{"wall_seconds", r.wall_seconds}};
  return j.dump(indent);
}

DiagnosticsReport report_from_json(std::string_view text) {
  DiagnosticsReport r;
  try {
    const json j = json::parse(text.begin(), text.end());
    if (j.at("schema").get<std::string>() != kSchema) throw ParseError("report: unsupported schema");
    r.command = j.at("command").get<std::string>();
    r.grid = chart_from_json(j.at("grid"), "grid", true);
    if (!j.at("moduli").is_null()) r.moduli = moduli_from_json(j.at("moduli"), "moduli");
    const json& s = j.at("solver");
    r.solver.ran = s.at("ran").get<bool>();
    r.solver.converged = s.at("converged").get<bool>();
    const std::string status = s.at("status").get<std::string>();
    r.solver.status = status == "converged"     ? SolveStatus::Converged
                      : status == "obstruction" ? SolveStatus::Obstruction
                                                : SolveStatus::NotConverged;
    r.solver.iterations = s.at("iterations").get<int>();
    r.solver.obstruction_detected = s.at("obstruction_detected").get<bool>();
    r.solver.residual_history = s.at("residual_history").get<std::vector<double>>();
    r.solver.message = s.at("message").get<std::string>();
    const json& panel = j.at("panel");
    for_each_panel_entry(r.panel, [&](const char* name, NormPair& v) { v = norm_pair_from(panel.at(name)); });
    r.roundtrip_reference = j.at("roundtrip_reference").get<bool>();
    const json& t = j.at("thresholds");
    r.thresholds = {t.at("conservative").get<double>(), t.at("normalized").get<double>(),
                    t.at("roundtrip").get<double>()};
    r.verdict = {j.at("verdict").at("conservative").get<bool>(), j.at("verdict").at("normalized").get<bool>()};
    if (j.contains("roundtrip")) {
      const json& rt = j.at("roundtrip");
      r.roundtrip = RoundtripSummary{rt.at("w_error_sup").get<double>(), rt.at("q_error_sup").get<double>(),
                                     rt.at("dbar_w_sup").get<double>(), rt.at("dbar_q_sup").get<double>(),
                                     rt.at("recovered").get<bool>()};
    }
    r.exit_code = j.at("exit_code").get<int>();
    r.wall_seconds = j.at("timing").at("wall_seconds").get<double>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  return r;
}

void write_report(const DiagnosticsReport& report, const std::filesystem::path& dir) {
  ensure_directory(dir);
  write_text(dir / "report.json", report_to_json(report) + "\n");
}

// ---------------------------------------------------------------------------
// Field dumps

void write_f64(const ScalarField& f, const std::filesystem::path& file) {
  const auto vals = f.values();
  std::vector<char> bytes(vals.size() * 8);
  for (std::size_t n = 0; n < vals.size(); ++n) {
    const auto bits = std::bit_cast<std::uint64_t>(vals[n]);
    for (int b = 0; b < 8; ++b) bytes[8 * n + b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("failed writing " + file.string());
}

ScalarField read_f64(const ChartPtr& chart, const std::filesystem::path& file) {
  const std::string bytes = read_text(file);
  if (bytes.size() != chart->size() * 8)
    throw ParseError(file.string() + ": expected " + std::to_string(chart->size() * 8) + " bytes, found " +
                     std::to_string(bytes.size()));
  ScalarField f(chart);
  for (std::size_t n = 0; n < chart->size(); ++n) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[8 * n + b])) << (8 * b);
    const double v = std::bit_cast<double>(bits);
    if (chart->active(n)) {
      if (!std::isfinite(v)) throw ParseError(file.string() + ": non-finite value at node " + std::to_string(n));
      f[n] = v;
    }
  }
  return f;
}

namespace {

struct Component {
  std::string name;
  std::string part;  // "" for real fields, "re"/"im" for complex ones
  std::string file;
};

std::vector<Component> dump_layout() {
  return {{"u", "", "u.f64"},           {"c_xxx", "", "c_xxx.f64"},    {"c_xxy", "", "c_xxy.f64"},
          {"c_xyy", "", "c_xyy.f64"},   {"c_yyy", "", "c_yyy.f64"},    {"w", "re", "w.re.f64"},
          {"w", "im", "w.im.f64"},      {"q", "re", "q.re.f64"},       {"q", "im", "q.im.f64"}};
}

}  // namespace

void dump_fields(const StructureFields& f, const std::optional<ModuliSpec>& moduli,
                 const std::filesystem::path& dir) {
  ensure_directory(dir);
  const Chart& c = f.u.chart();
  json side = json::object();
  side["schema"] = kSchema;
  ChartSpec spec;
  spec.kind = c.kind();
  spec.nx = c.nx();
  spec.ny = c.ny();
  spec.rho = c.rho();
  spec.half_width = c.half_width();
  chart_fields_to_json(side, spec);
  side["dtype"] = "f64";
  side["byte_order"] = "little";
  side["layout"] = "row-major, y outer, x inner";
  json comps = json::array();
  for (const Component& comp : dump_layout()) {
    json e = {{"name", comp.name}, {"file", comp.file}};
    if (!comp.part.empty()) e["part"] = comp.part;
    comps.push_back(e);
  }
  side["components"] = comps;
  side["moduli"] = moduli ? moduli_to_json(*moduli) : json(nullptr);

  write_f64(f.u, dir / "u.f64");
  static const char* names[4] = {"c_xxx.f64", "c_xxy.f64", "c_xyy.f64", "c_yyy.f64"};
  for (int n = 0; n < 4; ++n) write_f64(f.C.c[n], dir / names[n]);
  write_f64(real(f.w), dir / "w.re.f64");
  write_f64(imag(f.w), dir / "w.im.f64");
  write_f64(real(f.q), dir / "q.re.f64");
  write_f64(imag(f.q), dir / "q.im.f64");
  write_text(dir / "fields.json", side.dump(2) + "\n");
}

LoadedDump load_fields(const std::filesystem::path& dir) {
  json side;
  try {
    side = json::parse(read_text(dir / "fields.json"));
  } catch (const json::parse_error& e) {
    throw ParseError("fields.json: " + std::string(e.what()));
  }
  try {
    if (!side.is_object() || side.value("schema", "") != kSchema)
      throw ParseError("fields.json: missing or unsupported schema");
    const ChartSpec spec = chart_from_json(side, "fields.json", true);
    const ChartPtr chart = spec.build();

    std::optional<ScalarField> parts[9];
    const auto layout = dump_layout();
    const json& comps = side.at("components");
    if (!comps.is_array()) throw ParseError("fields.json: components must be an array");
    for (const json& e : comps) {
      const std::string name = e.at("name").get<std::string>();
      const std::string part = e.value("part", "");
      const std::string file = e.at("file").get<std::string>();
      if (file.find('/') != std::string::npos || file.find('\\') != std::string::npos)
        throw ParseError("fields.json: component file names must be plain names");
      for (std::size_t n = 0; n < layout.size(); ++n)
        if (layout[n].name == name && layout[n].part == part) parts[n] = read_f64(chart, dir / file);
    }
    for (std::size_t n = 0; n < layout.size(); ++n)
      if (!parts[n])
        throw ParseError("fields.json: missing component " + layout[n].name +
                         (layout[n].part.empty() ? "" : "." + layout[n].part));

    LoadedDump d{StructureFields{*parts[0], Sym3Tensor(*parts[1], *parts[2], *parts[3], *parts[4]),
                                 to_complex(*parts[5], *parts[6]), to_complex(*parts[7], *parts[8])},
                 spec, std::nullopt};
    if (side.contains("moduli") && !side.at("moduli").is_null())
      d.moduli = moduli_from_json(side.at("moduli"), "fields.json.moduli");
    return d;
  } catch (const json::exception& e) {
    throw ParseError("fields.json: " + std::string(e.what()));
  } catch (const ContractViolation& e) {
    throw ParseError("fields.json: " + std::string(e.what()));
  }
}

}  // namespace cstat
