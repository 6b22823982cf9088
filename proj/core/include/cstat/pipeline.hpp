#pragma once

// End-to-end jobs: build a statistical structure from moduli data and check
// it (forward), recheck externally supplied fields (verify), and recover the
// moduli from a constructed structure (roundtrip). Also the JSON config and
// report formats and the raw field dump format.
//
// Dump layout in a directory:
//   fields.json   sidecar: schema, chart, component list, optional moduli
//   u.f64         log-conformal factor
//   c_xxx.f64 ... C components
//   w.re.f64 w.im.f64 q.re.f64 q.im.f64   moduli coefficients
// Each .f64 file is nx*ny little-endian IEEE-754 doubles, row-major with y
// outer and x inner; nodes outside a disk hold 0.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cstat/chart.hpp"
#include "cstat/tensor.hpp"
#include "cstat/tzitzeica.hpp"

namespace cstat {

inline constexpr const char* kSchema = "conserv-stat/1";

/// Malformed config or dump. Maps to exit code 4.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reading or writing files failed. Maps to exit code 5.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitNotConverged = 2,
  kExitObstruction = 3,
  kExitConfigError = 4,
  kExitIoError = 5,
};

struct ChartSpec {
  ChartKind kind = ChartKind::Torus;
  int nx = 64;
  int ny = 64;
  double rho = 1.0;         // torus only
  double half_width = 1.0;  // disk only

  ChartPtr build() const;
};

/// Polynomial in z with complex coefficients, lowest degree first.
struct Polynomial {
  std::vector<Complex> coeffs;

  Complex operator()(Complex z) const;
  bool is_constant() const;
  ComplexField sample(const ChartPtr& chart) const;
};

struct ModuliSpec {
  Polynomial w;
  Polynomial q;
};

struct Thresholds {
  double conservative = 1e-6;
  double normalized = 1e-6;
  double roundtrip = 1e-6;
};

struct OutputSpec {
  std::string dir;
  bool dump = false;
};

struct JobConfig {
  ChartSpec chart;
  ModuliSpec moduli;
  SolverConfig solver;
  OutputSpec outputs;
  Thresholds thresholds;
  bool allow_nonholomorphic = false;
  std::string input_dir;  // verify: directory holding a field dump
};

/// Parses a JSON config. Missing keys take defaults; unknown keys are errors.
JobConfig parse_job_config(std::string_view json_text);
JobConfig load_job_config(const std::filesystem::path& path);

enum class JobKind { Solve, Verify, Roundtrip };
/// Throws ParseError when the config cannot run as the given job.
void validate_job(const JobConfig& cfg, JobKind kind);

struct NormPair {
  double sup = 0.0;
  double l2 = 0.0;
};

struct ResidualPanel {
  NormPair hitchin_residual;
  NormPair normalization_residual;
  NormPair field_equation_residual;
  NormPair dtau;
  NormPair divtau;
  NormPair dbar_q;
  NormPair dbar_w;
  NormPair torsion;
  NormPair nabla_g_plus_C;
  NormPair roundtrip_w_error;
  NormPair roundtrip_q_error;
};

struct SolverSummary {
  bool ran = false;
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_history;
  bool obstruction_detected = false;
  SolveStatus status = SolveStatus::NotConverged;
  std::string message;
};

struct Verdict {
  bool conservative = false;
  bool normalized = false;
};

struct RoundtripSummary {
  double w_error_sup = 0.0;
  double q_error_sup = 0.0;
  double dbar_w_sup = 0.0;
  double dbar_q_sup = 0.0;
  bool recovered = false;
};

struct DiagnosticsReport {
  std::string command;
  ChartSpec grid;
  std::optional<ModuliSpec> moduli;
  SolverSummary solver;
  ResidualPanel panel;
  bool roundtrip_reference = false;  // panel roundtrip errors compare against given moduli
  Verdict verdict;
  Thresholds thresholds;
  std::optional<RoundtripSummary> roundtrip;
  double wall_seconds = 0.0;
  int exit_code = kExitOk;
};

/// The fields of one statistical structure on one chart.
struct StructureFields {
  ScalarField u;
  Sym3Tensor C;
  ComplexField w;
  ComplexField q;
};

struct JobResult {
  DiagnosticsReport report;
  std::optional<StructureFields> fields;
};

/// Residual panel for (C, g = e^u delta). When reference moduli are given the
/// Tzitzeica residual uses them and the roundtrip errors compare against
/// them; otherwise the moduli extracted from C are used.
ResidualPanel compute_panel(const ScalarField& u, const Sym3Tensor& C, const ComplexField* w_ref,
                            const ComplexField* q_ref);
Verdict classify(const ResidualPanel& panel, const Thresholds& t);

JobResult run_forward(const JobConfig& cfg);
JobResult run_roundtrip(const JobConfig& cfg);
/// Recomputes the panel for the supplied fields without solving. Passing
/// reference moduli reproduces the panel of the run that produced them.
DiagnosticsReport run_verify(const StructureFields& fields, const Thresholds& t,
                             const std::optional<ModuliSpec>& reference);
/// Loads the dump named by cfg.input_dir, verifies it against the moduli
/// recorded in its sidecar and writes the report to cfg.outputs.dir if set.
JobResult run_verify(const JobConfig& cfg);

/// Serialized report. Keys come out in a fixed order; wall-clock time sits
/// under its own "timing" key.
std::string report_to_json(const DiagnosticsReport& report, int indent = 2);
DiagnosticsReport report_from_json(std::string_view json_text);

void write_report(const DiagnosticsReport& report, const std::filesystem::path& dir);
void dump_fields(const StructureFields& fields, const std::optional<ModuliSpec>& moduli,
                 const std::filesystem::path& dir);

struct LoadedDump {
  StructureFields fields;
  ChartSpec chart;
  std::optional<ModuliSpec> moduli;
};
LoadedDump load_fields(const std::filesystem::path& dir);

/// Raw scalar dump helpers (exposed for tests and tooling).
void write_f64(const ScalarField& f, const std::filesystem::path& file);
ScalarField read_f64(const ChartPtr& chart, const std::filesystem::path& file);

}  // namespace cstat
