#pragma once

// Configuration-driven front end: load a geometry from JSON, run the
// certificate suite, sweep quantities along rays and extrapolate limits.

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpc/examples.hpp"

namespace cpc::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { exit_ok = 0, exit_certificate = 1, exit_config = 2, exit_evaluation = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double hermitean = 1e-10;     // relative
  double quasi_kahler = 1e-8;   // relative
  double metricity = 1e-10;
  double det_spread = 1e-6;     // relative spread of det_H / S
  double limit = 1e-6;          // first-order boundary limits
  double limit2 = 1e-5;         // second-order boundary limits
  double boundary_spread = 1e-5;
  double levi = 1e-8;
};

struct RunConfig {
  int m = 2;
  std::string J = "standard";                  // "standard" or the printed matrix
  std::vector<std::vector<std::string>> J_matrix;  // J^a_b as expressions, when not standard
  std::string metric = "from-rho";             // "from-rho" | "components"
  std::vector<std::vector<std::string>> g;     // g_ab when metric == "components"
  std::optional<std::string> rho;
  std::optional<double> C;
  Patch patch;
  Schedule schedule;
  Tolerances tol;
  unsigned seed = 1;
  int interior_points = 20;
  std::string hash;  // FNV-1a of the canonical JSON
};

// Throws ConfigError (schema) or ParseError (expressions).
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

ExampleGeometry build_geometry(const RunConfig& cfg);
std::vector<Ray> config_rays(const RunConfig& cfg, const ExampleGeometry& geo);
// "b1,...,bn;v1,...,vn"; the base is projected to the boundary, and an empty
// direction means the inward gradient ray.
Ray parse_ray(const std::string& spec, const ExampleGeometry& geo);

struct ReportResult {
  std::string json;  // serialized report, newline terminated
  int exit_code = exit_ok;
};
ReportResult run_report(const RunConfig& cfg);

// Registered sweep quantities and their anchors.
std::vector<std::string> sweep_quantities();
// CSV: an anchor comment line, a header, then one row per schedule time.
std::string run_sweep(const RunConfig& cfg, const std::string& quantity, const std::string& ray_spec);

// Scalar quantities usable in limit expressions besides the coordinates.
std::vector<std::string> limit_names();
std::string run_limits(const RunConfig& cfg, const std::string& expr, const std::string& ray_spec);

// Entry point used by the cpc tool; returns the exit code.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cpc::cli
