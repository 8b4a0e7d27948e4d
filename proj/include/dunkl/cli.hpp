#pragma once

// Batch front end: run configuration, commands, and report rendering.
//
// Exit codes: 0 when every check passes, 1 when some check fails (the report
// is still written), 2 for configuration errors.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace dunkl::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Json, Csv };

struct RunConfig {
  std::string command;

  std::string group = "trivial";  // trivial, Z2, A, B, I2(m)
  int dihedral_order = 0;
  std::vector<double> kappa{0.0};  // per orbit; a single value is used for every orbit
  int dimension = 3;
  int degree = 3;
  std::string integration = "automatic";
  std::uint64_t seed = 0;
  int samples = 20;  // random polynomials added to the canonical family

  double tolerance = 1e-8;               // identity residuals and bound margins
  double localization_tolerance = 1e-6;  // closed form against search
  double integration_tolerance = 1e-9;   // integration backends and dual paths
  double sigma = 3.0;                    // Monte-Carlo standard errors

  std::vector<double> epsilon{0.5};  // proof-bounds
  int restarts = 32;                 // estimate-constant

  double mu = 0.5;                                // transfer-check
  std::vector<double> simplex_kappa;              // Z2 simplex weight; default alternates 1, 1/2 and ends with μ
  std::vector<double> simplex_b{0.5, 2.0, 1.0};  // κ', κ, μ of the B simplex weight
  int product_samples = 20;

  int probes = 50;  // moments
  std::int64_t mc_samples = 100000;

  std::string out = "-";
  OutputFormat format = OutputFormat::Json;
};

struct Check {
  std::string tag;
  std::string sample;
  std::string metric;
  double value = 0.0;
  std::string relation;  // "<=", ">=" or ">"
  double bound = 0.0;
  bool pass = false;
};

struct Report {
  std::string command;
  nlohmann::ordered_json config;
  std::vector<Check> checks;
  nlohmann::ordered_json results;

  std::size_t failures() const;
  bool passed() const { return failures() == 0; }
  nlohmann::ordered_json to_json() const;
};

const std::vector<std::string>& commands();

/// Runs one command. Throws ConfigError for invalid configurations.
Report run(const RunConfig& config);

std::string render(const Report& report, OutputFormat format);

/// Parses arguments (and an optional --config INI file), runs, writes the report.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dunkl::cli
