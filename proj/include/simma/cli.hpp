#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "simma/criteria.hpp"
#include "simma/simulate.hpp"

namespace simma::cli {

using json = nlohmann::json;

/// Schema violation; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  MixedModel model;
  SimPlan plan;
  double tol = 0.0;               // identity battery tolerance; 0 keeps each identity's own
  double ratio_threshold = 10.0;  // single-atom growth test of the zero-one experiment
  std::size_t paths = 1;          // paths written by `simulate`
};

/// Parses a JSON configuration. Unknown fields, malformed values and
/// purely deterministic components are rejected. Numeric fields accept
/// "inf" and "-inf". A report produced by run_command is accepted too; its
/// embedded configuration is used.
RunConfig parse_config(std::string_view text);

/// Fully resolved configuration with every default filled in.
json to_json(const RunConfig& cfg);
json to_json(const LevyMeasure& rho);
json to_json(const Kernel& k);
json to_json(const Assessment& a);
json to_json(const Verdict& v);

struct IdentityResult {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double rel_error = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// Closed forms against quadrature: stable xi, the stable moment ratio, the
/// tail identities, the fractional section integral, the Karamata limit,
/// D_f closed form against nested quadrature, kernel antiderivatives.
std::vector<IdentityResult> run_identities(double tol = 0.0);

struct CanonicalModel {
  std::string name;
  MixedModel model;
  VerdictStatus expected_status;
  TheoremTag expected_tag;
};

/// The six reference models of the classification table.
std::vector<CanonicalModel> canonical_models();

enum ExitCode : int { kDecisive = 0, kError = 1, kIndeterminate = 2 };

/// Parses argv, runs one subcommand and writes its report. The JSON report
/// goes to --out (or `out`); diagnostics go to `err`.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace simma::cli
