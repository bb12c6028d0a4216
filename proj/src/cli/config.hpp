#ifndef SEASTATE_CLI_CONFIG_HPP
#define SEASTATE_CLI_CONFIG_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seastate/components.hpp"
#include "seastate/estimation.hpp"

namespace seastate::cli {

/// Invalid or inconsistent configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { kDecomp, kSweep, kTwoStep, kPredict, kSubset };

/// "a..b" (inclusive) or "a,b,c" or a single integer.
std::vector<int> parse_range(const std::string& text, const std::string& flag);

struct RunConfig {
  Command command = Command::kDecomp;

  std::string input;
  std::string column = "0";
  std::string missing_token;
  bool log = false;
  std::size_t decimate = 1;

  std::vector<int> m1{0};
  int m2 = 0;
  int period = 12;
  SeasonalVariant seasonal_variant = SeasonalVariant::kSumForm;
  std::vector<int> m3{0};

  std::vector<int> m4{0};
  double trig_period = 12.0;
  TrigDynamics trig_dynamics = TrigDynamics::kRandomWalk;
  bool trig_level = false;

  std::vector<int> m5{0};
  std::optional<double> period2;
  TrigDynamics trig2_dynamics = TrigDynamics::kRandomWalk;
  bool auto_exclude = true;

  int one_factor_k = 0;
  double one_factor_period = 12.0;

  std::vector<int> k{0};
  std::optional<double> long_period;

  std::size_t horizon = 12;
  int max_order = 0;

  ParamCountRule count_rule = ParamCountRule::kVariancesAndAr;
  std::string output_dir = ".";

  /// Number of grid points spanned by the order ranges.
  std::size_t grid_size() const;
  /// Throws ConfigError on any inconsistency for the chosen command.
  void validate() const;
};

/// Parses the command line (and an optional --config file of key = value
/// lines). Returns nullopt when help was printed.
std::optional<RunConfig> parse_args(int argc, const char* const* argv);

/// Specs for every point of the m1 x m3 x m4 x m5 grid, last index fastest.
/// `one_factor_curve` is attached to each spec when non-null.
std::vector<ModelSpec> expand_grid(const RunConfig& config,
                                   std::shared_ptr<const std::vector<double>> one_factor_curve);

std::string to_string(SeasonalVariant v);
std::string to_string(TrigDynamics d);

}  // namespace seastate::cli

#endif  // SEASTATE_CLI_CONFIG_HPP
