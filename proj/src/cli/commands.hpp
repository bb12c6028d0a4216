#ifndef SEASTATE_CLI_COMMANDS_HPP
#define SEASTATE_CLI_COMMANDS_HPP

#include <iosfwd>

#include "cli/config.hpp"
#include "cli/output.hpp"
#include "seastate/decomposition.hpp"
#include "seastate/timeseries.hpp"

namespace seastate::cli {

/// Input series after the configured transforms.
TimeSeries load_series(const RunConfig& config);

/// components.csv content for a decomposition of `ts`.
std::string components_csv(const TimeSeries& ts, const DecompositionResult& d);

void cmd_decomp(const RunConfig& config, OutputSet& out);
void cmd_sweep(const RunConfig& config, OutputSet& out);
void cmd_twostep(const RunConfig& config, OutputSet& out);
void cmd_predict(const RunConfig& config, OutputSet& out);
void cmd_subset(const RunConfig& config, OutputSet& out);

/// Full entry point. Returns 0 on success, 1 on a runtime failure and 2 on a
/// configuration error; failures print one JSON line to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace seastate::cli

#endif  // SEASTATE_CLI_COMMANDS_HPP
