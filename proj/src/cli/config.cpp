#include "cli/config.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <iostream>

namespace seastate::cli {

namespace {

int parse_int(const std::string& s, const std::string& flag) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty())
    throw ConfigError(flag + ": '" + s + "' is not an integer");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

TrigDynamics parse_dynamics(const std::string& s, const std::string& flag) {
  if (s == "constant") return TrigDynamics::kConstant;
  if (s == "random-walk" || s == "rw") return TrigDynamics::kRandomWalk;
  throw ConfigError(flag + ": expected 'constant' or 'random-walk', got '" + s + "'");
}

SeasonalVariant parse_variant(const std::string& s) {
  if (s == "sum") return SeasonalVariant::kSumForm;
  if (s == "lag") return SeasonalVariant::kLagRandomWalk;
  throw ConfigError("--seasonal-variant: expected 'sum' or 'lag', got '" + s + "'");
}

Command parse_command(const std::string& s) {
  if (s == "decomp") return Command::kDecomp;
  if (s == "sweep") return Command::kSweep;
  if (s == "twostep") return Command::kTwoStep;
  if (s == "predict") return Command::kPredict;
  if (s == "subset") return Command::kSubset;
  throw ConfigError("unknown command '" + s + "'");
}

bool is_single(const std::vector<int>& r) { return r.size() == 1; }

}  // namespace

std::string to_string(SeasonalVariant v) {
  return v == SeasonalVariant::kSumForm ? "sum" : "lag";
}

std::string to_string(TrigDynamics d) {
  return d == TrigDynamics::kConstant ? "constant" : "random-walk";
}

std::vector<int> parse_range(const std::string& text, const std::string& flag) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError(flag + ": empty range");
  std::vector<int> out;
  if (const auto dots = t.find(".."); dots != std::string::npos) {
    const int lo = parse_int(trim(t.substr(0, dots)), flag);
    const int hi = parse_int(trim(t.substr(dots + 2)), flag);
    if (hi < lo) throw ConfigError(flag + ": empty range '" + t + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::size_t start = 0;
  while (start <= t.size()) {
    const auto comma = t.find(',', start);
    const auto piece = trim(t.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    out.push_back(parse_int(piece, flag));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::size_t RunConfig::grid_size() const { return m1.size() * m3.size() * m4.size() * m5.size(); }

void RunConfig::validate() const {
  if (input.empty()) throw ConfigError("--input is required");
  if (decimate == 0) throw ConfigError("--decimate must be >= 1");
  for (int v : m1)
    if (v < 0 || v > 2) throw ConfigError("--m1 must be in 0..2");
  if (m2 < 0 || m2 > 1) throw ConfigError("--m2 must be 0 or 1");
  if (m2 == 1 && period < 2) throw ConfigError("--period must be >= 2");
  for (int v : m3)
    if (v < 0) throw ConfigError("--m3 must be >= 0");
  for (int v : m4)
    if (v < 0) throw ConfigError("--m4 must be >= 0");
  for (int v : m5)
    if (v < 0) throw ConfigError("--m5 must be >= 0");
  if (!(trig_period > 0.0)) throw ConfigError("--trig-period must be positive");
  if (period2 && !(*period2 > 0.0)) throw ConfigError("--period2 must be positive");
  if (!period2 && (m5.size() > 1 || m5.front() != 0))
    throw ConfigError("--m5 requires --period2");
  if (one_factor_k < 0) throw ConfigError("--one-factor-k must be >= 0");
  if (one_factor_k > 0 && !(one_factor_period > 0.0))
    throw ConfigError("--one-factor-period must be positive");

  const bool fixed = is_single(m1) && is_single(m3) && is_single(m4) && is_single(m5);
  switch (command) {
    case Command::kDecomp:
    case Command::kPredict:
      if (!fixed) throw ConfigError("this command needs fixed orders, not ranges");
      if (command == Command::kPredict && horizon == 0) throw ConfigError("--horizon must be >= 1");
      break;
    case Command::kSweep:
      if (grid_size() < 2) throw ConfigError("sweep needs at least one order given as a range");
      break;
    case Command::kTwoStep:
      if (!long_period || !(*long_period > 0.0))
        throw ConfigError("twostep needs a positive --long-period");
      for (int v : k)
        if (v < 1) throw ConfigError("--k must be >= 1");
      break;
    case Command::kSubset:
      if (max_order < 0) throw ConfigError("--max-order must be >= 0");
      break;
  }
}

std::vector<ModelSpec> expand_grid(const RunConfig& c,
                                   std::shared_ptr<const std::vector<double>> curve) {
  std::set<int> excluded;
  if (c.period2 && c.auto_exclude && c.trig_period < *c.period2)
    excluded = excluded_harmonics(c.trig_period, *c.period2).indices;
  std::vector<ModelSpec> grid;
  for (int m1 : c.m1)
    for (int m3 : c.m3)
      for (int m4 : c.m4)
        for (int m5 : c.m5) {
          ModelSpec s;
          s.trend_order = m1;
          s.seasonal_order = c.m2;
          s.seasonal_period = c.period;
          s.seasonal_variant = c.seasonal_variant;
          s.ar_order = m3;
          if (m4 > 0 || c.trig_level || c.period2)
            s.trig.push_back({c.trig_period, m4, c.trig_dynamics, {}, false, c.trig_level});
          if (c.period2)
            s.trig.push_back({*c.period2, m5, c.trig2_dynamics, excluded, true, false});
          if (curve) s.one_factor = OneFactorSpec{curve};
          grid.push_back(std::move(s));
        }
  return grid;
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv) {
  CLI::App app{"Seasonal state-space decomposition and AIC model selection"};
  app.set_config("--config", "", "Read options from a key = value file");

  std::string command, column = "0", m1 = "0", m3 = "0", m4 = "0", m5 = "0", k = "1";
  std::string variant = "sum", dyn = "random-walk", dyn2 = "random-walk", count_rule = "variances";
  std::optional<double> period2, long_period;
  RunConfig c;

  app.add_option("command", command, "decomp | sweep | twostep | predict | subset")->required();
  app.add_option("--input", c.input, "CSV file");
  app.add_option("--column", column, "Column name or 0-based index");
  app.add_option("--missing-token", c.missing_token, "Cell text meaning missing (default: empty)");
  app.add_flag("--log", c.log, "Take logarithms first");
  app.add_option("--decimate", c.decimate, "Keep every n-th point");
  app.add_option("--m1", m1, "Trend order 0..2 (range allowed in sweeps)");
  app.add_option("--m2", c.m2, "Dummy seasonal on/off");
  app.add_option("--period", c.period, "Dummy seasonal period");
  app.add_option("--seasonal-variant", variant, "sum | lag");
  app.add_option("--m3", m3, "AR order (range allowed)");
  app.add_option("--m4", m4, "Terms of the first trig block (range allowed)");
  app.add_option("--trig-period", c.trig_period, "Period of the first trig block");
  app.add_option("--trig-dynamics", dyn, "constant | random-walk");
  app.add_flag("--trig-level,!--no-trig-level", c.trig_level, "Add a cos(0) level term");
  app.add_option("--m5", m5, "Retained terms of the second trig block (range allowed)");
  app.add_option("--period2", period2, "Period of the second trig block");
  app.add_option("--trig2-dynamics", dyn2, "constant | random-walk");
  app.add_flag("--auto-exclude,!--no-auto-exclude", c.auto_exclude,
               "Drop second-block harmonics shared with the first");
  app.add_option("--one-factor-k", c.one_factor_k, "Regression order of the one-factor curve");
  app.add_option("--one-factor-period", c.one_factor_period, "Period of the one-factor curve");
  app.add_option("--k", k, "Long-period regression order (range allowed)");
  app.add_option("--long-period", long_period, "Period removed by twostep");
  app.add_option("--horizon", c.horizon, "Forecast steps");
  app.add_option("--max-order", c.max_order, "Number of leading trig terms searched by subset");
  app.add_option("--count-rule", count_rule, "variances | state-dim");
  app.add_option("--output-dir", c.output_dir, "Directory for output files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  c.command = parse_command(command);
  c.column = column;
  c.m1 = parse_range(m1, "--m1");
  c.m3 = parse_range(m3, "--m3");
  c.m4 = parse_range(m4, "--m4");
  c.m5 = parse_range(m5, "--m5");
  c.k = parse_range(k, "--k");
  c.seasonal_variant = parse_variant(variant);
  c.trig_dynamics = parse_dynamics(dyn, "--trig-dynamics");
  c.trig2_dynamics = parse_dynamics(dyn2, "--trig2-dynamics");
  c.period2 = period2;
  c.long_period = long_period;
  if (count_rule == "variances")
    c.count_rule = ParamCountRule::kVariancesAndAr;
  else if (count_rule == "state-dim")
    c.count_rule = ParamCountRule::kStateDimension;
  else
    throw ConfigError("--count-rule: expected 'variances' or 'state-dim'");
  c.validate();
  return c;
}

}  // namespace seastate::cli
