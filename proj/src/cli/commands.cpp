#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "seastate/trig_regression.hpp"

namespace seastate::cli {

namespace {

FitOptions fit_options(const RunConfig& c) {
  FitOptions o;
  o.count_rule = c.count_rule;
  return o;
}

std::shared_ptr<const std::vector<double>> one_factor_curve(const RunConfig& c, const TimeSeries& ts) {
  if (c.one_factor_k <= 0) return nullptr;
  const auto fit = fit_pairs(ts, c.one_factor_period, c.one_factor_k);
  return std::make_shared<const std::vector<double>>(fit.harmonic_curve(ts.size() + c.horizon));
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '\n') ch = ' ';
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string fixed2(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

/// One line of an AIC table, with the stage-1 order when it came from twostep.
struct TableRow {
  const SweepRow* row;
  std::optional<int> k;
  double aic_prime;
};

int second_order(const ModelSpec& s) { return s.trig.size() > 1 ? s.trig[1].order : 0; }
int first_order(const ModelSpec& s) { return s.trig.empty() ? 0 : s.trig[0].order; }

void write_aic_tables(const std::vector<TableRow>& rows, bool dual, bool two_step, OutputSet& out) {
  // Minimum over the score actually being compared: AIC' when a regression
  // stage is involved, plain AIC otherwise.
  std::optional<std::size_t> best;
  auto score = [&](std::size_t i) { return two_step ? rows[i].aic_prime : rows[i].row->report->aic; };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].row->ok()) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& a = *rows[i].row->report;
    const auto& b = *rows[*best].row->report;
    auto key = [&](std::size_t r) {
      auto t = rows[r].row->spec.order_tuple();
      t.insert(t.begin(), rows[r].k.value_or(0));
      return t;
    };
    if (score(i) < score(*best) ||
        (score(i) == score(*best) &&
         (a.n_params < b.n_params || (a.n_params == b.n_params && key(i) < key(*best)))))
      best = i;
  }

  std::vector<std::string> header;
  if (two_step) header.push_back("k");
  for (const char* h : {"m1", "m2", "m3", "m4"}) header.emplace_back(h);
  if (dual) header.emplace_back("m5");
  for (const char* h : {"n_params", "log_likelihood", "aic"}) header.emplace_back(h);
  if (two_step) header.emplace_back("aic_prime");
  for (const char* h : {"converged", "min", "error"}) header.emplace_back(h);
  CsvTable csv(header);

  std::vector<std::string> text_header(header.begin(), header.end() - 3);
  text_header.emplace_back("min");
  CsvTable text(text_header);

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = *rows[i].row;
    std::vector<std::string> lead;
    if (two_step) lead.push_back(std::to_string(*rows[i].k));
    lead.push_back(std::to_string(r.spec.trend_order));
    lead.push_back(std::to_string(r.spec.seasonal_order));
    lead.push_back(std::to_string(r.spec.ar_order));
    lead.push_back(std::to_string(first_order(r.spec)));
    if (dual) lead.push_back(std::to_string(second_order(r.spec)));
    const bool is_min = best && *best == i;

    auto cells = lead;
    auto tcells = lead;
    if (r.ok()) {
      const auto& rep = *r.report;
      cells.push_back(std::to_string(rep.n_params));
      cells.push_back(format_number(rep.log_likelihood));
      cells.push_back(format_number(rep.aic));
      tcells.push_back(std::to_string(rep.n_params));
      tcells.push_back(fixed2(rep.log_likelihood));
      tcells.push_back(fixed2(rep.aic));
      if (two_step) {
        cells.push_back(format_number(rows[i].aic_prime));
        tcells.push_back(fixed2(rows[i].aic_prime));
      }
      cells.push_back(rep.converged ? "1" : "0");
    } else {
      const std::size_t blanks = two_step ? 5 : 4;
      cells.insert(cells.end(), blanks, "");
      tcells.insert(tcells.end(), blanks - 1, "failed");
    }
    cells.push_back(is_min ? "1" : "0");
    cells.push_back(quote(r.error));
    tcells.push_back(is_min ? "*" : "");
    csv.add_row(std::move(cells));
    text.add_row(std::move(tcells));
  }
  out.write("aic_table.csv", csv.str());
  out.write("aic_table.txt", text.aligned());
}

void write_series_csv(const std::string& name, const TimeSeries& ts,
                      const std::vector<std::pair<std::string, std::vector<double>>>& columns,
                      OutputSet& out) {
  std::vector<std::string> header{"n", "y", "observed"};
  for (const auto& c : columns) header.push_back(c.first);
  CsvTable csv(header);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::vector<std::string> row{std::to_string(i + 1), format_number(ts.raw_values()[i]),
                                 ts.observed(i) ? "1" : "0"};
    for (const auto& c : columns) row.push_back(format_number(c.second[i]));
    csv.add_row(std::move(row));
  }
  out.write(name, csv.str());
}

}  // namespace

TimeSeries load_series(const RunConfig& c) {
  ColumnSelector column = c.column;
  if (!c.column.empty() && std::all_of(c.column.begin(), c.column.end(), ::isdigit))
    column = static_cast<std::size_t>(std::stoul(c.column));
  CsvOptions options;
  options.missing_token = c.missing_token;
  auto ts = load_csv(c.input, column, options);
  if (c.log) ts = log_transform(ts);
  if (c.decimate > 1) ts = resample_decimate(ts, c.decimate);
  return ts;
}

std::string components_csv(const TimeSeries& ts, const DecompositionResult& d) {
  std::vector<std::string> header{"n", "y", "observed"};
  std::vector<const std::vector<double>*> cols;
  std::vector<double> trig_sum;
  std::size_t n_trig = 0;
  for (const auto& c : d.components) {
    header.push_back(c.name);
    cols.push_back(&c.values);
    if (c.name.rfind("trig_", 0) == 0) {
      trig_sum.resize(ts.size(), 0.0);
      for (std::size_t i = 0; i < ts.size(); ++i) trig_sum[i] += c.values[i];
      ++n_trig;
      const bool last_trig =
          &c == &d.components.back() || (&c + 1)->name.rfind("trig_", 0) != 0;
      if (last_trig && n_trig > 1) {
        header.emplace_back("trig_sum");
        cols.push_back(&trig_sum);
      }
    }
  }
  header.emplace_back("noise");
  cols.push_back(&d.noise);

  CsvTable csv(header);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::vector<std::string> row{std::to_string(i + 1), format_number(ts.raw_values()[i]),
                                 ts.observed(i) ? "1" : "0"};
    for (const auto* c : cols) row.push_back(format_number((*c)[i]));
    csv.add_row(std::move(row));
  }
  return csv.str();
}

void cmd_decomp(const RunConfig& c, OutputSet& out) {
  const auto ts = load_series(c);
  const auto spec = expand_grid(c, one_factor_curve(c, ts)).front();
  const auto report = fit_mle(spec, ts, fit_options(c));
  const auto d = decompose(fitted_model(report, ts.size()), ts);
  out.write("components.csv", components_csv(ts, d));
  out.write("fit.json", report_json(report).dump(2) + "\n");
}

void cmd_sweep(const RunConfig& c, OutputSet& out) {
  const auto ts = load_series(c);
  const auto table = sweep(expand_grid(c, one_factor_curve(c, ts)), ts, fit_options(c));
  std::vector<TableRow> rows;
  for (const auto& r : table.rows) rows.push_back({&r, std::nullopt, 0.0});
  write_aic_tables(rows, c.period2.has_value(), false, out);
}

void cmd_twostep(const RunConfig& c, OutputSet& out) {
  const auto ts = load_series(c);
  const auto grid = expand_grid(c, one_factor_curve(c, ts));
  const auto options = fit_options(c);

  if (grid.size() == 1 && c.k.size() == 1) {
    const int k = c.k.front();
    const auto result = two_step_fit(ts, *c.long_period, k, grid.front(), options);
    write_series_csv("regression.csv", ts,
                     {{"curve", result.regression.fitted_curve},
                      {"residual", std::vector<double>(result.residual.raw_values().begin(),
                                                       result.residual.raw_values().end())}},
                     out);
    const auto d = decompose(fitted_model(result.report, ts.size()), result.residual);
    out.write("components.csv", components_csv(result.residual, d));
    nlohmann::ordered_json j;
    j["k"] = k;
    j["long_period"] = *c.long_period;
    j["regression"] = regression_json(result.regression);
    j["fit"] = report_json(result.report);
    j["aic"] = result.report.aic;
    j["aic_prime"] = result.aic_prime;
    out.write("fit.json", j.dump(2) + "\n");
    return;
  }

  std::vector<SweepTable> tables;
  tables.reserve(c.k.size());
  for (int k : c.k) {
    const auto regression = fit_pairs(ts, *c.long_period, k);
    tables.push_back(sweep(grid, subtract_series(ts, regression.fitted_curve), options));
  }
  std::vector<TableRow> rows;
  for (std::size_t t = 0; t < tables.size(); ++t)
    for (const auto& r : tables[t].rows)
      rows.push_back({&r, c.k[t], r.ok() ? r.report->aic + two_step_penalty(c.k[t]) : 0.0});
  write_aic_tables(rows, c.period2.has_value(), true, out);
}

void cmd_predict(const RunConfig& c, OutputSet& out) {
  const auto ts = load_series(c);
  const auto spec = expand_grid(c, one_factor_curve(c, ts)).front();
  const auto report = fit_mle(spec, ts, fit_options(c));
  const auto composed = fitted_model(report, ts.size() + c.horizon);
  const auto filtered = kalman_filter(composed.model, ts);
  const auto fc = predict(composed.model, filtered, c.horizon);
  CsvTable csv({"step", "n", "mean", "variance"});
  for (std::size_t h = 0; h < c.horizon; ++h)
    csv.add_row({std::to_string(h + 1), std::to_string(ts.size() + h + 1), format_number(fc.mean[h]),
                 format_number(fc.variance[h])});
  out.write("forecast.csv", csv.str());
  out.write("fit.json", report_json(report).dump(2) + "\n");
}

void cmd_subset(const RunConfig& c, OutputSet& out) {
  const auto ts = load_series(c);
  const int max_order =
      c.max_order > 0 ? c.max_order : term_count(c.trig_period);
  const auto sel = subset_select(ts, c.trig_period, max_order);
  CsvTable csv({"ORDER", "SIG2", "AIC", "#models", "TERMS"});
  for (const auto& s : sel.by_size) {
    std::string terms;
    for (const auto& t : s.terms) terms += (terms.empty() ? "" : " ") + term_label(t);
    csv.add_row({std::to_string(s.size), format_number(s.fitted ? s.sigma2_hat : NAN),
                 format_number(s.fitted ? s.aic : NAN), std::to_string(s.candidates), terms});
  }
  out.write("subset.csv", csv.str());
  out.write("subset_best.json", regression_json(sel.best).dump(2) + "\n");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto fail = [&](int code, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = message;
    j["exit_code"] = code;
    err << j.dump() << '\n';
    return code;
  };

  std::optional<RunConfig> config;
  try {
    config = parse_args(argc, argv);
  } catch (const ConfigError& e) {
    return fail(2, e.what());
  }
  if (!config) return 0;

  std::optional<OutputSet> files;
  try {
    files.emplace(config->output_dir);
    switch (config->command) {
      case Command::kDecomp: cmd_decomp(*config, *files); break;
      case Command::kSweep: cmd_sweep(*config, *files); break;
      case Command::kTwoStep: cmd_twostep(*config, *files); break;
      case Command::kPredict: cmd_predict(*config, *files); break;
      case Command::kSubset: cmd_subset(*config, *files); break;
    }
  } catch (const std::exception& e) {
    if (files) files->rollback();
    return fail(1, e.what());
  }
  for (const auto& p : files->written()) out << p.string() << '\n';
  return 0;
}

}  // namespace seastate::cli
