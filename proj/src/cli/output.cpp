#include "cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "cli/config.hpp"

namespace seastate::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != rows_.front().size())
    throw std::logic_error("csv: row width does not match header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += row[c];
    }
    out += '\n';
  }
  return out;
}

std::string CsvTable::aligned() const {
  std::vector<std::size_t> width(rows_.front().size(), 0);
  for (const auto& row : rows_)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (const auto& row : rows_) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      line += std::string(width[c] - row[c].size(), ' ') + row[c];
    }
    out += line + '\n';
  }
  return out;
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

void OutputSet::write(const std::string& name, const std::string& content) {
  const auto target = dir_ / name;
  auto temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + temp.string());
    out << content;
    out.close();
    if (!out) {
      std::filesystem::remove(temp);
      throw std::runtime_error("cannot write " + temp.string());
    }
  }
  std::filesystem::rename(temp, target);
  written_.push_back(target);
}

void OutputSet::rollback() {
  std::error_code ec;
  for (const auto& p : written_) std::filesystem::remove(p, ec);
  written_.clear();
}

nlohmann::ordered_json spec_json(const ModelSpec& spec) {
  nlohmann::ordered_json j;
  j["m1"] = spec.trend_order;
  j["m2"] = spec.seasonal_order;
  if (spec.seasonal_order > 0) {
    j["period"] = spec.seasonal_period;
    j["seasonal_variant"] = to_string(spec.seasonal_variant);
  }
  j["m3"] = spec.ar_order;
  auto trig = nlohmann::ordered_json::array();
  for (const auto& t : spec.trig) {
    nlohmann::ordered_json b;
    b["period"] = t.period;
    b["order"] = t.order;
    b["dynamics"] = to_string(t.dynamics);
    b["excluded"] = t.excluded;
    b["order_counts_retained"] = t.order_counts_retained;
    b["level"] = t.include_level;
    trig.push_back(std::move(b));
  }
  j["trig"] = std::move(trig);
  j["one_factor"] = spec.one_factor.has_value();
  return j;
}

nlohmann::ordered_json report_json(const FitReport& r) {
  nlohmann::ordered_json j;
  j["spec"] = spec_json(r.spec);
  nlohmann::ordered_json params;
  for (const auto& p : r.params) params[p.name] = p.value;
  j["params"] = std::move(params);
  j["log_likelihood"] = r.log_likelihood;
  j["aic"] = r.aic;
  j["n_params"] = r.n_params;
  j["n_obs"] = r.n_obs;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["prior_variance"] = r.prior_variance;
  return j;
}

std::string term_label(const TrigTerm& t) { return (t.sine ? "s" : "c") + std::to_string(t.harmonic); }

nlohmann::ordered_json regression_json(const TrigRegressionFit& fit) {
  nlohmann::ordered_json j;
  j["period"] = fit.period;
  j["order"] = fit.order;
  std::vector<std::string> labels;
  for (const auto& t : fit.terms) labels.push_back(term_label(t));
  j["terms"] = labels;
  j["coefficients"] = fit.coef;
  j["harmonics"] = fit.harmonics;
  j["intercept"] = fit.intercept;
  j["cos"] = fit.cos_coef;
  j["sin"] = fit.sin_coef;
  j["rss"] = fit.rss;
  j["sigma2_hat"] = fit.sigma2_hat;
  j["aic"] = fit.aic;
  j["n_obs"] = fit.n_obs;
  return j;
}

}  // namespace seastate::cli
