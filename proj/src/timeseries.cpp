#include "seastate/timeseries.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace seastate {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s.remove_prefix(1);
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    auto cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                 : pos - start);
    cells.emplace_back(trim(cell));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

std::vector<std::string> split_lines(const std::string& content) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(content);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> values, std::vector<bool> observed,
                       std::string label,
                       std::optional<std::string> sampling_period)
    : values_(std::move(values)),
      observed_(std::move(observed)),
      label_(std::move(label)),
      sampling_period_(std::move(sampling_period)) {
  if (values_.empty()) throw std::invalid_argument("time series: zero rows");
  if (values_.size() != observed_.size())
    throw std::invalid_argument("time series: values and mask differ in length");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!observed_[i]) {
      values_[i] = kMissing;
    } else if (!std::isfinite(values_[i])) {
      throw std::invalid_argument("time series: non-finite observed value at index " +
                                  std::to_string(i));
    } else {
      ++observed_count_;
    }
  }
  if (observed_count_ == 0)
    throw std::invalid_argument("time series: all rows missing");
}

TimeSeries::TimeSeries(std::vector<double> values, std::string label)
    : TimeSeries(values, std::vector<bool>(values.size(), true), std::move(label)) {}

double TimeSeries::value(std::size_t i) const {
  if (!observed_.at(i))
    throw std::logic_error("time series: read of missing index " + std::to_string(i));
  return values_[i];
}

std::optional<double> TimeSeries::get(std::size_t i) const {
  if (!observed_.at(i)) return std::nullopt;
  return values_[i];
}

std::vector<double> TimeSeries::observed_values() const {
  std::vector<double> out;
  out.reserve(observed_count_);
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (observed_[i]) out.push_back(values_[i]);
  return out;
}

double TimeSeries::observed_mean() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (observed_[i]) sum += values_[i];
  return sum / static_cast<double>(observed_count_);
}

double TimeSeries::observed_variance() const {
  if (observed_count_ < 2) return 0.0;
  const double mean = observed_mean();
  double ss = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (observed_[i]) ss += (values_[i] - mean) * (values_[i] - mean);
  return ss / static_cast<double>(observed_count_ - 1);
}

TimeSeries parse_csv(const std::string& content, const ColumnSelector& column,
                     const CsvOptions& options, const std::string& label) {
  auto lines = split_lines(content);
  if (lines.empty()) throw std::invalid_argument("csv: zero rows");

  auto is_missing_cell = [&](const std::string& cell) {
    return cell.empty() || cell == options.missing_token;
  };

  const auto first = split_row(lines.front());
  bool header = true;
  bool all_missing = true;
  for (const auto& cell : first) {
    if (parse_number(cell)) header = false;
    if (!is_missing_cell(cell)) all_missing = false;
  }
  if (all_missing) header = false;

  std::size_t col = 0;
  if (const auto* name = std::get_if<std::string>(&column)) {
    if (!header) throw std::invalid_argument("csv: column not found: " + *name);
    bool found = false;
    for (std::size_t i = 0; i < first.size(); ++i) {
      if (first[i] == *name) {
        col = i;
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("csv: column not found: " + *name);
  } else {
    col = std::get<std::size_t>(column);
    if (col >= first.size())
      throw std::invalid_argument("csv: column not found: index " + std::to_string(col));
  }

  std::vector<double> values;
  std::vector<bool> observed;
  for (std::size_t r = header ? 1 : 0; r < lines.size(); ++r) {
    const auto cells = split_row(lines[r]);
    const std::string cell = col < cells.size() ? cells[col] : std::string{};
    if (is_missing_cell(cell)) {
      values.push_back(kMissing);
      observed.push_back(false);
      continue;
    }
    if (auto v = parse_number(cell)) {
      values.push_back(*v);
      observed.push_back(true);
    } else if (options.non_numeric_as_missing) {
      values.push_back(kMissing);
      observed.push_back(false);
    } else {
      throw std::invalid_argument("csv: non-numeric cell '" + cell + "' at row " +
                                  std::to_string(r));
    }
  }
  if (values.empty()) throw std::invalid_argument("csv: zero rows");
  return TimeSeries(std::move(values), std::move(observed), label);
}

TimeSeries load_csv(const std::string& path, const ColumnSelector& column,
                    const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("csv: cannot read file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw std::runtime_error("csv: cannot read file " + path);
  return parse_csv(buf.str(), column, options, path);
}

TimeSeries log_transform(const TimeSeries& ts) {
  std::vector<double> out(ts.size(), 0.0);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!ts.observed(i)) continue;
    const double v = ts.value(i);
    if (!(v > 0.0))
      throw std::domain_error("log_transform: non-positive value at index " +
                              std::to_string(i));
    out[i] = std::log(v);
  }
  return TimeSeries(std::move(out), ts.mask(), ts.label(), ts.sampling_period());
}

TimeSeries resample_decimate(const TimeSeries& ts, std::size_t step) {
  if (step == 0) throw std::invalid_argument("resample_decimate: step must be >= 1");
  std::vector<double> values;
  std::vector<bool> observed;
  for (std::size_t i = 0; i < ts.size(); i += step) {
    observed.push_back(ts.observed(i));
    values.push_back(ts.observed(i) ? ts.value(i) : 0.0);
  }
  return TimeSeries(std::move(values), std::move(observed), ts.label());
}

namespace {

TimeSeries combine(const TimeSeries& y, std::span<const double> q, double sign,
                   const char* what) {
  if (q.size() != y.size())
    throw std::invalid_argument(std::string(what) + ": length mismatch (" +
                                std::to_string(y.size()) + " vs " +
                                std::to_string(q.size()) + ")");
  std::vector<double> out(y.size(), 0.0);
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y.observed(i)) out[i] = y.value(i) + sign * q[i];
  return TimeSeries(std::move(out), y.mask(), y.label(), y.sampling_period());
}

}  // namespace

TimeSeries subtract_series(const TimeSeries& y, std::span<const double> q) {
  return combine(y, q, -1.0, "subtract_series");
}

TimeSeries add_series(const TimeSeries& y, std::span<const double> q) {
  return combine(y, q, 1.0, "add_series");
}

}  // namespace seastate
