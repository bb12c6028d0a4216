#ifndef SEASTATE_TIMESERIES_HPP
#define SEASTATE_TIMESERIES_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace seastate {

/// Univariate series indexed by n = 1..N with an explicit missing-value mask.
///
/// Missing entries store a quiet NaN, but numeric code must never look at it:
/// `value()` refuses to read a missing index and `get()` returns nullopt.
/// Instances are immutable once constructed.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> values, std::vector<bool> observed,
             std::string label = {},
             std::optional<std::string> sampling_period = std::nullopt);

  /// All entries observed.
  explicit TimeSeries(std::vector<double> values, std::string label = {});

  std::size_t size() const { return values_.size(); }
  std::size_t observed_count() const { return observed_count_; }

  bool observed(std::size_t i) const { return observed_[i]; }
  double value(std::size_t i) const;
  std::optional<double> get(std::size_t i) const;

  const std::vector<bool>& mask() const { return observed_; }
  const std::string& label() const { return label_; }
  const std::optional<std::string>& sampling_period() const {
    return sampling_period_;
  }

  /// Observed values in index order (missing entries skipped).
  std::vector<double> observed_values() const;

  double observed_mean() const;
  /// Sample variance of the observed values (divisor N_obs - 1, or 0 when
  /// only one point is observed).
  double observed_variance() const;

  /// Raw storage, NaN at missing indices. For serialization only.
  std::span<const double> raw_values() const { return values_; }

 private:
  std::vector<double> values_;
  std::vector<bool> observed_;
  std::string label_;
  std::optional<std::string> sampling_period_;
  std::size_t observed_count_ = 0;
};

using ColumnSelector = std::variant<std::string, std::size_t>;

struct CsvOptions {
  std::string missing_token;
  /// When false a non-numeric cell is a load error instead of a missing value.
  bool non_numeric_as_missing = true;
};

/// Loads one column of a comma-separated file. A first row with no numeric
/// cell is treated as a header. Selecting a column by name requires one.
TimeSeries load_csv(const std::string& path, const ColumnSelector& column,
                    const CsvOptions& options = {});

/// Same as load_csv, reading from an in-memory buffer.
TimeSeries parse_csv(const std::string& content, const ColumnSelector& column,
                     const CsvOptions& options = {},
                     const std::string& label = {});

TimeSeries log_transform(const TimeSeries& ts);

/// Keeps indices 0, step, 2*step, ... (0-based).
TimeSeries resample_decimate(const TimeSeries& ts, std::size_t step);

/// y_n - q_n at observed n; missing entries stay missing.
TimeSeries subtract_series(const TimeSeries& y, std::span<const double> q);

/// y_n + q_n at observed n; inverse of subtract_series.
TimeSeries add_series(const TimeSeries& y, std::span<const double> q);

}  // namespace seastate

#endif  // SEASTATE_TIMESERIES_HPP
