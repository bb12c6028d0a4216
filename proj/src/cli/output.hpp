#ifndef SEASTATE_CLI_OUTPUT_HPP
#define SEASTATE_CLI_OUTPUT_HPP

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "seastate/estimation.hpp"
#include "seastate/trig_regression.hpp"

namespace seastate::cli {

/// %.17g; NaN becomes an empty cell.
std::string format_number(double v);

/// Builds a CSV document row by row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::string str() const;
  /// Columns padded to equal width, for reading by eye.
  std::string aligned() const;

 private:
  std::vector<std::vector<std::string>> rows_;
};

/// Files written by one command. Each file appears atomically (temp file,
/// then rename); rollback() removes whatever this set has written so far.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir);
  void write(const std::string& name, const std::string& content);
  void rollback();
  const std::vector<std::filesystem::path>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
};

/// "c3" for cos 3, "s3" for sin 3.
std::string term_label(const TrigTerm& t);

nlohmann::ordered_json spec_json(const ModelSpec& spec);
nlohmann::ordered_json report_json(const FitReport& report);
nlohmann::ordered_json regression_json(const TrigRegressionFit& fit);

}  // namespace seastate::cli

#endif  // SEASTATE_CLI_OUTPUT_HPP
