#pragma once
// File formats: JSON experiment records and reports, CSV plot/power data, and
// the textual model-spec syntax used on the command line.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qtomo/likelihood.hpp"
#include "qtomo/models.hpp"

namespace qtomo::io {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

// Malformed or unsupported input files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {schema_version, n_qubits, blocks: [{order_index, setting, counts}], metadata}
Json record_to_json(const ExperimentRecord& r);
ExperimentRecord record_from_json(const Json& j);

std::string dump_record(const ExperimentRecord& r);
ExperimentRecord parse_record(std::string_view text);

std::string read_text_file(const std::filesystem::path& p);
// Refuses to replace an existing file unless `force` is set.
void write_text_file(const std::filesystem::path& p, std::string_view text, bool force);

std::string sha256_hex(std::string_view data);

struct ReportRow {
  std::string name;
  std::string grouping;
  std::string method;
  double loglik = 0.0;
  int k = 0;
  double omega = 0.0;
  std::optional<double> omega_c;
  double delta = 0.0;
  double weight = 0.0;
};

struct Provenance {
  std::string input_sha256;
  std::optional<std::uint64_t> seed;
  std::string tool_version = kToolVersion;
};

struct ReportDocument {
  int schema_version = kSchemaVersion;
  std::string scoring;  // "aic" or "aicc"
  std::vector<ReportRow> rows;
  std::string verdict;
  std::string standard_model;
  std::vector<std::string> notes;  // e.g. models excluded by the data
  Provenance provenance;
  std::optional<Json> analytic;  // single-qubit closed-form section
  std::optional<Json> standard_estimate;
};

ReportDocument make_report(const AicReport& report, Provenance provenance);
Json report_to_json(const ReportDocument& doc);
std::string dump_report(const ReportDocument& doc);
// Fixed-width table for terminals.
std::string format_table(const ReportDocument& doc);

// block_index,setting,n_plus,n_total (n_plus counts the all-plus outcome).
std::string plot_data_csv(const ExperimentRecord& r);

struct PowerRow {
  double sigma = 0.0;
  int trials = 0;
  int inconsistent = 0;
  double fraction = 0.0;
  double std_error = 0.0;
};
std::string power_csv(const std::vector<PowerRow>& rows);

// Model tokens:
//   standard | per-block | per-setting | halves
//   mask:<grouping>:shared=<A+B+...> | mask:<grouping>:free=<A+B+...>
// where <grouping> is halves, per-block, per-setting, or a dot-separated list
// of group ids such as 0.0.0.1.1.1.
ModelSpec parse_model_spec(const std::string& token, const ExperimentRecord& r);

std::string grouping_summary(const ModelSpec& m);
std::string format_double(double v);

}  // namespace qtomo::io
