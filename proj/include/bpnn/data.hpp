#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bpnn/dataset.hpp"

namespace bpnn {

// One row of an NTSB-style accident export. Every column is optional at
// this stage; cleaning decides what a usable record needs.
struct RawRecord {
    std::size_t row_number = 0;  // 1-based data row in the source file
    std::optional<std::string> location;
    std::optional<std::string> country;
    std::optional<double> latitude;    // degrees
    std::optional<double> longitude;   // degrees
    std::optional<std::string> airport_code;
    std::optional<std::string> airport_name;
    std::optional<std::string> injury_severity;  // e.g. "Fatal(2)", "Non-Fatal"
    std::optional<std::string> aircraft_damage;
    std::optional<std::string> aircraft_category;
    std::optional<std::string> registration_number;
    std::optional<std::string> make;
    std::optional<std::string> model;
    std::optional<std::string> amateur_built;
    std::optional<int> number_of_engines;
    std::optional<std::string> engine_type;
};

// Class indices are fixed: 0 = Non-Fatal, 1 = Fatal.
enum class ClassLabel { NonFatal = 0, Fatal = 1 };

std::vector<std::string> binary_class_names();

// Feature selection. Names refer to RawRecord columns in snake_case;
// numeric features must be one of latitude, longitude, number_of_engines,
// categorical ones any of the text columns. The label always comes from
// injury_severity.
struct FeatureConfig {
    std::vector<std::string> numeric_features{"latitude", "longitude", "number_of_engines"};
    std::vector<std::string> categorical_features{"make", "engine_type", "amateur_built"};

    // Returns one message per problem; empty means valid.
    std::vector<std::string> validation_errors() const;
    void validate() const;  // throws ConfigError with the aggregated report
};

struct ParseWarning {
    std::size_t row = 0;
    std::string column;
    std::string message;
};

struct ParseResult {
    std::vector<RawRecord> records;
    std::vector<ParseWarning> warnings;
};

// Reads a whole CSV export. Columns bind by header name, case-insensitively
// and ignoring non-alphanumerics ("Injury Severity", "Injury.Severity" and
// "InjurySeverity" all bind). Unparseable cells become absent values with a
// warning; empty and "N/A" cells are absent without one. Throws
// MissingHeader when a column required by the config (plus the label column
// unless require_label is false) is not present, MalformedCsv for
// structurally broken input.
ParseResult parse_records(std::istream& csv, const FeatureConfig& config,
                          bool require_label = true);

// "Fatal...(n)" -> Fatal, "Non-Fatal" (case/hyphen/space tolerant) ->
// NonFatal, anything else ("Unavailable", absent, truncated junk) -> nullopt.
std::optional<ClassLabel> derive_label(const RawRecord& raw);

struct CleanRecord {
    RawRecord raw;  // configured features guaranteed present and in range
    ClassLabel label = ClassLabel::NonFatal;
};

struct RejectionReport {
    std::size_t kept = 0;
    std::size_t rejected = 0;
    std::map<std::string, std::size_t> counts_by_reason;
    std::vector<std::pair<std::size_t, std::string>> rejected_rows;  // (row, reason)
};

// Keeps records with a derivable label and every configured feature present
// and in range; never fails, it filters. kept + rejected = input size. One
// reason is recorded per rejected record: first the label, then numeric
// features in config order (missing, then range), then categorical ones.
std::pair<std::vector<CleanRecord>, RejectionReport> clean_records(
    const std::vector<RawRecord>& raw, const FeatureConfig& config);

std::string render_rejection_report(const RejectionReport& report);

struct SplitSpec {
    double train_fraction = 0.7;
    double val_fraction = 0.15;
    double test_fraction = 0.15;
    std::uint64_t seed = 0;
    bool stratified = false;

    void validate() const;  // fractions in (0,1), summing to 1 within 1e-9
};

struct SplitResult {
    std::vector<CleanRecord> train;
    std::vector<CleanRecord> val;
    std::vector<CleanRecord> test;
};

// Seeded deterministic shuffle, then partition: floor(n*fraction) records
// for train and val, the remainder for test. Stratified mode applies the
// same quotas per class. Throws EmptyInput, InsufficientClassSamples.
SplitResult split(const std::vector<CleanRecord>& records, const SplitSpec& spec);

struct NumericColumnSchema {
    std::string name;
    double mean = 0.0;
    double stddev = 1.0;
    bool constant = false;  // stddev was 0; stored as 1 so encodings are all zero
};

struct CategoricalColumnSchema {
    std::string name;
    std::vector<std::string> vocab;  // sorted; the UNKNOWN slot is index vocab.size()

    std::size_t unknown_index() const { return vocab.size(); }
    std::size_t width() const { return vocab.size() + 1; }
};

// Encoding schema fitted on the training split only; immutable afterwards.
struct FeatureSchema {
    std::vector<NumericColumnSchema> numeric;
    std::vector<CategoricalColumnSchema> categorical;
    std::vector<std::string> class_names;
    std::vector<std::string> warnings;  // e.g. constant columns

    std::size_t encoded_width() const;
    // Binary classification uses a single +/-1 output, K > 2 a one-hot row.
    std::size_t target_width() const;
};

// Numeric columns get mean and population standard deviation from the given
// records; categorical columns a sorted vocabulary plus an UNKNOWN slot.
FeatureSchema fit_schema(const std::vector<CleanRecord>& train_records,
                         const FeatureConfig& config);

// features: z-scored numerics then one-hot categoricals, in schema order.
// target: +1/-1 single component when binary (Fatal = +1), else one-hot in
// {-1,+1}. Throws SchemaMismatch when the record lacks a schema feature.
void encode(const CleanRecord& record, const FeatureSchema& schema,
            Vector& features_out, Vector& target_out);

// Target row for a bare class index (used by K-class tests and decoding).
void encode_target(std::size_t class_index, std::size_t n_classes, Vector& out);
std::size_t class_index_of_target(std::span<const double> target, std::size_t n_classes);

Dataset build_dataset(const std::vector<CleanRecord>& records, const FeatureSchema& schema);

// Canonical snake_case column list in RawRecord order, and helpers shared
// with the CLI layer.
const std::vector<std::string>& known_columns();
std::string normalize_column_key(const std::string& header_cell);

}  // namespace bpnn
