#include "bpnn/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>

#include "bpnn/csv.hpp"
#include "bpnn/errors.hpp"
#include "bpnn/rng.hpp"

namespace bpnn {

namespace {

enum class Kind { Text, Real, Integer };

struct FieldInfo {
    const char* name;  // snake_case config/column name
    Kind kind;
    std::optional<std::string> RawRecord::* text = nullptr;
    std::optional<double> RawRecord::* real = nullptr;
    std::optional<int> RawRecord::* integer = nullptr;
};

const std::vector<FieldInfo>& field_registry() {
    static const std::vector<FieldInfo> fields = {
        {"location", Kind::Text, &RawRecord::location, nullptr, nullptr},
        {"country", Kind::Text, &RawRecord::country, nullptr, nullptr},
        {"latitude", Kind::Real, nullptr, &RawRecord::latitude, nullptr},
        {"longitude", Kind::Real, nullptr, &RawRecord::longitude, nullptr},
        {"airport_code", Kind::Text, &RawRecord::airport_code, nullptr, nullptr},
        {"airport_name", Kind::Text, &RawRecord::airport_name, nullptr, nullptr},
        {"injury_severity", Kind::Text, &RawRecord::injury_severity, nullptr, nullptr},
        {"aircraft_damage", Kind::Text, &RawRecord::aircraft_damage, nullptr, nullptr},
        {"aircraft_category", Kind::Text, &RawRecord::aircraft_category, nullptr, nullptr},
        {"registration_number", Kind::Text, &RawRecord::registration_number, nullptr, nullptr},
        {"make", Kind::Text, &RawRecord::make, nullptr, nullptr},
        {"model", Kind::Text, &RawRecord::model, nullptr, nullptr},
        {"amateur_built", Kind::Text, &RawRecord::amateur_built, nullptr, nullptr},
        {"number_of_engines", Kind::Integer, nullptr, nullptr, &RawRecord::number_of_engines},
        {"engine_type", Kind::Text, &RawRecord::engine_type, nullptr, nullptr},
    };
    return fields;
}

const FieldInfo* find_field(const std::string& name) {
    for (const FieldInfo& f : field_registry()) {
        if (name == f.name) return &f;
    }
    return nullptr;
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_missing_marker(const std::string& trimmed) {
    const std::string l = lower(trimmed);
    return trimmed.empty() || l == "n/a" || l == "na";
}

std::optional<double> parse_real(const std::string& s) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<int> parse_int(const std::string& s) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    int value = 0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

}  // namespace

std::string normalize_column_key(const std::string& header_cell) {
    std::string key;
    for (char c : header_cell) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return key;
}

const std::vector<std::string>& known_columns() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const FieldInfo& f : field_registry()) v.emplace_back(f.name);
        return v;
    }();
    return names;
}

std::vector<std::string> binary_class_names() { return {"Non-Fatal", "Fatal"}; }

std::vector<std::string> FeatureConfig::validation_errors() const {
    std::vector<std::string> errors;
    if (numeric_features.empty() && categorical_features.empty()) {
        errors.push_back("feature config selects no columns");
    }
    std::set<std::string> seen;
    for (const std::string& name : numeric_features) {
        const FieldInfo* f = find_field(name);
        if (!f) {
            errors.push_back("unknown numeric feature column '" + name + "'");
        } else if (f->kind == Kind::Text) {
            errors.push_back("column '" + name + "' is textual, cannot be a numeric feature");
        }
        if (!seen.insert(name).second) errors.push_back("duplicate feature column '" + name + "'");
    }
    for (const std::string& name : categorical_features) {
        const FieldInfo* f = find_field(name);
        if (!f) {
            errors.push_back("unknown categorical feature column '" + name + "'");
        } else if (f->kind != Kind::Text) {
            errors.push_back("column '" + name + "' is numeric, cannot be a categorical feature");
        }
        if (!seen.insert(name).second) errors.push_back("duplicate feature column '" + name + "'");
    }
    return errors;
}

void FeatureConfig::validate() const {
    const std::vector<std::string> errors = validation_errors();
    if (errors.empty()) return;
    std::string msg = "invalid feature config:";
    for (const std::string& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
}

ParseResult parse_records(std::istream& csv, const FeatureConfig& config, bool require_label) {
    config.validate();
    const std::vector<std::vector<std::string>> rows = read_csv(csv);
    if (rows.empty()) throw MissingHeader("input has no header row");

    std::map<std::string, std::size_t> header_index;
    for (std::size_t c = 0; c < rows[0].size(); ++c) {
        header_index.emplace(normalize_column_key(rows[0][c]), c);  // first wins
    }

    std::vector<std::string> required(config.numeric_features);
    required.insert(required.end(), config.categorical_features.begin(),
                    config.categorical_features.end());
    if (require_label) required.push_back("injury_severity");
    std::string missing;
    for (const std::string& name : required) {
        if (!header_index.contains(normalize_column_key(name))) {
            missing += missing.empty() ? name : (", " + name);
        }
    }
    if (!missing.empty()) throw MissingHeader("missing required column(s): " + missing);

    // Bind every known column that appears; extra columns are ignored.
    std::vector<std::pair<const FieldInfo*, std::size_t>> bound;
    for (const FieldInfo& f : field_registry()) {
        const auto it = header_index.find(normalize_column_key(f.name));
        if (it != header_index.end()) bound.emplace_back(&f, it->second);
    }

    ParseResult result;
    result.records.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::vector<std::string>& cells = rows[r];
        RawRecord rec;
        rec.row_number = r;  // 1-based data row
        if (cells.size() != rows[0].size()) {
            result.warnings.push_back({r, "", "row has " + std::to_string(cells.size()) +
                                               " fields, header has " +
                                               std::to_string(rows[0].size())});
        }
        for (const auto& [field, col] : bound) {
            if (col >= cells.size()) continue;
            const std::string cell = trim(cells[col]);
            if (is_missing_marker(cell)) continue;
            switch (field->kind) {
                case Kind::Text:
                    rec.*(field->text) = cell;
                    break;
                case Kind::Real:
                    if (const std::optional<double> v = parse_real(cell)) {
                        rec.*(field->real) = *v;
                    } else {
                        result.warnings.push_back(
                            {r, field->name, "cannot parse '" + cell + "' as a number"});
                    }
                    break;
                case Kind::Integer:
                    if (const std::optional<int> v = parse_int(cell); v && *v >= 0) {
                        rec.*(field->integer) = *v;
                    } else {
                        result.warnings.push_back(
                            {r, field->name,
                             "cannot parse '" + cell + "' as a non-negative integer"});
                    }
                    break;
            }
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

std::optional<ClassLabel> derive_label(const RawRecord& raw) {
    if (!raw.injury_severity) return std::nullopt;
    const std::string l = lower(trim(*raw.injury_severity));
    if (l.starts_with("fatal")) return ClassLabel::Fatal;
    std::string squeezed;
    for (char c : l) {
        if (c != '-' && c != ' ') squeezed.push_back(c);
    }
    if (squeezed == "nonfatal") return ClassLabel::NonFatal;
    return std::nullopt;
}

namespace {

std::optional<double> numeric_value(const RawRecord& rec, const FieldInfo& field) {
    if (field.kind == Kind::Real) return rec.*(field.real);
    if (field.kind == Kind::Integer) {
        const std::optional<int> v = rec.*(field.integer);
        if (!v) return std::nullopt;
        return static_cast<double>(*v);
    }
    return std::nullopt;
}

// Returns an empty string when the record fails a feature requirement.
std::string rejection_reason(const RawRecord& rec, const FeatureConfig& config) {
    for (const std::string& name : config.numeric_features) {
        const FieldInfo* field = find_field(name);
        const std::optional<double> v = numeric_value(rec, *field);
        if (!v) return "missing " + name;
        if (name == "latitude" && (*v < -90.0 || *v > 90.0)) return "out-of-range " + name;
        if (name == "longitude" && (*v < -180.0 || *v > 180.0)) return "out-of-range " + name;
    }
    for (const std::string& name : config.categorical_features) {
        const FieldInfo* field = find_field(name);
        const std::optional<std::string>& v = rec.*(field->text);
        if (!v || v->empty()) return "missing " + name;
    }
    return {};
}

}  // namespace

std::pair<std::vector<CleanRecord>, RejectionReport> clean_records(
    const std::vector<RawRecord>& raw, const FeatureConfig& config) {
    config.validate();
    std::vector<CleanRecord> kept;
    RejectionReport report;
    for (const RawRecord& rec : raw) {
        const std::optional<ClassLabel> label = derive_label(rec);
        std::string reason = label ? rejection_reason(rec, config) : "missing label";
        if (reason.empty()) {
            kept.push_back(CleanRecord{rec, *label});
            ++report.kept;
        } else {
            ++report.rejected;
            ++report.counts_by_reason[reason];
            report.rejected_rows.emplace_back(rec.row_number, std::move(reason));
        }
    }
    return {std::move(kept), std::move(report)};
}

std::string render_rejection_report(const RejectionReport& report) {
    std::ostringstream out;
    out << "kept: " << report.kept << "\n";
    out << "rejected: " << report.rejected << "\n";
    for (const auto& [reason, count] : report.counts_by_reason) {
        out << "reason " << reason << ": " << count << "\n";
    }
    for (const auto& [row, reason] : report.rejected_rows) {
        out << "row " << row << ": rejected (" << reason << ")\n";
    }
    return out.str();
}

void SplitSpec::validate() const {
    const auto in_open_unit = [](double f) { return f > 0.0 && f < 1.0; };
    if (!in_open_unit(train_fraction) || !in_open_unit(val_fraction) ||
        !in_open_unit(test_fraction)) {
        throw ConfigError("split fractions must each lie in (0, 1)");
    }
    if (std::fabs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9) {
        throw ConfigError("split fractions must sum to 1");
    }
}

namespace {

std::size_t floor_count(double fraction, std::size_t n) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

}  // namespace

SplitResult split(const std::vector<CleanRecord>& records, const SplitSpec& spec) {
    spec.validate();
    if (records.empty()) throw EmptyInput("split: no records");

    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(spec.seed);
    shuffle_inplace(order, rng);

    SplitResult result;
    if (!spec.stratified) {
        const std::size_t n_train = floor_count(spec.train_fraction, records.size());
        const std::size_t n_val = floor_count(spec.val_fraction, records.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            const CleanRecord& rec = records[order[i]];
            if (i < n_train) result.train.push_back(rec);
            else if (i < n_train + n_val) result.val.push_back(rec);
            else result.test.push_back(rec);
        }
        return result;
    }

    // Stratified: per-class quotas, assigned in shuffled order.
    const std::size_t n_classes = binary_class_names().size();
    std::vector<std::size_t> class_total(n_classes, 0);
    for (const CleanRecord& rec : records) {
        ++class_total[static_cast<std::size_t>(rec.label)];
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
        if (class_total[c] == 0) {
            throw InsufficientClassSamples("stratified split: class '" + binary_class_names()[c] +
                                           "' has no records");
        }
    }
    std::vector<std::size_t> quota_train(n_classes), quota_val(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        quota_train[c] = floor_count(spec.train_fraction, class_total[c]);
        quota_val[c] = floor_count(spec.val_fraction, class_total[c]);
    }
    std::vector<std::size_t> taken_train(n_classes, 0), taken_val(n_classes, 0);
    for (std::size_t idx : order) {
        const CleanRecord& rec = records[idx];
        const std::size_t c = static_cast<std::size_t>(rec.label);
        if (taken_train[c] < quota_train[c]) {
            result.train.push_back(rec);
            ++taken_train[c];
        } else if (taken_val[c] < quota_val[c]) {
            result.val.push_back(rec);
            ++taken_val[c];
        } else {
            result.test.push_back(rec);
        }
    }
    return result;
}

std::size_t FeatureSchema::encoded_width() const {
    std::size_t width = numeric.size();
    for (const CategoricalColumnSchema& c : categorical) width += c.width();
    return width;
}

std::size_t FeatureSchema::target_width() const {
    return class_names.size() == 2 ? 1 : class_names.size();
}

FeatureSchema fit_schema(const std::vector<CleanRecord>& train_records,
                         const FeatureConfig& config) {
    config.validate();
    if (train_records.empty()) throw EmptyInput("fit_schema: no training records");

    FeatureSchema schema;
    schema.class_names = binary_class_names();

    std::vector<double> values(train_records.size());
    std::vector<double> sq(train_records.size());
    for (const std::string& name : config.numeric_features) {
        const FieldInfo* field = find_field(name);
        for (std::size_t i = 0; i < train_records.size(); ++i) {
            const std::optional<double> v = numeric_value(train_records[i].raw, *field);
            if (!v) {
                throw SchemaMismatch("fit_schema: record at row " +
                                     std::to_string(train_records[i].raw.row_number) +
                                     " lacks feature '" + name + "'");
            }
            values[i] = *v;
        }
        NumericColumnSchema column;
        column.name = name;
        const double n = static_cast<double>(values.size());
        column.mean = pairwise_sum(values) / n;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - column.mean;
            sq[i] = d * d;
        }
        column.stddev = std::sqrt(pairwise_sum(sq) / n);  // population std
        if (column.stddev == 0.0) {
            column.stddev = 1.0;
            column.constant = true;
            schema.warnings.push_back("constant numeric column '" + name +
                                      "': encodings are all zero");
        }
        schema.numeric.push_back(std::move(column));
    }

    for (const std::string& name : config.categorical_features) {
        const FieldInfo* field = find_field(name);
        std::set<std::string> vocab;
        for (const CleanRecord& rec : train_records) {
            const std::optional<std::string>& v = rec.raw.*(field->text);
            if (!v || v->empty()) {
                throw SchemaMismatch("fit_schema: record at row " +
                                     std::to_string(rec.raw.row_number) + " lacks feature '" +
                                     name + "'");
            }
            vocab.insert(*v);
        }
        CategoricalColumnSchema column;
        column.name = name;
        column.vocab.assign(vocab.begin(), vocab.end());
        schema.categorical.push_back(std::move(column));
    }
    return schema;
}

void encode_target(std::size_t class_index, std::size_t n_classes, Vector& out) {
    if (n_classes < 2) throw Error("encode_target: need at least two classes");
    if (class_index >= n_classes) {
        throw IndexOutOfRange("encode_target: class index " + std::to_string(class_index) +
                              " out of range for " + std::to_string(n_classes) + " classes");
    }
    if (n_classes == 2) {
        out.assign(1, class_index == 1 ? 1.0 : -1.0);
    } else {
        out.assign(n_classes, -1.0);
        out[class_index] = 1.0;
    }
}

std::size_t class_index_of_target(std::span<const double> target, std::size_t n_classes) {
    if (n_classes == 2) {
        if (target.size() != 1) throw DimensionMismatch("binary target must have width 1");
        return target[0] >= 0.0 ? 1 : 0;
    }
    if (target.size() != n_classes) {
        throw DimensionMismatch("target width " + std::to_string(target.size()) +
                                " != class count " + std::to_string(n_classes));
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < target.size(); ++k) {
        if (target[k] > target[best]) best = k;
    }
    return best;
}

void encode(const CleanRecord& record, const FeatureSchema& schema,
            Vector& features_out, Vector& target_out) {
    features_out.assign(schema.encoded_width(), 0.0);
    std::size_t pos = 0;
    for (const NumericColumnSchema& column : schema.numeric) {
        const FieldInfo* field = find_field(column.name);
        const std::optional<double> v = numeric_value(record.raw, *field);
        if (!v) {
            throw SchemaMismatch("encode: record at row " + std::to_string(record.raw.row_number) +
                                 " lacks feature '" + column.name + "'");
        }
        features_out[pos++] = (*v - column.mean) / column.stddev;
    }
    for (const CategoricalColumnSchema& column : schema.categorical) {
        const FieldInfo* field = find_field(column.name);
        const std::optional<std::string>& v = record.raw.*(field->text);
        if (!v || v->empty()) {
            throw SchemaMismatch("encode: record at row " + std::to_string(record.raw.row_number) +
                                 " lacks feature '" + column.name + "'");
        }
        std::size_t idx = column.unknown_index();
        const auto it = std::lower_bound(column.vocab.begin(), column.vocab.end(), *v);
        if (it != column.vocab.end() && *it == *v) {
            idx = static_cast<std::size_t>(it - column.vocab.begin());
        }
        features_out[pos + idx] = 1.0;
        pos += column.width();
    }
    encode_target(static_cast<std::size_t>(record.label), schema.class_names.size(), target_out);
}

Dataset build_dataset(const std::vector<CleanRecord>& records, const FeatureSchema& schema) {
    Dataset data;
    data.features = Matrix(records.size(), schema.encoded_width());
    data.targets = Matrix(records.size(), schema.target_width());
    data.ids.reserve(records.size());
    Vector features, target;
    for (std::size_t r = 0; r < records.size(); ++r) {
        encode(records[r], schema, features, target);
        for (std::size_t c = 0; c < features.size(); ++c) data.features(r, c) = features[c];
        for (std::size_t c = 0; c < target.size(); ++c) data.targets(r, c) = target[c];
        data.ids.push_back(records[r].raw.row_number);
    }
    return data;
}

}  // namespace bpnn
