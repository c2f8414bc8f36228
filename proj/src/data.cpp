#include "credsel/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "credsel/digest.hpp"
#include "credsel/random.hpp"

namespace credsel {
namespace {

constexpr double kInf = HUGE_VAL;

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n'))
    --e;
  return std::string(s.substr(b, e - b));
}

// Comma-separated cells, double-quote aware.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

std::optional<double> parse_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" || cell == "nan";
}

struct CsvRow {
  std::size_t line_number;
  std::vector<std::string> cells;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
};

CsvTable read_csv(const std::filesystem::path& path, const CsvOptions& options,
                  std::size_t max_header_rows = 1,
                  const std::vector<std::string>& extra_header_tokens = {}) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_number = 0;
  std::size_t header_rows = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line_number == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
      line.erase(0, 3);
    }
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (options.header && header_rows < max_header_rows) {
      if (header_rows == 0) {
        table.header = std::move(cells);
        ++header_rows;
        continue;
      }
      // A second header row (as in the UCI spreadsheet export) is recognised
      // only by a known column token.
      const bool known = std::any_of(cells.begin(), cells.end(), [&](const std::string& c) {
        return std::find(extra_header_tokens.begin(), extra_header_tokens.end(), c) !=
               extra_header_tokens.end();
      });
      header_rows = max_header_rows;
      if (known) {
        table.header = std::move(cells);
        continue;
      }
    }
    table.rows.push_back({line_number, std::move(cells)});
  }
  if (table.rows.empty()) throw IngestionError(path.string() + ": no data rows");
  return table;
}

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line, std::size_t col,
                            const std::string& what) {
  std::ostringstream os;
  os << path.string() << ": row " << line << ", column " << (col + 1) << ": " << what;
  throw IngestionError(os.str());
}

int parse_label(const std::filesystem::path& path, const CsvRow& row, std::size_t col) {
  auto v = parse_number(row.cells[col]);
  if (!v) malformed(path, row.line_number, col, "unparseable label '" + row.cells[col] + "'");
  if (*v != 0.0 && *v != 1.0) {
    std::ostringstream os;
    os << path.string() << ": row " << row.line_number << ": label " << *v << " is not 0 or 1";
    throw ValidationError(os.str());
  }
  return static_cast<int>(*v);
}

FeatureSpec feature(std::string name, FeatureKind kind, double lo, double hi, std::size_t col) {
  return FeatureSpec{std::move(name), kind, ValueRange{lo, hi}, col};
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

void validate_schema(const Schema& schema) {
  std::set<std::size_t> seen;
  for (const auto& f : schema) {
    if (!seen.insert(f.column_index).second) {
      throw ValidationError("duplicate column index " + std::to_string(f.column_index) +
                            " in schema");
    }
    if (f.valid_range.lo > f.valid_range.hi) {
      throw ValidationError("feature " + f.name + ": empty valid range");
    }
    if (f.categorical() && (!is_integer(f.valid_range.lo) || !is_integer(f.valid_range.hi))) {
      throw ValidationError("categorical feature " + f.name + " needs an integer range");
    }
  }
}

std::string schema_fingerprint(const Schema& schema) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& f : schema) {
    os << f.name << '|' << to_string(f.kind) << '|' << f.valid_range.lo << '|'
       << f.valid_range.hi << '|' << f.column_index << ';';
  }
  return sha256_hex(os.str()).substr(0, 16);
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::taiwan: return "taiwan";
    case Provenance::gmsc: return "gmsc";
    case Provenance::synthetic: return "synthetic";
    case Provenance::generic: return "generic";
  }
  return "generic";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "taiwan") return Provenance::taiwan;
  if (s == "gmsc") return Provenance::gmsc;
  if (s == "synthetic") return Provenance::synthetic;
  if (s == "generic") return Provenance::generic;
  throw std::invalid_argument("unknown provenance '" + s + "'");
}

std::string to_string(FeatureKind k) {
  return k == FeatureKind::continuous ? "continuous" : "ordinal_categorical";
}

FeatureKind feature_kind_from_string(const std::string& s) {
  if (s == "continuous") return FeatureKind::continuous;
  if (s == "ordinal_categorical") return FeatureKind::ordinal_categorical;
  throw std::invalid_argument("unknown feature kind '" + s + "'");
}

Dataset::Dataset(Matrix features, std::vector<int> labels, Schema schema, Provenance provenance)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      schema_(std::move(schema)),
      provenance_(provenance) {
  if (features_.rows() == 0) throw ValidationError("dataset has no rows");
  if (features_.cols() == 0) throw ValidationError("dataset has no features");
  if (features_.cols() != schema_.size()) {
    throw ValidationError("feature matrix has " + std::to_string(features_.cols()) +
                          " columns but schema has " + std::to_string(schema_.size()));
  }
  if (labels_.size() != features_.rows()) {
    throw ValidationError("label count does not match row count");
  }
  validate_schema(schema_);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 0 && labels_[i] != 1) {
      throw ValidationError("row " + std::to_string(i) + ": label is not 0 or 1");
    }
  }
  for (std::size_t i = 0; i < features_.rows(); ++i) {
    for (std::size_t j = 0; j < features_.cols(); ++j) {
      const double v = features_(i, j);
      const auto& spec = schema_[j];
      if (!std::isfinite(v) || !spec.valid_range.contains(v) ||
          (spec.categorical() && !is_integer(v))) {
        std::ostringstream os;
        os << "row " << i << ", feature " << spec.name << ": value " << v
           << " outside valid range [" << spec.valid_range.lo << ", " << spec.valid_range.hi
           << "]";
        throw ValidationError(os.str());
      }
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Matrix m(indices.size(), p());
  std::vector<int> y(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto src = row(indices[k]);
    std::copy(src.begin(), src.end(), m.row(k).begin());
    y[k] = labels_[indices[k]];
  }
  return Dataset(std::move(m), std::move(y), schema_, provenance_);
}

Dataset Dataset::relabeled(std::vector<int> labels) const {
  return Dataset(features_, std::move(labels), schema_, provenance_);
}

double Dataset::default_share() const {
  return static_cast<double>(std::accumulate(labels_.begin(), labels_.end(), 0)) /
         static_cast<double>(n());
}

Schema taiwan_schema() {
  using K = FeatureKind;
  Schema s;
  s.push_back(feature("LIMIT_BAL", K::continuous, 0.0, kInf, 0));
  s.push_back(feature("SEX", K::ordinal_categorical, 1, 2, 1));
  s.push_back(feature("EDUCATION", K::ordinal_categorical, 0, 6, 2));
  s.push_back(feature("MARRIAGE", K::ordinal_categorical, 0, 3, 3));
  s.push_back(feature("AGE", K::continuous, 0, 150, 4));
  const char* pay[] = {"PAY_0", "PAY_2", "PAY_3", "PAY_4", "PAY_5", "PAY_6"};
  for (std::size_t k = 0; k < 6; ++k) {
    s.push_back(feature(pay[k], K::ordinal_categorical, -2, 9, 5 + k));
  }
  for (std::size_t k = 0; k < 6; ++k) {
    s.push_back(feature("BILL_AMT" + std::to_string(k + 1), K::continuous, -kInf, kInf, 11 + k));
  }
  for (std::size_t k = 0; k < 6; ++k) {
    s.push_back(feature("PAY_AMT" + std::to_string(k + 1), K::continuous, 0.0, kInf, 17 + k));
  }
  return s;
}

Schema gmsc_schema() {
  using K = FeatureKind;
  return {
      feature("RevolvingUtilizationOfUnsecuredLines", K::continuous, 0.0, kInf, 0),
      feature("age", K::continuous, 0, 150, 1),
      feature("NumberOfTime30-59DaysPastDueNotWorse", K::ordinal_categorical, 0, 98, 2),
      feature("DebtRatio", K::continuous, 0.0, kInf, 3),
      feature("MonthlyIncome", K::continuous, 0.0, kInf, 4),
      feature("NumberOfOpenCreditLinesAndLoans", K::ordinal_categorical, 0, 999, 5),
      feature("NumberOfTimes90DaysLate", K::ordinal_categorical, 0, 98, 6),
      feature("NumberRealEstateLoansOrLineLoans", K::ordinal_categorical, 0, 999, 7),
      feature("NumberOfTime60-89DaysPastDueNotWorse", K::ordinal_categorical, 0, 98, 8),
      feature("NumberOfDependents", K::ordinal_categorical, 0, 999, 9),
  };
}

Dataset load_taiwan(const std::filesystem::path& path, CsvOptions options) {
  constexpr std::size_t kFeatures = 23;
  const CsvTable table = read_csv(path, options, 2, {"LIMIT_BAL", "ID"});
  const std::size_t width = table.rows.front().cells.size();
  if (width != kFeatures + 1 && width != kFeatures + 2) {
    malformed(path, table.rows.front().line_number, 0,
              "expected 24 or 25 columns, found " + std::to_string(width));
  }
  const std::size_t offset = width - (kFeatures + 1);
  Matrix x(table.rows.size(), kFeatures);
  std::vector<int> y(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.cells.size() != width) {
      malformed(path, row.line_number, row.cells.size(), "inconsistent column count");
    }
    for (std::size_t j = 0; j < kFeatures; ++j) {
      auto v = parse_number(row.cells[offset + j]);
      if (!v) malformed(path, row.line_number, offset + j, "unparseable value '" +
                                                              row.cells[offset + j] + "'");
      x(i, j) = *v;
    }
    y[i] = parse_label(path, row, width - 1);
  }
  return Dataset(std::move(x), std::move(y), taiwan_schema(), Provenance::taiwan);
}

Dataset load_gmsc(const std::filesystem::path& path, CsvOptions options) {
  constexpr std::size_t kFeatures = 10;
  const CsvTable table = read_csv(path, options);
  const std::size_t width = table.rows.front().cells.size();
  if (width != kFeatures + 1 && width != kFeatures + 2) {
    malformed(path, table.rows.front().line_number, 0,
              "expected 11 or 12 columns, found " + std::to_string(width));
  }
  const std::size_t label_col = width - (kFeatures + 1);
  std::vector<double> values;
  std::vector<int> y;
  for (const auto& row : table.rows) {
    if (row.cells.size() != width) {
      malformed(path, row.line_number, row.cells.size(), "inconsistent column count");
    }
    const bool any_missing =
        std::any_of(row.cells.begin() + static_cast<std::ptrdiff_t>(label_col), row.cells.end(),
                    [](const std::string& c) { return is_missing(c); });
    if (any_missing) continue;
    for (std::size_t j = 0; j < kFeatures; ++j) {
      const std::size_t col = label_col + 1 + j;
      auto v = parse_number(row.cells[col]);
      if (!v) malformed(path, row.line_number, col, "unparseable value '" + row.cells[col] + "'");
      values.push_back(*v);
    }
    y.push_back(parse_label(path, row, label_col));
  }
  if (y.empty()) throw IngestionError(path.string() + ": empty dataset after filtering");
  const std::size_t n = y.size();
  return Dataset(Matrix(n, kFeatures, std::move(values)), std::move(y), gmsc_schema(),
                 Provenance::gmsc);
}

Dataset load_generic(const std::filesystem::path& path, CsvOptions options,
                     std::optional<Schema> schema) {
  const CsvTable table = read_csv(path, options);
  const std::size_t width = table.rows.front().cells.size();
  if (width < 2) malformed(path, table.rows.front().line_number, 0, "need a feature and a label");
  const std::size_t p = width - 1;
  if (!schema) {
    Schema s;
    for (std::size_t j = 0; j < p; ++j) {
      std::string name = (options.header && j < table.header.size() && !table.header[j].empty())
                             ? table.header[j]
                             : "x" + std::to_string(j + 1);
      s.push_back(feature(std::move(name), FeatureKind::continuous, -kInf, kInf, j));
    }
    schema = std::move(s);
  }
  if (schema->size() != p) {
    throw ValidationError("schema has " + std::to_string(schema->size()) + " features but " +
                          path.string() + " has " + std::to_string(p));
  }
  Matrix x(table.rows.size(), p);
  std::vector<int> y(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    if (row.cells.size() != width) {
      malformed(path, row.line_number, row.cells.size(), "inconsistent column count");
    }
    for (std::size_t j = 0; j < p; ++j) {
      const std::size_t col = (*schema)[j].column_index;
      if (col >= p) malformed(path, row.line_number, col, "schema column index out of bounds");
      auto v = parse_number(row.cells[col]);
      if (!v) malformed(path, row.line_number, col, "unparseable value '" + row.cells[col] + "'");
      x(i, j) = *v;
    }
    y[i] = parse_label(path, row, p);
  }
  return Dataset(std::move(x), std::move(y), std::move(*schema), Provenance::generic);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
  if (n == 0) throw std::invalid_argument("cannot split an empty dataset");
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    throw std::invalid_argument("split of " + std::to_string(n) +
                                " rows leaves an empty partition");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[uniform_index(rng, i + 1)]);
  }
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction,
                                  std::uint64_t seed) {
  auto [train, test] = split_indices(dataset.n(), train_fraction, seed);
  return {dataset.subset(train), dataset.subset(test)};
}

std::string to_string(ColumnScaling s) {
  switch (s) {
    case ColumnScaling::standardized: return "standardized";
    case ColumnScaling::passthrough: return "passthrough";
    case ColumnScaling::constant: return "constant";
  }
  return "passthrough";
}

ColumnScaling column_scaling_from_string(const std::string& s) {
  if (s == "standardized") return ColumnScaling::standardized;
  if (s == "passthrough") return ColumnScaling::passthrough;
  if (s == "constant") return ColumnScaling::constant;
  throw std::invalid_argument("unknown column scaling '" + s + "'");
}

std::vector<double> ScalerParams::transform(std::span<const double> raw) const {
  if (raw.size() != size()) throw std::invalid_argument("scaler dimension mismatch");
  std::vector<double> out(raw.begin(), raw.end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (scaling[j] == ColumnScaling::standardized) {
      out[j] = (out[j] - means[j]) / standard_deviations[j];
    }
  }
  return out;
}

Dataset ScalerParams::apply(const Dataset& dataset) const {
  if (dataset.p() != size()) throw ValidationError("scaler/schema dimension mismatch");
  Matrix x = dataset.features();
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (scaling[j] == ColumnScaling::standardized) {
        r[j] = (r[j] - means[j]) / standard_deviations[j];
      }
    }
  }
  Schema schema = dataset.schema();
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (scaling[j] == ColumnScaling::standardized) {
      auto& r = schema[j].valid_range;
      r = {(r.lo - means[j]) / standard_deviations[j], (r.hi - means[j]) / standard_deviations[j]};
    }
  }
  return Dataset(std::move(x), dataset.labels(), std::move(schema), dataset.provenance());
}

ScalerParams fit_scaler(const Dataset& train) {
  const std::size_t n = train.n();
  const std::size_t p = train.p();
  ScalerParams params;
  params.means.assign(p, 0.0);
  params.standard_deviations.assign(p, 1.0);
  params.scaling.assign(p, ColumnScaling::passthrough);
  for (std::size_t j = 0; j < p; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += train.features()(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = train.features()(i, j) - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    params.means[j] = mean;
    params.standard_deviations[j] = sd;
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
      params.scaling[j] = ColumnScaling::constant;
    } else if (train.schema()[j].categorical()) {
      params.scaling[j] = ColumnScaling::passthrough;
    } else {
      params.scaling[j] = ColumnScaling::standardized;
    }
  }
  return params;
}

Standardized standardize(const Dataset& train, const std::vector<Dataset>& others) {
  for (const auto& d : others) {
    if (d.schema() != train.schema()) {
      throw ValidationError("dataset schema does not match the training schema");
    }
  }
  ScalerParams params = fit_scaler(train);
  Standardized out{params.apply(train), {}, params};
  out.others.reserve(others.size());
  for (const auto& d : others) out.others.push_back(params.apply(d));
  return out;
}

}  // namespace credsel
