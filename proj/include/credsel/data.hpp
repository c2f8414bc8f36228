#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "credsel/matrix.hpp"

namespace credsel {

class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FeatureKind { continuous, ordinal_categorical };

struct ValueRange {
  double lo;
  double hi;
  bool contains(double v) const { return v >= lo && v <= hi; }
  friend bool operator==(const ValueRange&, const ValueRange&) = default;
};

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  ValueRange valid_range{-HUGE_VAL, HUGE_VAL};
  std::size_t column_index = 0;

  bool categorical() const { return kind == FeatureKind::ordinal_categorical; }
  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

using Schema = std::vector<FeatureSpec>;

// Throws ValidationError when column indices repeat or a categorical range is
// not integer-valued.
void validate_schema(const Schema& schema);

// Short hex digest over names, kinds and ranges.
std::string schema_fingerprint(const Schema& schema);

enum class Provenance { taiwan, gmsc, synthetic, generic };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);
std::string to_string(FeatureKind k);
FeatureKind feature_kind_from_string(const std::string& s);

// Feature matrix plus binary labels. Construction validates every invariant:
// n > 0, p > 0, shape matches schema, labels in {0,1}, values within ranges.
class Dataset {
 public:
  Dataset(Matrix features, std::vector<int> labels, Schema schema, Provenance provenance);

  std::size_t n() const { return features_.rows(); }
  std::size_t p() const { return features_.cols(); }
  const Matrix& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  const Schema& schema() const { return schema_; }
  Provenance provenance() const { return provenance_; }

  std::span<const double> row(std::size_t i) const { return features_.row(i); }

  // Rows in the given order; indices may repeat.
  Dataset subset(std::span<const std::size_t> indices) const;
  // Same features and schema, new labels.
  Dataset relabeled(std::vector<int> labels) const;

  double default_share() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  Matrix features_;
  std::vector<int> labels_;
  Schema schema_;
  Provenance provenance_;
};

struct CsvOptions {
  bool header = true;
};

Schema taiwan_schema();
Schema gmsc_schema();

// UCI "default of credit card clients" export: 23 features plus the default
// flag, with an optional leading ID column and an optional second header row.
Dataset load_taiwan(const std::filesystem::path& path, CsvOptions options = {});

// Kaggle "Give Me Some Credit" cs-training layout. Rows with any missing
// value ("NA" or empty) are dropped.
Dataset load_gmsc(const std::filesystem::path& path, CsvOptions options = {});

// Any CSV whose last column is the binary label. Without a schema every
// feature column is continuous and unbounded, named from the header.
Dataset load_generic(const std::filesystem::path& path, CsvOptions options = {},
                     std::optional<Schema> schema = std::nullopt);

// Uniform random partition; |train| = round(train_fraction * n).
std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction,
                                  std::uint64_t seed);

// Index-level view of split(), exposed for partition checks.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed);

enum class ColumnScaling { standardized, passthrough, constant };

std::string to_string(ColumnScaling s);
ColumnScaling column_scaling_from_string(const std::string& s);

struct ScalerParams {
  std::vector<double> means;
  std::vector<double> standard_deviations;
  std::vector<ColumnScaling> scaling;

  std::size_t size() const { return means.size(); }
  // Maps one raw feature vector into model space.
  std::vector<double> transform(std::span<const double> raw) const;
  Dataset apply(const Dataset& dataset) const;

  friend bool operator==(const ScalerParams&, const ScalerParams&) = default;
};

// Continuous columns are standardized with the training mean and the
// population standard deviation. Ordinal categoricals pass through in their
// integer coding; constant columns are left as-is and flagged.
ScalerParams fit_scaler(const Dataset& train);

struct Standardized {
  Dataset train;
  std::vector<Dataset> others;
  ScalerParams params;
};

Standardized standardize(const Dataset& train, const std::vector<Dataset>& others);

}  // namespace credsel
