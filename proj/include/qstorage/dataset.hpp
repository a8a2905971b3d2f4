#pragma once

// JSON dataset files: joint-detection probabilities, raw coincidence counts,
// or correlation coefficients, each keyed by a pair of analyzer settings.

#include "qstorage/tomography.hpp"

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace qstorage::data {

enum class Format { Probabilities, Counts, Correlations };
enum class Unit { Percent, Fraction, Counts };

struct DatasetRecord {
  tomo::SettingPair settings;
  /// One value for probabilities and correlations, four for counts, in the
  /// file's unit.
  std::vector<double> values;
};

struct Dataset {
  Format format = Format::Counts;
  Unit unit = Unit::Counts;
  /// "constructive": correlation magnitudes take the sign of the |phi+>
  /// prediction for their settings.
  std::string sign_convention;
  std::string description;
  std::vector<DatasetRecord> records;

  /// Coincidence records. Probabilities P of (a,b) become C(a,b) = C(-a,-b) =
  /// N P and C(a,-b) = C(-a,b) = N (1-P); correlations E become
  /// C(a,b) = C(-a,-b) = N (1+E)/4 and C(a,-b) = C(-a,b) = N (1-E)/4. Counts
  /// pass through.
  std::vector<tomo::CoincidenceRecord> to_records(double assumed_total_per_setting) const;

  /// Values converted to fractions (probabilities, correlations) or counts.
  double value_as_fraction(std::size_t record, std::size_t k = 0) const;
};

/// Throws SchemaError naming the line for malformed JSON and the JSON pointer
/// for invalid fields, including unknown setting labels.
Dataset parse_dataset(const std::string& text);
Dataset load_dataset(const std::string& path);

nlohmann::json to_json(const Dataset& dataset);
std::string serialize(const Dataset& dataset);

Dataset dataset_from_counts(const std::vector<tomo::CoincidenceRecord>& records,
                            std::string description = {});

/// Labels use the short names where the Bloch vector matches one, and
/// [x, y, z] triples otherwise.
nlohmann::json setting_to_json(const MeasurementSetting& setting);
MeasurementSetting setting_from_json(const nlohmann::json& j, const std::string& pointer);

std::string to_string(Format f);
std::string to_string(Unit u);

/// Row-major [[re, im], ...] nesting of a 4x4 matrix.
nlohmann::json matrix_to_json(const Matrix4c& m);
Matrix4c matrix_from_json(const nlohmann::json& j);

/// Lower-case hex SHA-256 of a file's bytes. Throws MissingInput when unreadable.
std::string sha256_file(const std::string& path);
std::string sha256_hex(const std::string& bytes);

}  // namespace qstorage::data
