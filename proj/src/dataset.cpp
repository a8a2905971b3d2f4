#include "qstorage/dataset.hpp"

#include "qstorage/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qstorage::data {

using nlohmann::json;

namespace {

const char* const kKnownLabels[] = {"x", "-x", "y", "-y", "z", "-z", "x+y", "x-y"};

[[noreturn]] void field_error(const std::string& pointer, const std::string& what) {
  throw SchemaError(pointer + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& pointer) {
  auto it = obj.find(key);
  if (it == obj.end()) field_error(pointer, std::string("missing required field '") + key + "'");
  return *it;
}

double require_number(const json& j, const std::string& pointer) {
  if (!j.is_number()) field_error(pointer, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) field_error(pointer, "value is not finite");
  return v;
}

Format parse_format(const json& j, const std::string& pointer) {
  if (j == "probabilities") return Format::Probabilities;
  if (j == "counts") return Format::Counts;
  if (j == "correlations") return Format::Correlations;
  field_error(pointer, "unknown format " + j.dump());
}

Unit parse_unit(const json& j, const std::string& pointer) {
  if (j == "percent") return Unit::Percent;
  if (j == "fraction") return Unit::Fraction;
  if (j == "counts") return Unit::Counts;
  field_error(pointer, "unknown unit " + j.dump());
}

double unit_scale(Unit u) { return u == Unit::Percent ? 0.01 : 1.0; }

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace

std::string to_string(Format f) {
  switch (f) {
    case Format::Probabilities: return "probabilities";
    case Format::Counts: return "counts";
    case Format::Correlations: return "correlations";
  }
  return {};
}

std::string to_string(Unit u) {
  switch (u) {
    case Unit::Percent: return "percent";
    case Unit::Fraction: return "fraction";
    case Unit::Counts: return "counts";
  }
  return {};
}

json setting_to_json(const MeasurementSetting& setting) {
  for (const char* label : kKnownLabels) {
    const auto known = MeasurementSetting::from_label(label);
    if ((known.bloch() - setting.bloch()).cwiseAbs().maxCoeff() <= 1e-12) return label;
  }
  const auto& n = setting.bloch();
  return json::array({n.x(), n.y(), n.z()});
}

MeasurementSetting setting_from_json(const json& j, const std::string& pointer) {
  if (j.is_string()) {
    try {
      return MeasurementSetting::from_label(j.get<std::string>());
    } catch (const SchemaError& e) {
      field_error(pointer, e.what());
    }
  }
  if (j.is_array() && j.size() == 3) {
    Eigen::Vector3d n;
    for (int i = 0; i < 3; ++i) n(i) = require_number(j[static_cast<std::size_t>(i)], pointer + "/" + std::to_string(i));
    if (std::abs(n.norm() - 1.0) > 1e-6) field_error(pointer, "Bloch triple is not a unit vector");
    return MeasurementSetting::from_bloch(n.normalized());
  }
  field_error(pointer, "expected a setting label or a Bloch triple");
}

Dataset parse_dataset(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("line " + std::to_string(line_of_offset(text, e.byte)) +
                      ": malformed JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) field_error("", "dataset must be a JSON object");

  Dataset ds;
  ds.format = parse_format(require(doc, "format", ""), "/format");
  ds.unit = parse_unit(require(doc, "unit", ""), "/unit");
  if (ds.format == Format::Counts && ds.unit != Unit::Counts) {
    field_error("/unit", "count datasets must use unit \"counts\"");
  }
  if (ds.format != Format::Counts && ds.unit == Unit::Counts) {
    field_error("/unit", "unit \"counts\" only applies to count datasets");
  }
  if (auto it = doc.find("sign_convention"); it != doc.end()) {
    if (*it != "constructive" && *it != "signed") field_error("/sign_convention", "unknown sign convention " + it->dump());
    if (ds.format != Format::Correlations) field_error("/sign_convention", "only correlation datasets carry a sign convention");
    ds.sign_convention = it->get<std::string>();
  }
  if (auto it = doc.find("description"); it != doc.end() && it->is_string()) {
    ds.description = it->get<std::string>();
  }

  const json& records = require(doc, "records", "");
  if (!records.is_array()) field_error("/records", "expected an array");
  const double hi = ds.unit == Unit::Percent ? 100.0 : 1.0;
  const bool constructive = ds.sign_convention == "constructive";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string ptr = "/records/" + std::to_string(i);
    const json& r = records[i];
    if (!r.is_object()) field_error(ptr, "expected an object");
    DatasetRecord rec{{setting_from_json(require(r, "a", ptr), ptr + "/a"),
                       setting_from_json(require(r, "b", ptr), ptr + "/b")},
                      {}};
    const json& values = require(r, "values", ptr);
    const std::string vptr = ptr + "/values";
    if (ds.format == Format::Counts) {
      if (!values.is_array() || values.size() != 4) field_error(vptr, "expected four counts");
      for (std::size_t k = 0; k < 4; ++k) {
        const double c = require_number(values[k], vptr + "/" + std::to_string(k));
        if (c < 0.0) field_error(vptr + "/" + std::to_string(k), "negative count");
        rec.values.push_back(c);
      }
    } else {
      const double v = require_number(values, vptr);
      const double lo = (ds.format == Format::Probabilities || constructive) ? 0.0 : -hi;
      if (v < lo || v > hi) {
        std::ostringstream os;
        os << to_string(ds.unit) << " value " << v << " outside [" << lo << "," << hi << "]";
        field_error(vptr, os.str());
      }
      rec.values.push_back(v);
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInput("cannot open dataset '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_dataset(ss.str());
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

double Dataset::value_as_fraction(std::size_t record, std::size_t k) const {
  return records.at(record).values.at(k) * unit_scale(unit);
}

std::vector<tomo::CoincidenceRecord> Dataset::to_records(double n) const {
  if (!(n > 0.0)) throw ContractViolation("assumed total per setting must be positive");
  std::vector<tomo::CoincidenceRecord> out;
  out.reserve(records.size());
  const auto phi = DensityMatrix::from_pure(phi_plus());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    tomo::CoincidenceRecord rec{r.settings, {}};
    switch (format) {
      case Format::Counts:
        for (std::size_t k = 0; k < 4; ++k) rec.counts[k] = r.values[k];
        break;
      case Format::Probabilities: {
        const double p = value_as_fraction(i);
        rec.counts = {n * p, n * (1.0 - p), n * (1.0 - p), n * p};
        break;
      }
      case Format::Correlations: {
        double e = value_as_fraction(i);
        if (sign_convention == "constructive") {
          const double predicted =
              expectation(phi, kron(r.settings.a.observable(), r.settings.b.observable()));
          if (predicted < 0.0) e = -e;
        }
        rec.counts = {n * (1.0 + e) / 4.0, n * (1.0 - e) / 4.0, n * (1.0 - e) / 4.0,
                      n * (1.0 + e) / 4.0};
        break;
      }
    }
    out.push_back(rec);
  }
  return out;
}

json to_json(const Dataset& ds) {
  json doc;
  doc["format"] = to_string(ds.format);
  doc["unit"] = to_string(ds.unit);
  if (!ds.sign_convention.empty()) doc["sign_convention"] = ds.sign_convention;
  if (!ds.description.empty()) doc["description"] = ds.description;
  doc["records"] = json::array();
  for (const auto& r : ds.records) {
    json jr;
    jr["a"] = setting_to_json(r.settings.a);
    jr["b"] = setting_to_json(r.settings.b);
    if (ds.format == Format::Counts) {
      jr["values"] = r.values;
    } else {
      jr["values"] = r.values.at(0);
    }
    doc["records"].push_back(jr);
  }
  return doc;
}

std::string serialize(const Dataset& ds) { return to_json(ds).dump(2) + "\n"; }

Dataset dataset_from_counts(const std::vector<tomo::CoincidenceRecord>& records,
                            std::string description) {
  Dataset ds;
  ds.format = Format::Counts;
  ds.unit = Unit::Counts;
  ds.description = std::move(description);
  for (const auto& r : records) {
    ds.records.push_back({r.settings, {r.counts.begin(), r.counts.end()}});
  }
  return ds;
}

json matrix_to_json(const Matrix4c& m) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(row);
  }
  return rows;
}

Matrix4c matrix_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw SchemaError("matrix must have 4 rows");
  Matrix4c m;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!j[i].is_array() || j[i].size() != 4) throw SchemaError("matrix row must have 4 entries");
    for (std::size_t k = 0; k < 4; ++k) {
      const json& e = j[i][k];
      if (!e.is_array() || e.size() != 2) throw SchemaError("matrix entry must be [re, im]");
      m(static_cast<int>(i), static_cast<int>(k)) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw ContractViolation("SHA-256 computation failed");
  }
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
  return os.str();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

}  // namespace qstorage::data
