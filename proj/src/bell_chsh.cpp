#include "qstorage/bell_chsh.hpp"

#include "qstorage/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qstorage::bell {

ChshSettings ChshSettings::maximal_violation() {
  return {MeasurementSetting::from_label("y"), MeasurementSetting::from_label("x"),
          MeasurementSetting::from_label("x-y"), MeasurementSetting::from_label("x+y")};
}

double correlation_from_counts(const tomo::CoincidenceRecord& record) {
  record.validate();
  const double total = record.total();
  if (!(total > 0.0)) throw InsufficientData("correlation coefficient of an empty record");
  const auto& c = record.counts;
  return std::clamp((c[0] - c[1] - c[2] + c[3]) / total, -1.0, 1.0);
}

double expected_correlation(const DensityMatrix& rho, const MeasurementSetting& a,
                            const MeasurementSetting& b) {
  return std::clamp(expectation(rho, kron(a.observable(), b.observable())), -1.0, 1.0);
}

double chsh_s(double e_ab, double e_abp, double e_apb, double e_apbp) {
  for (double e : {e_ab, e_abp, e_apb, e_apbp}) {
    if (!(e >= -1.0 && e <= 1.0)) {
      throw OutOfRange("correlation coefficient " + std::to_string(e) + " outside [-1,1]");
    }
  }
  return std::abs(e_ab - e_abp + e_apb + e_apbp);
}

double horodecki_max(const DensityMatrix& rho) {
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      t(i, j) = expectation(rho, kron(pauli::by_index(i + 1), pauli::by_index(j + 1)));
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(t);
  const Eigen::Vector3d sv = svd.singularValues();  // decreasing
  return 2.0 * std::sqrt(sv(0) * sv(0) + sv(1) * sv(1));
}

namespace {

/// +1 or -1 when `x` equals `target` or its negation, 0 otherwise.
int orientation(const MeasurementSetting& x, const MeasurementSetting& target) {
  if ((x.bloch() - target.bloch()).cwiseAbs().maxCoeff() <= 1e-9) return 1;
  if ((x.bloch() + target.bloch()).cwiseAbs().maxCoeff() <= 1e-9) return -1;
  return 0;
}

}  // namespace

ChshResult evaluate_chsh(std::span<const tomo::CoincidenceRecord> records,
                         const ChshSettings& settings) {
  const std::array<std::pair<const MeasurementSetting*, const MeasurementSetting*>, 4> pairs{
      {{&settings.a, &settings.b},
       {&settings.a, &settings.b_prime},
       {&settings.a_prime, &settings.b},
       {&settings.a_prime, &settings.b_prime}}};
  ChshResult out;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& [sa, sb] = pairs[k];
    bool found = false;
    for (const auto& r : records) {
      const int oa = orientation(r.settings.a, *sa);
      const int ob = orientation(r.settings.b, *sb);
      if (oa == 0 || ob == 0 || !(r.total() > 0.0)) continue;
      out.correlations[k] = {sa->describe(), sb->describe(), oa * ob * correlation_from_counts(r)};
      found = true;
      break;
    }
    if (!found) {
      throw MissingInput("no record for CHSH setting pair " + sa->describe() + " x " +
                         sb->describe());
    }
  }
  out.s = chsh_s(out.correlations[0].value, out.correlations[1].value, out.correlations[2].value,
                 out.correlations[3].value);
  return out;
}

double predicted_s(const DensityMatrix& rho, const ChshSettings& settings) {
  return chsh_s(expected_correlation(rho, settings.a, settings.b),
                expected_correlation(rho, settings.a, settings.b_prime),
                expected_correlation(rho, settings.a_prime, settings.b),
                expected_correlation(rho, settings.a_prime, settings.b_prime));
}

}  // namespace qstorage::bell
