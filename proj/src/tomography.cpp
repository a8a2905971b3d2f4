#include "qstorage/tomography.hpp"

#include "qstorage/errors.hpp"
#include "qstorage/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qstorage::tomo {

namespace {

constexpr double kProbabilityFloor = 1e-300;
constexpr double kAxisTolerance = 1e-12;

/// Axis index 1..3 and orientation when n is a signed coordinate axis.
std::optional<std::pair<int, double>> axis_of(const MeasurementSetting& s) {
  const Eigen::Vector3d& n = s.bloch();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(std::abs(n(i)) - 1.0) <= kAxisTolerance) {
      return std::make_pair(i + 1, n(i) > 0 ? 1.0 : -1.0);
    }
  }
  return std::nullopt;
}

int matrix_rank(const Eigen::MatrixXd& m) {
  if (m.cols() == 0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-9);
  return static_cast<int>(lu.rank());
}

double xlogy(double x, double y) { return x > 0.0 ? x * std::log(std::max(y, kProbabilityFloor)) : 0.0; }

}  // namespace

void CoincidenceRecord::validate() const {
  for (double c : counts) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw ContractViolation("coincidence counts must be finite and non-negative");
    }
  }
}

double normalized_probability(double c_ab, double c_a_negb) {
  if (c_ab < 0.0 || c_a_negb < 0.0) throw ContractViolation("counts must be non-negative");
  const double sum = c_ab + c_a_negb;
  if (!(sum > 0.0)) throw InsufficientData("normalized probability of an empty split");
  return c_ab / sum;
}

double expected_conditional(const DensityMatrix& rho, const MeasurementSetting& a, Sign sa,
                            const MeasurementSetting& b, Sign sb) {
  const double cond = expectation(rho, kron(projector(a, sa), Matrix2c::Identity()));
  if (cond <= 1e-12) {
    throw DegenerateSetting("conditioning probability vanishes for setting " + a.describe());
  }
  const double joint = born_joint(rho, a, sa, b, sb);
  return std::clamp(joint / cond, 0.0, 1.0);
}

LinearInversionResult linear_inversion(const PauliTable& expectations) {
  Matrix4c rho = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double t = expectations(i, j);
      if (i == 0 && j == 0) {
        t = 1.0;
      } else if (!(std::abs(t) <= 1.0 + tolerance::kNormalization)) {
        throw OutOfRange("Pauli expectation <s" + std::to_string(i) + " s" + std::to_string(j) +
                         "> = " + std::to_string(t) + " outside [-1,1]");
      }
      t = std::clamp(t, -1.0, 1.0);
      if (t != 0.0) rho += t * kron(pauli::by_index(i), pauli::by_index(j));
    }
  }
  rho /= 4.0;
  LinearInversionResult r;
  r.rho = (rho + rho.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(r.rho, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.non_physical = r.min_eigenvalue < -1e-6;
  return r;
}

LinearInversionResult linear_inversion(std::span<const double, 15> expectations) {
  PauliTable t = PauliTable::Zero();
  std::size_t k = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != 0 || j != 0) t(i, j) = expectations[k++];
  t(0, 0) = 1.0;
  return linear_inversion(t);
}

PauliTable estimate_pauli_expectations(std::span<const CoincidenceRecord> records) {
  PauliTable sum = PauliTable::Zero();
  Eigen::Matrix4d weight = Eigen::Matrix4d::Zero();
  auto add = [&](int i, int j, double v) {
    sum(i, j) += v;
    weight(i, j) += 1.0;
  };
  for (const auto& r : records) {
    const auto ax = axis_of(r.settings.a);
    const auto bx = axis_of(r.settings.b);
    const auto& c = r.counts;
    const double plus = r.plus_half(), minus = r.minus_half();
    const bool full = plus > 0.0 && minus > 0.0;
    if (ax && bx) {
      const double orient = ax->second * bx->second;
      if (full) {
        add(ax->first, bx->first, orient * (c[0] - c[1] - c[2] + c[3]) / r.total());
      } else if (plus > 0.0) {
        add(ax->first, bx->first, orient * (c[0] - c[1]) / plus);
      } else if (minus > 0.0) {
        add(ax->first, bx->first, orient * (c[3] - c[2]) / minus);
      }
    }
    if (full) {
      if (ax) add(ax->first, 0, ax->second * (plus - minus) / r.total());
      if (bx) add(0, bx->first, bx->second * (c[0] + c[2] - c[1] - c[3]) / r.total());
    }
  }
  PauliTable t = PauliTable::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (weight(i, j) > 0.0) t(i, j) = std::clamp(sum(i, j) / weight(i, j), -1.0, 1.0);
  t(0, 0) = 1.0;
  return t;
}

void check_informational_completeness(std::span<const CoincidenceRecord> records) {
  Eigen::MatrixXd corr(9, 0), loc_a(3, 0), loc_b(3, 0);
  for (const auto& r : records) {
    if (!(r.total() > 0.0)) continue;
    const Eigen::Vector3d& na = r.settings.a.bloch();
    const Eigen::Vector3d& nb = r.settings.b.bloch();
    Eigen::VectorXd v(9);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) v(3 * i + j) = na(i) * nb(j);
    corr.conservativeResize(Eigen::NoChange, corr.cols() + 1);
    corr.col(corr.cols() - 1) = v;
    loc_a.conservativeResize(Eigen::NoChange, loc_a.cols() + 1);
    loc_a.col(loc_a.cols() - 1) = na;
    loc_b.conservativeResize(Eigen::NoChange, loc_b.cols() + 1);
    loc_b.col(loc_b.cols() - 1) = nb;
  }
  const int rc = matrix_rank(corr);
  if (rc < 9 || matrix_rank(loc_a) < 3 || matrix_rank(loc_b) < 3) {
    throw IncompleteData("measurement settings are informationally incomplete (correlation rank " +
                         std::to_string(rc) + " of 9)");
  }
}

LikelihoodModel::LikelihoodModel(std::span<const CoincidenceRecord> records) {
  for (const auto& r : records) {
    r.validate();
    if (!(r.total() > 0.0)) continue;
    Term t;
    const auto& a = r.settings.a;
    const auto& b = r.settings.b;
    const std::array<std::pair<Sign, Sign>, 4> signs{{{Sign::Plus, Sign::Plus},
                                                      {Sign::Plus, Sign::Minus},
                                                      {Sign::Minus, Sign::Plus},
                                                      {Sign::Minus, Sign::Minus}}};
    for (std::size_t s = 0; s < 4; ++s) {
      t.effects[s] = kron(projector(a, signs[s].first), projector(b, signs[s].second)).conjugate();
    }
    t.counts = r.counts;
    t.split_first = a.is_pole() && r.plus_half() > 0.0 && r.minus_half() > 0.0;
    terms_.push_back(std::move(t));
  }
}

double LikelihoodModel::operator()(const Matrix4c& rho) const {
  double ll = 0.0;
  for (const auto& t : terms_) {
    std::array<double, 4> p;
    for (std::size_t s = 0; s < 4; ++s) {
      p[s] = std::max((rho.array() * t.effects[s].array()).sum().real(), kProbabilityFloor);
    }
    const auto& c = t.counts;
    if (c[0] + c[1] > 0.0) {
      const double den = p[0] + p[1];
      ll += xlogy(c[0], p[0] / den) + xlogy(c[1], p[1] / den);
    }
    if (c[2] + c[3] > 0.0) {
      const double den = p[2] + p[3];
      ll += xlogy(c[2], p[2] / den) + xlogy(c[3], p[3] / den);
    }
    if (t.split_first) {
      ll += xlogy(c[0] + c[1], p[0] + p[1]) + xlogy(c[2] + c[3], p[2] + p[3]);
    }
  }
  return -ll;
}

Matrix4c state_from_cholesky_parameters(const Eigen::VectorXd& params) {
  if (params.size() != 16) throw ContractViolation("Cholesky parameterization needs 16 values");
  Matrix4c t = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i) t(i, i) = params(i);
  int k = 4;
  for (int i = 1; i < 4; ++i) {
    for (int j = 0; j < i; ++j) {
      t(i, j) = Complex(params(k), params(k + 1));
      k += 2;
    }
  }
  Matrix4c rho = t.adjoint() * t;
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) return Matrix4c::Constant(Complex(std::nan(""), 0.0));
  rho /= tr;
  return (rho + rho.adjoint()) / 2.0;
}

Eigen::VectorXd cholesky_parameters_from_state(const DensityMatrix& rho) {
  const double eps = 1e-6;
  const Matrix4c reg = (1.0 - eps) * rho.matrix() + eps * Matrix4c::Identity() / 4.0;
  // rho = T^dagger T with T lower triangular: with J the exchange matrix,
  // J rho J = L L^dagger and T = J L^dagger J.
  const Matrix4c j = Matrix4c::Identity().rowwise().reverse();
  Eigen::LLT<Matrix4c> llt(j * reg * j);
  if (llt.info() != Eigen::Success) throw ContractViolation("state is not positive definite");
  const Matrix4c l = llt.matrixL();
  const Matrix4c t = j * l.adjoint() * j;
  Eigen::VectorXd p(16);
  for (int i = 0; i < 4; ++i) p(i) = t(i, i).real();
  int k = 4;
  for (int i = 1; i < 4; ++i) {
    for (int c = 0; c < i; ++c) {
      p(k) = t(i, c).real();
      p(k + 1) = t(i, c).imag();
      k += 2;
    }
  }
  return p;
}

TomographyResult mle_reconstruct(std::span<const CoincidenceRecord> records,
                                 const MleConfig& config) {
  bool any = false;
  for (const auto& r : records) {
    r.validate();
    any = any || r.total() > 0.0;
  }
  if (!any) throw InsufficientData("no coincidence counts to reconstruct from");
  check_informational_completeness(records);
  if (config.restarts < 1) throw ContractViolation("MLE needs at least one start");

  const LikelihoodModel nll(records);
  const DensityMatrix init =
      config.initial ? *config.initial
                     : DensityMatrix::project_physical(
                           linear_inversion(estimate_pauli_expectations(records)).rho);
  const double init_nll = nll(init);
  const Eigen::VectorXd init_params = cholesky_parameters_from_state(init);

  auto objective = [&](const Eigen::VectorXd& p) {
    const Matrix4c rho = state_from_cholesky_parameters(p);
    if (!std::isfinite(rho(0, 0).real())) return std::numeric_limits<double>::infinity();
    return nll(rho);
  };

  // Each start owns its parameter vector; the merge below is a min by NLL
  // with ties going to the lower start index.
  std::vector<NelderMeadResult> runs;
  runs.reserve(static_cast<std::size_t>(config.restarts));
  for (int r = 0; r < config.restarts; ++r) {
    Eigen::VectorXd start = init_params;
    if (r > 0) {
      std::mt19937_64 rng(substream_seed(config.seed, static_cast<std::uint64_t>(r)));
      std::normal_distribution<double> noise(0.0, config.restart_spread);
      for (Eigen::Index i = 0; i < start.size(); ++i) start(i) += noise(rng);
    }
    runs.push_back(nelder_mead(objective, start, config.optimizer));
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].value < runs[best].value - 1e-12) best = r;
  }
  const NelderMeadResult& win = runs[best];

  const DensityMatrix fitted = DensityMatrix::project_physical(state_from_cholesky_parameters(win.x));
  const double fitted_nll = nll(fitted);
  const bool keep_init = init_nll < fitted_nll;
  return TomographyResult{keep_init ? init : fitted,
                          keep_init ? init_nll : fitted_nll,
                          win.iterations,
                          win.converged,
                          static_cast<int>(best),
                          init_nll};
}

std::vector<SettingPair> basis_setting_pairs() {
  std::vector<SettingPair> out;
  for (const char* a : {"x", "y", "z"})
    for (const char* b : {"x", "y", "z"})
      out.push_back({MeasurementSetting::from_label(a), MeasurementSetting::from_label(b)});
  return out;
}

}  // namespace qstorage::tomo
