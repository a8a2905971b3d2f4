#include "qstorage/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace qstorage {

namespace {

struct Simplex {
  std::vector<Eigen::VectorXd> x;
  std::vector<double> f;
};

bool simplex_converged(const Simplex& s, const std::vector<int>& order, const NelderMeadOptions& o) {
  const double f_best = s.f[order.front()];
  const double f_worst = s.f[order.back()];
  if (f_worst - f_best <= o.rel_tol * std::max(std::abs(f_best), 1e-300)) return true;
  double spread = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    spread = std::max(spread, (s.x[i] - s.x[order.front()]).cwiseAbs().maxCoeff());
  }
  return spread <= o.step_tol;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& start, const NelderMeadOptions& options) {
  const auto n = static_cast<int>(start.size());
  const double nd = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / nd;            // expansion
  const double gamma = 0.75 - 1.0 / (2.0 * nd);  // contraction
  const double delta = 1.0 - 1.0 / nd;           // shrink

  NelderMeadResult result;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++result.evaluations;
    const double v = objective(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  Eigen::VectorXd best = start;
  double best_f = eval(best);
  bool have_previous_convergence = false;
  double previous_converged_f = best_f;

  Simplex s;
  std::vector<int> order(static_cast<std::size_t>(n) + 1);

  auto build = [&](const Eigen::VectorXd& center, double center_f) {
    s.x.assign(static_cast<std::size_t>(n) + 1, center);
    s.f.assign(static_cast<std::size_t>(n) + 1, center_f);
    for (int i = 0; i < n; ++i) {
      auto& v = s.x[static_cast<std::size_t>(i) + 1];
      v(i) += v(i) != 0.0 ? options.initial_step * std::max(1.0, std::abs(v(i))) : options.initial_step;
      s.f[static_cast<std::size_t>(i) + 1] = eval(v);
    }
  };
  build(best, best_f);

  while (result.iterations < options.max_iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s.f[a] < s.f[b]; });

    if (simplex_converged(s, order, options)) {
      const double f = s.f[order.front()];
      best = s.x[order.front()];
      best_f = f;
      if (have_previous_convergence &&
          previous_converged_f - f <= options.rel_tol * std::max(std::abs(f), 1e-300)) {
        result.converged = true;
        break;
      }
      have_previous_convergence = true;
      previous_converged_f = f;
      build(best, best_f);
      continue;
    }
    ++result.iterations;

    const int worst = order.back();
    const int second_worst = order[order.size() - 2];
    const int lowest = order.front();
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += s.x[order[i]];
    centroid /= nd;

    const Eigen::VectorXd xr = centroid + alpha * (centroid - s.x[worst]);
    const double fr = eval(xr);
    if (fr < s.f[lowest]) {
      const Eigen::VectorXd xe = centroid + beta * (xr - centroid);
      const double fe = eval(xe);
      if (fe < fr) {
        s.x[worst] = xe;
        s.f[worst] = fe;
      } else {
        s.x[worst] = xr;
        s.f[worst] = fr;
      }
      continue;
    }
    if (fr < s.f[second_worst]) {
      s.x[worst] = xr;
      s.f[worst] = fr;
      continue;
    }
    const bool outside = fr < s.f[worst];
    const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + gamma * (xr - centroid))
                                       : Eigen::VectorXd(centroid - gamma * (centroid - s.x[worst]));
    const double fc = eval(xc);
    if (fc < (outside ? fr : s.f[worst])) {
      s.x[worst] = xc;
      s.f[worst] = fc;
      continue;
    }
    for (std::size_t i = 1; i < order.size(); ++i) {
      auto& v = s.x[order[i]];
      v = s.x[lowest] + delta * (v - s.x[lowest]);
      s.f[order[i]] = eval(v);
    }
  }

  if (!result.converged) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (s.f[i] < best_f) {
        best_f = s.f[i];
        best = s.x[i];
      }
    }
  }
  result.x = best;
  result.value = best_f;
  return result;
}

}  // namespace qstorage
