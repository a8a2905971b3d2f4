#include "fft.hpp"

#include <fftw3.h>

#include <memory>
#include <mutex>
#include <stdexcept>

namespace qstorage::detail {

namespace {
// The FFTW planner is not re-entrant; execution of distinct plans is.
std::mutex planner_mutex;

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex);
    fftw_destroy_plan(p);
  }
};
}  // namespace

void fft_inplace(std::vector<std::complex<double>>& data, FftDirection direction) {
  if (data.empty()) return;
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  const int sign = direction == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
  {
    std::lock_guard lock(planner_mutex);
    plan.reset(fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, sign, FFTW_ESTIMATE));
  }
  if (!plan) throw std::runtime_error("FFTW failed to create a plan");
  fftw_execute(plan.get());
}

}  // namespace qstorage::detail
