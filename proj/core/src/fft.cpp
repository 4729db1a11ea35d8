#include "ldr/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>

namespace ldr::fft {

namespace {

// FFTW plan creation is not thread-safe; execution through
// fftw_execute_dft with caller buffers is. Plans are created once per
// (size, direction) with FFTW_UNALIGNED so any complex<double> buffer works,
// and cached for the process lifetime.
class PlanCache {
 public:
  static fftw_plan get(int n, int sign) {
    static PlanCache cache;
    std::lock_guard<std::mutex> lock(cache.mutex_);
    const auto key = std::make_pair(n, sign);
    auto it = cache.plans_.find(key);
    if (it != cache.plans_.end()) return it->second;

    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw Error("fftw_plan_dft_1d failed");
    cache.plans_.emplace(key, plan);
    return plan;
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

ComplexMatrix transform_rows(const ComplexMatrix& x, int sign) {
  const Index c = x.rows();
  const Index t = x.cols();
  ComplexMatrix out(c, t);
  if (t == 0) return out;
  if (t == 1) {
    out = x;
    return out;
  }
  const fftw_plan plan = PlanCache::get(static_cast<int>(t), sign);
  const double scale = 1.0 / std::sqrt(static_cast<double>(t));
  Eigen::VectorXcd row(t);
  for (Index i = 0; i < c; ++i) {
    row = x.row(i).transpose();
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(row.data()),
                     reinterpret_cast<fftw_complex*>(row.data()));
    out.row(i) = scale * row.transpose();
  }
  return out;
}

}  // namespace

ComplexMatrix dft_rows(const Matrix& x) {
  return transform_rows(x.cast<std::complex<double>>(), FFTW_FORWARD);
}

ComplexMatrix idft_rows(const ComplexMatrix& X) { return transform_rows(X, FFTW_BACKWARD); }

Matrix idft_rows_real(const ComplexMatrix& X, double imag_tol) {
  const ComplexMatrix y = idft_rows(X);
  if (y.size() == 0) return Matrix(y.rows(), y.cols());
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  const double worst = y.imag().cwiseAbs().maxCoeff();
  if (worst > imag_tol * scale) {
    throw InvalidMatrix("inverse DFT expected a real signal (conjugate symmetry broken)");
  }
  return y.real();
}

}  // namespace ldr::fft
