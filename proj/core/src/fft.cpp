#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace silevy::detail {
namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex);
    auto it = plans.find({n, sign});
    if (it != plans.end()) return it->second;
    auto* buf = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf,
                                      sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    if (plan == nullptr) throw std::runtime_error("fftw planning failed");
    plans.emplace(std::make_pair(n, sign), plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)) {}
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* ptr;
};

}  // namespace

void dft(cvec& data, int sign) {
  const std::size_t n = data.size();
  if (n == 0) return;
  fftw_plan plan = cache().get(n, sign);
  // The plan was made for an aligned in-place buffer; run it on one too.
  FftwBuffer buf(n);
  std::memcpy(buf.ptr, data.data(), n * sizeof(fftw_complex));
  fftw_execute_dft(plan, buf.ptr, buf.ptr);
  std::memcpy(static_cast<void*>(data.data()), buf.ptr, n * sizeof(fftw_complex));
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> convolve_masses(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out = a.size() + b.size() - 1;
  const std::size_t n = next_pow2(out);
  cvec fa(n), fb(n);
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  dft(fa, -1);
  dft(fb, -1);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  dft(fa, +1);
  std::vector<double> result(out);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < out; ++i) result[i] = fa[i].real() * scale;
  return result;
}

}  // namespace silevy::detail
