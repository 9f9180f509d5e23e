#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace dfrc::detail {

namespace {

using Key = std::tuple<int, int, int, int, int>;

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};

// the FFTW planner is not reentrant
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::map<Key, std::unique_ptr<fftw_plan_s, PlanDeleter>>& plan_cache() {
  static std::map<Key, std::unique_ptr<fftw_plan_s, PlanDeleter>> c;
  return c;
}

}  // namespace

BatchedDft::BatchedDft(int n, int howmany, int stride, int dist, int sign) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  Key key{n, howmany, stride, dist, sign};
  auto& cache = plan_cache();
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::size_t len = std::size_t(stride) * (n - 1) + std::size_t(dist) * (howmany - 1) + 1;
    std::vector<fftw_complex> buf(len);
    int dims[1] = {n};
    fftw_plan p = fftw_plan_many_dft(1, dims, howmany, buf.data(), nullptr, stride, dist,
                                     buf.data(), nullptr, stride, dist,
                                     sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("fftw plan creation failed");
    it = cache.emplace(key, std::unique_ptr<fftw_plan_s, PlanDeleter>(p)).first;
  }
  plan_ = it->second.get();
}

void BatchedDft::execute(std::complex<double>* data) const {
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_), d, d);
}

}  // namespace dfrc::detail
