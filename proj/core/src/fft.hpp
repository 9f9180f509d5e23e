#pragma once

#include <complex>

namespace dfrc::detail {

// Batched 1-D complex DFT over a strided layout, FFTW conventions:
// sign -1 is exp(-j...), sign +1 is exp(+j...), unnormalized.
// Plans are built once per shape and shared; execution is thread safe.
class BatchedDft {
 public:
  BatchedDft(int n, int howmany, int stride, int dist, int sign);
  BatchedDft(const BatchedDft&) = delete;
  BatchedDft& operator=(const BatchedDft&) = delete;

  // in place
  void execute(std::complex<double>* data) const;

 private:
  void* plan_;
};

}  // namespace dfrc::detail
