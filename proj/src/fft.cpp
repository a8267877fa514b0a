#include "sdkg/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

#include "sdkg/errors.hpp"

namespace sdkg {

namespace fft {
namespace {

std::mutex plan_mutex;
std::map<std::pair<int, int>, fftw_plan> plans;

fftw_plan get_plan(int n, int sign) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n));
    fftw_plan p = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans.emplace(key, p);
    return p;
}

void run(const std::complex<double>* in, std::complex<double>* out, int n, int sign) {
    if (n <= 0) throw InvalidInput("fft length must be positive");
    if (in != out) std::copy(in, in + n, out);
    fftw_plan p = get_plan(n, sign);
    auto* data = reinterpret_cast<fftw_complex*>(out);
    fftw_execute_dft(p, data, data);
}

}  // namespace

void forward(const std::complex<double>* in, std::complex<double>* out, int n) {
    run(in, out, n, FFTW_FORWARD);
}

void backward(const std::complex<double>* in, std::complex<double>* out, int n) {
    run(in, out, n, FFTW_BACKWARD);
}

}  // namespace fft
}  // namespace sdkg
