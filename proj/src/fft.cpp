#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace sww::detail {

namespace {

struct PlanPair {
    fftw_plan c2r = nullptr;
    fftw_plan r2c = nullptr;
};

std::mutex plan_mutex;
std::map<int, PlanPair>& plan_cache() {
    static std::map<int, PlanPair> cache;
    return cache;
}

// FFTW_UNALIGNED lets us execute on arbitrary std::vector storage.
const PlanPair& plans_for(int n) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<double> real_buf(static_cast<size_t>(n));
    std::vector<std::complex<double>> cplx_buf(static_cast<size_t>(n / 2 + 1));
    PlanPair p;
    p.c2r = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(cplx_buf.data()),
                                 real_buf.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.r2c = fftw_plan_dft_r2c_1d(n, real_buf.data(),
                                 reinterpret_cast<fftw_complex*>(cplx_buf.data()),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p.c2r || !p.r2c) throw std::runtime_error("fftw plan creation failed");
    return cache.emplace(n, p).first->second;
}

}  // namespace

void complex_to_real(const std::vector<std::complex<double>>& half_spectrum,
                     std::vector<double>& values, int n) {
    const auto& p = plans_for(n);
    // c2r destroys its input, so copy.
    std::vector<std::complex<double>> in(half_spectrum);
    in.resize(static_cast<size_t>(n / 2 + 1), {0.0, 0.0});
    values.assign(static_cast<size_t>(n), 0.0);
    fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(in.data()), values.data());
}

void real_to_complex(const std::vector<double>& values,
                     std::vector<std::complex<double>>& half_spectrum, int n) {
    const auto& p = plans_for(n);
    std::vector<double> in(values);
    half_spectrum.assign(static_cast<size_t>(n / 2 + 1), {0.0, 0.0});
    fftw_execute_dft_r2c(p.r2c, in.data(),
                         reinterpret_cast<fftw_complex*>(half_spectrum.data()));
    const double inv_n = 1.0 / n;
    for (auto& z : half_spectrum) z *= inv_n;
}

}  // namespace sww::detail
