#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "sparsamp/spectral.hpp"

namespace sparsamp {

namespace {

// the FFTW planner is not re-entrant; execution is
std::mutex planner_mutex;

}  // namespace

template <>
void fft_inplace<double>(std::vector<std::complex<double>>& a, int sign) {
    if (a.empty()) return;
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        plan = fftw_plan_dft_1d(static_cast<int>(a.size()), p, p, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fft: planner failed");
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(plan);
}

template <>
void fft_inplace<quad>(std::vector<std::complex<quad>>& a, int sign) {
    if (a.empty()) return;
    auto* p = reinterpret_cast<fftwq_complex*>(a.data());
    fftwq_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        plan = fftwq_plan_dft_1d(static_cast<int>(a.size()), p, p, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fft: planner failed");
    fftwq_execute(plan);
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftwq_destroy_plan(plan);
}

}  // namespace sparsamp
