#include "fft.hpp"

#include <algorithm>
#include <cstring>
#include <new>

namespace dhflow::detail {

ComplexFft2D::ComplexFft2D(int nx, int ny) : nx_(nx), ny_(ny) {
    const auto n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    buf_ = fftw_alloc_complex(n);
    if (buf_ == nullptr) throw std::bad_alloc();
    fwd_ = fftw_plan_dft_2d(ny, nx, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_2d(ny, nx, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
}

ComplexFft2D::~ComplexFft2D() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(buf_);
}

void ComplexFft2D::forward(std::span<const std::complex<double>> in,
                           std::span<std::complex<double>> out) {
    std::memcpy(buf_, in.data(), in.size_bytes());
    fftw_execute(fwd_);
    const auto* b = reinterpret_cast<const std::complex<double>*>(buf_);
    std::copy(b, b + out.size(), out.begin());
}

void ComplexFft2D::inverse(std::span<const std::complex<double>> in,
                           std::span<std::complex<double>> out) {
    std::memcpy(buf_, in.data(), in.size_bytes());
    fftw_execute(inv_);
    const double s = 1.0 / (static_cast<double>(nx_) * ny_);
    const auto* b = reinterpret_cast<const std::complex<double>*>(buf_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = b[i] * s;
}

RealConvolver2D::RealConvolver2D(int nx, int ny, std::span<const double> kernel)
    : nx_(nx), ny_(ny) {
    const auto n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    const auto nh = static_cast<std::size_t>(ny) * static_cast<std::size_t>(nx / 2 + 1);
    real_ = fftw_alloc_real(n);
    spec_ = fftw_alloc_complex(nh);
    if (real_ == nullptr || spec_ == nullptr) throw std::bad_alloc();
    r2c_ = fftw_plan_dft_r2c_2d(ny, nx, real_, spec_, FFTW_ESTIMATE);
    c2r_ = fftw_plan_dft_c2r_2d(ny, nx, spec_, real_, FFTW_ESTIMATE);
    std::copy(kernel.begin(), kernel.end(), real_);
    fftw_execute(r2c_);
    const auto* s = reinterpret_cast<const std::complex<double>*>(spec_);
    kernel_hat_.assign(s, s + nh);
}

RealConvolver2D::~RealConvolver2D() {
    fftw_destroy_plan(r2c_);
    fftw_destroy_plan(c2r_);
    fftw_free(real_);
    fftw_free(spec_);
}

std::vector<double> RealConvolver2D::correlate(std::span<const double> f) {
    const auto n = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
    std::copy(f.begin(), f.end(), real_);
    fftw_execute(r2c_);
    auto* s = reinterpret_cast<std::complex<double>*>(spec_);
    for (std::size_t i = 0; i < kernel_hat_.size(); ++i) s[i] *= std::conj(kernel_hat_[i]);
    fftw_execute(c2r_);
    std::vector<double> out(real_, real_ + n);
    const double scale = 1.0 / static_cast<double>(n);
    for (double& v : out) v *= scale;
    return out;
}

}  // namespace dhflow::detail
