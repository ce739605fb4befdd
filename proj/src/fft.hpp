#pragma once

// Thin RAII wrappers over FFTW3 for 2-D transforms on row-major (ny, nx) arrays.

#include <fftw3.h>

#include <complex>
#include <span>
#include <vector>

namespace dhflow::detail {

class ComplexFft2D {
public:
    ComplexFft2D(int nx, int ny);
    ~ComplexFft2D();
    ComplexFft2D(const ComplexFft2D&) = delete;
    ComplexFft2D& operator=(const ComplexFft2D&) = delete;

    // Unnormalised forward transform, exp(-i k x) convention.
    void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);
    // Inverse transform including the 1/(nx ny) factor.
    void inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

private:
    int nx_, ny_;
    fftw_complex* buf_;
    fftw_plan fwd_;
    fftw_plan inv_;
};

// Circular correlation r(c) = sum_o kernel(o) f(c + o) via real transforms.
class RealConvolver2D {
public:
    RealConvolver2D(int nx, int ny, std::span<const double> kernel);
    ~RealConvolver2D();
    RealConvolver2D(const RealConvolver2D&) = delete;
    RealConvolver2D& operator=(const RealConvolver2D&) = delete;

    std::vector<double> correlate(std::span<const double> f);

private:
    int nx_, ny_;
    double* real_;
    fftw_complex* spec_;
    fftw_plan r2c_;
    fftw_plan c2r_;
    std::vector<std::complex<double>> kernel_hat_;
};

}  // namespace dhflow::detail
