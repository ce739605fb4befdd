#include <cmath>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dhflow/kernels.hpp"

using namespace dhflow::kernels;

namespace {

std::vector<double> random_plane(std::size_t n, unsigned seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

class SimdEquivalence : public ::testing::TestWithParam<PlaneShape> {
protected:
    void SetUp() override {
        simd_ = avx2_table();
        if (simd_ == nullptr) GTEST_SKIP() << "AVX2 kernels unavailable on this machine";
    }
    const KernelTable* simd_ = nullptr;
    const KernelTable& ref_ = scalar_table();
};

}  // namespace

TEST_P(SimdEquivalence, StencilsAgreeBitwise) {
    const PlaneShape s = GetParam();
    const std::size_t n = s.nx * s.ny;
    const auto in = random_plane(n, 3, 4.0);
    std::vector<double> a(n), b(n);
    for (double sign : {1.0, -1.0}) {
        ref_.centered_x(a.data(), in.data(), s, sign, 0.7);
        simd_->centered_x(b.data(), in.data(), s, sign, 0.7);
        EXPECT_TRUE(bitwise_equal(a, b)) << "centered_x";
        ref_.centered_y(a.data(), in.data(), s, sign, 0.7);
        simd_->centered_y(b.data(), in.data(), s, sign, 0.7);
        EXPECT_TRUE(bitwise_equal(a, b)) << "centered_y";
        for (double period : {0.0, 6.283185307179586}) {
            ref_.forward_x(a.data(), in.data(), s, sign, 1.3, period);
            simd_->forward_x(b.data(), in.data(), s, sign, 1.3, period);
            EXPECT_TRUE(bitwise_equal(a, b)) << "forward_x";
            ref_.forward_y(a.data(), in.data(), s, sign, 1.3, period);
            simd_->forward_y(b.data(), in.data(), s, sign, 1.3, period);
            EXPECT_TRUE(bitwise_equal(a, b)) << "forward_y";
            ref_.backward_x(a.data(), in.data(), s, sign, 1.3, period);
            simd_->backward_x(b.data(), in.data(), s, sign, 1.3, period);
            EXPECT_TRUE(bitwise_equal(a, b)) << "backward_x";
            ref_.backward_y(a.data(), in.data(), s, sign, 1.3, period);
            simd_->backward_y(b.data(), in.data(), s, sign, 1.3, period);
            EXPECT_TRUE(bitwise_equal(a, b)) << "backward_y";
        }
        ref_.laplacian(a.data(), in.data(), s, sign, -sign, 2.5, 0.5);
        simd_->laplacian(b.data(), in.data(), s, sign, -sign, 2.5, 0.5);
        EXPECT_TRUE(bitwise_equal(a, b)) << "laplacian";
    }
}

TEST_P(SimdEquivalence, ElementwiseAgreeBitwise) {
    const PlaneShape s = GetParam();
    const std::size_t n = s.nx * s.ny;
    const auto x = random_plane(n, 5), y = random_plane(n, 6);
    auto a = y, b = y;
    ref_.axpy(a.data(), 0.3, x.data(), n);
    simd_->axpy(b.data(), 0.3, x.data(), n);
    EXPECT_TRUE(bitwise_equal(a, b));
    ref_.axpby(a.data(), 0.3, x.data(), -1.7, y.data(), n);
    simd_->axpby(b.data(), 0.3, x.data(), -1.7, y.data(), n);
    EXPECT_TRUE(bitwise_equal(a, b));
}

TEST_P(SimdEquivalence, ReductionsAgreeToRounding) {
    const PlaneShape s = GetParam();
    const std::size_t n = s.nx * s.ny;
    const auto x = random_plane(n, 7), y = random_plane(n, 8);
    const double d0 = ref_.dot(x.data(), y.data(), n), d1 = simd_->dot(x.data(), y.data(), n);
    EXPECT_NEAR(d0, d1, 1e-13 * static_cast<double>(n));
    const double s0 = ref_.sum(x.data(), n), s1 = simd_->sum(x.data(), n);
    EXPECT_NEAR(s0, s1, 1e-13 * static_cast<double>(n));
    EXPECT_EQ(ref_.max_abs(x.data(), n), simd_->max_abs(x.data(), n));
}

INSTANTIATE_TEST_SUITE_P(Shapes, SimdEquivalence,
                         ::testing::Values(PlaneShape{8, 8}, PlaneShape{10, 8}, PlaneShape{18, 12},
                                           PlaneShape{64, 32}),
                         [](const ::testing::TestParamInfo<PlaneShape>& info) {
                             return std::to_string(info.param.nx) + "x" + std::to_string(info.param.ny);
                         });

TEST(Kernels, ActiveTableIsNamed) {
    const KernelTable& k = active();
    ASSERT_NE(k.name, nullptr);
    EXPECT_TRUE(std::string(k.name) == "scalar" || std::string(k.name) == "avx2");
}

TEST(Kernels, ScalarSeamSign) {
    const PlaneShape s{8, 8};
    std::vector<double> in(64, 1.0), out(64);
    scalar_table().forward_x(out.data(), in.data(), s, -1.0, 1.0, 0.0);
    EXPECT_EQ(out[7], -2.0);  // last column reads across the seam
    EXPECT_EQ(out[0], 0.0);
}
