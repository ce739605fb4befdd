#include <cstdlib>
#include <string_view>

#include "dhflow/kernels.hpp"

namespace dhflow::kernels {

#if defined(DHFLOW_HAVE_AVX2)
const KernelTable& avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#if defined(DHFLOW_HAVE_AVX2)
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok ? &avx2_table_impl() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const KernelTable* chosen = [] {
        const char* env = std::getenv("DHFLOW_KERNELS");
        if (env != nullptr && std::string_view(env) == "scalar") return &scalar_table();
        const KernelTable* simd = avx2_table();
        return simd != nullptr ? simd : &scalar_table();
    }();
    return *chosen;
}

}  // namespace dhflow::kernels
