#include <atomic>
#include <cstdlib>
#include <string>

#include "snowlens/error.hpp"
#include "snowlens/simd/kernels.hpp"

namespace snowlens::simd {

namespace {

constexpr Kernels kScalarTable{Isa::scalar,          scalar::sgemm,
                               scalar::saxpy,        scalar::adam,
                               scalar::mask_and,     scalar::class_equal,
                               scalar::count_nonzero};

#if SNOWLENS_HAVE_AVX2_KERNELS
constexpr Kernels kAvx2Table{Isa::avx2,          avx2::sgemm,
                             avx2::saxpy,        avx2::adam,
                             avx2::mask_and,     avx2::class_equal,
                             avx2::count_nonzero};
#endif

bool supported(Isa isa) {
  if (isa == Isa::scalar) return true;
#if SNOWLENS_HAVE_AVX2_KERNELS
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Kernels* initial_table() {
  Isa isa = detected_isa();
  if (const char* env = std::getenv("SNOWLENS_SIMD")) {
    if (std::string(env) == "scalar") isa = Isa::scalar;
  }
  return &kernels_for(isa);
}

std::atomic<const Kernels*>& active_slot() {
  static std::atomic<const Kernels*> slot{initial_table()};
  return slot;
}

}  // namespace

Isa detected_isa() { return supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

const Kernels& kernels_for(Isa isa) {
  if (!supported(isa))
    throw ValueError("SIMD level not supported on this CPU: " + std::string(isa_name(isa)));
#if SNOWLENS_HAVE_AVX2_KERNELS
  if (isa == Isa::avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

const Kernels& kernels() { return *active_slot().load(std::memory_order_acquire); }

void force_isa(Isa isa) { active_slot().store(&kernels_for(isa), std::memory_order_release); }

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace snowlens::simd
