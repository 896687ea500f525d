// Copyright 2026 The mgte Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <cstdlib>
#include <string_view>

#include "mgte/simd/kernels.hpp"

namespace mgte::simd {

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

struct Registry {
    std::array<const KernelTable*, 3> tables{};
    std::size_t count = 0;

    Registry() {
        tables[count++] = &scalar_kernels();
        if (const KernelTable* t = detail::avx2_kernels(); t != nullptr && cpu_has_avx2()) tables[count++] = t;
        // NEON is part of the aarch64 baseline.
        if (const KernelTable* t = detail::neon_kernels(); t != nullptr) tables[count++] = t;
    }
};

const Registry& registry() noexcept {
    static const Registry r;
    return r;
}

const KernelTable& select_kernels() noexcept {
    if (const char* env = std::getenv("MGTE_SIMD"); env != nullptr && std::string_view(env) == "scalar") {
        return scalar_kernels();
    }
    const Registry& r = registry();
    return *r.tables[r.count - 1];
}

}  // namespace

std::span<const KernelTable* const> available_kernels() noexcept {
    const Registry& r = registry();
    return {r.tables.data(), r.count};
}

const KernelTable& active_kernels() noexcept {
    static const KernelTable& chosen = select_kernels();
    return chosen;
}

}  // namespace mgte::simd
