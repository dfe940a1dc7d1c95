#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernel_tables.hpp"

namespace qpsim::simd {
namespace {

bool cpu_supports(Level level) {
    switch (level) {
        case Level::Scalar:
            return true;
        case Level::Avx2:
#if defined(QPSIM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Level::Neon:
#if defined(QPSIM_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable* lookup(Level level) {
    if (!cpu_supports(level)) return nullptr;
    switch (level) {
        case Level::Scalar:
            return &detail::kScalarTable;
        case Level::Avx2:
#if defined(QPSIM_HAVE_AVX2)
            return &detail::kAvx2Table;
#else
            return nullptr;
#endif
        case Level::Neon:
#if defined(QPSIM_HAVE_NEON)
            return &detail::kNeonTable;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

const KernelTable* pick_default() {
    if (const char* env = std::getenv("QPSIM_SIMD"); env != nullptr && *env != '\0') {
        return &table(parse_level(env));
    }
    for (Level level : {Level::Avx2, Level::Neon}) {
        if (const KernelTable* t = lookup(level)) return t;
    }
    return &detail::kScalarTable;
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{pick_default()};
    return slot;
}

}  // namespace

std::string_view to_string(Level level) {
    switch (level) {
        case Level::Scalar:
            return "scalar";
        case Level::Avx2:
            return "avx2";
        case Level::Neon:
            return "neon";
    }
    return "unknown";
}

Level parse_level(std::string_view name) {
    if (name == "scalar") return Level::Scalar;
    if (name == "avx2") return Level::Avx2;
    if (name == "neon") return Level::Neon;
    throw std::invalid_argument("unknown SIMD level '" + std::string(name) + "'");
}

const KernelTable& active() { return *active_slot().load(std::memory_order_relaxed); }

Level active_level() { return active().level; }

std::vector<Level> available_levels() {
    std::vector<Level> out;
    for (Level level : {Level::Scalar, Level::Avx2, Level::Neon}) {
        if (lookup(level) != nullptr) out.push_back(level);
    }
    return out;
}

const KernelTable& table(Level level) {
    const KernelTable* t = lookup(level);
    if (t == nullptr) {
        throw std::invalid_argument("SIMD level '" + std::string(to_string(level)) +
                                    "' is not available on this build/CPU");
    }
    return *t;
}

void set_active_level(Level level) { active_slot().store(&table(level), std::memory_order_relaxed); }

}  // namespace qpsim::simd
