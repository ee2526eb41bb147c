#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

namespace reslab {

using cx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Error taxonomy. Everything derives from std::runtime_error so callers can
// catch broadly; the distinct types matter to tests and to the CLI exit codes.
struct singular_to_tolerance : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct not_converged : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct outside_domain : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct contractive_violation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct not_left_invertible : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct complement_degenerate : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct domain_mismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct kernel_dimension_unstable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct window_too_small : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct base_invalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct shape_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool is_finite(cx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// 17 significant digits round-trips IEEE doubles exactly; used by every emitter
// so that equal runs produce byte-identical files.
inline std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_short(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

inline std::string format_cx(cx z) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.4g%+.4gi", z.real(), z.imag());
    return buf;
}

// Deterministic random source. Uniform doubles are derived from raw bits
// rather than std::uniform_real_distribution, whose output is not pinned by
// the standard; this keeps seeded runs byte-identical across toolchains.
class DetRng {
  public:
    explicit DetRng(std::uint64_t seed) : gen_(seed) {}

    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double symmetric() { return 2.0 * unit() - 1.0; }

    cx complex_symmetric() {
        double re = symmetric();
        double im = symmetric();
        return {re, im};
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace reslab
