#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace shallowcv {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

/// Bad cavity shape, bad map, or a point outside the working domain.
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid user configuration (names the offending field).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Linear solve or iteration breakdown.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Output file could not be written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Complex sequence indexed by a signed integer range [lo, hi].
/// Reads outside the range return zero, which is how every truncated
/// series in the library treats missing coefficients.
class IndexedSeries {
public:
    IndexedSeries() = default;
    IndexedSeries(int lo, int hi) : lo_(lo), hi_(hi), v_(static_cast<std::size_t>(hi - lo + 1)) {}

    [[nodiscard]] int lo() const { return lo_; }
    [[nodiscard]] int hi() const { return hi_; }
    [[nodiscard]] bool contains(int k) const { return k >= lo_ && k <= hi_; }

    [[nodiscard]] cplx operator()(int k) const {
        return contains(k) ? v_[static_cast<std::size_t>(k - lo_)] : cplx{};
    }
    cplx& at(int k) {
        if (!contains(k)) throw std::out_of_range("series index " + std::to_string(k));
        return v_[static_cast<std::size_t>(k - lo_)];
    }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (const auto& x : v_) m = std::max(m, std::abs(x));
        return m;
    }

    [[nodiscard]] const std::vector<cplx>& data() const { return v_; }
    std::vector<cplx>& data() { return v_; }

private:
    int lo_ = 0;
    int hi_ = -1;
    std::vector<cplx> v_;
};

}  // namespace shallowcv
