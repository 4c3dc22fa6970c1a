#include "threatkg/linalg.hpp"

#include <cmath>

namespace tkg {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> v) {
    return std::sqrt(dot(v, v));
}

bool all_finite(std::span<const double> v) {
    for (const double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace tkg
