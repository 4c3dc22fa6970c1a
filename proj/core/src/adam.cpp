#include "threatkg/adam.hpp"

#include <cmath>

#include "threatkg/error.hpp"

namespace tkg {

std::size_t Adam::add_parameter(std::size_t size) {
    slots_.push_back(Slot{std::vector<double>(size, 0.0), std::vector<double>(size, 0.0)});
    return slots_.size() - 1;
}

void Adam::update(std::size_t slot, std::span<double> param, std::span<const double> grad) {
    if (slot >= slots_.size()) throw DomainError("Adam: unknown parameter slot");
    auto& s = slots_[slot];
    if (param.size() != s.m.size() || grad.size() != s.m.size()) {
        throw DomainError("Adam: parameter/gradient size mismatch");
    }
    if (t_ == 0) throw DomainError("Adam: begin_step() not called");

    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = grad[i];
        s.m[i] = beta1_ * s.m[i] + (1.0 - beta1_) * g;
        s.v[i] = beta2_ * s.v[i] + (1.0 - beta2_) * g * g;
        const double mhat = s.m[i] / bc1;
        const double vhat = s.v[i] / bc2;
        param[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
}

}  // namespace tkg
