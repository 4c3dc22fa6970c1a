#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tkg {

// Adam with bias correction. One instance owns the moment buffers for a fixed
// set of parameter tensors, registered once in a stable order.
class Adam {
public:
    explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                  double epsilon = 1e-8)
        : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

    // Returns the slot index to pass to update().
    std::size_t add_parameter(std::size_t size);

    // Call once per optimizer step, before the update() calls of that step.
    void begin_step() { ++t_; }

    void update(std::size_t slot, std::span<double> param, std::span<const double> grad);

private:
    struct Slot {
        std::vector<double> m;
        std::vector<double> v;
    };

    double lr_, beta1_, beta2_, eps_;
    std::uint64_t t_ = 0;
    std::vector<Slot> slots_;
};

}  // namespace tkg
