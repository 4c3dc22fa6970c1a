#pragma once

#include <vector>

#include "threatkg/linalg.hpp"

namespace tkg {

enum class RunMode { train, eval };

// Per-feature batch normalization state over a (batch x dim) matrix.
struct BatchNormState {
    std::vector<double> gamma;         // scale
    std::vector<double> beta;          // shift
    std::vector<double> running_mean;
    std::vector<double> running_var;   // >= 0
    double momentum = 0.1;
    double epsilon = 1e-5;

    static BatchNormState make(std::size_t dim, double momentum = 0.1, double epsilon = 1e-5);
    std::size_t dim() const { return gamma.size(); }

    friend bool operator==(const BatchNormState&, const BatchNormState&) = default;
};

// Intermediates kept for the backward pass and the running-stats update.
struct BatchNormCache {
    Matrix xhat;
    std::vector<double> inv_std;
    std::vector<double> batch_mean;
    std::vector<double> batch_var;  // biased (divide by N)
};

// Pure forward: train mode normalizes by batch statistics (variance biased,
// batch of 1 degenerates to variance 0 + epsilon), eval mode by running
// statistics. Never touches the state.
Matrix batchnorm_apply(const BatchNormState& state, const Matrix& x, RunMode mode,
                       BatchNormCache* cache = nullptr);

// Momentum update of running statistics from a train-mode cache. The variance
// estimate uses the unbiased batch variance (N/(N-1)) when N > 1, the biased
// one when N == 1.
void batchnorm_update_running(BatchNormState& state, const BatchNormCache& cache,
                              std::size_t batch_rows);

// Train-mode forward that also updates running statistics; eval mode leaves
// the state untouched.
Matrix batchnorm_forward(BatchNormState& state, const Matrix& x, RunMode mode,
                         BatchNormCache* cache = nullptr);

struct BatchNormGrads {
    std::vector<double> dgamma;
    std::vector<double> dbeta;
};

// Backward through a train-mode forward. Returns dL/dx and fills grads.
Matrix batchnorm_backward(const BatchNormState& state, const BatchNormCache& cache,
                          const Matrix& dout, BatchNormGrads& grads);

}  // namespace tkg
