#include "threatkg/batchnorm.hpp"

#include <cmath>

#include "threatkg/error.hpp"

namespace tkg {

BatchNormState BatchNormState::make(std::size_t dim, double momentum, double epsilon) {
    BatchNormState s;
    s.gamma.assign(dim, 1.0);
    s.beta.assign(dim, 0.0);
    s.running_mean.assign(dim, 0.0);
    s.running_var.assign(dim, 1.0);
    s.momentum = momentum;
    s.epsilon = epsilon;
    return s;
}

namespace {

void check_dims(const BatchNormState& state, const Matrix& x) {
    if (x.cols() != state.dim()) {
        throw DomainError("batchnorm dimension mismatch: state dim " +
                          std::to_string(state.dim()) + ", input cols " +
                          std::to_string(x.cols()));
    }
    if (x.rows() == 0) throw DomainError("batchnorm requires batch size >= 1");
}

}  // namespace

Matrix batchnorm_apply(const BatchNormState& state, const Matrix& x, RunMode mode,
                       BatchNormCache* cache) {
    check_dims(state, x);
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    Matrix out(n, d);

    if (mode == RunMode::eval) {
        for (std::size_t j = 0; j < d; ++j) {
            const double inv = 1.0 / std::sqrt(state.running_var[j] + state.epsilon);
            const double g = state.gamma[j];
            const double b = state.beta[j];
            const double m = state.running_mean[j];
            for (std::size_t i = 0; i < n; ++i) {
                out.at(i, j) = g * (x.at(i, j) - m) * inv + b;
            }
        }
        return out;
    }

    std::vector<double> mean(d, 0.0), var(d, 0.0), inv_std(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = x.row(i);
        for (std::size_t j = 0; j < d; ++j) mean[j] += xi[j];
    }
    for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = x.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double c = xi[j] - mean[j];
            var[j] += c * c;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        var[j] /= static_cast<double>(n);
        inv_std[j] = 1.0 / std::sqrt(var[j] + state.epsilon);
    }

    Matrix xhat(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double xh = (x.at(i, j) - mean[j]) * inv_std[j];
            xhat.at(i, j) = xh;
            out.at(i, j) = state.gamma[j] * xh + state.beta[j];
        }
    }
    if (cache) {
        cache->xhat = std::move(xhat);
        cache->inv_std = std::move(inv_std);
        cache->batch_mean = std::move(mean);
        cache->batch_var = std::move(var);
    }
    return out;
}

void batchnorm_update_running(BatchNormState& state, const BatchNormCache& cache,
                              std::size_t batch_rows) {
    const double mom = state.momentum;
    const double n = static_cast<double>(batch_rows);
    const double unbias = batch_rows > 1 ? n / (n - 1.0) : 1.0;
    for (std::size_t j = 0; j < state.dim(); ++j) {
        state.running_mean[j] = (1.0 - mom) * state.running_mean[j] + mom * cache.batch_mean[j];
        state.running_var[j] =
            (1.0 - mom) * state.running_var[j] + mom * cache.batch_var[j] * unbias;
    }
}

Matrix batchnorm_forward(BatchNormState& state, const Matrix& x, RunMode mode,
                         BatchNormCache* cache) {
    if (mode == RunMode::eval) return batchnorm_apply(state, x, mode, cache);
    BatchNormCache local;
    BatchNormCache* c = cache ? cache : &local;
    Matrix out = batchnorm_apply(state, x, mode, c);
    batchnorm_update_running(state, *c, x.rows());
    return out;
}

Matrix batchnorm_backward(const BatchNormState& state, const BatchNormCache& cache,
                          const Matrix& dout, BatchNormGrads& grads) {
    const std::size_t n = dout.rows();
    const std::size_t d = dout.cols();
    if (cache.xhat.rows() != n || cache.xhat.cols() != d) {
        throw DomainError("batchnorm backward: cache/batch shape mismatch");
    }
    grads.dgamma.assign(d, 0.0);
    grads.dbeta.assign(d, 0.0);

    // Column sums of dxhat and dxhat*xhat drive the batch-statistic terms.
    std::vector<double> sum_dxhat(d, 0.0), sum_dxhat_xhat(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dy = dout.at(i, j);
            const double xh = cache.xhat.at(i, j);
            grads.dgamma[j] += dy * xh;
            grads.dbeta[j] += dy;
            const double dxhat = dy * state.gamma[j];
            sum_dxhat[j] += dxhat;
            sum_dxhat_xhat[j] += dxhat * xh;
        }
    }

    Matrix dx(n, d);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dxhat = dout.at(i, j) * state.gamma[j];
            dx.at(i, j) = cache.inv_std[j] *
                          (dxhat - inv_n * sum_dxhat[j] -
                           cache.xhat.at(i, j) * inv_n * sum_dxhat_xhat[j]);
        }
    }
    return dx;
}

}  // namespace tkg
