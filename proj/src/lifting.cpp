#include "spre/lifting.hpp"

#include <stdexcept>

#include "spre/kernels.hpp"

namespace spre {

MarkovBlocks split_markov(const Eigen::MatrixXd& xi, int past_window, int n_inputs,
                          int n_outputs) {
    const int p = past_window, r = n_inputs, l = n_outputs;
    if (p < 1 || xi.rows() != l || xi.cols() != (r + l) * p) {
        throw std::invalid_argument("split_markov: Xi must be l x (r+l)p");
    }
    MarkovBlocks b;
    b.n_inputs = r;
    b.n_outputs = l;
    b.mu.resize(static_cast<std::size_t>(p));
    b.my.resize(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        const int j = p - 1 - i;
        b.mu[static_cast<std::size_t>(j)] = xi.block(0, i * r, l, r);
        b.my[static_cast<std::size_t>(j)] = xi.block(0, r * p + i * l, l, l);
    }
    return b;
}

Eigen::MatrixXd join_markov(const MarkovBlocks& b) {
    const int p = b.past_window(), r = b.n_inputs, l = b.n_outputs;
    Eigen::MatrixXd xi(l, (r + l) * p);
    for (int i = 0; i < p; ++i) {
        const auto j = static_cast<std::size_t>(p - 1 - i);
        xi.block(0, i * r, l, r) = b.mu[j];
        xi.block(0, r * p + i * l, l, l) = b.my[j];
    }
    return xi;
}

namespace {

Eigen::MatrixXd toeplitz(const std::vector<Eigen::MatrixXd>& m, int period, int l, int cols) {
    const int p = static_cast<int>(m.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(l * period, cols * period);
    for (int s = 1; s < period; ++s) {
        for (int j = 0; j < p && s - 1 - j >= 0; ++j) {
            t.block(s * l, (s - 1 - j) * cols, l, cols) = m[static_cast<std::size_t>(j)];
        }
    }
    return t;
}

}  // namespace

ToeplitzPair build_toeplitz(const MarkovBlocks& blocks, int period) {
    const int p = blocks.past_window();
    if (period < p) throw std::invalid_argument("build_toeplitz: period must be >= past window");
    return {toeplitz(blocks.mu, period, blocks.n_outputs, blocks.n_inputs),
            toeplitz(blocks.my, period, blocks.n_outputs, blocks.n_outputs)};
}

Eigen::MatrixXd gamma_k(const std::vector<Eigen::MatrixXd>& markov, int period) {
    const int p = static_cast<int>(markov.size());
    if (p < 1 || period < p) throw std::invalid_argument("gamma_k: need P >= p >= 1");
    const int l = static_cast<int>(markov[0].rows());
    const int c = static_cast<int>(markov[0].cols());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(l * period, c * period);
    for (int s = 0; s < p; ++s) {
        for (int i = period - p; i < period; ++i) {
            const int e = s + period - 1 - i;
            if (e < p) out.block(s * l, i * c, l, c) = markov[static_cast<std::size_t>(e)];
        }
    }
    return out;
}

LiftedModel solve_lifted(const ToeplitzPair& toeplitz, const MarkovBlocks& blocks, int period,
                         Exec exec) {
    const int p = blocks.past_window(), r = blocks.n_inputs, l = blocks.n_outputs;
    if (toeplitz.h.rows() != l * period || toeplitz.h.cols() != r * period ||
        toeplitz.g.rows() != l * period || toeplitz.g.cols() != l * period) {
        throw std::invalid_argument("solve_lifted: Toeplitz dimensions do not match period");
    }
    const Eigen::Index nu = r * period, ny = l * period;
    Eigen::MatrixXd rhs(ny, nu + ny + nu);
    rhs << gamma_k(blocks.mu, period), gamma_k(blocks.my, period), toeplitz.h;
    if (exec == Exec::parallel) {
        kernels::omp::forward_substitute(toeplitz.g, rhs, l, p);
    } else {
        kernels::serial::forward_substitute(toeplitz.g, rhs, l, p);
    }
    LiftedModel m;
    m.gku = rhs.leftCols(nu);
    m.gky = rhs.middleCols(nu, ny);
    m.hhat = rhs.rightCols(nu);
    m.period = period;
    m.past_window = p;
    m.n_inputs = r;
    m.n_outputs = l;
    return m;
}

LiftedModel lift(const Eigen::MatrixXd& xi, int past_window, int n_inputs, int n_outputs,
                 int period, Exec exec) {
    const MarkovBlocks b = split_markov(xi, past_window, n_inputs, n_outputs);
    return solve_lifted(build_toeplitz(b, period), b, period, exec);
}

}  // namespace spre
