#pragma once

#include <vector>

#include <Eigen/Dense>

#include "spre/cone_model.hpp"  // Exec

namespace spre {

// mu[j] = C Ã^j B (l x r), my[j] = C Ã^j L (l x l), j = 0..p-1.
struct MarkovBlocks {
    std::vector<Eigen::MatrixXd> mu;
    std::vector<Eigen::MatrixXd> my;
    int n_inputs = 0, n_outputs = 0;

    int past_window() const { return static_cast<int>(mu.size()); }
};

// The regressor stacks oldest first, so column block i of the input half of
// Xi multiplies du_{k-p+i} and holds C Ã^{p-1-i} B.
MarkovBlocks split_markov(const Eigen::MatrixXd& xi, int past_window, int n_inputs, int n_outputs);
Eigen::MatrixXd join_markov(const MarkovBlocks& blocks);

struct ToeplitzPair {
    Eigen::MatrixXd h;  // lP x rP
    Eigen::MatrixXd g;  // lP x lP
};

// Block Toeplitz with a zero first block row: block (s, i) = M[s-1-i] for
// 0 <= s-1-i < p.
ToeplitzPair build_toeplitz(const MarkovBlocks& blocks, int period);

// Revolution-lifted predictor
//   Y_{j+1} = Y_j + gku * dU_j + gky * dY_j + hhat * dU_{j+1}.
struct LiftedModel {
    Eigen::MatrixXd gku;   // lP x rP
    Eigen::MatrixXd gky;   // lP x lP
    Eigen::MatrixXd hhat;  // lP x rP
    int period = 0, past_window = 0, n_inputs = 0, n_outputs = 0;
};

// Observability-times-state-map products before the (I - G) solve. Block
// (s, i) with i in the last p input stations is C Ã^{s + P-1-i} B; exponents
// >= p are truncated to zero.
Eigen::MatrixXd gamma_k(const std::vector<Eigen::MatrixXd>& markov, int period);

LiftedModel solve_lifted(const ToeplitzPair& toeplitz, const MarkovBlocks& blocks, int period,
                         Exec exec = Exec::serial);

// split + Toeplitz + solve in one call.
LiftedModel lift(const Eigen::MatrixXd& xi, int past_window, int n_inputs, int n_outputs,
                 int period, Exec exec = Exec::serial);

}  // namespace spre
