#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "spre/sysid.hpp"

namespace spre::test {

// Predictor-form generator
//   x_{k+1} = At x_k + B u_k + L y_k,   y_k = C x_k + e_k
struct Generator {
    Eigen::MatrixXd at, b, l, c;

    int n() const { return static_cast<int>(at.rows()); }
    int r() const { return static_cast<int>(b.cols()); }
    int m() const { return static_cast<int>(c.rows()); }

    Eigen::MatrixXd markov_u(int j) const;
    Eigen::MatrixXd markov_y(int j) const;
    // [C At^{p-1} B ... C B | C At^{p-1} L ... C L]
    Eigen::MatrixXd xi(int p) const;
};

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    Eigen::MatrixXd a(rows, cols);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(rng);
    return a;
}

inline Eigen::MatrixXd Generator::markov_u(int j) const {
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n(), n());
    for (int i = 0; i < j; ++i) p = at * p;
    return c * p * b;
}

inline Eigen::MatrixXd Generator::markov_y(int j) const {
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n(), n());
    for (int i = 0; i < j; ++i) p = at * p;
    return c * p * l;
}

inline Eigen::MatrixXd Generator::xi(int p) const {
    Eigen::MatrixXd x(m(), (r() + m()) * p);
    for (int i = 0; i < p; ++i) {
        x.block(0, i * r(), m(), r()) = markov_u(p - 1 - i);
        x.block(0, p * r() + i * m(), m(), m()) = markov_y(p - 1 - i);
    }
    return x;
}

// Random stable generator with the closed loop At + L C scaled to the given
// spectral radius bound.
inline Generator random_generator(std::uint64_t seed, int n = 4, int r = 3, int m = 3,
                                  double radius = 0.6) {
    std::mt19937_64 rng(seed);
    Generator g;
    Eigen::MatrixXd a = random_matrix(rng, n, n);
    const double rho = a.eigenvalues().cwiseAbs().maxCoeff();
    a *= radius / rho;
    g.b = random_matrix(rng, n, r);
    g.c = random_matrix(rng, m, n);
    g.l = random_matrix(rng, n, m, 0.1);
    g.at = a - g.l * g.c;
    return g;
}

// At is a weighted shift (nilpotent of index 4), so At^j = 0 for j >= 4 and the
// truncated Markov matrix with p >= 4 is exact. C observes the last three
// states and L places the closed loop At + L C upper triangular in the state
// order (1, 0, 2, 3) with eigenvalues in [-0.5, 0.5]. A chain weight above one
// keeps the old blocks C At^j B, C At^j L as large as the recent ones.
inline Generator nilpotent_generator(std::uint64_t seed, double weight = 2.0) {
    constexpr int n = 4;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ud(-0.5, 0.5);
    Generator g;
    g.at = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) g.at(i, i - 1) = weight;
    g.c = Eigen::MatrixXd::Zero(3, n);
    g.c.rightCols(3) = Eigen::MatrixXd::Identity(3, 3);
    const int pos[n] = {1, 0, 2, 3};
    Eigen::MatrixXd closed = random_matrix(rng, n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (pos[i] > pos[j]) closed(i, j) = 0.0;
            if (i == j) closed(i, j) = ud(rng);
        }
    }
    closed.col(0) = g.at.col(0);
    g.l = closed.rightCols(3) - g.at.rightCols(3);
    g.b = random_matrix(rng, n, 3);
    return g;
}

struct Trajectory {
    std::vector<Eigen::VectorXd> u, y;
};

// Simulates the generator for the given inputs; e_k ~ N(0, noise^2).
inline Trajectory simulate(const Generator& g, const std::vector<Eigen::VectorXd>& u, double noise,
                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Trajectory t;
    t.u = u;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(g.n());
    for (const auto& uk : u) {
        Eigen::VectorXd y = g.c * x;
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += noise * nd(rng);
        t.y.push_back(y);
        x = g.at * x + g.b * uk + g.l * y;
    }
    return t;
}

inline std::vector<Eigen::VectorXd> random_inputs(std::uint64_t seed, int r, std::size_t n,
                                                  double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::vector<Eigen::VectorXd> u;
    u.reserve(n);
    for (std::size_t k = 0; k < n; ++k) u.push_back(random_matrix(rng, r, 1, scale));
    return u;
}

struct DeltaData {
    std::vector<Eigen::VectorXd> phi, dy;
};

// Runs a trajectory through the periodic buffer and collects every
// (regressor, dy) pair that would reach the RLS.
inline DeltaData delta_pairs(const Trajectory& t, int period, int p) {
    PeriodicBuffer buf(period, p, static_cast<int>(t.u.front().size()),
                       static_cast<int>(t.y.front().size()));
    DeltaData d;
    for (std::size_t k = 0; k < t.u.size(); ++k) {
        if (auto delta = buf.push(t.u[k], t.y[k])) {
            if (buf.regressor_ready()) {
                d.phi.push_back(buf.regressor());
                d.dy.push_back(delta->dy);
            }
        }
    }
    return d;
}

// Exponentially weighted ridge least squares solved by dense QR on the
// stacked, weighted data: the batch counterpart of the recursive estimate.
inline Eigen::MatrixXd batch_markov(const DeltaData& d, double ridge, double gamma) {
    const auto n = static_cast<Eigen::Index>(d.phi.front().size());
    const auto l = static_cast<Eigen::Index>(d.dy.front().size());
    const auto N = static_cast<Eigen::Index>(d.phi.size());
    Eigen::MatrixXd a(N + n, n), rhs(N + n, l);
    a.setZero();
    rhs.setZero();
    for (Eigen::Index i = 0; i < N; ++i) {
        const double w = std::pow(gamma, 0.5 * static_cast<double>(N - 1 - i));
        a.row(i) = w * d.phi[static_cast<std::size_t>(i)].transpose();
        rhs.row(i) = w * d.dy[static_cast<std::size_t>(i)].transpose();
    }
    a.bottomRows(n) = std::sqrt(ridge * std::pow(gamma, static_cast<double>(N))) *
                      Eigen::MatrixXd::Identity(n, n);
    return a.colPivHouseholderQr().solve(rhs).transpose();
}

inline double rel_fro(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
    return (a - ref).norm() / ref.norm();
}

}  // namespace spre::test
