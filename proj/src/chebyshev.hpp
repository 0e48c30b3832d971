#pragma once

// Chebyshev-Lobatto collocation on sigma in [0,1], node 0 at sigma = 1 (top)
// and node N at sigma = 0 (bottom), with the first-derivative matrix d/dsigma.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

namespace sww::detail {

struct ChebGrid {
    std::vector<double> sigma;  // size N+1, sigma[0] = 1, sigma[N] = 0
    Eigen::MatrixXd D;          // d/dsigma
    Eigen::MatrixXd D2;         // d^2/dsigma^2

    explicit ChebGrid(int N) {
        const int n = N;
        sigma.resize(n + 1);
        Eigen::VectorXd t(n + 1);
        for (int j = 0; j <= n; ++j) {
            t[j] = std::cos(std::numbers::pi * j / n);
            sigma[static_cast<size_t>(j)] = 0.5 * (1.0 + t[j]);
        }
        Eigen::MatrixXd Dt(n + 1, n + 1);
        auto c = [n](int j) { return (j == 0 || j == n) ? 2.0 : 1.0; };
        for (int i = 0; i <= n; ++i) {
            double row_sum = 0.0;
            for (int j = 0; j <= n; ++j) {
                if (i == j) continue;
                const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
                Dt(i, j) = (c(i) / c(j)) * sign / (t[i] - t[j]);
                row_sum += Dt(i, j);
            }
            Dt(i, i) = -row_sum;  // negative row-sum trick for the diagonal
        }
        D = 2.0 * Dt;  // sigma = (1+t)/2
        D2 = D * D;
    }
};

}  // namespace sww::detail
