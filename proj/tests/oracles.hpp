// Copyright 2026 The kloshadows Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Independent reference implementations used as test oracles. Nothing here
// calls into the library's numerical routines.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline Matrix pauli_letter(char c) {
    Matrix m(2, 2);
    const Complex i(0.0, 1.0);
    switch (c) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, -i, i, 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

/** Kronecker product via Eigen's block expressions. */
inline Matrix kron2(const Matrix &a, const Matrix &b) {
    Matrix out = Matrix::Zero(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        for (Eigen::Index c = 0; c < out.cols(); ++c) {
            out(r, c) = a(r / b.rows(), c / b.cols()) * b(r % b.rows(), c % b.cols());
        }
    }
    return out;
}

inline Matrix pauli_matrix(const std::string &word) {
    Matrix m = Matrix::Identity(1, 1);
    for (char c : word) m = kron2(m, pauli_letter(c));
    return m;
}

/** Pauli-6 effects written out by hand. */
inline std::vector<Matrix> pauli6_effects() {
    const Complex i(0.0, 1.0);
    std::vector<Matrix> e(6, Matrix(2, 2));
    e[0] << 2, 0, 0, 0;
    e[1] << 0, 0, 0, 2;
    e[2] << 1, 1, 1, 1;
    e[3] << 1, -1, -1, 1;
    e[4] << 1, -i, i, 1;
    e[5] << 1, i, -i, 1;
    for (auto &m : e) m /= 6.0;
    return e;
}

/** Joint effects of two qubits, outcome (a, b) at index 6a + b. */
inline std::vector<Matrix> pauli6_pair_effects() {
    const auto e = pauli6_effects();
    std::vector<Matrix> out;
    for (const auto &a : e) {
        for (const auto &b : e) out.push_back(kron2(a, b));
    }
    return out;
}

/** Partial trace by an explicit sum over traced-out basis digits. */
inline Matrix partial_trace(const Matrix &rho, int n, const std::vector<int> &keep) {
    const int k = static_cast<int>(keep.size());
    const Eigen::Index dk = Eigen::Index{1} << k;
    Matrix out = Matrix::Zero(dk, dk);
    const auto digit = [n](Eigen::Index idx, int q) { return (idx >> (n - 1 - q)) & 1; };
    for (Eigen::Index r = 0; r < rho.rows(); ++r) {
        for (Eigen::Index c = 0; c < rho.cols(); ++c) {
            bool same = true;
            for (int q = 0; q < n && same; ++q) {
                bool kept = false;
                for (int kq : keep) kept = kept || kq == q;
                if (!kept && digit(r, q) != digit(c, q)) same = false;
            }
            if (!same) continue;
            Eigen::Index a = 0, b = 0;
            for (int kq : keep) {
                a = 2 * a + digit(r, kq);
                b = 2 * b + digit(c, kq);
            }
            out(a, b) += rho(r, c);
        }
    }
    return out;
}

/** Euclidean simplex projection by bisection on the threshold. */
inline std::vector<double> simplex_bisection(const std::vector<double> &v) {
    double lo = -1e3, hi = 1e3;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        double s = 0.0;
        for (double x : v) s += std::max(0.0, x - mid);
        (s > 1.0 ? lo : hi) = mid;
    }
    std::vector<double> out;
    for (double x : v) out.push_back(std::max(0.0, x - 0.5 * (lo + hi)));
    return out;
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/** E[omega], Var[omega] by enumerating every outcome. */
inline Moments enumerate_moments(const Matrix &rho, const std::vector<Matrix> &effects,
                                 const std::vector<Matrix> &duals, const Matrix &observable) {
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t m = 0; m < effects.size(); ++m) {
        const double p = (effects[m] * rho).trace().real();
        const double w = (duals[m] * observable).trace().real();
        m1 += p * w;
        m2 += p * w * w;
    }
    return {m1, m2 - m1 * m1};
}

/** Plug-in mutual information of a joint probability table. */
inline double mutual_information(const std::vector<std::vector<double>> &p) {
    std::vector<double> pa(p.size(), 0.0), pb(p.front().size(), 0.0);
    for (std::size_t a = 0; a < p.size(); ++a) {
        for (std::size_t b = 0; b < p[a].size(); ++b) {
            pa[a] += p[a][b];
            pb[b] += p[a][b];
        }
    }
    double mi = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
        for (std::size_t b = 0; b < p[a].size(); ++b) {
            if (p[a][b] > 0.0) mi += p[a][b] * std::log(p[a][b] / (pa[a] * pb[b]));
        }
    }
    return mi;
}

/** Newman modularity by the double sum over node pairs. */
inline double modularity(const Eigen::MatrixXd &w, const std::vector<int> &label) {
    const auto n = w.rows();
    double two_w = 0.0;
    std::vector<double> deg(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            deg[static_cast<std::size_t>(i)] += w(i, j);
            two_w += w(i, j);
        }
    }
    if (two_w == 0.0) return 0.0;
    double q = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (label[static_cast<std::size_t>(i)] != label[static_cast<std::size_t>(j)]) continue;
            q += w(i, j) - deg[static_cast<std::size_t>(i)] * deg[static_cast<std::size_t>(j)] / two_w;
        }
    }
    return q / two_w;
}

inline Matrix random_density(Eigen::Index dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Matrix a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
    }
    Matrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    return (rho + rho.adjoint()) * 0.5;
}

inline Matrix random_hermitian(Eigen::Index dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Matrix a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
    }
    return (a + a.adjoint()) * 0.5;
}

inline Eigen::VectorXcd random_pure(Eigen::Index dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(g(rng), g(rng));
    return v / v.norm();
}

}  // namespace oracle
