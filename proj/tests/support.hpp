#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

namespace testing_support {

inline Eigen::VectorXcd random_state(std::size_t dim, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = {g(rng), g(rng)};
    return v.normalized();
}

inline Eigen::MatrixXcd random_matrix(Eigen::Index n, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = {g(rng), g(rng)};
    return m;
}

inline Eigen::Matrix2cd random_unitary2(std::mt19937& rng) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_matrix(2, rng));
    return qr.householderQ() * Eigen::Matrix2cd::Identity();
}

inline Eigen::Matrix4cd random_density4(std::mt19937& rng) {
    const Eigen::MatrixXcd m = random_matrix(4, rng);
    Eigen::Matrix4cd rho = m * m.adjoint();
    return rho / rho.trace().real();
}

inline Eigen::Matrix4cd bell_phi_plus() {
    Eigen::Vector4cd v(1, 0, 0, 1);
    v /= std::sqrt(2.0);
    return v * v.adjoint();
}

} // namespace testing_support
