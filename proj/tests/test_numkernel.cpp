#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "tfim/numkernel.hpp"
#include "tfim/operators.hpp"

using namespace tfim;

namespace {

// Largest-magnitude eigenvalue of (shift*I - A) by power iteration gives the
// lowest eigenvalue of A.
double power_iteration_ground(const Eigen::MatrixXd& a, double shift) {
    const Eigen::MatrixXd b = shift * Eigen::MatrixXd::Identity(a.rows(), a.cols()) - a;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(a.rows()) + Eigen::VectorXd::LinSpaced(a.rows(), 0.0, 1.0);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 200000; ++it) {
        Eigen::VectorXd w = b * v;
        const double next = v.dot(w);
        v = w.normalized();
        if (std::abs(next - lambda) < 1e-15 * std::abs(next) && it > 100) break;
        lambda = next;
    }
    return shift - v.dot(b * v);
}

} // namespace

TEST(Eig, PauliMatrices) {
    Eigen::Matrix2d sz;
    sz << 1, 0, 0, -1;
    auto d = eig_hermitian(sz);
    EXPECT_NEAR(d.eigenvalues[0], -1, 1e-14);
    EXPECT_NEAR(d.eigenvalues[1], 1, 1e-14);

    Eigen::Matrix2d sx;
    sx << 0, 1, 1, 0;
    d = eig_hermitian(sx);
    EXPECT_NEAR(d.eigenvalues[0], -1, 1e-14);
    const Eigen::Vector2d minus = Eigen::Vector2d(1, -1) / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(d.eigenvectors.col(0).dot(minus)), 1.0, 1e-14);
}

TEST(Eig, GroundEnergyAgainstPowerIteration) {
    const auto h = build_hamiltonian(build_wheel7(), 1.0, 0.0).to_dense();
    const auto d = eig_hermitian(h);
    EXPECT_NEAR(d.eigenvalues[0], power_iteration_ground(h, 20.0), 1e-9);
    const auto h2 = build_hamiltonian(build_wheel7(), 1.0, 2.61).to_dense();
    EXPECT_NEAR(eig_hermitian(h2).eigenvalues[0], power_iteration_ground(h2, 40.0), 1e-9);
}

TEST(Eig, ReconstructionOrthonormalityOrdering) {
    std::mt19937 rng(11);
    const Eigen::MatrixXcd m = testing_support::random_matrix(20, rng);
    const Eigen::MatrixXcd a = m + m.adjoint();
    const auto d = eig_hermitian(a);
    EXPECT_LT((d.reconstruct() - a).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((d.eigenvectors.adjoint() * d.eigenvectors - Eigen::MatrixXcd::Identity(20, 20)).cwiseAbs().maxCoeff(),
              1e-12);
    for (Eigen::Index k = 1; k < d.size(); ++k) EXPECT_LE(d.eigenvalues[k - 1], d.eigenvalues[k]);
}

TEST(Eig, RejectsNonHermitian) {
    Eigen::Matrix2d m;
    m << 0, 1, 0, 0;
    EXPECT_THROW(eig_hermitian(m), NumericalError);
}

TEST(Expm, PiRotationAndZeroTime) {
    Eigen::Matrix2d sz;
    sz << 1, 0, 0, -1;
    const auto u = expm_unitary(sz, std::numbers::pi);
    EXPECT_LT((u.matrix + Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    const auto h = build_hamiltonian(build_wheel7(), 1.0, 2.0).to_dense();
    EXPECT_LT((expm_unitary(h, 0.0).matrix - Eigen::MatrixXcd::Identity(128, 128)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Expm, UnitarityAndComposition) {
    const auto h = build_hamiltonian(build_wheel7(), 1.0, 2.0).to_dense();
    const auto u = expm_unitary(h, 0.01);
    EXPECT_LT((u.matrix.adjoint() * u.matrix - Eigen::MatrixXcd::Identity(128, 128)).cwiseAbs().maxCoeff(), 1e-10);
    const auto u2 = expm_unitary(h, 0.02);
    EXPECT_LT((u.matrix * u.matrix - u2.matrix).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(u.fingerprint, expm_unitary(h, 0.01).fingerprint);
}

TEST(Expm, AgreesWithTaylorSeries) {
    std::mt19937 rng(5);
    const Eigen::MatrixXcd m = testing_support::random_matrix(6, rng);
    const Eigen::MatrixXcd a = 0.5 * (m + m.adjoint());
    const double dt = 0.05;
    Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(6, 6), sum = term;
    for (int k = 1; k < 30; ++k) {
        term = term * (cplx(0, -dt) * a) / static_cast<double>(k);
        sum += term;
    }
    EXPECT_LT((expm_unitary(a, dt).matrix - sum).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PsdSqrt, Examples) {
    const Eigen::Matrix4d id4 = Eigen::Matrix4d::Identity() / 4;
    EXPECT_LT((psd_sqrt(id4) - Eigen::Matrix4d::Identity() / 2).cwiseAbs().maxCoeff(), 1e-14);
    const Eigen::Matrix4cd proj = testing_support::bell_phi_plus();
    EXPECT_LT((psd_sqrt(proj) - proj).cwiseAbs().maxCoeff(), 1e-12);
    std::mt19937 rng(9);
    for (int k = 0; k < 10; ++k) {
        const Eigen::MatrixXcd m = testing_support::random_matrix(4, rng);
        const Eigen::MatrixXcd p = m * m.adjoint();
        const auto s = psd_sqrt(p);
        EXPECT_LT((s * s - p).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(PsdSqrt, RejectsIndefinite) {
    Eigen::Matrix2d m;
    m << 1, 0, 0, -0.5;
    EXPECT_THROW(psd_sqrt(m), NumericalError);
}
