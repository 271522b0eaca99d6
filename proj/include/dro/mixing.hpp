#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "dro/errors.hpp"

// Small dense-matrix algebra for the DREM mixing step: cofactor-expansion
// determinant and adjugate, the excitation scalar delta = sqrt(det Phi),
// and the three update-law gain shapes.

namespace dro {

/// Gain shape applied to the extended regressor residual in the parameter
/// update law.
enum class MixingMode {
    Adjugate,       // lambda * adj(Phi) * (Yscript - Phi*theta_hat)
    DeltaAdjugate,  // lambda * delta * adj(Phi) * (...): stalls smoothly as det Phi -> 0
    Identity,       // lambda * (...): plain extended-regressor gradient
};

/// Cofactor cost grows as p!*p; the mixing algebra is capped here.
inline constexpr int kMaxParamDim = 5;

namespace detail {

template <typename Scalar>
using DenseMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
DenseMat<Scalar> minor_of(const DenseMat<Scalar>& m, Eigen::Index row, Eigen::Index col) {
    const Eigen::Index n = m.rows();
    DenseMat<Scalar> out(n - 1, n - 1);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i == row) continue;
        Eigen::Index c = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == col) continue;
            out(r, c) = m(i, j);
            ++c;
        }
        ++r;
    }
    return out;
}

template <typename Scalar>
Scalar det_cofactor(const DenseMat<Scalar>& m) {
    const Eigen::Index n = m.rows();
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    Scalar acc = Scalar(0);
    Scalar sign = Scalar(1);
    for (Eigen::Index j = 0; j < n; ++j) {
        acc += sign * m(0, j) * det_cofactor(minor_of(m, Eigen::Index(0), j));
        sign = -sign;
    }
    return acc;
}

template <typename Scalar>
void check_square_small(const DenseMat<Scalar>& m, const char* who) {
    if (m.rows() != m.cols())
        throw ConfigError(std::string(who) + ": matrix must be square");
    if (m.rows() < 1 || m.rows() > kMaxParamDim)
        throw ConfigError(std::string(who) + ": order must lie in [1, " +
                          std::to_string(kMaxParamDim) + "]");
}

}  // namespace detail

/// Exact cofactor-expansion determinant for p <= 5.
template <typename Derived>
typename Derived::Scalar determinant(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    detail::DenseMat<Scalar> mm = m;
    detail::check_square_small(mm, "determinant");
    return detail::det_cofactor(mm);
}

/// Transposed cofactor matrix. Satisfies adj(M)*M = M*adj(M) = det(M)*I in
/// every dimension; the 1x1 adjugate is [1] so the identity holds at p = 1.
template <typename Derived>
detail::DenseMat<typename Derived::Scalar> adjugate(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    detail::DenseMat<Scalar> mm = m;
    detail::check_square_small(mm, "adjugate");
    const Eigen::Index n = mm.rows();
    detail::DenseMat<Scalar> adj(n, n);
    if (n == 1) {
        adj(0, 0) = Scalar(1);
        return adj;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const Scalar cof = detail::det_cofactor(detail::minor_of(mm, i, j));
            const Scalar sign = ((i + j) % 2 == 0) ? Scalar(1) : Scalar(-1);
            adj(j, i) = sign * cof;
        }
    }
    return adj;
}

/// Excitation scalar delta = sqrt(max(det Phi, 0)).
///
/// Phi must be symmetric to 1e-9 relative; the extension dynamics keep it
/// exactly symmetric, so a violation means the integrator state is corrupt.
/// det Phi < 0 can only be floating-point leakage of positive
/// semidefiniteness and clamps to 0.
template <typename Derived>
typename Derived::Scalar delta(const Eigen::MatrixBase<Derived>& phi) {
    using Scalar = typename Derived::Scalar;
    detail::DenseMat<Scalar> p = phi;
    detail::check_square_small(p, "delta");
    const Scalar scale = p.cwiseAbs().maxCoeff();
    const Scalar asym = (p - p.transpose()).cwiseAbs().maxCoeff();
    if (asym > Scalar(1e-9) * scale)
        throw IntegrityError("delta: Phi asymmetry " + std::to_string(double(asym)) +
                             " exceeds 1e-9 relative tolerance");
    const Scalar d = detail::det_cofactor(p);
    return std::sqrt(std::max(d, Scalar(0)));
}

/// Parameter update law: the residual Yscript - Phi*theta_hat scaled by the
/// selected gain shape. det(Phi) = 0 is a legal stall, not an error.
inline Eigen::VectorXd theta_dot(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y_script,
                                 const Eigen::VectorXd& theta_hat, double lambda,
                                 MixingMode mode) {
    if (!(lambda > 0)) throw ConfigError("theta_dot: lambda must be > 0");
    if (phi.rows() != phi.cols() || phi.rows() != y_script.size() ||
        phi.rows() != theta_hat.size())
        throw ConfigError("theta_dot: inconsistent dimensions");
    const Eigen::VectorXd residual = y_script - phi * theta_hat;
    switch (mode) {
        case MixingMode::Adjugate:
            return lambda * (adjugate(phi) * residual);
        case MixingMode::DeltaAdjugate:
            return (lambda * delta(phi)) * (adjugate(phi) * residual);
        case MixingMode::Identity:
            return lambda * residual;
    }
    throw ConfigError("theta_dot: unknown mixing mode");
}

inline const char* to_string(MixingMode mode) {
    switch (mode) {
        case MixingMode::Adjugate: return "adj";
        case MixingMode::DeltaAdjugate: return "delta-adj";
        case MixingMode::Identity: return "identity";
    }
    return "?";
}

inline MixingMode parse_mixing_mode(const std::string& s) {
    if (s == "adj") return MixingMode::Adjugate;
    if (s == "delta-adj") return MixingMode::DeltaAdjugate;
    if (s == "identity") return MixingMode::Identity;
    throw ConfigError("unknown mixing mode '" + s + "' (expected adj, delta-adj, identity)");
}

}  // namespace dro
