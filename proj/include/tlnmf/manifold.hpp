#ifndef TLNMF_MANIFOLD_HPP
#define TLNMF_MANIFOLD_HPP

#include <cmath>
#include <functional>

#include <Eigen/SVD>

#include "tlnmf/transform.hpp"
#include "tlnmf/types.hpp"

namespace tlnmf {

struct LineSearchConfig {
    double gamma_init = 1.0;
    double shrink = 0.5;
    double armijo_c = 1e-4;
    int max_backtracks = 60;
    double grow = 2.0;
};

struct LineSearchResult {
    double gamma = 0.0;   // 0 means no acceptable step was found
    OrthoTransform phi;
    double objective = 0.0;
};

/// Euclidean gradient of the data-fitting term w.r.t. Phi:
///   grad = 2 (Delta o X) Y^T,  Delta = Vhat^-1 - V^-1,  V = |X|^2 floored.
/// vhat must already be floored by the caller.
inline Matrix gradient_phi(const OrthoTransform& phi, const FrameMatrix& frames,
                           const Matrix& vhat) {
    require(phi.dim() == frames.rows(), "gradient_phi: dimension mismatch");
    require(vhat.rows() == frames.rows() && vhat.cols() == frames.cols(),
            "gradient_phi: vhat shape mismatch");
    const Matrix x = phi.matrix * frames.data;
    Matrix v = x.array().square();
    v = v.cwiseMax(spectrogram_floor(v));
    const Matrix delta = vhat.cwiseInverse() - v.cwiseInverse();
    return 2.0 * (delta.array() * x.array()).matrix() * frames.data.transpose();
}

/// Gradient of the supervised objective w.r.t. Phi. The training
/// dictionary W = |Phi Y_tr|^2 is recomputed inside; h is the stacked
/// activation matrix [H_sp; H_no].
inline Matrix gradient_phi_supervised(const OrthoTransform& phi, const FrameMatrix& frames_mix,
                                      const FrameMatrix& frames_tr, const Matrix& h) {
    require(phi.dim() == frames_mix.rows() && phi.dim() == frames_tr.rows(),
            "gradient_phi_supervised: dimension mismatch");
    require(h.rows() == frames_tr.cols() && h.cols() == frames_mix.cols(),
            "gradient_phi_supervised: activation shape mismatch");
    const Matrix x = phi.matrix * frames_mix.data;
    Matrix v = x.array().square();
    const double floor = spectrogram_floor(v);
    v = v.cwiseMax(floor);

    const Matrix x_tr = phi.matrix * frames_tr.data;
    const Matrix w = x_tr.array().square();
    const Matrix vhat = (w * h).cwiseMax(floor);

    const Matrix delta = vhat.cwiseInverse() - v.cwiseInverse();
    const Matrix delta_prime = ((vhat - v).array() / vhat.array().square()).matrix();
    const Matrix xi = delta_prime * h.transpose();
    return 2.0 * (delta.array() * x.array()).matrix() * frames_mix.data.transpose() +
           2.0 * (xi.array() * x_tr.array()).matrix() * frames_tr.data.transpose();
}

/// Natural gradient on the orthogonal group: Omega = Phi grad^T Phi - grad.
inline Matrix natural_gradient(const OrthoTransform& phi, const Matrix& grad) {
    return phi.matrix * grad.transpose() * phi.matrix - grad;
}

/// Polar projection: the Frobenius-nearest orthogonal matrix U V^T from the
/// SVD A = U S V^T.
inline OrthoTransform project_orthogonal(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    if (sigma(sigma.size() - 1) <= 1e-12 * sigma(0))
        throw std::runtime_error("degenerate projection: input numerically singular");
    return {svd.matrixU() * svd.matrixV().transpose()};
}

/// Armijo backtracking along the natural gradient with polar retraction.
/// Tries gamma_init * shrink^j and accepts the first gamma with
///   eval(pi(Phi + gamma Omega)) <= eval(Phi) - armijo_c * gamma * ||Omega||_F^2.
/// Returns gamma = 0 and Phi unchanged when every candidate fails.
inline LineSearchResult armijo_step(const OrthoTransform& phi, const Matrix& omega,
                                    const std::function<double(const OrthoTransform&)>& eval,
                                    const LineSearchConfig& cfg) {
    const double omega_sq = omega.squaredNorm();
    require(omega_sq > 0.0, "armijo_step: zero descent direction");
    const double f0 = eval(phi);
    double gamma = cfg.gamma_init;
    for (int j = 0; j <= cfg.max_backtracks; ++j, gamma *= cfg.shrink) {
        OrthoTransform candidate = project_orthogonal(phi.matrix + gamma * omega);
        const double f = eval(candidate);
        if (std::isfinite(f) && f <= f0 - cfg.armijo_c * gamma * omega_sq)
            return {gamma, std::move(candidate), f};
    }
    return {0.0, phi, f0};
}

} // namespace tlnmf

#endif
