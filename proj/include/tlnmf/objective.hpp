#ifndef TLNMF_OBJECTIVE_HPP
#define TLNMF_OBJECTIVE_HPP

#include <cmath>

#include "tlnmf/transform.hpp"
#include "tlnmf/types.hpp"

namespace tlnmf {

/// Itakura-Saito divergence sum_ij (a/b - log(a/b) - 1).
inline double is_divergence(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "is_divergence: shape mismatch");
    require(a.minCoeff() > 0.0 && b.minCoeff() > 0.0, "is_divergence: arguments must be positive");
    const Eigen::ArrayXXd ratio = a.array() / b.array();
    return (ratio - ratio.log() - 1.0).sum();
}

/// C_lambda(Phi, W, H) = D_IS(|Phi Y|^2 | WH) + lambda (M/K) ||H||_1.
/// Both divergence arguments are floored at the spectrogram floor.
inline double objective_tlnmf(const OrthoTransform& phi, const FrameMatrix& frames,
                              const Matrix& w, const Matrix& h, const Hyperparams& hp) {
    require(w.cols() == h.rows(), "objective_tlnmf: W/H shape mismatch");
    require(w.rows() == frames.rows(), "objective_tlnmf: W/Y shape mismatch");
    const Spectrogram v = power_spectrogram(phi, frames);
    const Matrix model = (w * h).cwiseMax(v.floor);
    const double m_dim = static_cast<double>(frames.rows());
    const double penalty = hp.lambda * m_dim / static_cast<double>(hp.rank) * h.sum();
    return is_divergence(v.values, model) + penalty;
}

/// Supervised objective: divergence of the mixture spectrogram against
/// |Phi Y_sp|^2 H_sp + |Phi Y_no|^2 H_no, plus the two sparsity terms
/// weighted by M/N_sp and M/N_no.
inline double objective_supervised(const OrthoTransform& phi, const FrameMatrix& frames_mix,
                                   const FrameMatrix& frames_sp, const FrameMatrix& frames_no,
                                   const Matrix& h_sp, const Matrix& h_no,
                                   const SupervisedHyperparams& shp) {
    require(frames_mix.rows() == frames_sp.rows() && frames_mix.rows() == frames_no.rows(),
            "objective_supervised: frame dimensions differ");
    require(h_sp.rows() == frames_sp.cols() && h_no.rows() == frames_no.cols(),
            "objective_supervised: H row counts must match training frame counts");
    require(h_sp.cols() == frames_mix.cols() && h_no.cols() == frames_mix.cols(),
            "objective_supervised: H column counts must match mixture frame count");
    const Spectrogram v = power_spectrogram(phi, frames_mix);
    const Matrix w_sp = (phi.matrix * frames_sp.data).array().square();
    const Matrix w_no = (phi.matrix * frames_no.data).array().square();
    const Matrix model = (w_sp * h_sp + w_no * h_no).cwiseMax(v.floor);
    const double m_dim = static_cast<double>(frames_mix.rows());
    const double penalty =
        shp.lambda_sp * m_dim / static_cast<double>(frames_sp.cols()) * h_sp.sum() +
        shp.lambda_no * m_dim / static_cast<double>(frames_no.cols()) * h_no.sum();
    return is_divergence(v.values, model) + penalty;
}

} // namespace tlnmf

#endif
