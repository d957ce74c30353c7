#ifndef TLNMF_UPDATES_HPP
#define TLNMF_UPDATES_HPP

#include <cmath>

#include "tlnmf/types.hpp"

namespace tlnmf {

namespace detail {

/// Elementwise multiplicative step x * sqrt(num/den), with the 0/0 cells
/// (dead dictionary columns) pinned to zero.
inline Matrix multiplicative_step(const Matrix& x, const Matrix& num, const Matrix& den) {
    Matrix out(x.rows(), x.cols());
    for (Index j = 0; j < x.cols(); ++j)
        for (Index i = 0; i < x.rows(); ++i)
            out(i, j) = den(i, j) > 0.0 ? x(i, j) * std::sqrt(num(i, j) / den(i, j)) : 0.0;
    return out;
}

} // namespace detail

/// MM update for H:
///   H <- H o [ W^T((WH)^-2 o V) / (W^T(WH)^-1 + penalty) ]^(1/2)
/// WH is floored at the spectrogram floor before the negative powers.
inline Matrix update_h(const Spectrogram& v, const Matrix& w, const Matrix& h,
                       const Matrix& penalty) {
    require(w.cols() == h.rows(), "update_h: W/H shape mismatch");
    require(w.rows() == v.values.rows() && h.cols() == v.values.cols(),
            "update_h: V shape mismatch");
    require(penalty.rows() == h.rows() && penalty.cols() == h.cols(),
            "update_h: penalty shape mismatch");
    const Matrix wh = (w * h).cwiseMax(v.floor);
    const Matrix inv = wh.cwiseInverse();
    const Matrix num = w.transpose() * (inv.array().square() * v.values.array()).matrix();
    const Matrix den = (w.transpose() * inv + penalty).eval();
    return detail::multiplicative_step(h, num, den);
}

/// Uniform penalty matrix lambda (M/K) 1_{K x N} for the unsupervised update.
inline Matrix uniform_penalty(Index m_dim, Index k, Index n, double lambda) {
    return Matrix::Constant(k, n, lambda * static_cast<double>(m_dim) / static_cast<double>(k));
}

/// MM update for W:
///   W <- W o [ ((WH)^-2 o V) H^T / (((WH)^-1 + lambda(M/K)) H^T) ]^(1/2)
inline Matrix update_w(const Spectrogram& v, const Matrix& w, const Matrix& h,
                       double lambda_scaled) {
    require(w.cols() == h.rows(), "update_w: W/H shape mismatch");
    require(w.rows() == v.values.rows() && h.cols() == v.values.cols(),
            "update_w: V shape mismatch");
    const Matrix wh = (w * h).cwiseMax(v.floor);
    const Matrix inv = wh.cwiseInverse();
    const Matrix num = (inv.array().square() * v.values.array()).matrix() * h.transpose();
    const Matrix den = (inv.array() + lambda_scaled).matrix() * h.transpose();
    return detail::multiplicative_step(w, num, den);
}

/// Rescales each column of W to unit l1 norm and the matching row of H by
/// the inverse factor, so WH is unchanged. An all-zero column is reset to
/// uniform 1/M with its H row zeroed.
inline Factorization normalize_columns(const Factorization& f) {
    Factorization out = f;
    const Index m_dim = out.w.rows();
    for (Index k = 0; k < out.w.cols(); ++k) {
        const double norm = out.w.col(k).sum();
        if (norm > 0.0) {
            out.w.col(k) /= norm;
            out.h.row(k) *= norm;
        } else {
            out.w.col(k).setConstant(1.0 / static_cast<double>(m_dim));
            out.h.row(k).setZero();
        }
    }
    return out;
}

/// Block penalty M [ (lambda_sp/N_sp) 1 ; (lambda_no/N_no) 1 ] for the
/// supervised H update: first n_sp rows get the speech weight, the
/// remaining n_no rows the noise weight.
inline Matrix supervised_penalty(Index m_dim, Index n, Index n_sp, Index n_no,
                                 const SupervisedHyperparams& shp) {
    Matrix penalty(n_sp + n_no, n);
    penalty.topRows(n_sp).setConstant(static_cast<double>(m_dim) * shp.lambda_sp /
                                      static_cast<double>(n_sp));
    penalty.bottomRows(n_no).setConstant(static_cast<double>(m_dim) * shp.lambda_no /
                                         static_cast<double>(n_no));
    return penalty;
}

/// Supervised H update: same multiplicative form with the stacked training
/// dictionary W = |Phi Y_tr|^2 and the block penalty.
inline Matrix update_h_supervised(const Spectrogram& v, const Matrix& w_stacked,
                                  const Matrix& h_stacked, const SupervisedHyperparams& shp,
                                  Index n_sp, Index n_no) {
    require(h_stacked.rows() == n_sp + n_no && w_stacked.cols() == n_sp + n_no,
            "update_h_supervised: stacked shapes must split as N_sp + N_no");
    const Matrix penalty = supervised_penalty(v.values.rows(), h_stacked.cols(), n_sp, n_no, shp);
    return update_h(v, w_stacked, h_stacked, penalty);
}

} // namespace tlnmf

#endif
