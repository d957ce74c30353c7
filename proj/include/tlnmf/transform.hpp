#ifndef TLNMF_TRANSFORM_HPP
#define TLNMF_TRANSFORM_HPP

#include <cmath>
#include <cstdint>

#include <Eigen/QR>

#include "tlnmf/random.hpp"
#include "tlnmf/types.hpp"

namespace tlnmf {

/// Orthonormal DCT-IV matrix, [Phi]_{qm} = sqrt(2/M) cos(pi (q+1/2)(m+1/2)/M).
inline OrthoTransform dct_matrix(Index m_dim) {
    require(m_dim >= 1, "dct_matrix: dimension must be >= 1");
    const double scale = std::sqrt(2.0 / static_cast<double>(m_dim));
    Matrix phi(m_dim, m_dim);
    for (Index q = 0; q < m_dim; ++q)
        for (Index m = 0; m < m_dim; ++m)
            phi(q, m) = scale * std::cos(M_PI * (q + 0.5) * (m + 0.5) / static_cast<double>(m_dim));
    return {phi};
}

/// Haar-distributed random orthogonal matrix: QR of an i.i.d. standard
/// normal matrix with the sign correction from the R diagonal.
inline OrthoTransform random_orthogonal(Index m_dim, std::uint64_t seed) {
    require(m_dim >= 1, "random_orthogonal: dimension must be >= 1");
    Rng rng(seed);
    Matrix a = rng.normal_matrix(m_dim, m_dim);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < m_dim; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return {q};
}

/// Removes the sign ambiguity of |Phi Y|^2: negates row m iff Phi(m, 0) < 0,
/// so the first column ends up nonnegative. Rows with Phi(m, 0) == 0 are
/// left unchanged.
inline OrthoTransform normalize_sign(const OrthoTransform& t) {
    OrthoTransform out = t;
    for (Index m = 0; m < out.matrix.rows(); ++m)
        if (out.matrix(m, 0) < 0.0) out.matrix.row(m) = -out.matrix.row(m);
    return out;
}

/// Floor used for power spectrograms and model matrices: relative to the
/// mean power, with an absolute fallback for all-zero input.
inline double spectrogram_floor(const Matrix& power) {
    const double mean = power.mean();
    return mean > 0.0 ? 1e-10 * mean : 1e-30;
}

/// Power spectrogram V = max(|Phi Y|^2, floor).
/// floor <= 0 selects the default relative floor.
inline Spectrogram power_spectrogram(const OrthoTransform& t, const FrameMatrix& frames,
                                     double floor = 0.0) {
    require(t.dim() == frames.rows(), "power_spectrogram: dimension mismatch");
    Matrix power = (t.matrix * frames.data).array().square();
    if (floor <= 0.0) floor = spectrogram_floor(power);
    return {power.cwiseMax(floor), floor};
}

/// max-norm orthogonality defect ||Phi^T Phi - I||_max.
inline double orthogonality_defect(const OrthoTransform& t) {
    const Index m = t.dim();
    return (t.matrix.transpose() * t.matrix - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
}

} // namespace tlnmf

#endif
