#ifndef TLNMF_METRICS_HPP
#define TLNMF_METRICS_HPP

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "tlnmf/types.hpp"

namespace tlnmf {

/// dB cap standing in for +infinity in serialized scores.
inline constexpr double kBssCapDb = 300.0;

struct BssScores {
    double sdr = 0.0;
    double sir = 0.0;
    double sar = 0.0;
};

struct BssDecomposition {
    Vector s_target;
    Vector e_interf;
    Vector e_artif;
};

namespace detail {

inline double ratio_db(double num, double den) {
    if (den <= 0.0) return kBssCapDb;
    const double db = 10.0 * std::log10(num / den);
    return std::min(db, kBssCapDb);
}

} // namespace detail

/// Orthogonal decomposition of an estimate against reference sources using
/// gain-only (filter length 1) projections: s_target is the projection onto
/// the target reference, e_interf the extra projection onto the span of all
/// references, e_artif the residual.
inline BssDecomposition bss_decompose(const Signal& estimate,
                                      const std::vector<Signal>& references,
                                      std::size_t target_index) {
    require(target_index < references.size(), "bss_decompose: target index out of range");
    const auto len = estimate.samples.size();
    for (const auto& r : references)
        require(r.samples.size() == len, "bss_decompose: length mismatch");

    const Eigen::Map<const Vector> e(estimate.samples.data(), static_cast<Index>(len));
    if (e.squaredNorm() == 0.0) throw std::invalid_argument("bss_decompose: zero-energy estimate");

    const Index n_ref = static_cast<Index>(references.size());
    Matrix refs(static_cast<Index>(len), n_ref);
    for (Index k = 0; k < n_ref; ++k) {
        Eigen::Map<const Vector> r(references[static_cast<std::size_t>(k)].samples.data(),
                                   static_cast<Index>(len));
        if (r.squaredNorm() == 0.0)
            throw std::invalid_argument("bss_decompose: zero-energy reference");
        refs.col(k) = r;
    }

    const Matrix gram = refs.transpose() * refs;
    Eigen::JacobiSVD<Matrix> svd(gram);
    const auto& sigma = svd.singularValues();
    if (sigma(sigma.size() - 1) <= 1e-12 * sigma(0))
        throw std::invalid_argument("bss_decompose: rank-deficient reference set");

    const Vector target = refs.col(static_cast<Index>(target_index));
    BssDecomposition d;
    d.s_target = (e.dot(target) / target.squaredNorm()) * target;
    const Vector coeffs = gram.ldlt().solve(refs.transpose() * e);
    const Vector p_all = refs * coeffs;
    d.e_interf = p_all - d.s_target;
    d.e_artif = e - p_all;
    return d;
}

/// SDR / SIR / SAR in dB from the gain-only decomposition; +inf capped at
/// 300 dB.
inline BssScores bss_eval(const Signal& estimate, const std::vector<Signal>& references,
                          std::size_t target_index) {
    const BssDecomposition d = bss_decompose(estimate, references, target_index);
    const double target_pow = d.s_target.squaredNorm();
    const double interf_pow = d.e_interf.squaredNorm();
    const double artif_pow = d.e_artif.squaredNorm();
    BssScores scores;
    scores.sdr = detail::ratio_db(target_pow, (d.e_interf + d.e_artif).squaredNorm());
    scores.sir = detail::ratio_db(target_pow, interf_pow);
    scores.sar = detail::ratio_db((d.s_target + d.e_interf).squaredNorm(), artif_pow);
    return scores;
}

} // namespace tlnmf

#endif
