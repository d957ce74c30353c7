#ifndef TLNMF_SUPERVISED_HPP
#define TLNMF_SUPERVISED_HPP

#include <utility>
#include <vector>

#include "tlnmf/driver.hpp"
#include "tlnmf/signal_io.hpp"

namespace tlnmf {

struct TrainingSet {
    FrameMatrix frames_sp;
    FrameMatrix frames_no;
};

struct SeparationResult {
    OrthoTransform phi;
    Matrix h_sp;        // N_sp x N
    Matrix h_no;        // N_no x N
    Matrix vhat_sp;     // M x N
    Matrix vhat_no;     // M x N
    Signal est_sp;
    Signal est_no;
    std::vector<double> objective_history;
    std::vector<double> epsilon_history;
    int iterations = 0;
};

/// Wiener-filter reconstruction: masks m_sp = Vhat_sp/(Vhat_sp + Vhat_no),
/// m_no = 1 - m_sp, framewise estimates Phi^T (mask o Phi Y), both passed
/// through weighted overlap-add. All-zero frames get mask 0.5.
inline std::pair<Signal, Signal> wiener_reconstruct(const OrthoTransform& phi,
                                                    const FrameMatrix& frames_mix,
                                                    const Matrix& vhat_sp, const Matrix& vhat_no,
                                                    Index total_len, int sample_rate = 0) {
    require(vhat_sp.rows() == frames_mix.rows() && vhat_sp.cols() == frames_mix.cols() &&
                vhat_no.rows() == vhat_sp.rows() && vhat_no.cols() == vhat_sp.cols(),
            "wiener_reconstruct: shape mismatch");
    Matrix total = vhat_sp + vhat_no;
    const double floor = spectrogram_floor(total);
    Matrix mask_sp(total.rows(), total.cols());
    for (Index j = 0; j < total.cols(); ++j)
        for (Index i = 0; i < total.rows(); ++i)
            mask_sp(i, j) = total(i, j) > floor ? vhat_sp(i, j) / total(i, j) : 0.5;
    const Matrix mask_no = Matrix::Constant(total.rows(), total.cols(), 1.0) - mask_sp;

    const Matrix x = phi.matrix * frames_mix.data;
    FrameMatrix est_sp_frames{phi.matrix.transpose() * (mask_sp.array() * x.array()).matrix(),
                              frames_mix.frame_len, frames_mix.hop};
    FrameMatrix est_no_frames{phi.matrix.transpose() * (mask_no.array() * x.array()).matrix(),
                              frames_mix.frame_len, frames_mix.hop};
    return {overlap_add(est_sp_frames, total_len, sample_rate),
            overlap_add(est_no_frames, total_len, sample_rate)};
}

/// Supervised block-coordinate descent: the dictionary is pinned to
/// |Phi Y_tr|^2 and recomputed whenever Phi moves; only H and (in TLNMF
/// mode) Phi are free.
inline SeparationResult run_supervised(const FrameMatrix& frames_mix, const TrainingSet& train,
                                       const SupervisedHyperparams& shp, const RunConfig& cfg,
                                       Index total_len = 0, int sample_rate = 0) {
    const Index m_dim = frames_mix.rows();
    require(train.frames_sp.rows() == m_dim && train.frames_no.rows() == m_dim,
            "run_supervised: frame dimensions differ");
    const Index n = frames_mix.cols();
    const Index n_sp = train.frames_sp.cols();
    const Index n_no = train.frames_no.cols();
    if (total_len == 0) total_len = (n - 1) * frames_mix.hop + frames_mix.frame_len;

    Matrix y_tr(m_dim, n_sp + n_no);
    y_tr.leftCols(n_sp) = train.frames_sp.data;
    y_tr.rightCols(n_no) = train.frames_no.data;
    const FrameMatrix frames_tr{y_tr, frames_mix.frame_len, frames_mix.hop};

    SeparationResult res;
    res.phi = cfg.mode == Mode::TLNMF ? random_orthogonal(m_dim, Rng::derive(cfg.seed, 1))
                                      : dct_matrix(m_dim);
    Rng rng(Rng::derive(cfg.seed, 0));
    Matrix h = rng.uniform_matrix(n_sp + n_no, n, 1e-6, 1.0);

    auto objective = [&](const OrthoTransform& phi, const Matrix& h_cur) {
        return objective_supervised(phi, frames_mix, train.frames_sp, train.frames_no,
                                    h_cur.topRows(n_sp), h_cur.bottomRows(n_no), shp);
    };

    res.objective_history.push_back(objective(res.phi, h));
    double gamma_seed = cfg.line_search.gamma_init;
    for (int i = 0; i < cfg.max_iters; ++i) {
        const Spectrogram v = power_spectrogram(res.phi, frames_mix);
        const Matrix w = (res.phi.matrix * y_tr).array().square();
        h = update_h_supervised(v, w, h, shp, n_sp, n_no);

        if (cfg.mode == Mode::TLNMF) {
            const Matrix grad = gradient_phi_supervised(res.phi, frames_mix, frames_tr, h);
            const Matrix omega = natural_gradient(res.phi, grad);
            if (omega.squaredNorm() > 0.0) {
                LineSearchConfig ls = cfg.line_search;
                ls.gamma_init = gamma_seed;
                auto eval = [&](const OrthoTransform& candidate) {
                    return objective(candidate, h);
                };
                const LineSearchResult step = armijo_step(res.phi, omega, eval, ls);
                if (step.gamma > 0.0) {
                    res.phi = normalize_sign(step.phi);
                    gamma_seed = step.gamma * cfg.line_search.grow;
                }
            }
        }

        const double c_prev = res.objective_history.back();
        const double c = objective(res.phi, h);
        res.objective_history.push_back(c);
        res.epsilon_history.push_back(c_prev != 0.0 ? (c_prev - c) / c_prev : 0.0);
        ++res.iterations;
        if (res.epsilon_history.back() <= shp.tau) break;
    }

    res.h_sp = h.topRows(n_sp);
    res.h_no = h.bottomRows(n_no);
    const Matrix w_sp = (res.phi.matrix * train.frames_sp.data).array().square();
    const Matrix w_no = (res.phi.matrix * train.frames_no.data).array().square();
    res.vhat_sp = w_sp * res.h_sp;
    res.vhat_no = w_no * res.h_no;
    std::tie(res.est_sp, res.est_no) =
        wiener_reconstruct(res.phi, frames_mix, res.vhat_sp, res.vhat_no, total_len, sample_rate);
    return res;
}

} // namespace tlnmf

#endif
