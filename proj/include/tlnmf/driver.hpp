#ifndef TLNMF_DRIVER_HPP
#define TLNMF_DRIVER_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "tlnmf/manifold.hpp"
#include "tlnmf/objective.hpp"
#include "tlnmf/random.hpp"
#include "tlnmf/transform.hpp"
#include "tlnmf/updates.hpp"

namespace tlnmf {

enum class Mode { TLNMF, FixedDCT };

struct RunConfig {
    Hyperparams hp;
    int max_iters = 50000;
    Mode mode = Mode::TLNMF;
    LineSearchConfig line_search;
    std::uint64_t seed = 0;
};

struct RunState {
    OrthoTransform phi;
    Factorization factorization;
    std::vector<double> objective_history;  // [0] is the initial objective
    std::vector<double> epsilon_history;
    int iteration = 0;
    std::uint64_t rng_seed = 0;
    double gamma_seed = 1.0;  // line-search warm start, grown after accepted steps
};

/// Random init: W, H ~ U(1e-6, 1) with W columns l1-normalized; Phi random
/// orthogonal in TLNMF mode, the DCT in FixedDCT mode.
inline RunState init_state(const FrameMatrix& frames, const RunConfig& cfg) {
    const Index m_dim = frames.rows();
    const Index n = frames.cols();
    RunState st;
    st.rng_seed = cfg.seed;
    st.gamma_seed = cfg.line_search.gamma_init;

    Rng rng(Rng::derive(cfg.seed, 0));
    st.factorization.w = rng.uniform_matrix(m_dim, cfg.hp.rank, 1e-6, 1.0);
    st.factorization.h = rng.uniform_matrix(cfg.hp.rank, n, 1e-6, 1.0);
    st.factorization = normalize_columns(st.factorization);

    st.phi = cfg.mode == Mode::TLNMF ? random_orthogonal(m_dim, Rng::derive(cfg.seed, 1))
                                     : dct_matrix(m_dim);
    st.objective_history.push_back(
        objective_tlnmf(st.phi, frames, st.factorization.w, st.factorization.h, cfg.hp));
    return st;
}

/// One block-coordinate sweep: H, W, column normalization, then (TLNMF
/// mode) a natural-gradient Armijo step on Phi followed by sign
/// normalization. Appends the new objective and the relative decrease
/// epsilon = (C_prev - C) / C_prev.
inline void iterate(RunState& st, const FrameMatrix& frames, const RunConfig& cfg) {
    const Index m_dim = frames.rows();
    const Spectrogram v = power_spectrogram(st.phi, frames);
    Factorization& f = st.factorization;

    f.h = update_h(v, f.w, f.h,
                   uniform_penalty(m_dim, cfg.hp.rank, frames.cols(), cfg.hp.lambda));
    f.w = update_w(v, f.w, f.h,
                   cfg.hp.lambda * static_cast<double>(m_dim) / static_cast<double>(cfg.hp.rank));
    f = normalize_columns(f);

    if (cfg.mode == Mode::TLNMF) {
        const Matrix vhat = (f.w * f.h).cwiseMax(v.floor);
        const Matrix grad = gradient_phi(st.phi, frames, vhat);
        const Matrix omega = natural_gradient(st.phi, grad);
        if (omega.squaredNorm() > 0.0) {
            LineSearchConfig ls = cfg.line_search;
            ls.gamma_init = st.gamma_seed;
            auto eval = [&](const OrthoTransform& candidate) {
                return objective_tlnmf(candidate, frames, f.w, f.h, cfg.hp);
            };
            const LineSearchResult step = armijo_step(st.phi, omega, eval, ls);
            if (step.gamma > 0.0) {
                st.phi = normalize_sign(step.phi);
                st.gamma_seed = step.gamma * cfg.line_search.grow;
            }
            // gamma == 0: Phi treated as converged for this iteration
        }
    }

    const double c_prev = st.objective_history.back();
    const double c = objective_tlnmf(st.phi, frames, f.w, f.h, cfg.hp);
    st.objective_history.push_back(c);
    st.epsilon_history.push_back(c_prev != 0.0 ? (c_prev - c) / c_prev : 0.0);
    ++st.iteration;
}

/// Runs block-coordinate descent until the relative decrease falls to tau
/// or max_iters is reached.
inline RunState run(const FrameMatrix& frames, const RunConfig& cfg) {
    RunState st = init_state(frames, cfg);
    for (int i = 0; i < cfg.max_iters; ++i) {
        iterate(st, frames, cfg);
        if (st.epsilon_history.back() <= cfg.hp.tau) break;
    }
    return st;
}

struct AtomScore {
    Index atom = 0;
    double score = 0.0;  // ||phi_m Y||_2
};

/// Atom indices sorted by descending contribution ||phi_m Y||_2, ties
/// broken by lower index.
inline std::vector<AtomScore> rank_atoms(const RunState& st, const FrameMatrix& frames,
                                         Index top) {
    require(top <= st.phi.dim(), "rank_atoms: top exceeds transform dimension");
    const Matrix x = st.phi.matrix * frames.data;
    std::vector<AtomScore> scores(static_cast<std::size_t>(st.phi.dim()));
    for (Index m = 0; m < st.phi.dim(); ++m)
        scores[static_cast<std::size_t>(m)] = {m, x.row(m).norm()};
    std::stable_sort(scores.begin(), scores.end(), [](const AtomScore& a, const AtomScore& b) {
        return a.score > b.score;
    });
    scores.resize(static_cast<std::size_t>(top));
    return scores;
}

} // namespace tlnmf

#endif
