#ifndef TLNMF_CSV_HPP
#define TLNMF_CSV_HPP

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "tlnmf/driver.hpp"
#include "tlnmf/types.hpp"

namespace tlnmf {

namespace detail {

/// Shortest round-trippable decimal form; locale-independent and
/// byte-stable across runs.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline void write_matrix_csv(const Matrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write CSV: " + path);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << detail::format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("I/O failure writing CSV: " + path);
}

/// Frame-matrix export: header line "M,N,hop", then the matrix row-major.
inline void write_frames_csv(const FrameMatrix& fm, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write CSV: " + path);
    out << fm.rows() << ',' << fm.cols() << ',' << fm.hop << '\n';
    for (Index i = 0; i < fm.rows(); ++i) {
        for (Index j = 0; j < fm.cols(); ++j) {
            if (j) out << ',';
            out << detail::format_double(fm.data(i, j));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("I/O failure writing CSV: " + path);
}

/// history.csv with columns iteration,objective,epsilon. Row 0 is the
/// initial objective with epsilon left empty.
inline void write_history_csv(const std::vector<double>& objectives,
                              const std::vector<double>& epsilons, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write CSV: " + path);
    out << "iteration,objective,epsilon\n";
    for (std::size_t i = 0; i < objectives.size(); ++i) {
        out << i << ',' << detail::format_double(objectives[i]) << ',';
        if (i > 0 && i - 1 < epsilons.size()) out << detail::format_double(epsilons[i - 1]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("I/O failure writing CSV: " + path);
}

/// Checkpoint bundle: phi.csv, w.csv, h.csv, history.csv in `dir`.
inline void write_checkpoint(const RunState& st, const std::string& dir) {
    write_matrix_csv(st.phi.matrix, dir + "/phi.csv");
    write_matrix_csv(st.factorization.w, dir + "/w.csv");
    write_matrix_csv(st.factorization.h, dir + "/h.csv");
    write_history_csv(st.objective_history, st.epsilon_history, dir + "/history.csv");
}

inline void write_atom_scores_csv(const std::vector<AtomScore>& scores, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write CSV: " + path);
    out << "rank,atom,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i)
        out << i << ',' << scores[i].atom << ',' << detail::format_double(scores[i].score) << '\n';
    if (!out) throw std::runtime_error("I/O failure writing CSV: " + path);
}

} // namespace tlnmf

#endif
