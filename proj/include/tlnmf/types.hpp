#ifndef TLNMF_TYPES_HPP
#define TLNMF_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tlnmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Mono sample sequence, amplitudes nominally in [-1, 1].
struct Signal {
    std::vector<double> samples;
    int sample_rate = 0;
};

/// Windowed, overlapping short-time frames; columns are frames.
struct FrameMatrix {
    Matrix data;        // M x N
    Index frame_len = 0;
    Index hop = 0;

    Index rows() const { return data.rows(); }
    Index cols() const { return data.cols(); }
};

enum class WindowKind { SineBell };

struct FramingConfig {
    double frame_ms = 40.0;
    double overlap_fraction = 0.5;
    WindowKind window = WindowKind::SineBell;
};

/// M x M real matrix with orthonormal rows/columns; rows are atoms.
struct OrthoTransform {
    Matrix matrix;

    Index dim() const { return matrix.rows(); }
};

/// Entrywise-floored power spectrogram |Phi Y|^2.
struct Spectrogram {
    Matrix values;      // M x N, all entries >= floor
    double floor = 0.0;
};

/// Nonnegative dictionary/activation pair.
struct Factorization {
    Matrix w;           // M x K
    Matrix h;           // K x N
};

struct Hyperparams {
    Index rank = 10;     // K
    double lambda = 0.0;
    double tau = 1e-7;
};

struct SupervisedHyperparams {
    double lambda_sp = 0.0;
    double lambda_no = 0.0;
    double tau = 1e-7;
};

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace tlnmf

#endif
