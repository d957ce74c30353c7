#ifndef TLNMF_SIGNAL_IO_HPP
#define TLNMF_SIGNAL_IO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "tlnmf/types.hpp"

namespace tlnmf {

// ---------------------------------------------------------------------------
// WAV I/O: PCM 16-bit little-endian, mono.
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void write_u32(std::ostream& os, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    os.write(b, 4);
}

inline void write_u16(std::ostream& os, std::uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    os.write(b, 2);
}

} // namespace detail

/// Reads a 16-bit PCM WAV file. Multichannel input is refused unless
/// `downmix` is set, in which case channels are averaged.
inline Signal read_wav(const std::string& path, bool downmix = false) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open WAV file: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw std::runtime_error("corrupt WAV header: " + path);

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::size_t data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        std::uint32_t chunk_len = detail::read_u32(bytes.data() + pos + 4);
        const unsigned char* body = bytes.data() + pos + 8;
        if (pos + 8 + chunk_len > bytes.size()) throw std::runtime_error("corrupt WAV chunk: " + path);
        if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0) {
            if (chunk_len < 16) throw std::runtime_error("corrupt fmt chunk: " + path);
            format = detail::read_u16(body);
            channels = detail::read_u16(body + 2);
            rate = detail::read_u32(body + 4);
            bits = detail::read_u16(body + 14);
        } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
            data = body;
            data_len = chunk_len;
        }
        pos += 8 + chunk_len + (chunk_len & 1);
    }

    if (format != 1 || bits != 16)
        throw std::runtime_error("unsupported encoding (need 16-bit PCM): " + path);
    if (channels == 0 || data == nullptr) throw std::runtime_error("corrupt WAV file: " + path);
    if (channels > 1 && !downmix)
        throw std::runtime_error("multichannel WAV (pass downmix to average channels): " + path);

    const std::size_t n_frames = data_len / (2 * channels);
    Signal s;
    s.sample_rate = static_cast<int>(rate);
    s.samples.resize(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
        double acc = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c) {
            const unsigned char* p = data + 2 * (i * channels + c);
            auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
            acc += static_cast<double>(v);
        }
        s.samples[i] = acc / channels / 32768.0;
    }
    if (s.sample_rate <= 0) throw std::runtime_error("corrupt WAV sample rate: " + path);
    return s;
}

/// Writes a mono 16-bit PCM WAV file. Samples are clamped to [-32768, 32767].
inline void write_wav(const Signal& s, const std::string& path) {
    for (double x : s.samples)
        if (!std::isfinite(x)) throw std::invalid_argument("write_wav: non-finite sample");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write WAV file: " + path);

    const std::uint32_t n = static_cast<std::uint32_t>(s.samples.size());
    const std::uint32_t data_len = 2 * n;
    out.write("RIFF", 4);
    detail::write_u32(out, 36 + data_len);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    detail::write_u32(out, 16);
    detail::write_u16(out, 1);  // PCM
    detail::write_u16(out, 1);  // mono
    detail::write_u32(out, static_cast<std::uint32_t>(s.sample_rate));
    detail::write_u32(out, static_cast<std::uint32_t>(s.sample_rate) * 2);
    detail::write_u16(out, 2);
    detail::write_u16(out, 16);
    out.write("data", 4);
    detail::write_u32(out, data_len);
    for (double x : s.samples) {
        double scaled = std::round(x * 32768.0);
        scaled = std::clamp(scaled, -32768.0, 32767.0);
        auto v = static_cast<std::int16_t>(scaled);
        char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
        out.write(b, 2);
    }
    if (!out) throw std::runtime_error("I/O failure writing WAV: " + path);
}

// ---------------------------------------------------------------------------
// Short-time framing and weighted overlap-add.
// ---------------------------------------------------------------------------

/// Sine-bell analysis window, w(m) = sin(pi (m + 1/2) / M).
inline Vector sine_bell(Index m_len) {
    Vector w(m_len);
    for (Index m = 0; m < m_len; ++m)
        w(m) = std::sin(M_PI * (static_cast<double>(m) + 0.5) / static_cast<double>(m_len));
    return w;
}

/// Frames a raw sample vector with explicit frame length and hop.
/// The trailing partial frame, if any, is zero-padded.
inline FrameMatrix frame_signal(const std::vector<double>& samples, Index m_len, Index hop) {
    require(m_len >= 1 && hop >= 1, "frame_signal: need frame_len >= 1 and hop >= 1");
    const Index t_len = static_cast<Index>(samples.size());
    if (t_len < m_len) throw std::invalid_argument("frame_signal: signal shorter than one frame");

    Index n_full = (t_len - m_len) / hop + 1;
    const bool tail = (t_len - m_len) % hop != 0;
    const Index n = n_full + (tail ? 1 : 0);

    const Vector w = sine_bell(m_len);
    FrameMatrix fm;
    fm.frame_len = m_len;
    fm.hop = hop;
    fm.data = Matrix::Zero(m_len, n);
    for (Index j = 0; j < n; ++j) {
        const Index start = j * hop;
        for (Index i = 0; i < m_len && start + i < t_len; ++i)
            fm.data(i, j) = w(i) * samples[static_cast<std::size_t>(start + i)];
    }
    return fm;
}

inline FrameMatrix frame(const Signal& s, const FramingConfig& cfg) {
    require(cfg.frame_ms > 0.0, "frame: frame_ms must be positive");
    require(cfg.overlap_fraction >= 0.0 && cfg.overlap_fraction < 1.0,
            "frame: overlap_fraction must lie in [0, 1)");
    const Index m_len =
        static_cast<Index>(std::lround(cfg.frame_ms * s.sample_rate / 1000.0));
    const Index hop =
        static_cast<Index>(std::lround(static_cast<double>(m_len) * (1.0 - cfg.overlap_fraction)));
    require(m_len >= 2, "frame: resulting frame length too small");
    return frame_signal(s.samples, m_len, std::max<Index>(hop, 1));
}

/// Weighted overlap-add: applies the sine bell a second time as synthesis
/// window and sums shifted columns. With 50% overlap the squared sine bell
/// satisfies constant overlap-add, so interior samples reconstruct exactly.
inline Signal overlap_add(const FrameMatrix& frames, Index total_len, int sample_rate = 0) {
    require(frames.hop >= 1 && frames.frame_len == frames.rows(),
            "overlap_add: missing hop/window metadata");
    const Vector w = sine_bell(frames.frame_len);
    Signal out;
    out.sample_rate = sample_rate;
    out.samples.assign(static_cast<std::size_t>(total_len), 0.0);
    for (Index j = 0; j < frames.cols(); ++j) {
        const Index start = j * frames.hop;
        for (Index i = 0; i < frames.frame_len; ++i) {
            const Index t = start + i;
            if (t >= total_len) break;
            out.samples[static_cast<std::size_t>(t)] += w(i) * frames.data(i, j);
        }
    }
    return out;
}

} // namespace tlnmf

#endif
