#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "tlnmf/tlnmf.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

int log_level() {
    const char* v = std::getenv("TLNMF_LOG");
    return v ? std::atoi(v) : 0;
}

void log_info(const std::string& msg) {
    if (log_level() > 0) std::cerr << "tlnmf: " << msg << "\n";
}

struct FramingFlags {
    double frame_ms = 40.0;
    double overlap = 0.5;

    void attach(CLI::App* cmd) {
        cmd->add_option("--frame-ms", frame_ms, "Frame length in milliseconds")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--overlap", overlap, "Overlap fraction in [0,1)")
            ->check(CLI::Range(0.0, 0.999));
    }

    tlnmf::FramingConfig config() const { return {frame_ms, overlap, tlnmf::WindowKind::SineBell}; }
};

tlnmf::Signal load_wav(const std::string& path) {
    try {
        return tlnmf::read_wav(path, /*downmix=*/true);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("I/O: ") + e.what());
    }
}

bool is_io_error(const std::exception& e) {
    const std::string msg = e.what();
    return msg.find("I/O") != std::string::npos || msg.find("cannot write") != std::string::npos ||
           msg.find("cannot open") != std::string::npos;
}

// ---------------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------------

struct DecomposeArgs {
    std::string input, outdir = ".";
    int rank = 10;
    double lambda = 0.0, tau = 1e-7;
    std::uint64_t seed = 0;
    std::string mode = "tlnmf";
    int max_iters = 50000;
    int top_atoms = 6;
    bool dump_frames = false;
    FramingFlags framing;
};

int run_decompose(const DecomposeArgs& a) {
    using namespace tlnmf;
    Signal sig = load_wav(a.input);
    FrameMatrix frames = frame(sig, a.framing.config());
    log_info("framed " + std::to_string(sig.samples.size()) + " samples into M=" +
             std::to_string(frames.frame_len) + " N=" + std::to_string(frames.cols()));

    RunConfig cfg;
    cfg.hp = {a.rank, a.lambda, a.tau};
    cfg.max_iters = a.max_iters;
    cfg.mode = a.mode == "dct" ? Mode::FixedDCT : Mode::TLNMF;
    cfg.seed = a.seed;

    RunState st = run(frames, cfg);
    log_info("stopped after " + std::to_string(st.iteration) + " iterations, objective " +
             std::to_string(st.objective_history.back()));

    std::filesystem::create_directories(a.outdir);
    write_checkpoint(st, a.outdir);
    if (a.dump_frames) write_frames_csv(frames, a.outdir + "/frames.csv");

    const Index top = std::min<Index>(a.top_atoms, st.phi.dim());
    auto ranked = rank_atoms(st, frames, top);
    write_atom_scores_csv(ranked, a.outdir + "/atoms_top" + std::to_string(top) + ".csv");

    Matrix atoms(top, st.phi.dim());
    for (Index i = 0; i < top; ++i)
        atoms.row(i) = st.phi.matrix.row(ranked[static_cast<std::size_t>(i)].atom);
    write_matrix_csv(atoms, a.outdir + "/atoms_top" + std::to_string(top) + "_rows.csv");

    // each ranked atom rendered as a one-frame WAV for listening
    for (Index i = 0; i < top; ++i) {
        Vector atom = atoms.row(i);
        const double peak = atom.cwiseAbs().maxCoeff();
        Signal snippet;
        snippet.sample_rate = sig.sample_rate;
        snippet.samples.resize(static_cast<std::size_t>(atom.size()));
        for (Index t = 0; t < atom.size(); ++t)
            snippet.samples[static_cast<std::size_t>(t)] =
                peak > 0.0 ? 0.9 * atom(t) / peak : 0.0;
        write_wav(snippet, a.outdir + "/atom_" + std::to_string(i) + ".wav");
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// separate
// ---------------------------------------------------------------------------

struct SeparateArgs {
    std::string mixture, speech_train, noise_train, outdir = ".";
    double lambda_sp = 0.0, lambda_no = 0.0, tau = 1e-7;
    std::uint64_t seed = 0;
    std::string mode = "tlnmf";
    int max_iters = 50000;
    std::vector<std::string> references;
    bool dump_matrices = false;
    FramingFlags framing;
};

int run_separate(const SeparateArgs& a) {
    using namespace tlnmf;
    Signal mix_sig = load_wav(a.mixture);
    Signal sp_sig = load_wav(a.speech_train);
    Signal no_sig = load_wav(a.noise_train);

    const FramingConfig fcfg = a.framing.config();
    FrameMatrix mix = frame(mix_sig, fcfg);
    TrainingSet train{frame(sp_sig, fcfg), frame(no_sig, fcfg)};

    RunConfig cfg;
    cfg.max_iters = a.max_iters;
    cfg.mode = a.mode == "dct" ? Mode::FixedDCT : Mode::TLNMF;
    cfg.seed = a.seed;

    SupervisedHyperparams shp{a.lambda_sp, a.lambda_no, a.tau};
    SeparationResult res =
        run_supervised(mix, train, shp, cfg, static_cast<Index>(mix_sig.samples.size()),
                       mix_sig.sample_rate);
    log_info("stopped after " + std::to_string(res.iterations) + " iterations");

    std::filesystem::create_directories(a.outdir);
    write_wav(res.est_sp, a.outdir + "/est_sp.wav");
    write_wav(res.est_no, a.outdir + "/est_no.wav");
    write_history_csv(res.objective_history, res.epsilon_history, a.outdir + "/history.csv");
    if (a.dump_matrices) {
        write_matrix_csv(res.vhat_sp, a.outdir + "/vhat_sp.csv");
        write_matrix_csv(res.vhat_no, a.outdir + "/vhat_no.csv");
        Matrix total = (res.vhat_sp + res.vhat_no).cwiseMax(1e-300);
        write_matrix_csv(res.vhat_sp.array() / total.array(), a.outdir + "/mask_sp.csv");
    }

    if (!a.references.empty()) {
        if (a.references.size() != 2)
            throw CLI::ValidationError("--references", "expected exactly two reference WAVs");
        std::vector<Signal> refs{load_wav(a.references[0]), load_wav(a.references[1])};
        for (auto& r : refs) r.samples.resize(mix_sig.samples.size(), 0.0);
        std::ofstream out(a.outdir + "/scores.csv");
        out << "method,source,sdr,sir,sar\n";
        const std::string method = a.mode;
        const char* names[2] = {"sp", "no"};
        const Signal* est[2] = {&res.est_sp, &res.est_no};
        for (std::size_t k = 0; k < 2; ++k) {
            BssScores s = bss_eval(*est[k], refs, k);
            out << method << ',' << names[k] << ',' << detail::format_double(s.sdr) << ','
                << detail::format_double(s.sir) << ',' << detail::format_double(s.sar) << '\n';
        }
        if (!out) throw std::runtime_error("I/O: cannot write scores.csv");
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// mix
// ---------------------------------------------------------------------------

struct MixArgs {
    std::string speech, noise, outdir = ".";
    double snr_db = 0.0;
    bool strict = false;
};

int run_mix(const MixArgs& a) {
    using namespace tlnmf;
    Signal sp = load_wav(a.speech);
    Signal no = load_wav(a.noise);

    if (no.samples.size() != sp.samples.size()) {
        if (a.strict) throw CLI::ValidationError("--strict", "input lengths differ");
        if (no.samples.empty()) throw CLI::ValidationError("noise", "empty noise file");
        std::vector<double> tiled(sp.samples.size());
        for (std::size_t i = 0; i < tiled.size(); ++i)
            tiled[i] = no.samples[i % no.samples.size()];
        no.samples = std::move(tiled);
    }

    double p_sp = 0.0, p_no = 0.0;
    for (double x : sp.samples) p_sp += x * x;
    for (double x : no.samples) p_no += x * x;
    if (p_sp == 0.0) throw std::runtime_error("numerical: zero-power reference");
    if (p_no == 0.0) throw std::runtime_error("numerical: zero-power noise");

    // gain scaling noise power to speech_power / 10^(snr/10)
    const double gain = std::sqrt(p_sp / (p_no * std::pow(10.0, a.snr_db / 10.0)));
    log_info("noise gain " + std::to_string(gain));

    Signal scaled_no = no;
    for (auto& x : scaled_no.samples) x *= gain;
    Signal mixture = sp;
    for (std::size_t i = 0; i < mixture.samples.size(); ++i)
        mixture.samples[i] += scaled_no.samples[i];

    // keep the stems/mixture within [-1, 1] so 16-bit export cannot clip
    double peak = 0.0;
    for (double x : mixture.samples) peak = std::max(peak, std::abs(x));
    const double norm = peak > 0.99 ? 0.99 / peak : 1.0;
    for (auto& x : mixture.samples) x *= norm;
    for (auto& x : scaled_no.samples) x *= norm;
    Signal scaled_sp = sp;
    for (auto& x : scaled_sp.samples) x *= norm;

    std::filesystem::create_directories(a.outdir);
    write_wav(mixture, a.outdir + "/mixture.wav");
    write_wav(scaled_sp, a.outdir + "/ref_sp.wav");
    write_wav(scaled_no, a.outdir + "/ref_no.wav");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transform-learning NMF: decomposition, supervised separation, mixing"};
    app.set_config("--config", "", "Flat key=value config file; flags override");
    app.require_subcommand(1);

    DecomposeArgs da;
    CLI::App* dec = app.add_subcommand("decompose", "Factorize a WAV with TL-NMF or fixed-DCT IS-NMF");
    dec->add_option("input", da.input, "Input WAV")->required();
    dec->add_option("-o,--outdir", da.outdir, "Output directory");
    dec->add_option("--rank", da.rank, "Factorization rank K")->check(CLI::PositiveNumber);
    dec->add_option("--lambda", da.lambda, "Sparsity weight")->check(CLI::NonNegativeNumber);
    dec->add_option("--tau", da.tau, "Stopping threshold")->check(CLI::PositiveNumber);
    dec->add_option("--seed", da.seed, "RNG seed");
    dec->add_option("--mode", da.mode, "tlnmf or dct")->check(CLI::IsMember({"tlnmf", "dct"}));
    dec->add_option("--max-iters", da.max_iters)->check(CLI::PositiveNumber);
    dec->add_option("--top-atoms", da.top_atoms)->check(CLI::PositiveNumber);
    dec->add_flag("--dump-frames", da.dump_frames, "Also export frames.csv");
    da.framing.attach(dec);

    SeparateArgs sa;
    CLI::App* sep = app.add_subcommand("separate", "Supervised separation with Wiener reconstruction");
    sep->add_option("mixture", sa.mixture, "Mixture WAV")->required();
    sep->add_option("--speech-train", sa.speech_train, "Speech training WAV")->required();
    sep->add_option("--noise-train", sa.noise_train, "Noise training WAV")->required();
    sep->add_option("-o,--outdir", sa.outdir, "Output directory");
    sep->add_option("--lambda-sp", sa.lambda_sp)->check(CLI::NonNegativeNumber);
    sep->add_option("--lambda-no", sa.lambda_no)->check(CLI::NonNegativeNumber);
    sep->add_option("--tau", sa.tau)->check(CLI::PositiveNumber);
    sep->add_option("--seed", sa.seed);
    sep->add_option("--mode", sa.mode)->check(CLI::IsMember({"tlnmf", "dct"}));
    sep->add_option("--max-iters", sa.max_iters)->check(CLI::PositiveNumber);
    sep->add_option("--references", sa.references, "Reference WAVs (speech, noise) for scoring");
    sep->add_flag("--dump-matrices", sa.dump_matrices, "Export Vhat and mask CSVs");
    sa.framing.attach(sep);

    MixArgs ma;
    CLI::App* mix = app.add_subcommand("mix", "Mix speech and noise at a target SNR");
    mix->add_option("speech", ma.speech, "Speech WAV")->required();
    mix->add_option("noise", ma.noise, "Noise WAV")->required();
    mix->add_option("-o,--outdir", ma.outdir, "Output directory");
    mix->add_option("--snr-db", ma.snr_db, "Target speech-to-noise ratio in dB")->required();
    mix->add_flag("--strict", ma.strict, "Error on length mismatch instead of tiling");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (dec->parsed()) return run_decompose(da);
        if (sep->parsed()) return run_separate(sa);
        return run_mix(ma);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "tlnmf: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "tlnmf: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "tlnmf: " << e.what() << "\n";
        return is_io_error(e) ? kExitIo : kExitNumerical;
    }
}
