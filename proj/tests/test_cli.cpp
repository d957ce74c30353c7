#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "tlnmf/signal_io.hpp"
#include "test_helpers.hpp"

using namespace tlnmf;

namespace {

std::string cli() {
    const char* p = std::getenv("TLNMF_CLI");
    REQUIRE(p != nullptr);
    return p;
}

int run_cli(const std::string& args) {
    const int status = std::system((cli() + " " + args + " >/dev/null 2>&1").c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

double power(const Signal& s) {
    double p = 0.0;
    for (double x : s.samples) p += x * x;
    return p;
}

Signal tone(double freq, std::size_t len, int rate, double amp) {
    Signal s;
    s.sample_rate = rate;
    s.samples.resize(len);
    for (std::size_t t = 0; t < len; ++t)
        s.samples[t] = amp * std::sin(2.0 * M_PI * freq * static_cast<double>(t) / rate);
    return s;
}

} // namespace

TEST_CASE("cli: missing input file exits with the I/O code") {
    CHECK(run_cli("decompose /nonexistent/input.wav --rank 2") == 3);
}

TEST_CASE("cli: bad flag values exit with the config code") {
    CHECK(run_cli("decompose whatever.wav --rank -3") == 2);
    CHECK(run_cli("decompose whatever.wav --mode fourier") == 2);
    CHECK(run_cli("mix a.wav b.wav") == 2);  // --snr-db is required
}

TEST_CASE("cli: mix hits the requested SNR and writes all three stems") {
    const std::string dir = test::temp_path("cli_mix");
    std::filesystem::create_directories(dir);
    write_wav(tone(440.0, 4000, 8000, 0.5), dir + "/sp.wav");
    write_wav(tone(1333.0, 4000, 8000, 0.5), dir + "/no.wav");

    for (double snr : {-5.0, 0.0, 10.0}) {
        REQUIRE(run_cli("mix " + dir + "/sp.wav " + dir + "/no.wav -o " + dir +
                        " --snr-db " + std::to_string(snr)) == 0);
        Signal sp = read_wav(dir + "/ref_sp.wav");
        Signal no = read_wav(dir + "/ref_no.wav");
        Signal mix = read_wav(dir + "/mixture.wav");
        REQUIRE(mix.samples.size() == sp.samples.size());
        const double measured = 10.0 * std::log10(power(sp) / power(no));
        // 16-bit quantisation limits the attainable accuracy
        CHECK(measured == Catch::Approx(snr).margin(0.05));
        // stems still sum to the mixture after common peak normalisation
        double max_err = 0.0;
        for (std::size_t t = 0; t < mix.samples.size(); ++t)
            max_err = std::max(max_err,
                               std::abs(mix.samples[t] - sp.samples[t] - no.samples[t]));
        CHECK(max_err <= 2.5 / 32768.0);
    }
}

TEST_CASE("cli: mix --strict rejects mismatched lengths, silence is a numerical error") {
    const std::string dir = test::temp_path("cli_mix_err");
    std::filesystem::create_directories(dir);
    write_wav(tone(440.0, 4000, 8000, 0.5), dir + "/sp.wav");
    write_wav(tone(700.0, 1000, 8000, 0.5), dir + "/short.wav");
    Signal silence;
    silence.sample_rate = 8000;
    silence.samples.assign(4000, 0.0);
    write_wav(silence, dir + "/silence.wav");

    CHECK(run_cli("mix " + dir + "/sp.wav " + dir + "/short.wav -o " + dir +
                  " --snr-db 0 --strict") == 2);
    // without --strict the shorter noise is tiled instead
    CHECK(run_cli("mix " + dir + "/sp.wav " + dir + "/short.wav -o " + dir + " --snr-db 0") == 0);
    CHECK(run_cli("mix " + dir + "/silence.wav " + dir + "/sp.wav -o " + dir + " --snr-db 0") == 4);
}

TEST_CASE("cli: separate with references writes estimates and a scores table") {
    const std::string dir = test::temp_path("cli_sep");
    std::filesystem::create_directories(dir);
    const int rate = 8000;
    write_wav(tone(200.0, 6000, rate, 0.4), dir + "/sp.wav");
    write_wav(tone(2900.0, 6000, rate, 0.4), dir + "/no.wav");
    write_wav(tone(200.0, 2000, rate, 0.4), dir + "/sp_tr.wav");
    write_wav(tone(2900.0, 2000, rate, 0.4), dir + "/no_tr.wav");
    REQUIRE(run_cli("mix " + dir + "/sp.wav " + dir + "/no.wav -o " + dir + " --snr-db 0") == 0);

    REQUIRE(run_cli("separate " + dir + "/mixture.wav --speech-train " + dir +
                    "/sp_tr.wav --noise-train " + dir + "/no_tr.wav -o " + dir +
                    " --mode dct --max-iters 100 --frame-ms 8 --references " + dir +
                    "/ref_sp.wav " + dir + "/ref_no.wav") == 0);

    CHECK(std::filesystem::exists(dir + "/est_sp.wav"));
    CHECK(std::filesystem::exists(dir + "/est_no.wav"));
    CHECK(std::filesystem::exists(dir + "/history.csv"));

    std::ifstream scores(dir + "/scores.csv");
    REQUIRE(scores.good());
    std::string header, row_sp, row_no;
    std::getline(scores, header);
    std::getline(scores, row_sp);
    std::getline(scores, row_no);
    CHECK(header == "method,source,sdr,sir,sar");
    CHECK(row_sp.rfind("dct,sp,", 0) == 0);
    CHECK(row_no.rfind("dct,no,", 0) == 0);

    // two pure tones in disjoint bands separate almost perfectly
    const double sir_sp = std::stod(row_sp.substr(row_sp.find(",sp,") + 4));
    CHECK(sir_sp >= 20.0);
}
