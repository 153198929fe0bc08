#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bandsparse/dict.hpp"
#include "bandsparse/sim.hpp"

namespace fs = std::filesystem;
using namespace bandsparse;

namespace {

const std::string kCli = BANDSPARSE_CLI_PATH;

int run(const std::string& args, std::string* output = nullptr) {
    const std::string cmd = kCli + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string text;
    char buf[512];
    while (fgets(buf, sizeof buf, pipe)) text += buf;
    const int status = pclose(pipe);
    if (output) *output = text;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "bandsparse_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string write_tone_csv(double f, std::size_t n) {
    const SamplingScheme scheme = SamplingScheme::uniform(n);
    SignalRealization truth;
    truth.frequencies = {{f}};
    truth.amplitudes = {cxd(1.0, 0.5)};
    const CVector y = synthesize(truth, scheme);
    const fs::path path = scratch_dir() / "tone.csv";
    std::ofstream out(path);
    out << "time,re,im\n";
    for (std::size_t i = 0; i < n; ++i)
        out << scheme.times[0][i] << ',' << y[i].real() << ',' << y[i].imag() << '\n';
    return path.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("estimate: single on-grid tone lands in the table") {
    const std::string input = write_tone_csv(0.375, 64);
    const fs::path out = scratch_dir() / "est";
    std::string text;
    const int rc = run("estimate --input " + input + " --out " + out.string() +
                           " --stages 8,8 --alpha 0.3 --alpha 0.3",
                       &text);
    CHECK(rc == 0);
    CHECK(text.find("model order: 1") != std::string::npos);
    const std::string table = slurp(out / "estimates.csv");
    CHECK(table.find("component") != std::string::npos);
    CHECK(table.find("0.37") != std::string::npos);  // midpoint near 0.375
    CHECK(fs::exists(out / "zoom_result.json"));
    CHECK(fs::exists(out / "effective_config.json"));
}

TEST_CASE("estimate: empty input exits 2 with a diagnostic") {
    const fs::path empty = scratch_dir() / "empty.csv";
    std::ofstream(empty).close();
    std::string text;
    const int rc = run("estimate --input " + empty.string() + " --stages 8,8", &text);
    CHECK(rc == 2);
    CHECK(text.find("error") != std::string::npos);
}

TEST_CASE("estimate: missing input file exits 2") {
    std::string text;
    const int rc = run("estimate --input /nonexistent.csv --stages 8", &text);
    CHECK(rc == 2);
}

TEST_CASE("estimate: spice solver dispatch") {
    const std::string input = write_tone_csv(0.25, 32);
    std::string text;
    const int rc = run("estimate --input " + input + " --stages 8,4 --solver spice", &text);
    CHECK(rc == 0);
    CHECK(text.find("model order") != std::string::npos);
}

TEST_CASE("scan: fixture behaves like the figure pair; zero input scans to zero") {
    const std::string input = write_tone_csv(0.51, 100);
    const fs::path out = scratch_dir() / "scan";
    const int rc = run("scan --input " + input + " --nb 50 --wb 50 --normalize --out " +
                       out.string());
    CHECK(rc == 0);
    const std::string csv = slurp(out / "scan.csv");
    CHECK(csv.find("narrowband") != std::string::npos);
    CHECK(csv.find("wideband") != std::string::npos);

    // zero series
    const fs::path zero = scratch_dir() / "zero.csv";
    {
        std::ofstream z(zero);
        z << "time,re,im\n";
        for (int i = 0; i < 16; ++i) z << i << ",0,0\n";
    }
    std::string text;
    const int rc2 = run("scan --input " + zero.string() + " --nb 8", &text);
    CHECK(rc2 == 0);
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        CHECK(line.substr(line.rfind(',') + 1) == "0");
    }
}

TEST_CASE("scan: dimension problems exit 2") {
    std::string text;
    const int rc = run("scan --input /nonexistent.csv --nb 8", &text);
    CHECK(rc == 2);
}

TEST_CASE("costs: ratio, budget, recommend") {
    std::string text;
    CHECK(run("costs --ratio --B 20 --N 100", &text) == 0);
    CHECK(text.find("0.675") != std::string::npos);

    CHECK(run("costs --budget --P 1000 --N 100 --K 5 --eta 0.667 --stages 4", &text) == 0);
    CHECK(text.find("grid spacing") != std::string::npos);
    CHECK(text.find("e-10") != std::string::npos);  // roughly 1e-9 scale

    CHECK(run("costs --recommend --N 300 --stages 2", &text) == 0);
    CHECK(text.find("recommended B") != std::string::npos);

    CHECK(run("costs --admm --N 100 --P 2", &text) == 0);
    CHECK(text.find("612") != std::string::npos);

    CHECK(run("costs", &text) == 2);
}

TEST_CASE("experiment: deterministic across reruns under a fixed seed") {
    const fs::path out1 = scratch_dir() / "exp1";
    const fs::path out2 = scratch_dir() / "exp2";
    const std::string args = "experiment fig7 --trials 5 --seed 7 --n 50 --stages 25 --out ";
    CHECK(run(args + out1.string()) == 0);
    CHECK(run(args + out2.string()) == 0);
    CHECK(slurp(out1 / "fig7_report.json") == slurp(out2 / "fig7_report.json"));
    CHECK(slurp(out1 / "fig7_support_grid.csv") == slurp(out2 / "fig7_support_grid.csv"));
}

TEST_CASE("experiment: table1 CSV and unknown names") {
    const fs::path out = scratch_dir() / "t1";
    CHECK(run("experiment table1 --out " + out.string()) == 0);
    const std::string csv = slurp(out / "table1_relative_complexity.csv");
    CHECK(csv.find("B1=20 B2=5,") != std::string::npos);
    CHECK(csv.find(",0.001\n") != std::string::npos);
    CHECK(csv.find(",0.015\n") != std::string::npos);

    std::string text;
    CHECK(run("experiment fig99", &text) == 2);
}

TEST_CASE("environment seed override is honored") {
    const std::string input = write_tone_csv(0.375, 32);
    const fs::path out = scratch_dir() / "envseed";
    const std::string cmd = "BANDSPARSE_SEED=4242 " + kCli + " estimate --input " + input +
                            " --stages 8 --out " + out.string() + " >/dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    const std::string echo = slurp(out / "effective_config.json");
    CHECK(echo.find("4242") != std::string::npos);
}

TEST_CASE("config file supplies defaults, flags win") {
    const std::string input = write_tone_csv(0.375, 32);
    const fs::path cfg = scratch_dir() / "cfg.json";
    {
        std::ofstream c(cfg);
        c << "{\"stages\": \"8,8\", \"seed\": 31}\n";
    }
    const fs::path out = scratch_dir() / "cfgrun";
    std::string text;
    const int rc = run("--config " + cfg.string() + " estimate --input " + input + " --out " +
                           out.string(),
                       &text);
    CHECK(rc == 0);
    const std::string echo = slurp(out / "effective_config.json");
    CHECK(echo.find("\"seed\": 31") != std::string::npos);
    CHECK(echo.find("8") != std::string::npos);
}
