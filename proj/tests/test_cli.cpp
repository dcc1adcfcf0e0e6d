#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = [] {
    auto p = fs::temp_directory_path() / "kerrgate_cli_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}();

// runs the built binary with stdout/stderr captured; returns the exit code
int run(const std::string& args) {
    std::string cmd = std::string(KERRGATE_CLI_PATH) + " " + args + " >" +
                      (kWork / "stdout.txt").string() + " 2>" + (kWork / "stderr.txt").string();
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

std::string out_path(const char* name) { return (kWork / name).string(); }

}  // namespace

TEST_CASE("usage errors exit with 1, help with 0", "[cli]") {
    CHECK(run("--help") == 0);
    CHECK(run("") == 1);          // a subcommand is required
    CHECK(run("frobnicate") == 1);
    CHECK(run("fig2 --steps 1 -o " + out_path("bad.csv")) == 1);  // sweep needs two points
}

TEST_CASE("unwritable output paths exit with 2", "[cli]") {
    CHECK(run("gamma -o /nonexistent-dir/out.csv") == 2);
}

TEST_CASE("domain errors exit with 1", "[cli]") {
    CHECK(run("length --dk 0 -o " + out_path("len_bad.csv")) == 1);
    CHECK(run("dyson --samples 10 -o " + out_path("dy_bad.csv")) == 1);
}

TEST_CASE("gamma output is exact and stable", "[cli]") {
    auto p = out_path("gamma.csv");
    REQUIRE(run("gamma -o " + p) == 0);
    CHECK(slurp(p) == "gamma,x_half\n1.92921446961e-01,1.89549426703e+00\n");
}

TEST_CASE("figure sweeps are byte-identical across runs", "[cli]") {
    struct Job {
        const char* name;
        std::string args;
    };
    const Job jobs[] = {
        {"fig2", "fig2 --steps 21 --x-max 10"},
        {"fig3", "fig3 --steps 21 --x-max 10"},
        {"fig4", "fig4 --steps 25 --script-l-max 150"},
    };
    for (const auto& j : jobs) {
        auto a = out_path("det_a.csv"), b = out_path("det_b.csv");
        REQUIRE(run(j.args + " -o " + a) == 0);
        REQUIRE(run(j.args + " -o " + b) == 0);
        INFO(j.name);
        auto body = slurp(a);
        CHECK(body == slurp(b));
        CHECK(lines(body).size() == (j.name == std::string("fig4") ? 26 : 22));
    }
}

TEST_CASE("matched-fidelity sweep hits the reference point", "[cli]") {
    auto p = out_path("fig4.csv");
    REQUIRE(run("fig4 -o " + p) == 0);
    auto body = slurp(p);
    CHECK(lines(body).front() == "script_l,fidelity");
    // default spacing is exactly 1, so the scaled length 100 appears verbatim
    CHECK(body.find("1.00000000000e+02,9.98722233733e-01\n") != std::string::npos);
}

TEST_CASE("slow-medium sweep reaches the ideal gate at pi", "[cli]") {
    auto p = out_path("slow.csv");
    REQUIRE(run("slow --steps 2 --x-max 3.141592653589793 -o " + p) == 0);
    auto ls = lines(slurp(p));
    REQUIRE(ls.size() == 3);
    CHECK(ls[0] == "x,fidelity");
    CHECK(ls[1] == "0.00000000000e+00,0.00000000000e+00");
    CHECK(ls[2] == "3.14159265359e+00,1.00000000000e+00");
}

TEST_CASE("entanglement sweep emits sane purities", "[cli]") {
    auto p = out_path("ent.csv");
    REQUIRE(run("entangle --steps 3 --x-max 3.141592653589793 --grid-points 64 -o " + p) == 0);
    auto ls = lines(slurp(p));
    REQUIRE(ls.size() == 4);
    CHECK(ls[0] == "x,purity,entropy");
    // x = 0 keeps the input pure
    CHECK(ls[1].substr(0, 36) == "0.00000000000e+00,1.00000000000e+00,");
    for (size_t i = 2; i < ls.size(); ++i) {
        double purity = std::stod(ls[i].substr(18));
        CHECK(purity > 0.9);
        CHECK(purity <= 1.0);
    }
}

TEST_CASE("commutator table lists all three kernels", "[cli]") {
    auto p = out_path("comm.csv");
    REQUIRE(run("commutator --grid-points 16 -o " + p) == 0);
    auto ls = lines(slurp(p));
    REQUIRE(ls.size() == 4);
    CHECK(ls[0] == "kind,grid,ratio");
    CHECK(ls[1] == "gaussian_filter,16,5.49842672920e-01");
    CHECK(ls[2] == "dispersion,16,9.15812700387e-02");
    CHECK(ls[3].rfind("combined,16,", 0) == 0);
}

TEST_CASE("monte carlo run is reproducible from its seed", "[cli]") {
    auto a = out_path("dy_a.csv"), b = out_path("dy_b.csv");
    REQUIRE(run("dyson --samples 20000 --seed 42 -o " + a) == 0);
    REQUIRE(run("dyson --samples 20000 --seed 42 -o " + b) == 0);
    auto body = slurp(a);
    CHECK(body == slurp(b));
    auto ls = lines(body);
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == "value,std_error,samples,seed");
    CHECK(ls[1].find(",42") != std::string::npos);
}

TEST_CASE("config file supplies defaults, flags override it", "[cli]") {
    auto cfg = kWork / "sweep.ini";
    std::ofstream(cfg) << "# small sweep\nsteps=5\nx-max=2.0\n";

    auto p = out_path("cfg.csv");
    REQUIRE(run("fig2 --config " + cfg.string() + " -o " + p) == 0);
    auto ls = lines(slurp(p));
    REQUIRE(ls.size() == 6);
    CHECK(ls.back().rfind("2.00000000000e+00,", 0) == 0);

    REQUIRE(run("fig2 --config " + cfg.string() + " --steps 3 -o " + p) == 0);
    auto ls2 = lines(slurp(p));
    REQUIRE(ls2.size() == 4);
    CHECK(ls2.back().rfind("2.00000000000e+00,", 0) == 0);

    auto bad = kWork / "bad.ini";
    std::ofstream(bad) << "steps=5\nn-cut=7\n";  // n-cut belongs to slow, not fig2
    CHECK(run("fig2 --config " + bad.string() + " -o " + p) == 1);
    CHECK(run("fig2 --config " + (kWork / "absent.ini").string() + " -o " + p) == 2);
}

TEST_CASE("length conversion round-trips through the CLI", "[cli]") {
    auto p = out_path("len.csv");
    REQUIRE(run("length -o " + p) == 0);
    auto ls = lines(slurp(p));
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == "script_l,sigma,gamma,dk,length_m");
    CHECK(ls[1].find("2.27672063986e-03") != std::string::npos);
}
