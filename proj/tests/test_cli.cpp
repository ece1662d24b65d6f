#include "../tools/report.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using namespace ufem::report;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> lines_of(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

/// Scratch directory removed on scope exit.
struct TempDir {
    fs::path path;

    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("ufem_cli_" + tag + "_" + std::to_string(::getpid())))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

/// Exit status of the CLI run with `args`; stdout and stderr go to `log`.
int run_cli(const std::string& args, const fs::path& log)
{
    const std::string cmd = std::string("\"") + UFEM_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("list and range parsing")
{
    CHECK(split_list(" a, b ,,c ") == std::vector<std::string>{"a", "b", "c"});
    CHECK(parse_int_list("5,10, 20") == std::vector<int>{5, 10, 20});
    CHECK_THROWS(parse_int_list("5,x"));
    CHECK_THROWS(parse_int_list("5.5"));
    CHECK_THROWS(parse_int_list(""));
    CHECK(parse_range("1..15") == std::pair{1, 15});
    CHECK(parse_range("4") == std::pair{4, 4});
    CHECK_THROWS(parse_range("5..2"));
    CHECK_THROWS(parse_range("1..2..3"));
    CHECK(parse_pair("1, 10") == std::pair{1.0, 10.0});
    CHECK_THROWS(parse_pair("1"));
}

TEST_CASE("config values become flags unless given on the command line")
{
    const nlohmann::json cfg = {{"N", {5, 10}}, {"scheme", "fem"}, {"lpca-xi", 0.5}, {"timing", true},
                                {"dump-matrix", false}, {"p", 3}};
    const std::vector<std::string> args{"ufem_cli", "converge", "--p", "2"};
    const auto out = merge_config(args, cfg);
    REQUIRE(out.size() >= 4);
    CHECK(out[0] == "ufem_cli");
    CHECK(out[1] == "converge");
    auto value_of = [&](const std::string& flag) {
        for (std::size_t k = 0; k + 1 < out.size(); ++k) {
            if (out[k] == flag) return out[k + 1];
        }
        return std::string("<missing>");
    };
    CHECK(value_of("--N") == "5,10");
    CHECK(value_of("--scheme") == "fem");
    CHECK(std::stod(value_of("--lpca-xi")) == 0.5);
    CHECK(value_of("--p") == "2");
    CHECK(std::count(out.begin(), out.end(), "--p") == 1);
    CHECK(std::count(out.begin(), out.end(), "--timing") == 1);
    CHECK(std::count(out.begin(), out.end(), "--dump-matrix") == 0);
    // command-line flags keep their place after the inserted ones
    CHECK(out[out.size() - 2] == "--p");
    CHECK_THROWS(merge_config(args, nlohmann::json::array()));
}

TEST_CASE("log-log plots")
{
    const std::string svg = loglog_svg("err <N>", "N", "error", {{"a", {5, 10, 20}, {1e-1, 1e-2, 1e-3}},
                                                                  {"b", {5, 10, 20}, {2e-1, 0.0, 1e-3}}});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("err &lt;N&gt;") != std::string::npos);
    std::size_t polylines = 0, circles = 0;
    for (std::size_t at = 0; (at = svg.find("<polyline", at)) != std::string::npos; ++at) ++polylines;
    for (std::size_t at = 0; (at = svg.find("<circle", at)) != std::string::npos; ++at) ++circles;
    CHECK(polylines == 2);
    // the zero is skipped
    CHECK(circles == 5);
    CHECK(svg.find("nan") == std::string::npos);
}

TEST_CASE("converge writes deterministic artifacts")
{
    const TempDir dir("converge");
    const std::string common = "converge --scheme hosgfem --p 2 --geom line --kappa 1,10 --N 5,10,20 --jobs 2 --out ";
    REQUIRE(run_cli(common + "\"" + (dir.path / "a").string() + "\"", dir.path / "a.log") == 0);
    REQUIRE(run_cli(common + "\"" + (dir.path / "b").string() + "\"", dir.path / "b.log") == 0);
    const std::string csv = slurp(dir.path / "a" / "converge_hosgfem_line.csv");
    CHECK(csv == slurp(dir.path / "b" / "converge_hosgfem_line.csv"));
    const auto rows = lines_of(csv);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "scheme,p,N,kappa0,kappa1,geom,delta,energy_error,scn,n_fem,n_enr,dropped,seconds");
    CHECK(rows[1].rfind("hosgfem,2,5,1,10,line,", 0) == 0);
    CHECK(slurp(dir.path / "a.log").find("slope=") != std::string::npos);

    const auto meta = nlohmann::json::parse(slurp(dir.path / "a" / "converge_hosgfem_line.json"));
    CHECK(meta.at("scn").at("nullspace_cutoff").get<double>() == 1e-12);
    CHECK(meta.at("scn").at("seed").get<long long>() == 20240601);
    CHECK(meta.contains("quadrature"));
    CHECK(meta.at("slopes").contains("2"));
    CHECK(fs::exists(dir.path / "a" / "converge_hosgfem_line.svg"));
}

TEST_CASE("robustness writes one row per scheme and offset")
{
    const TempDir dir("robust");
    REQUIRE(run_cli("robustness --p 1 --N 10 --i 1..3 --schemes fem,hosgfem --out \"" + dir.path.string() + "\"",
                    dir.path / "log") == 0);
    const auto rows = lines_of(slurp(dir.path / "robustness_p1_N10.csv"));
    CHECK(rows.size() == 7);
    CHECK(fs::exists(dir.path / "robustness_p1_N10.svg"));
}

TEST_CASE("verify-lemma1 and the config file")
{
    const TempDir dir("lemma");
    REQUIRE(run_cli("verify-lemma1 --geom circle --p 3 --out \"" + dir.path.string() + "\"", dir.path / "log") == 0);
    const auto rows = lines_of(slurp(dir.path / "lemma1.csv"));
    REQUIRE(rows.size() >= 2);

    {
        std::ofstream cfg(dir.path / "cfg.json");
        cfg << R"({"scheme": "fem", "p": 1, "N": [4, 8, 16], "geom": "circle", "kappa": "1,20"})";
    }
    REQUIRE(run_cli("converge --config \"" + (dir.path / "cfg.json").string() + "\" --N 5,10,20 --out \"" +
                        dir.path.string() + "\"",
                    dir.path / "log2") == 0);
    const auto conv = lines_of(slurp(dir.path / "converge_fem_circle.csv"));
    REQUIRE(conv.size() == 4);
    CHECK(conv[1].rfind("fem,1,5,1,20,circle,", 0) == 0);
}

TEST_CASE("bad input exits with status 1 and usage text")
{
    const TempDir dir("bad");
    CHECK(run_cli("converge --scheme bogus --out \"" + dir.path.string() + "\"", dir.path / "log") == 1);
    const std::string log = slurp(dir.path / "log");
    CHECK(log.find("bogus") != std::string::npos);
    CHECK(log.find("--scheme") != std::string::npos);
    CHECK(run_cli("converge --geom square", dir.path / "log") == 1);
    CHECK(run_cli("frobnicate", dir.path / "log") == 1);
}
