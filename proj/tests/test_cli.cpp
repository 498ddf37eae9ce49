#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "chemsens/cli.hpp"
#include "chemsens/errors.hpp"

using namespace chemsens;
using namespace chemsens::cli;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "chemsens");
    std::vector<char*> argv;
    for (auto& a : args) {
        argv.push_back(a.data());
    }
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> v;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) {
        v.push_back(l);
    }
    return v;
}

std::filesystem::path scratch(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("chemsens_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("CSV schema")
{
    CHECK(csv_header(false) == "detuning_mhz,rate_a_mhz,rate_b_mhz,density_per_m3,s_plus_m2,s_minus_m2,"
                               "sigma_plus_ratio,sigma_minus_ratio,sens_full,sens_intensity,sens_phase,sens_psn,"
                               "regime,status");
    CHECK(csv_header(true) == csv_header(false) + ",route_deviation");
}

TEST_CASE("axis parsing")
{
    const auto a = parse_axis("rate=log:1e-6:1e2:41");
    CHECK(a.param == "rate");
    CHECK(a.log);
    CHECK(a.count == 41);
    const auto g = grid_values(a);
    CHECK(g.front() == doctest::Approx(1e-6));
    CHECK(g.back() == 1e2);
    CHECK(g[5] == doctest::Approx(1e-5));
    const auto lin = grid_values(parse_axis("detuning=linear:-100:100:201"));
    CHECK(lin[100] == doctest::Approx(0.0));
    for (const char* bad : {"rate", "foo=log:1:2:3", "rate=log:0:1:3", "rate=linear:2:1:3", "rate=linear:1:2:1",
                            "rate=cubic:1:2:3", "rate=log:a:b:3", "rate=log:1:2"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_axis(bad), Error);
    }
}

TEST_CASE("dotted overrides")
{
    json c = params::default_config();
    apply_override(c, "molecule.gamma_mhz=12.5");
    CHECK(c["molecule"]["gamma_mhz"] == 12.5);
    apply_override(c, "sample.thickness=optimal");
    CHECK(c["sample"]["thickness"] == "optimal");
    apply_override(c, "numerics.flux_grid_j0=[0.01,0.02,0.03,0.05]");
    CHECK(c["numerics"]["flux_grid_j0"].size() == 4);
    CHECK_THROWS_AS(apply_override(c, "novalue"), Error);
    CHECK_THROWS_AS(apply_override(c, "molecule..x=1"), Error);
    CHECK_THROWS_AS(apply_override(c, "molecule.gamma_mhz.x=1"), Error);
}

TEST_CASE("2x2 sweep produces four rows with axis1 outer")
{
    SweepSpec spec{parse_axis("detuning=linear:20:40:2"), parse_axis("rate=log:1e-4:1e-2:2"), RouteChoice::Full};
    std::ostringstream csv;
    CHECK(run_sweep(params::default_config(), spec, 2, csv));
    const auto l = lines(csv.str());
    REQUIRE(l.size() == 5);
    CHECK(l[0] == csv_header(false));
    CHECK(l[1].rfind("20,0.0001,0.0001,", 0) == 0);
    CHECK(l[2].rfind("20,0.01,0.01,", 0) == 0);
    CHECK(l[3].rfind("40,0.0001,0.0001,", 0) == 0);
    CHECK(l[4].rfind("40,0.01,0.01,", 0) == 0);
    for (std::size_t i = 1; i < l.size(); ++i) {
        CHECK(l[i].size() > 3);
        CHECK(l[i].substr(l[i].size() - 3) == ",ok");
    }
}

TEST_CASE("sweeps are byte identical across runs and worker counts")
{
    SweepSpec spec{parse_axis("rate=log:1e-6:1e2:9"), std::nullopt, RouteChoice::Both};
    std::ostringstream a, b, c;
    run_sweep(params::default_config(), spec, 1, a);
    run_sweep(params::default_config(), spec, 1, b);
    run_sweep(params::default_config(), spec, 4, c);
    CHECK(a.str() == b.str());
    CHECK(a.str() == c.str());
    CHECK(lines(a.str())[0] == csv_header(true));
}

TEST_CASE("failing points are reported in the status column")
{
    SweepSpec spec{parse_axis("rate=log:1e-13:1e-4:2"), std::nullopt, RouteChoice::Full};
    std::ostringstream csv;
    CHECK_FALSE(run_sweep(params::default_config(), spec, 1, csv));
    const auto l = lines(csv.str());
    CHECK(l[1].find("GapTooSmall") != std::string::npos);
    CHECK(l[1].find("nan") != std::string::npos);
    CHECK(l[2].substr(l[2].size() - 3) == ",ok");
}

TEST_CASE("point subcommand")
{
    auto r = invoke({"point"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["route"] == "full");
    CHECK(j["regime"] == "CL");
    CHECK(j["sens_full"].get<double>() > 0.0);

    r = invoke({"point", "--route", "both", "--set", "molecule.detuning_a_mhz=20"});
    REQUIRE(r.code == 0);
    const json both = json::parse(r.out);
    CHECK(both["full"]["detuning_mhz"] == 20.0);
    CHECK(both["adiabatic"]["route"] == "adiabatic");
    CHECK(both["route_deviation"].get<double>() < 0.02);

    r = invoke({"point", "--mc-trajectories", "2000", "--seed", "5", "--set", "molecule.rate_a_mhz=1e-3",
                "--set", "molecule.rate_b_mhz=1e-3"});
    REQUIRE(r.code == 0);
    const json mc = json::parse(r.out);
    CHECK(mc["telegraph_mc"]["seed"] == 5);
    CHECK(invoke({"point", "--mc-trajectories", "2000", "--seed", "5", "--set", "molecule.rate_a_mhz=1e-3", "--set",
                  "molecule.rate_b_mhz=1e-3"})
              .out == r.out);
}

TEST_CASE("exit codes and error JSON")
{
    auto r = invoke({});
    CHECK(r.code == 2);
    CHECK(json::parse(r.err)["error"] == "UsageError");
    CHECK(invoke({"point", "--route", "sideways"}).code == 2);
    CHECK(invoke({"point", "--bogus"}).code == 2);
    CHECK(invoke({"sweep"}).code == 2);
    CHECK(invoke({"figures", "fig9"}).code == 2);

    r = invoke({"point", "--set", "molecule.rate_a_mhz=-1"});
    CHECK(r.code == 1);
    const json e = json::parse(r.err);
    CHECK(e["error"] == "InvalidParam");
    CHECK(e["message"].get<std::string>().find("rate_A") != std::string::npos);

    r = invoke({"point", "--config", "/nonexistent/config.json"});
    CHECK(r.code == 1);
    CHECK(json::parse(r.err)["error"] == "IoError");

    r = invoke({"sweep", "--axis", "rate=log:1e-13:1e-4:2"});
    CHECK(r.code == 1);
    CHECK(lines(r.out).size() == 3);

    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("config file and sweep output with plot script")
{
    const auto dir = scratch("sweep");
    {
        std::ofstream(dir / "cfg.json") << R"({"molecule": {"detuning_a_mhz": 20}})";
    }
    const auto csv = dir / "out.csv";
    const auto r = invoke({"sweep", "--config", (dir / "cfg.json").string(), "--axis", "rate=log:1e-4:1e-2:3",
                           "--out", csv.string(), "--plot", "--workers", "2"});
    REQUIRE(r.code == 0);
    std::ifstream in(csv);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto l = lines(buf.str());
    REQUIRE(l.size() == 4);
    CHECK(l[1].rfind("20,", 0) == 0);
    CHECK(std::filesystem::exists(dir / "out.csv.gp"));
}

TEST_CASE("figure packs")
{
    const auto dir = scratch("figs");
    const auto r = invoke({"figures", "fig1c", "--out", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(std::filesystem::exists(dir / "fig1c.csv"));
    CHECK(std::filesystem::exists(dir / "fig1c.gp"));
    const auto files = emit_figure_pack("fig3", params::default_config(), dir, 0);
    CHECK(files.size() == 4);
    for (const auto& f : files) {
        CHECK(std::filesystem::exists(dir / f));
    }
}

}
