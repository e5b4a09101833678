#include <doctest.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "grintrap/commands.hpp"
#include "grintrap/config.hpp"
#include "grintrap/table_io.hpp"

using namespace grintrap;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli");

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("grintrap_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_config(const TempDir& dir, const std::string& name, const std::string& body) {
    const std::string p = dir.file(name);
    std::ofstream out(p);
    out << body;
    return p;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
}

std::string report_value(const std::string& report, const std::string& key) {
    std::istringstream in(report);
    std::string line;
    const std::string prefix = key + " = ";
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
    return "";
}

const char* kGaussianRun = R"(# trapped single-attractor run
[profile]
kind = gaussian
n_a = 3.0
n_c = 0.8

[launch]
mode = rule

[integrator]
horizon = 300
)";

}  // namespace

TEST_CASE("config parser: locations, unknown keys, malformed input") {
    const ConfigDoc ok = ConfigDoc::parse_string("[profile]\nkind = gaussian\n", "mem");
    CHECK(ok.has("profile", "kind"));

    // unknown key carries its line
    ConfigDoc doc = ConfigDoc::parse_string("[profile]\nkind = gaussian\nsigm = 1\n", "mem");
    (void)doc.require_string("profile", "kind");
    try {
        doc.check_all_consumed();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 3);
        CHECK(std::string(e.what()).find("sigm") != std::string::npos);
    }

    CHECK_THROWS_AS(ConfigDoc::parse_string("kind = gaussian\n", "mem"), ConfigError);
    CHECK_THROWS_AS(ConfigDoc::parse_string("[profile]\nkind\n", "mem"), ConfigError);
    CHECK_THROWS_AS(
        ConfigDoc::parse_string("[profile]\nkind = a\nkind = b\n", "mem"), ConfigError);

    ConfigDoc bad = ConfigDoc::parse_string("[profile]\nn_a = abc\n", "mem");
    CHECK_THROWS_AS((void)bad.require_double("profile", "n_a"), ConfigError);
}

TEST_CASE("run: homogeneous medium escapes along a straight line") {
    TempDir dir;
    const std::string cfg = write_config(dir, "run.toml", R"([profile]
kind = homogeneous
n_c = 1.0

[launch]
mode = explicit
r0 = 2.0
r_dot0 = 0.1
phi_dot0 = 0.05

[integrator]
horizon = 200
)");
    cli::CommandOptions opts;
    opts.config_path = cfg;
    opts.output_dir = dir.file("out");
    opts.quiet = true;
    CHECK(cli::cmd_run(opts) == cli::kExitOk);

    const std::string report = slurp(dir.file("out/orbit_report.txt"));
    CHECK(report_value(report, "report.classification") == "Escape");

    // x, y columns trace a straight line
    std::ifstream csv(dir.file("out/trajectory.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "param,r,phi,r_dot,phi_dot,x,y,ell,E_t");
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0, t0 = 0, t1 = 0;
    bool first = true;
    int rows = 0;
    while (std::getline(csv, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
        REQUIRE(vals.size() == 9);
        if (first) {
            t0 = vals[0]; x0 = vals[5]; y0 = vals[6];
            first = false;
        } else if (rows == 1) {
            t1 = vals[0]; x1 = vals[5]; y1 = vals[6];
        } else {
            // collinear with the first chord
            const double vx = (x1 - x0) / (t1 - t0), vy = (y1 - y0) / (t1 - t0);
            CHECK(std::abs(vals[5] - (x0 + vx * (vals[0] - t0))) < 1e-7);
            CHECK(std::abs(vals[6] - (y0 + vy * (vals[0] - t0))) < 1e-7);
        }
        ++rows;
    }
    CHECK(rows > 10);
}

TEST_CASE("run: trapped gaussian writes a full report") {
    TempDir dir;
    const std::string cfg = write_config(dir, "run.toml", kGaussianRun);
    cli::CommandOptions opts;
    opts.config_path = cfg;
    opts.output_dir = dir.file("out");
    opts.quiet = true;
    CHECK(cli::cmd_run(opts) == cli::kExitOk);
    const std::string report = slurp(dir.file("out/orbit_report.txt"));
    CHECK(report_value(report, "report.classification") == "TrappedOpenOrbit");
    const double rmin = std::strtod(report_value(report, "report.r_min").c_str(), nullptr);
    const double rmax = std::strtod(report_value(report, "report.r_max").c_str(), nullptr);
    CHECK(rmin < rmax);
    CHECK(rmin > 0.0);
}

TEST_CASE("run: malformed config exits 2 and names the key") {
    TempDir dir;
    const std::string cfg = write_config(dir, "bad.toml", R"([profile]
kind = gaussian
n_a = 3.0
n_c = 0.8
sigma = -1.0
)");
    cli::CommandOptions opts;
    opts.config_path = cfg;
    opts.output_dir = dir.file("out");
    opts.quiet = true;
    CHECK(cli::cmd_run(opts) == cli::kExitConfig);
}

TEST_CASE("run: infall terminates at the floor with exit 3, report still written") {
    TempDir dir;
    const std::string cfg = write_config(dir, "fall.toml", R"([profile]
kind = homogeneous
n_c = 1.0

[launch]
mode = explicit
r0 = 1.0
r_dot0 = -0.5

[integrator]
horizon = 50
)");
    cli::CommandOptions opts;
    opts.config_path = cfg;
    opts.output_dir = dir.file("out");
    opts.quiet = true;
    CHECK(cli::cmd_run(opts) == cli::kExitRuntime);
    const std::string report = slurp(dir.file("out/orbit_report.txt"));
    CHECK(report_value(report, "report.classification") == "FellToFloor");
    CHECK(report_value(report, "report.termination") == "singularity");
}

TEST_CASE("run outputs are byte-stable and round-trip through the report") {
    TempDir dir;
    const std::string cfg = write_config(dir, "run.toml", kGaussianRun);
    cli::CommandOptions a;
    a.config_path = cfg;
    a.output_dir = dir.file("a");
    a.quiet = true;
    cli::CommandOptions b = a;
    b.output_dir = dir.file("b");
    REQUIRE(cli::cmd_run(a) == cli::kExitOk);
    REQUIRE(cli::cmd_run(b) == cli::kExitOk);
    CHECK(slurp(dir.file("a/orbit_report.txt")) == slurp(dir.file("b/orbit_report.txt")));
    CHECK(slurp(dir.file("a/trajectory.csv")) == slurp(dir.file("b/trajectory.csv")));
    CHECK(slurp(dir.file("a/resolved_config.toml")) == slurp(dir.file("b/resolved_config.toml")));

    // the report is itself a loadable config: re-running reproduces the report
    cli::CommandOptions c = a;
    c.config_path = dir.file("a/orbit_report.txt");
    c.output_dir = dir.file("c");
    REQUIRE(cli::cmd_run(c) == cli::kExitOk);
    CHECK(slurp(dir.file("c/orbit_report.txt")) == slurp(dir.file("a/orbit_report.txt")));
}

TEST_CASE("sweep: single value matches run, empty list is a config error") {
    TempDir dir;
    const std::string cfg = write_config(dir, "sweep.toml", R"([profile]
kind = gaussian
n_a = 3.0
n_c = 0.8

[integrator]
horizon = 300

[sweep]
parameter = n_c
values = 0.8
)");
    cli::CommandOptions opts;
    opts.config_path = cfg;
    opts.output_dir = dir.file("out");
    opts.quiet = true;
    REQUIRE(cli::cmd_sweep(opts) == cli::kExitOk);
    const std::string table = slurp(dir.file("out/sweep.csv"));
    CHECK(table.rfind("swept_value,classification,r_min,r_max,width,frequency,status", 0) == 0);
    CHECK(table.find("TrappedOpenOrbit") != std::string::npos);

    // compare against the plain run
    cli::CommandOptions run_opts;
    run_opts.config_path = write_config(dir, "run.toml", kGaussianRun);
    run_opts.output_dir = dir.file("run_out");
    run_opts.quiet = true;
    REQUIRE(cli::cmd_run(run_opts) == cli::kExitOk);
    const std::string report = slurp(dir.file("run_out/orbit_report.txt"));
    const std::string rmin = report_value(report, "report.r_min");
    CHECK(table.find(rmin) != std::string::npos);

    // per-row report exists and matches the run's classification
    const std::string row = slurp(dir.file("out/report_000.txt"));
    CHECK(report_value(row, "report.classification") == "TrappedOpenOrbit");

    const std::string empty_cfg = write_config(dir, "empty.toml", R"([profile]
kind = gaussian
n_a = 3.0
n_c = 0.8

[sweep]
parameter = n_c
values = ,
)");
    cli::CommandOptions bad;
    bad.config_path = empty_cfg;
    bad.quiet = true;
    CHECK(cli::cmd_sweep(bad) == cli::kExitConfig);

    cli::CommandOptions missing;
    missing.config_path = run_opts.config_path;
    missing.quiet = true;
    CHECK(cli::cmd_sweep(missing) == cli::kExitConfig);
}

TEST_CASE("phase: trapped loop closes, circular line flattens, homogeneous grid is zero") {
    TempDir dir;

    // trapped gaussian with the energy grid enabled
    const std::string cfg = write_config(dir, "phase.toml", std::string(kGaussianRun) + R"(
[phase]
energy_grid = true
r_min = 0.2
r_max = 5.0
r_count = 60
r_dot_min = -0.6
r_dot_max = 0.6
r_dot_count = 41
)");
    cli::CommandOptions opts;
    opts.config_path = cfg;
    opts.output_dir = dir.file("out");
    opts.quiet = true;
    REQUIRE(cli::cmd_phase(opts) == cli::kExitOk);

    // radial phase space: successive r_dot = 0 crossings on the same side
    // land at matching radii (the loop closes)
    std::ifstream rad(dir.file("out/phase_radial.csv"));
    std::string line;
    std::getline(rad, line);
    CHECK(line == "r,r_dot");
    std::vector<double> rr, vv;
    while (std::getline(rad, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        rr.push_back(std::strtod(cell.c_str(), nullptr));
        std::getline(ss, cell, ',');
        vv.push_back(std::strtod(cell.c_str(), nullptr));
    }
    REQUIRE(rr.size() > 100);
    std::vector<double> crossings_min;
    for (std::size_t i = 1; i < rr.size(); ++i)
        if (vv[i - 1] < 0.0 && vv[i] >= 0.0)
            crossings_min.push_back(0.5 * (rr[i - 1] + rr[i]));
    REQUIRE(crossings_min.size() >= 2);
    CHECK(std::abs(crossings_min.back() - crossings_min.front()) < 1e-3);

    // energy grid meta reports the critical radius; homogeneous grid is zero
    const std::string meta = slurp(dir.file("out/energy_grid_meta.txt"));
    CHECK(meta.find("x_c = 4.15384") != std::string::npos);

    const std::string hom = write_config(dir, "hom.toml", R"([profile]
kind = homogeneous
n_c = 1.0

[launch]
mode = explicit
r0 = 2.0
phi_dot0 = 0.05

[integrator]
horizon = 40

[phase]
energy_grid = true
)");
    cli::CommandOptions hopts;
    hopts.config_path = hom;
    hopts.output_dir = dir.file("hom_out");
    hopts.quiet = true;
    REQUIRE(cli::cmd_phase(hopts) == cli::kExitOk);
    std::ifstream grid(dir.file("hom_out/energy_grid.csv"));
    std::getline(grid, line);
    while (std::getline(grid, line)) {
        const auto pos = line.find_last_of(',');
        CHECK(std::strtod(line.c_str() + pos + 1, nullptr) == 0.0);
    }
}

TEST_CASE("stability: homogeneous map is all zero, flags match the formulas") {
    TempDir dir;
    const std::string cfg = write_config(dir, "stab.toml", R"([profile]
kind = homogeneous
n_c = 1.0

[stability]
r0_min = 0.5
r0_max = 2.0
r0_count = 4
kappa0_min = -0.2
kappa0_max = 0.2
kappa0_count = 3
beta_min = 0.0
beta_max = 0.4
beta_count = 3
)");
    cli::CommandOptions opts;
    opts.config_path = cfg;
    opts.output_dir = dir.file("out");
    opts.quiet = true;
    REQUIRE(cli::cmd_stability(opts) == cli::kExitOk);
    std::ifstream csv(dir.file("out/stability_map.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "r0,kappa0,beta,V,W,re_lambda1,re_lambda2,stable");
    int rows = 0;
    while (std::getline(csv, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
        REQUIRE(vals.size() == 8);
        CHECK(vals[3] == 0.0);  // V
        CHECK(vals[4] == 0.0);  // W
        CHECK(vals[5] == 0.0);
        CHECK(vals[6] == 0.0);
        CHECK(vals[7] == 1.0);  // stable
        ++rows;
    }
    CHECK(rows == 4 * 3 * 3);
}

TEST_CASE("validate command reports violations without failing") {
    TempDir dir;
    const std::string cfg = write_config(dir, "val.toml", R"([profile]
kind = gaussian
n_a = 4.0
n_c = 0.8
)");
    cli::CommandOptions opts;
    opts.config_path = cfg;
    opts.output_dir = dir.file("out");
    opts.quiet = true;
    CHECK(cli::cmd_validate(opts) == cli::kExitOk);
    const std::string rep = slurp(dir.file("out/validation.txt"));
    CHECK(rep.find("valid = false") != std::string::npos);
    CHECK(rep.find("above upper bound") != std::string::npos);
}

TEST_CASE("environment variable supplies the default output directory") {
    TempDir dir;
    const std::string cfg = write_config(dir, "run.toml", kGaussianRun);
    ::setenv("GRINTRAP_OUTPUT_DIR", dir.file("env_out").c_str(), 1);
    cli::CommandOptions opts;
    opts.config_path = cfg;
    opts.quiet = true;
    CHECK(cli::cmd_run(opts) == cli::kExitOk);
    ::unsetenv("GRINTRAP_OUTPUT_DIR");
    CHECK(fs::exists(dir.file("env_out/orbit_report.txt")));
}

TEST_CASE("seventeen significant digits round-trip exactly") {
    std::mt19937_64 rng(8888);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-30, 30);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::ldexp(mant(rng), expo(rng));
        const std::string s = format_g17(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_SUITE_END();
