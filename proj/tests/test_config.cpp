#include <sstream>

#include "doctest.h"
#include "sdkg/config.hpp"
#include "sdkg/errors.hpp"
#include "sdkg/reports.hpp"

using namespace sdkg;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const InvalidInput& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("minimal config yields documented defaults") {
    auto c = parse_config("");
    CHECK(c.n_modes == 256);
    CHECK(c.domain_length == doctest::Approx(32.0 * std::numbers::pi).epsilon(1e-15));
    CHECK(c.b == 0.3);
    CHECK(c.r == 1.0 / 3.0);
    CHECK(c.s == 0.0);
    CHECK(parse_config("# comment only\n\n  \n") == c);
}

TEST_CASE("validation errors name the field") {
    CHECK(contains(error_of("b = 0.6"), "b must lie in (0, 1/2)"));
    const auto e = error_of("dt = 0.01\nsubinterval_length = 0.015");
    CHECK(contains(e, "subinterval_length"));
    CHECK(contains(e, "dt"));
    CHECK(contains(error_of("horizon = 1.01"), "horizon"));
    CHECK(contains(error_of("kg_mass = 2"), "kg_mass"));
    CHECK(contains(error_of("frobnicate = 3"), "frobnicate"));
    CHECK(contains(error_of("n_modes = twelve"), "n_modes"));
    CHECK(contains(error_of("nonlinear = yes"), "nonlinear"));
    CHECK(contains(error_of("seed = -1"), "seed"));
    CHECK(contains(error_of("output_format = xml"), "output_format"));
    CHECK(contains(error_of("command = fly"), "command"));
    CHECK(contains(error_of("probe_estimate = Lbound"), "probe_estimate"));
    CHECK(contains(error_of("mu = 0.5"), "mu"));
    CHECK(contains(error_of("kernel1_type = gaussian\nkernel1_width = -1"), "kernel1_width"));
    CHECK(contains(error_of("b = 0.2\nb = 0.3"), "duplicate"));
    CHECK(contains(error_of("just words"), "line 1"));
}

TEST_CASE("config round-trips losslessly") {
    RunConfig c = parse_config("n_modes = 64\ndomain_length = 25.132741228718345\ndt = 0.0078125\n"
                               "horizon = 0.5\nsubinterval_length = 0.0625\nb = 0.41\nr = 0.30000000000000004\n"
                               "mu = 16\nseed = 18446744073709551615\nkernel1_type = gaussian\n"
                               "kernel1_width = 1.7\nr_ladder = 1,2.5,1e3\ninitial_data = single-mode\n"
                               "init_mode = -3\noutput_path = out dir/run.csv\nnonlinear = false\n");
    const std::string text = serialize_config(c);
    const RunConfig back = parse_config(text);
    CHECK(back == c);
    CHECK(serialize_config(back) == text);
    CHECK(back.r == 0.30000000000000004);
    CHECK(back.seed == 18446744073709551615ULL);
    CHECK(back.r_ladder == std::vector<double>{1.0, 2.5, 1000.0});
    CHECK(back.output_path == "out dir/run.csv");
}

TEST_CASE("solver config and initial data follow the run config") {
    auto c = parse_config("n_modes = 64\ndomain_length = 25\nkernel1_type = gaussian\nkernel1_width = 2\n"
                          "mu = 8\ninitial_data = zero\n");
    auto s = solver_config(c);
    CHECK(s.grid == GridSpec(64, 25.0));
    CHECK_FALSE(s.kernel1.is_zero());
    CHECK(s.kernel2.is_zero());
    REQUIRE(s.mu.has_value());
    CHECK(*s.mu == 8.0);
    CHECK(charge(initial_state(c)) == 0.0);
    c.mu = 0.0;
    CHECK_FALSE(solver_config(c).mu.has_value());
}

TEST_CASE("trajectory rows and headers") {
    auto c = parse_config("n_modes = 32\ndt = 0.0625\nhorizon = 0.25\nsubinterval_length = 0.125\ninitial_data = zero\n");
    auto rec = solve_trajectory(solver_config(c), initial_state(c));
    auto rows = trajectory_rows(rec);
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) {
        REQUIRE(r.size() == trajectory_columns.size());
        CHECK(r[1] == 0.0);
        CHECK(r[2] == 1.0);
        CHECK(r[9] == 0.0);
    }
    std::ostringstream out;
    write_csv_header(out, c, trajectory_columns);
    const std::string h = out.str();
    CHECK(contains(h, "# seed = 0\n"));
    CHECK(contains(h, "time,charge,cutoff,xnorm2_psi_plus"));
    CHECK(format_number(0.1) == "0.10000000000000001");
}
