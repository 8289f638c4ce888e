#include "kinreg/config.hpp"

#include <gtest/gtest.h>

using namespace kinreg;

namespace {

int error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) { EXPECT_TRUE(parse_config("") == RunConfig{}); }

TEST(Config, RoundTripIsLossless) {
    RunConfig c;
    c.domain.name = "ellipsoid";
    c.domain.axes = Vec3(1.0, 1.0 / 3.0 + 1.0, 2.0);
    c.model.nu_scale = 0.1;
    c.temperature = BoundaryTemperature::linear(1.0, Vec3(0.1, 0, -1e-17));
    c.solver.tol = 1.0 / 7.0 * 1e-6;
    c.probe.pair_max = 0.29999999999999999;
    c.seed = 4000000000u;
    c.jobs = 3;
    const std::string text = serialize_config(c);
    const RunConfig back = parse_config(text);
    EXPECT_TRUE(back == c);
    EXPECT_EQ(serialize_config(back), text);
    EXPECT_EQ(back.domain.axes.y(), c.domain.axes.y());
}

TEST(Config, CommentsAndWhitespace) {
    const RunConfig c = parse_config("# top\n\n[ solver ]\n  tol = 1e-8   ; trailing\n[run]\njobs=2\n");
    EXPECT_EQ(c.solver.tol, 1e-8);
    EXPECT_EQ(c.jobs, 2);
}

TEST(Config, ErrorsCarryTheLine) {
    EXPECT_EQ(error_line("[solver]\ntol = 1e-6\n[nosuch]\n"), 3);
    EXPECT_EQ(error_line("[solver]\n\nbogus = 1\n"), 3);
    EXPECT_EQ(error_line("[solver]\ntol 1e-6\n"), 2);
    EXPECT_EQ(error_line("tol = 1\n"), 1);
    EXPECT_EQ(error_line("[solver\n"), 1);
    EXPECT_EQ(error_line("[solver]\ntol = 1e-6\ntol = 1e-7\n"), 3);
    EXPECT_EQ(error_line("[grid]\nn_radial = 12x\n"), 2);
    EXPECT_EQ(error_line("[domain]\naxes = 1, 2\n"), 2);
    EXPECT_EQ(error_line("[temperature]\nkind = plaid\n"), 2);
}

TEST(Config, ValidationPointsAtTheOffendingKey) {
    EXPECT_EQ(error_line("[model]\nbeta0 = 0.5\ngamma = 0.5\n"), 3);
    EXPECT_EQ(error_line("[grid]\nvolume_nodes = 0\n"), 2);
    EXPECT_EQ(error_line("[grid]\nmesh_polar = 0\n"), 2);
    EXPECT_EQ(error_line("[grid]\n\ngrazing_cutoff = 0\n"), 3);
    EXPECT_EQ(error_line("[grid]\ngrazing_cutoff = -1e-3\n"), 2);
    EXPECT_EQ(error_line("[grid]\nn_radial = 3\n"), 2);
    EXPECT_EQ(error_line("[grid]\nn_angular = 27\n"), 2);
    EXPECT_EQ(error_line("[solver]\ntol = 0\n"), 2);
    EXPECT_EQ(error_line("[probe]\nepsilon = 0.2\n"), 2);
    EXPECT_EQ(error_line("[domain]\nname = torus\n"), 2);
}

TEST(Config, EnvironmentOverrides) {
    RunConfig c;
    apply_env_overrides(c, {{"KINREG_SOLVER_TOL", "1e-9"}, {"KINREG_DOMAIN_NAME", "ellipsoid"},
                            {"KINREG_GRID_N_RADIAL", "8"}, {"UNRELATED", "x"}});
    EXPECT_EQ(c.solver.tol, 1e-9);
    EXPECT_EQ(c.domain.name, "ellipsoid");
    EXPECT_EQ(c.grid.n_radial, 8);
    EXPECT_THROW(apply_env_overrides(c, {{"KINREG_MODEL_GAMMA", "0"}}), ConfigError);
    EXPECT_THROW(apply_env_overrides(c, {{"KINREG_RUN_JOBS", "many"}}), ConfigError);
}

TEST(Config, MappingsCarryValues) {
    RunConfig c = parse_config("[grid]\nn_radial = 8\nzeta_max = 8\n[solver]\ntol = 1e-7\nanchor = 0.5\n[run]\nseed = 9\n");
    EXPECT_EQ(c.grid_spec().n_radial, 8);
    EXPECT_EQ(c.grid_spec().zeta_max, 8.0);
    EXPECT_EQ(c.picard_options().tol, 1e-7);
    EXPECT_EQ(c.picard_options().anchor, 0.5);
    EXPECT_EQ(c.picard_options().seed, 9u);
    EXPECT_EQ(c.regularity_options().seed, 9u);
    EXPECT_NE(c.make_domain(), nullptr);
}
