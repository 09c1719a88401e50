#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "carbuncle/experiments.hpp"

using namespace carbuncle;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("carbuncle_test_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST(Config, ParsesKeysCommentsAndRanges)
{
    const KeyValueConfig kv = KeyValueConfig::parse_string(
        "# header\nname = demo  # trailing\n\nm0 = 2:5, 10\nalpha = -10:10:5\nspectra = yes\n");
    EXPECT_EQ(kv.get("name", ""), "demo");
    EXPECT_EQ(kv.get_doubles("m0", {}), (std::vector<double>{2, 3, 4, 5, 10}));
    EXPECT_EQ(kv.get_doubles("alpha", {}), (std::vector<double>{-10, -5, 0, 5, 10}));
    EXPECT_TRUE(kv.get_bool("spectra", false));
    const auto eps = KeyValueConfig::parse_string("epsilon = 0.1:0.9:0.1").get_doubles("epsilon", {});
    EXPECT_EQ(eps.size(), 9u);
    EXPECT_THROW(KeyValueConfig::parse_string("novalue\n"), std::invalid_argument);
    EXPECT_THROW(KeyValueConfig::parse_string("m0 = abc").get_doubles("m0", {}), std::invalid_argument);
}

TEST(Config, BuildsExperiment)
{
    const ExperimentSpec e = experiment_from_config(KeyValueConfig::parse_string(
        "name = x\nmode = both\nsolver = roe, hll\nlimiter = minmod\norder = 1, 2\nm0 = 5\nepsilon = 0.2\n"
        "grid = distorted\nalpha = 10\nvars = cons\nform = prim\nt_end = 20\n"));
    EXPECT_EQ(e.mode, ExperimentMode::Both);
    EXPECT_EQ(e.solvers.size(), 2u);
    EXPECT_EQ(e.limiters, (std::vector<LimiterKind>{LimiterKind::None, LimiterKind::Minmod}));
    EXPECT_EQ(e.base.grid.kind, GridKind::Distorted);
    EXPECT_EQ(e.base.muscl.vars, ReconstructionVariables::Conservative);
    EXPECT_EQ(e.stability.form, MatrixForm::Primitive);
    EXPECT_DOUBLE_EQ(e.base.t_end, 20.0);
    EXPECT_EQ(expand(e).size(), 4u);
    EXPECT_THROW(experiment_from_config(KeyValueConfig::parse_string("colour = red")), std::invalid_argument);
    EXPECT_THROW(experiment_from_config(KeyValueConfig::parse_string("order = 3")), std::invalid_argument);
}

TEST(Experiment, EveryPointYieldsOneRecordAndFailuresStayLocal)
{
    ExperimentSpec e;
    e.m0_list = {0.5, 20.0};   // the first point is invalid
    e.eps_list = {0.1};
    e.solvers = {RiemannSolverKind::Roe};
    e.threads = 2;
    const auto recs = run_experiment(e);
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_FALSE(recs[0].error.empty());
    EXPECT_FALSE(recs[0].max_real.has_value());
    EXPECT_TRUE(recs[1].error.empty());
    EXPECT_NEAR(*recs[1].max_real, 0.760817, 1e-6);
    EXPECT_LT(recs[0].key, recs[1].key);
}

TEST(Experiment, EmissionIsDeterministic)
{
    ExperimentSpec e = experiment_from_config(KeyValueConfig::parse_string(
        "mode = both\nm0 = 20\nepsilon = 0.5\nsolver = hll, roe\nt_end = 10\nspectra = true\nmodes = true\n"
        "histories = true\nfields = true\n"));
    const fs::path a = scratch_dir("a"), b = scratch_dir("b");
    e.threads = 1;
    emit_plotdata(a, run_experiment(e));
    e.threads = 2;
    emit_plotdata(b, run_experiment(e));
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        const fs::path rel = fs::relative(entry.path(), a);
        if (rel == "timings.csv") continue;
        EXPECT_EQ(slurp(entry.path()), slurp(b / rel)) << rel;
    }
    const std::string csv = slurp(a / "results.csv");
    const std::string header = csv.substr(0, csv.find('\n'));
    for (const char* col : {"m0", "epsilon", "solver", "limiter", "order", "max_real", "lambda_num"})
        EXPECT_NE(header.find(col), std::string::npos) << col;
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    const fs::path spectra = a / "spectra";
    ASSERT_TRUE(fs::exists(spectra));
    const std::string one = slurp(fs::directory_iterator(spectra)->path());
    EXPECT_EQ(one.substr(0, 6), "re,im\n");
    EXPECT_EQ(std::distance(fs::directory_iterator(a / "histories"), fs::directory_iterator{}), 2);
    const std::string field = slurp(fs::directory_iterator(a / "fields")->path());
    EXPECT_EQ(field.substr(0, field.find('\n')), "i,j,x,y,rho,u,v,p");
    const auto json = nlohmann::json::parse(slurp(a / "results.json"));
    ASSERT_EQ(json.size(), 2u);
    EXPECT_EQ(json[0]["config"]["solver"], "hll");
    fs::remove_all(a);
    fs::remove_all(b);
}
