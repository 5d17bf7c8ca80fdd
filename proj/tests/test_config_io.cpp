#include <gtest/gtest.h>

#include <locale>
#include <sstream>
#include <string>

#include "hicov/campaign_config.hpp"
#include "hicov/io.hpp"

using namespace hicov;

TEST(ReadDataCsv, RowsAreObservations) {
  std::istringstream in("1,2,3\n4,5,6\n\n7, 8 ,9\r\n-1e-3,+2.5,0\n");
  const DataMatrix x = read_data_csv(in);
  EXPECT_EQ(x.samples(), 4u);
  EXPECT_EQ(x.dim(), 3u);
  EXPECT_EQ(x.columns()(0, 1), 4.0);
  EXPECT_EQ(x.columns()(1, 2), 8.0);
  EXPECT_EQ(x.columns()(0, 3), -1e-3);
  EXPECT_EQ(x.columns()(1, 3), 2.5);
}

TEST(ReadDataCsv, ParseErrors) {
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(read_data_csv(ragged), ParseError);
  std::istringstream junk("1,2\n3,abc\n");
  EXPECT_THROW(read_data_csv(junk), ParseError);
  std::istringstream one("1,2\n");
  EXPECT_THROW(read_data_csv(one), ParseError);
  std::istringstream empty_field("1,,2\n3,4,5\n");
  EXPECT_THROW(read_data_csv(empty_field), ParseError);
}

TEST(FormatNumber, ShortestRoundTripAndLocaleFree) {
  EXPECT_EQ(format_number(0.05), "0.05");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(0.1 + 0.2), "0.30000000000000004");
  EXPECT_EQ(format_number(1234567.5), "1234567.5");
  // A comma-decimal global locale must not leak into the output.
  try {
    const std::locale old = std::locale::global(std::locale("de_DE.UTF-8"));
    EXPECT_EQ(format_number(0.25), "0.25");
    std::locale::global(old);
  } catch (const std::runtime_error&) {
    GTEST_SKIP() << "de_DE locale not installed";
  }
}

TEST(PowerCsv, SchemaAndRows) {
  SimulationConfig cfg;
  cfg.n = 40;
  cfg.p = 10;
  cfg.reps = 100;
  cfg.tests = {TestKind::Lrt, TestKind::Cm};
  cfg.grid = {CovarianceModel::diagonal_spike(10, 0.5),
              CovarianceModel::explicit_matrix(SymMatrix::identity(10))};
  cfg.seed = 3;
  const PowerCurve curve = run_campaign(cfg);
  std::ostringstream out;
  write_power_csv(out, {curve});
  const std::string text = out.str();
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "grid_param,test,n,p,alpha,reps,reject_rate,mc_stderr,theory_power,seed");
  std::getline(lines, line);
  EXPECT_TRUE(line.starts_with("0.5,LRT,40,10,0.05,100,")) << line;
  EXPECT_TRUE(line.ends_with(",3")) << line;
  std::getline(lines, line);
  EXPECT_TRUE(line.starts_with("0.5,CM,")) << line;
  // CM has no closed form at a diagonal spike: empty theory column.
  EXPECT_NE(line.find(",,3"), std::string::npos) << line;
  std::getline(lines, line);
  EXPECT_TRUE(line.starts_with(",LRT,")) << line;  // explicit model: empty grid_param
  EXPECT_EQ(text.find('\r'), std::string::npos);
  int rows = 0;
  std::istringstream count(text);
  while (std::getline(count, line)) ++rows;
  EXPECT_EQ(rows, 1 + 2 * 2);
}

TEST(PlotScript, EmbedsData) {
  SimulationConfig cfg;
  cfg.n = 40;
  cfg.p = 10;
  cfg.reps = 100;
  cfg.tests = {TestKind::Lrt};
  cfg.grid = {CovarianceModel::identity(10)};
  std::ostringstream script;
  write_plot_script(script, {run_campaign(cfg)}, "title", "out.png");
  EXPECT_NE(script.str().find("grid_param,test,n,p"), std::string::npos);
  EXPECT_NE(script.str().find("savefig('out.png'"), std::string::npos);
}

TEST(GridEntry, Parsing) {
  auto g = parse_grid_entry("rho:0.25");
  EXPECT_EQ(g.kind, GridEntry::Kind::Rho);
  EXPECT_EQ(g.value, 0.25);
  g = parse_grid_entry(" 3 ");
  EXPECT_EQ(g.kind, GridEntry::Kind::Rho);
  EXPECT_EQ(g.value, 3.0);
  g = parse_grid_entry("h:-1.5");
  EXPECT_EQ(g.kind, GridEntry::Kind::H);
  EXPECT_EQ(g.value, -1.5);
  EXPECT_EQ(parse_grid_entry("identity").kind, GridEntry::Kind::Identity);
  EXPECT_THROW(parse_grid_entry("rho:x"), ParseError);
}

TEST(Presets, PresetContents) {
  const auto f1 = preset("figure1");
  ASSERT_TRUE(f1.has_value());
  const auto cfgs = f1->expand(1, 1);
  ASSERT_EQ(cfgs.size(), 2u);
  EXPECT_EQ(cfgs[0].p, 50u);
  EXPECT_EQ(cfgs[1].p, 100u);
  EXPECT_EQ(cfgs[0].n, 200u);
  EXPECT_EQ(cfgs[0].reps, 10000u);
  EXPECT_EQ(cfgs[0].grid.size(), 10u);
  EXPECT_EQ(cfgs[0].mean_mode, MeanMode::Zero);
  EXPECT_EQ(cfgs[0].tests, (std::vector<TestKind>{TestKind::Lrt, TestKind::Cm}));

  const auto f2 = preset("figure2");
  ASSERT_TRUE(f2.has_value());
  EXPECT_EQ(f2->law.kind(), InnovationLaw::Kind::StandardizedGamma);
  EXPECT_EQ(f2->mean_mode, MeanMode::RandomFixed);
  EXPECT_EQ(f2->tests, (std::vector<TestKind>{TestKind::Lrt, TestKind::Czz}));
  EXPECT_NO_THROW(f2->expand(1, 1));

  EXPECT_EQ(preset("smoke")->reps, 100u);
  EXPECT_FALSE(preset("nope").has_value());
}

TEST(ParseConfig, KeyValueWithRepeatedGrid) {
  std::istringstream in(
      "# campaign\n"
      "n = 100\n"
      "p = 20\n"
      "p = 40\n"
      "alpha=0.1\n"
      "reps=500\n"
      "law=gamma\n"
      "mean=random\n"
      "tests=lrt,czz\n"
      "grid=identity\n"
      "grid=rho:0.5, 2\n"
      "grid=h:1\n"
      "seed=99  # trailing comment\n"
      "workers=3\n");
  const CampaignPlan plan = parse_config(in);
  EXPECT_EQ(plan.n, 100u);
  EXPECT_EQ(plan.dims, (std::vector<std::size_t>{20, 40}));
  EXPECT_EQ(plan.alpha, 0.1);
  EXPECT_EQ(plan.reps, 500u);
  EXPECT_EQ(plan.law.kind(), InnovationLaw::Kind::StandardizedGamma);
  EXPECT_EQ(plan.mean_mode, MeanMode::RandomFixed);
  EXPECT_EQ(plan.grid.size(), 4u);
  EXPECT_EQ(*plan.seed, 99u);
  EXPECT_EQ(*plan.workers, 3u);
  const auto cfgs = plan.expand(*plan.seed, 1);
  ASSERT_EQ(cfgs.size(), 2u);
  EXPECT_EQ(cfgs[1].grid[3].dim(), 40u);
}

TEST(ParseConfig, PresetThenOverride) {
  std::istringstream in("preset=figure1\nreps=500\np=50\n");
  const CampaignPlan plan = parse_config(in);
  EXPECT_EQ(plan.name, "figure1");
  EXPECT_EQ(plan.reps, 500u);
  EXPECT_EQ(plan.dims, (std::vector<std::size_t>{50}));
  EXPECT_EQ(plan.grid.size(), 10u);
}

TEST(ParseConfig, Errors) {
  std::istringstream bad_key("colour=blue\n");
  EXPECT_THROW(parse_config(bad_key), ParseError);
  std::istringstream no_eq("n 100\n");
  EXPECT_THROW(parse_config(no_eq), ParseError);
  std::istringstream bad_test("tests=lrt,xyz\n");
  EXPECT_THROW(parse_config(bad_test), ParseError);
  std::istringstream bad_num("n=-3\n");
  EXPECT_THROW(parse_config(bad_num), ParseError);
  // CM with gamma innovations parses but fails validation on expansion.
  std::istringstream invalid("law=gamma\ntests=cm\n");
  const CampaignPlan plan = parse_config(invalid);
  EXPECT_THROW(plan.expand(1, 1), InvalidInput);
}
