#include <gtest/gtest.h>

#include <filesystem>

#include "test_support.hpp"
#include "turkic/io.hpp"

namespace turkic {
namespace {

using testing::data_path;
using testing::Gen;

TEST(Numbers, FormatRoundTrips) {
  Gen g(1);
  for (int i = 0; i < 10000; ++i) {
    const double v = g.coin() ? g.log_uniform(1e-300, 1e300) : g.uniform(-1e3, 1e3);
    ASSERT_EQ(io::parse_number(io::format_number(v), "v"), v);
  }
  EXPECT_EQ(io::format_number(0.5), "0.5");
  EXPECT_THROW(io::parse_number("1.5x", "v"), ParseError);
  EXPECT_THROW(io::parse_number("", "v"), ParseError);
}

TEST(Csv, SplitTrimsCells) {
  EXPECT_EQ(io::split_csv_line("a, b ,c"), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Observations, RoundTrip) {
  const ScalingParams p = io::load_scaling_params(data_path("fixtures/true_params.json"));
  const auto obs = synthesize_observations(p, 50, 0.01, 3);
  EXPECT_EQ(io::observations_from_csv(io::observations_to_csv(obs)), obs);
}

TEST(Observations, HeaderMismatchAndBadRows) {
  EXPECT_THROW(io::observations_from_csv("model_capacity,data_tokens,rank,pretrain_repr,loss\n1,2,3,0.1,1\n"),
               ParseError);
  EXPECT_THROW(io::observations_from_csv("model_capacity,data_tokens,adapter_capacity,pretrain_repr,loss\n1,2,3\n"),
               ParseError);
  const auto obs = io::observations_from_csv(
      "model_capacity,data_tokens,adapter_capacity,pretrain_repr,loss\n# comment\n\n1e9,1e6,8,0.01,2.5\n");
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].measured_loss, 2.5);
}

TEST(Observations, ShippedFixtureMatchesGenerator) {
  const ScalingParams p = io::load_scaling_params(data_path("fixtures/true_params.json"));
  const auto shipped = io::load_observations(data_path("fixtures/noiseless_observations.csv"));
  const auto regenerated = synthesize_observations(p, shipped.size(), 0.0, 1);
  ASSERT_EQ(shipped.size(), 200u);
  for (std::size_t i = 0; i < shipped.size(); ++i) {
    ASSERT_EQ(shipped[i].inputs, regenerated[i].inputs);
    ASSERT_NEAR(shipped[i].measured_loss, regenerated[i].measured_loss, 1e-12 * regenerated[i].measured_loss);
  }
}

TEST(Matrix, CsvAndJsonExport) {
  const TTCMatrix m({"a", "b"}, {1.0, 0.25, 0.5, 1.0});
  EXPECT_EQ(io::matrix_to_csv(m), "source,a,b\na,1,0.25\nb,0.5,1\n");
  const TTCMatrix back = io::matrix_from_json(io::json::parse(io::to_json(m).dump()));
  EXPECT_EQ(back.ids(), m.ids());
  EXPECT_EQ(back.values(), m.values());
  EXPECT_THROW(io::matrix_from_json(io::json{{"languages", {"a"}}}), ParseError);
}

TEST(ScalingParams, FitResultDocumentReadsBack) {
  const ScalingParams p = io::load_scaling_params(data_path("fixtures/true_params.json"));
  const auto obs = synthesize_observations(p, 30, 0.0, 5);
  FitConfig cfg;
  cfg.restarts = 2;
  const FitResult r = fit_scaling(obs, cfg);
  const io::json doc = io::json::parse(io::to_json(r, cfg, obs.size()).dump(2));
  EXPECT_EQ(io::scaling_params_from_json(doc), r.params);
  EXPECT_EQ(doc.at("provenance").at("observations"), 30);
  EXPECT_EQ(doc.at("restarts").size(), 2u);
}

TEST(ScalingParams, MissingKeysKeepDefaultsUnknownKeysRejected) {
  const ScalingParams p = io::scaling_params_from_json(io::json{{"epsilon", 0.3}});
  EXPECT_EQ(p.epsilon, 0.3);
  EXPECT_EQ(p.alpha, 0.0);
  EXPECT_THROW(io::scaling_params_from_json(io::json{{"epsilom", 0.3}}), ParseError);
  EXPECT_THROW(io::scaling_params_from_json(io::json{{"beta", -1.0}}), ValidationError);
}

TEST(Config, SectionsAreOptional) {
  const io::Config shipped = io::load_config(data_path("turkic/config.json"));
  EXPECT_EQ(shipped.forgetting.e, 2.0);
  EXPECT_EQ(shipped.p_ref, 0.01);
  const io::Config empty = io::config_from_json(io::json::object());
  EXPECT_EQ(empty.ttc_weights.w_m, 0.3);
  EXPECT_EQ(empty.data_transform, DataTransform::Log10p1);
  EXPECT_THROW(io::config_from_json(io::json{{"data_transform", "ln"}}), ParseError);
  EXPECT_THROW(io::config_from_json(io::json{{"colour", 1}}), ParseError);
  EXPECT_THROW(io::config_from_json(io::json{{"ttc_weights", {{"w_m", 0.9}}}}), ValidationError);
}

TEST(Plan, RequestAndResponseRoundTrip) {
  const auto path = data_path("fixtures/plan_turkic.json");
  const PlanRequest req = io::plan_request_from_json(io::read_json(path), path.parent_path());
  ASSERT_EQ(req.profiles.size(), 5u);
  EXPECT_EQ(req.weights, (std::vector<double>{1, 1, 1, 1, 2}));
  EXPECT_EQ(req.params.size(), 1u);
  const AllocationPlan plan = allocate_data_budget(req);
  const AllocationPlan back = io::plan_from_json(io::json::parse(io::to_json(plan).dump(2)));
  ASSERT_EQ(back.languages.size(), plan.languages.size());
  for (std::size_t i = 0; i < plan.languages.size(); ++i) {
    EXPECT_EQ(back.languages[i].id, plan.languages[i].id);
    EXPECT_EQ(back.languages[i].allocated, plan.languages[i].allocated);
    EXPECT_EQ(back.languages[i].at_minimum, plan.languages[i].at_minimum);
  }
  EXPECT_EQ(back.status, plan.status);
  EXPECT_EQ(back.aggregate_after, plan.aggregate_after);
}

TEST(Plan, PerLanguageParamsAndErrors) {
  const io::json profiles = io::read_json(data_path("turkic/profiles.json"));
  io::json per;
  for (const char* id : {"az", "kk", "uz", "tk", "gz"}) per[id] = {{"gamma", 10.0}, {"delta", 0.3}};
  const PlanRequest req = io::plan_request_from_json({{"profiles", profiles}, {"params", per}, {"total_budget", 1e6}});
  EXPECT_EQ(req.params.size(), 5u);
  per.erase("gz");
  EXPECT_THROW(io::plan_request_from_json({{"profiles", profiles}, {"params", per}, {"total_budget", 1e6}}),
               ParseError);
  EXPECT_THROW(io::plan_request_from_json({{"params", io::json::object()}, {"total_budget", 1e6}}), ParseError);
  EXPECT_THROW(io::plan_request_from_json(
                   {{"profiles", profiles}, {"params", io::json::object()}, {"total_budget", 1e6}, {"budget", 1}}),
               ParseError);
}

TEST(Transfer, CsvValidation) {
  EXPECT_THROW(io::transfer_observations_from_csv(
                   "source,target,delta_perf,source_data_tokens,adapter_capacity\naz,gz,0.1,0,16\n"),
               ValidationError);
  EXPECT_THROW(io::transfer_observations_from_csv("source,target,delta\naz,gz,0.1\n"), ParseError);
}

TEST(Files, MissingAndUnwritable) {
  EXPECT_THROW(io::read_text(data_path("does/not/exist.json")), IoError);
  EXPECT_THROW(io::write_text("/nonexistent-dir/x.json", "{}"), IoError);
}

}  // namespace
}  // namespace turkic
