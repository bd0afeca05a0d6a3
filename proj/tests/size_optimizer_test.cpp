#include <gtest/gtest.h>

#include "patchfinder/size_optimizer.hpp"
#include "support/synthetic.hpp"

namespace pf = patchfinder;

namespace {

std::vector<pf::SizeStats> rows(const std::vector<std::tuple<double, double, double>>& data) {
  std::vector<pf::SizeStats> out;
  for (const auto& [s, mean, sd] : data) out.push_back({s, mean, sd, 10, 0});
  return out;
}

pf::ExtractionTask latitude_task() {
  return {"latitude", pf::FieldKind::Latitude, "Extract the latitude.", pf::default_chain(pf::FieldKind::Latitude), 64, false};
}

}  // namespace

TEST(ChooseSize, HandEvaluatedPlateau) {
  // best mean -0.28 at 20%; threshold -0.33. 10% and 20% qualify (std <= 0.5),
  // 30% misses both the band (-0.35) and the std cap (0.8). Largest qualifier: 20%.
  const auto r = rows({{0.02, -3.0, 0.1}, {0.05, -0.4, 0.2}, {0.10, -0.30, 0.15},
                       {0.20, -0.28, 0.2}, {0.30, -0.35, 0.8}, {0.50, -0.9, 1.2}});
  EXPECT_EQ(pf::choose_size(r, 0.05, 0.5), 0.20);
}

TEST(ChooseSize, SingleCandidate) { EXPECT_EQ(pf::choose_size(rows({{0.25, -1.0, 2.0}}), 0.05, 0.5), 0.25); }

TEST(ChooseSize, FallbackToBestMeanWhenNothingQualifies) {
  const auto r = rows({{0.1, -0.5, 0.9}, {0.2, -0.2, 0.9}, {0.3, -0.4, 0.9}});
  EXPECT_EQ(pf::choose_size(r, 0.05, 0.5), 0.2);
  // ties on the mean go to the larger size
  EXPECT_EQ(pf::choose_size(rows({{0.1, -0.2, 0.9}, {0.2, -0.2, 0.9}}), 0.05, 0.5), 0.2);
}

TEST(ChooseSize, PrefersLargestQualifier) {
  const auto r = rows({{0.1, -0.10, 0.1}, {0.2, -0.12, 0.1}, {0.3, -0.14, 0.1}, {0.4, -0.5, 0.1}});
  EXPECT_EQ(pf::choose_size(r, 0.05, 0.5), 0.3);
  EXPECT_EQ(pf::choose_size(r, 0.0, 0.5), 0.1);
}

TEST(ChooseSize, DominatedCandidateDoesNotChangeChoice) {
  auto r = rows({{0.1, -0.30, 0.15}, {0.2, -0.28, 0.2}, {0.3, -0.35, 0.8}});
  const double before = pf::choose_size(r, 0.05, 0.5);
  r.push_back({0.6, -2.0, 3.0, 10, 0});
  EXPECT_EQ(pf::choose_size(r, 0.05, 0.5), before);
}

TEST(ChooseSize, RowsWithoutDataNeverQualify) {
  auto r = rows({{0.1, -0.3, 0.1}});
  r.push_back({0.5, std::nan(""), std::nan(""), 0, 10});
  EXPECT_EQ(pf::choose_size(r, 0.05, 0.5), 0.1);
  std::vector<pf::SizeStats> empty_rows{{0.1, std::nan(""), std::nan(""), 0, 3}, {0.23, std::nan(""), std::nan(""), 0, 3}};
  EXPECT_EQ(pf::choose_size(empty_rows, 0.05, 0.5), 0.23);
  EXPECT_THROW(pf::choose_size(std::vector<pf::SizeStats>{}, 0.05, 0.5), pf::ConfigError);
}

TEST(Summarize, PopulationStatistics) {
  const auto s = pf::summarize(0.25, {-0.2, -0.4}, 1);
  EXPECT_DOUBLE_EQ(s.mean_pc, -0.3);
  EXPECT_NEAR(s.std_pc, 0.1, 1e-15);
  EXPECT_EQ(s.n, 2u);
  EXPECT_EQ(s.failed, 1u);
  EXPECT_EQ(pf::summarize(0.1, {-0.7}, 0).std_pc, 0.0);
}

TEST(SweepConfig, Validation) {
  pf::SweepConfig c;
  EXPECT_NO_THROW(c.validate());
  c.candidate_fractions = {0.2, 0.1};
  EXPECT_THROW(c.validate(), pf::ConfigError);
  c.candidate_fractions = {0.0, 0.1};
  EXPECT_THROW(c.validate(), pf::ConfigError);
  c.candidate_fractions = {};
  EXPECT_THROW(c.validate(), pf::ConfigError);
}

TEST(Sweep, EmptyDevSetIsConfigError) {
  pf::MockBackend mock(pf::MockScript{});
  EXPECT_THROW(pf::sweep(pf::SweepConfig{}, {}, mock), pf::ConfigError);
}

TEST(Sweep, SingleDocSingleSize) {
  pf::RasterImage img(40, 40, 1, 200);
  pf::MockBackend mock(pf::MockScript(pf::scripted_response({{"45.1", -0.3}})));
  pf::SweepConfig cfg;
  cfg.candidate_fractions = {0.25};
  const auto r = pf::sweep(cfg, {{"a", "g", &img, latitude_task()}}, mock);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(r.rows[0].mean_pc, -0.3);
  EXPECT_EQ(r.rows[0].std_pc, 0.0);
  EXPECT_EQ(r.chosen_fraction, 0.25);
}

TEST(Sweep, TwoDocsMeanAndGroups) {
  pf::RasterImage a(40, 40, 1, 200), b(40, 40, 1, 100);
  pf::MockScript script;
  script.add_fingerprint(pf::fingerprint(a), pf::scripted_response({{"45.1", -0.2}}));
  script.add_fingerprint(pf::fingerprint(b), pf::scripted_response({{"45.1", -0.4}}));
  pf::MockBackend mock(std::move(script));
  pf::SweepConfig cfg;
  // s=1.0: one patch equal to the whole image, so fingerprints match the docs
  cfg.candidate_fractions = {1.0};
  const auto r = pf::sweep(cfg, {{"a", "co", &a, latitude_task()}, {"b", "pa", &b, latitude_task()}}, mock);
  EXPECT_NEAR(r.rows[0].mean_pc, -0.3, 1e-15);
  ASSERT_EQ(r.group_rows.size(), 2u);
  EXPECT_DOUBLE_EQ(r.group_rows.at("co")[0].mean_pc, -0.2);
  EXPECT_DOUBLE_EQ(r.group_rows.at("pa")[0].mean_pc, -0.4);
  EXPECT_EQ(r.points.size(), 2u);
}

TEST(Sweep, FailedItemsCountedSeparately) {
  pf::RasterImage img(40, 40, 1, 200);
  pf::MockBackend mock(pf::MockScript(pf::scripted_response({{"none", -0.1}})));
  pf::SweepConfig cfg;
  cfg.candidate_fractions = {0.5, 1.0};
  const auto r = pf::sweep(cfg, {{"a", "g", &img, latitude_task()}}, mock);
  EXPECT_EQ(r.rows[0].n, 0u);
  EXPECT_EQ(r.rows[0].failed, 1u);
  EXPECT_FALSE(r.points[0].pc);
}

TEST(Sweep, DefaultCandidatesOnSyntheticCorpus) {
  const auto docs = pftest::make_corpus(6, 99);
  const pf::SweepConfig cfg;
  std::vector<pf::GridSpec> specs;
  for (double s : cfg.candidate_fractions) specs.push_back({s, cfg.aspect_mode, cfg.overlap});
  pf::MockBackend mock(pftest::script_for(docs, specs));
  std::vector<pf::DevItem> items;
  for (const auto& d : docs) items.push_back({d.document_id, d.group, &d.image, latitude_task()});
  const auto r = pf::sweep(cfg, items, mock);
  ASSERT_EQ(r.rows.size(), 11u);
  EXPECT_EQ(r.points.size(), 66u);
  EXPECT_NE(std::find(cfg.candidate_fractions.begin(), cfg.candidate_fractions.end(), r.chosen_fraction),
            cfg.candidate_fractions.end());
  // tiny patches cannot hold the target: far below the plateau
  EXPECT_LT(r.rows.front().mean_pc, r.rows[5].mean_pc - 0.5);
}
