#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oacite/corpus.hpp"
#include "oacite/metrics.hpp"
#include "oacite/report.hpp"
#include "oracles.hpp"

using namespace oacite;

namespace {

ArticleRecord rec(const std::string& id, const std::string& journal, const std::string& issue,
                  bool oa, std::int64_t cites, const std::string& discipline = "D", int year = 2000) {
  ArticleRecord r;
  r.id = id;
  r.first_author_surname = "S";
  r.title = "T " + id;
  r.journal_id = journal;
  r.year = year;
  r.issue_key = make_issue_key(journal, year, issue);
  r.discipline = discipline;
  r.country = "C";
  r.citation_count = cites;
  r.oa_status = oa ? OaStatus::OA : OaStatus::NOA;
  return r;
}

std::vector<ArticleRecord> records_with_means(double oa_mean, double noa_mean, const std::string& journal,
                                              const std::string& issue, int& next_id) {
  // Two articles per side whose means are exactly the requested values.
  std::vector<ArticleRecord> out;
  const auto half = [](double m) { return std::pair<std::int64_t, std::int64_t>{std::int64_t(m), std::int64_t(2 * m - std::int64_t(m))}; };
  auto [a, b] = half(oa_mean);
  auto [c, d] = half(noa_mean);
  out.push_back(rec("R" + std::to_string(next_id++), journal, issue, true, a));
  out.push_back(rec("R" + std::to_string(next_id++), journal, issue, true, b));
  out.push_back(rec("R" + std::to_string(next_id++), journal, issue, false, c));
  out.push_back(rec("R" + std::to_string(next_id++), journal, issue, false, d));
  return out;
}

std::vector<ArticleRecord> generated(std::size_t n, std::uint64_t seed, double multiplier = 1.0,
                                     double p_oa = 0.2) {
  corpus::CorpusSpec spec;
  spec.n_articles = n;
  spec.seed = seed;
  spec.oa_probability = p_oa;
  spec.oa_citation_multiplier = multiplier;
  spec.generate_web = false;
  return corpus::generate_corpus(spec).records;
}

}  // namespace

// --- exclusions ---------------------------------------------------------------------

TEST(Exclusions, Examples) {
  std::vector<ArticleRecord> rs;
  for (int i = 0; i < 10; ++i) rs.push_back(rec("J" + std::to_string(i), "ALLOA", "1", true, 1));
  for (int i = 0; i < 3; ++i) rs.push_back(rec("I" + std::to_string(i), "MIX", "1", true, 2));
  for (int i = 0; i < 2; ++i) rs.push_back(rec("M" + std::to_string(i), "MIX", "2", true, 2));
  for (int i = 0; i < 5; ++i) rs.push_back(rec("N" + std::to_string(i), "MIX", "2", false, 1));
  const auto ex = metrics::apply_exclusions(rs);
  ASSERT_EQ(ex.log.size(), 2u);
  EXPECT_EQ(ex.log[0], (metrics::ExclusionEntry{metrics::ExclusionReason::ALL_OA_JOURNAL, "ALLOA", 10}));
  EXPECT_EQ(ex.log[1], (metrics::ExclusionEntry{metrics::ExclusionReason::ALL_OA_ISSUE, "MIX|2000|1", 3}));
  EXPECT_EQ(ex.kept.size(), 7u);
  for (const auto& r : ex.kept) EXPECT_EQ(r.issue_key, "MIX|2000|2");
}

TEST(Exclusions, UnknownStatusRejected) {
  auto r = rec("A", "J", "1", true, 1);
  r.oa_status = OaStatus::UNKNOWN;
  try {
    metrics::apply_exclusions(std::vector<ArticleRecord>{r});
    FAIL();
  } catch (const metrics::MetricsError& e) {
    EXPECT_EQ(e.code(), "UNKNOWN_STATUS");
    EXPECT_NE(std::string(e.what()).find("detection"), std::string::npos);
  }
}

TEST(Exclusions, Idempotent) {
  const auto rs = generated(3000, 4, 1.0, 0.6);
  const auto once = metrics::apply_exclusions(rs);
  const auto twice = metrics::apply_exclusions(once.kept);
  EXPECT_EQ(twice.kept, once.kept);
  EXPECT_TRUE(twice.log.empty());
}

// --- percent OA ---------------------------------------------------------------------

TEST(PercentOa, Examples) {
  metrics::OAShareReport big{"all", 156845, 1307038 - 156845};
  EXPECT_EQ(report::pct(big.percent_oa()), "12.0");
  std::vector<ArticleRecord> rs;
  for (int i = 0; i < 5; ++i) rs.push_back(rec("a" + std::to_string(i), "J", "1", true, 0, "X"));
  for (int i = 0; i < 5; ++i) rs.push_back(rec("b" + std::to_string(i), "J", "1", false, 0, "X"));
  for (int i = 0; i < 3; ++i) rs.push_back(rec("c" + std::to_string(i), "K", "1", false, 0, "Y"));
  const auto shares = metrics::percent_oa(rs, metrics::Dimension::Discipline);
  ASSERT_EQ(shares.size(), 2u);
  EXPECT_DOUBLE_EQ(shares[0].percent_oa(), 0.5);
  EXPECT_DOUBLE_EQ(shares[1].percent_oa(), 0.0);
}

TEST(PercentOa, CountsMatchGroups) {
  const auto rs = metrics::apply_exclusions(generated(5000, 8)).kept;
  for (auto d : metrics::kAllDimensions) {
    std::size_t total = 0;
    for (const auto& s : metrics::percent_oa(rs, d)) {
      EXPECT_GE(s.percent_oa(), 0.0);
      EXPECT_LE(s.percent_oa(), 1.0);
      const auto n = std::count_if(rs.begin(), rs.end(),
                                   [&](const ArticleRecord& r) { return metrics::group_key(r, d) == s.key; });
      EXPECT_EQ(static_cast<std::size_t>(n), s.n_total());
      total += s.n_total();
    }
    EXPECT_EQ(total, rs.size());
  }
}

// --- issue advantage ------------------------------------------------------------------

TEST(IssueAdvantage, Examples) {
  int id = 0;
  auto a = metrics::issue_advantage(records_with_means(3.0, 2.0, "J", "1", id));
  ASSERT_TRUE(a.ratio);
  EXPECT_DOUBLE_EQ(*a.ratio, 0.5);
  a = metrics::issue_advantage(records_with_means(2.0, 2.0, "J", "1", id));
  EXPECT_DOUBLE_EQ(*a.ratio, 0.0);
  a = metrics::issue_advantage(records_with_means(4.0, 0.0, "J", "1", id));
  EXPECT_FALSE(a.ratio);
  EXPECT_EQ(a.excluded, metrics::IssueExclusion::ZERO_NOA_CITATIONS);
  const std::vector<ArticleRecord> all_oa{rec("x", "J", "1", true, 3)};
  EXPECT_EQ(metrics::issue_advantage(all_oa).excluded, metrics::IssueExclusion::ALL_OA_ISSUE);
  const std::vector<ArticleRecord> all_noa{rec("y", "J", "1", false, 3)};
  EXPECT_EQ(metrics::issue_advantage(all_noa).excluded, metrics::IssueExclusion::ALL_NOA_ISSUE);
  const std::vector<ArticleRecord> mixed{rec("x", "J", "1", true, 3), rec("y", "J", "2", false, 3)};
  EXPECT_THROW(metrics::issue_advantage(mixed), metrics::MetricsError);
}

TEST(IssueAdvantage, ScaleEquivariant) {
  std::mt19937 gen(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ArticleRecord> issue;
    for (int i = 0; i < 12; ++i) issue.push_back(rec("r" + std::to_string(i), "J", "1", i % 3 == 0, gen() % 20));
    issue.push_back(rec("n", "J", "1", false, 1 + gen() % 5));
    const auto base = metrics::issue_advantage(issue);
    for (std::int64_t k : {2, 3, 17}) {
      auto scaled = issue;
      for (auto& r : scaled) r.citation_count *= k;
      EXPECT_NEAR(*metrics::issue_advantage(scaled).ratio, *base.ratio, 1e-12);
    }
  }
}

// --- aggregation ----------------------------------------------------------------------

TEST(Aggregate, JournalMeanOfIssues) {
  int id = 0;
  auto rs = records_with_means(4.0, 2.0, "J", "1", id);  // +1.0
  auto more = records_with_means(2.0, 2.0, "J", "2", id);  // 0.0
  rs.insert(rs.end(), more.begin(), more.end());
  auto reps = metrics::aggregate_advantage(rs, metrics::Dimension::Discipline);
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_DOUBLE_EQ(*reps[0].advantage, 0.5);
  EXPECT_EQ(reps[0].n_issues_included, 2u);
  EXPECT_EQ(reps[0].n_journals, 1u);

  auto single = records_with_means(3.0, 2.0, "K", "1", id);
  EXPECT_DOUBLE_EQ(*metrics::aggregate_advantage(single, metrics::Dimension::Discipline)[0].advantage, 0.5);
}

TEST(Aggregate, NoData) {
  const std::vector<ArticleRecord> rs{rec("a", "J", "1", false, 0), rec("b", "J", "1", true, 4)};
  const auto reps = metrics::aggregate_advantage(rs, metrics::Dimension::Discipline);
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_TRUE(reps[0].no_data());
  EXPECT_EQ(reps[0].status(), "NO_DATA");
  EXPECT_EQ(reps[0].excluded_zero_noa_citations, 1u);
}

TEST(Aggregate, ArticleWeighted) {
  int id = 0;
  auto rs = records_with_means(4.0, 2.0, "J", "1", id);  // +1.0 with 4 articles
  auto big = records_with_means(2.0, 2.0, "J", "2", id);  // 0.0 with 8 articles
  auto big2 = records_with_means(2.0, 2.0, "J", "2", id);
  rs.insert(rs.end(), big.begin(), big.end());
  rs.insert(rs.end(), big2.begin(), big2.end());
  const auto w = metrics::aggregate_advantage(rs, metrics::Dimension::Discipline,
                                              metrics::Weighting::ArticleWeighted);
  EXPECT_NEAR(*w[0].advantage, 4.0 / 12.0, 1e-15);
  const auto u = metrics::aggregate_advantage(rs, metrics::Dimension::Discipline);
  EXPECT_NEAR(*u[0].advantage, 0.5, 1e-15);
}

TEST(Aggregate, MatchesBruteForceOracle) {
  const auto raw = generated(6000, 12, 1.7, 0.3);
  const auto kept = metrics::apply_exclusions(raw).kept;
  for (auto d : metrics::kAllDimensions) {
    const auto expected = oracle::advantage(raw, [&](const ArticleRecord& r) { return metrics::group_key(r, d); });
    for (const auto& rep : metrics::aggregate_advantage(kept, d)) {
      if (rep.no_data()) {
        EXPECT_FALSE(expected.count(rep.key));
        continue;
      }
      ASSERT_TRUE(expected.count(rep.key)) << rep.key;
      EXPECT_NEAR(*rep.advantage, expected.at(rep.key), 1e-9) << rep.key;
    }
  }
}

TEST(Aggregate, PlantedDisciplineAdvantage) {
  // One discipline whose OA articles are cited 1.8x as much as NOA ones,
  // deterministically within every issue.
  std::vector<ArticleRecord> rs;
  std::mt19937 gen(3);
  int id = 0;
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 8; ++i)
      for (int k = 0; k < 10; ++k) {
        const std::int64_t base = 5 + gen() % 20;
        rs.push_back(rec("p" + std::to_string(id++), "J" + std::to_string(j), std::to_string(i), false, base, "Planted"));
        rs.push_back(rec("p" + std::to_string(id++), "J" + std::to_string(j), std::to_string(i), true, base * 9 / 5, "Planted"));
      }
  const auto reps = metrics::aggregate_advantage(metrics::apply_exclusions(rs).kept, metrics::Dimension::Discipline);
  const double brute = oracle::advantage(rs, [](const ArticleRecord& r) { return r.discipline; }).at("Planted");
  EXPECT_NEAR(*reps[0].advantage, brute, 0.05);
  EXPECT_NEAR(*reps[0].advantage, 0.8, 0.05);
}

TEST(Aggregate, PermutationInvariant) {
  auto rs = metrics::apply_exclusions(generated(3000, 14, 1.5)).kept;
  const auto before = metrics::aggregate_advantage(rs, metrics::Dimension::Country);
  std::mt19937 gen(2);
  std::shuffle(rs.begin(), rs.end(), gen);
  const auto after = metrics::aggregate_advantage(rs, metrics::Dimension::Country);
  ASSERT_EQ(before.size(), after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_EQ(before[i].key, after[i].key);
    EXPECT_EQ(before[i].advantage, after[i].advantage);  // bit-identical
  }
}

// --- cohorts ------------------------------------------------------------------------------

TEST(Cohorts, SharesSumToOne) {
  const auto t = metrics::cohort_table(generated(8000, 5, 2.0), true);
  EXPECT_EQ(t.rows.size(), 12u);
  for (const auto& row : t.rows) {
    double oa = 0, noa = 0;
    for (const auto& c : row.cells) oa += *c.oa_c, noa += *c.noa_c;
    EXPECT_NEAR(oa, 1.0, 1e-9);
    EXPECT_NEAR(noa, 1.0, 1e-9);
  }
}

TEST(Cohorts, IdenticalDistributionsGiveZeroDelta) {
  std::vector<ArticleRecord> rs;
  for (int c = 0; c < 40; ++c) {
    rs.push_back(rec("o" + std::to_string(c), "J", "1", true, c));
    rs.push_back(rec("n" + std::to_string(c), "J", "1", false, c));
    rs.push_back(rec("m" + std::to_string(c), "J", "1", false, c));
  }
  for (const auto& c : metrics::cohort_table(rs, false).rows[0].cells) EXPECT_NEAR(*c.delta, 0.0, 1e-15);
}

TEST(Cohorts, PlantedMultiplierMatchesRecount) {
  const auto rs = generated(20000, 6, 2.0);
  const auto row = metrics::cohort_table(rs, false).rows.at(0);
  const auto h = oracle::cohort_histogram(rs);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(*row.cells[i].oa_c, h.oa_share[i], 1e-12);
    EXPECT_NEAR(*row.cells[i].noa_c, h.noa_share[i], 1e-12);
    EXPECT_NEAR(*row.cells[i].delta, (h.oa_share[i] - h.noa_share[i]) / h.noa_share[i], 1e-9);
  }
  // OA is under-represented among the uncited and over-represented at the top.
  EXPECT_LT(*row.cells[0].delta, 0.0);
  EXPECT_GT(*row.cells[5].delta, 0.0);
}

TEST(Cohorts, UndefinedRatioWhenNoaCellEmpty) {
  const std::vector<ArticleRecord> rs{rec("a", "J", "1", true, 20), rec("b", "J", "1", false, 0)};
  const auto row = metrics::cohort_table(rs, false).rows[0];
  EXPECT_FALSE(row.cell(CitationRange::R16_PLUS).ratio.has_value());
  EXPECT_DOUBLE_EQ(*row.cell(CitationRange::R0).ratio, 0.0);
}

// --- reports --------------------------------------------------------------------------

TEST(Report, EmptyIsHeaderOnly) {
  EXPECT_EQ(report::render_oa_share({}, metrics::Dimension::Year), "year,n_oa,n_noa,n_total,percent_oa\n");
  EXPECT_EQ(report::render_cohorts({}),
            "year,range,n_total,total_pct,n_oa,n_noa,oa_c_pct,noa_c_pct,ratio,delta_pct\n");
  EXPECT_EQ(report::render_exclusions({}), "reason,key,n_records\n");
}

TEST(Report, CsvQuotingAndNegativeZero) {
  EXPECT_EQ(report::csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(report::csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(report::pct(-0.0001), "0.0");
  EXPECT_EQ(report::pct(0.1234), "12.3");
}

TEST(Report, GoldenSnapshot) {
  corpus::CorpusSpec spec;
  spec.n_articles = 1500;
  spec.seed = 2024;
  spec.oa_probability = 0.3;
  spec.oa_citation_multiplier = 2.0;
  spec.journals_per_discipline = 2;
  spec.issues_per_year = 1;
  spec.generate_web = false;
  const auto rs = metrics::apply_exclusions(corpus::generate_corpus(spec).records).kept;
  const std::string got = report::render_advantage(metrics::aggregate_advantage(rs, metrics::Dimension::Discipline),
                                                   metrics::Dimension::Discipline) +
                          report::render_cohorts(metrics::cohort_table(rs, false));
  const std::string path = std::string(OACITE_SOURCE_DIR) + "/tests/golden/snapshot.csv";
  if (std::getenv("OACITE_UPDATE_GOLDEN")) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream(path, std::ios::binary) << got;
    GTEST_SKIP() << "golden file rewritten";
  }
  std::ifstream in(path);
  ASSERT_TRUE(in) << "missing golden file; rerun with OACITE_UPDATE_GOLDEN=1";
  std::stringstream want;
  want << in.rdbuf();
  EXPECT_EQ(got, want.str());
}

// --- corpus ---------------------------------------------------------------------------

TEST(Corpus, Deterministic) {
  corpus::CorpusSpec spec;
  spec.n_articles = 150;
  spec.seed = 77;
  spec.decoys.abstract_page_prob = 0.2;
  const auto a = corpus::generate_corpus(spec);
  const auto b = corpus::generate_corpus(spec);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.truth, b.truth);
  ASSERT_EQ(a.web.pages.size(), b.web.pages.size());
  for (const auto& [u, p] : a.web.pages) EXPECT_EQ(b.web.pages.at(u).body, p.body);
  spec.seed = 78;
  EXPECT_NE(corpus::generate_corpus(spec).records, a.records);
}

TEST(Corpus, SpecValidation) {
  EXPECT_THROW(corpus::spec_from_json(nlohmann::json{{"n_articles", 0}}), corpus::CorpusError);
  EXPECT_THROW(corpus::spec_from_json(nlohmann::json{{"oa_probability", 1.5}}), corpus::CorpusError);
  EXPECT_THROW(corpus::spec_from_json(nlohmann::json{{"decoys", {{"chain_depth_distribution", {1, 0}}}}}),
               corpus::CorpusError);
  EXPECT_THROW(corpus::spec_from_json(nlohmann::json{{"citation_model", {{"mean_cited", 0.5}}}}),
               corpus::CorpusError);
  EXPECT_THROW(corpus::spec_from_json(nlohmann::json{{"n_articles", "ten"}}), corpus::CorpusError);
  const auto s = corpus::spec_from_json(nlohmann::json::parse(
      R"({"n_articles": 10, "years": [2000, 2001], "oa_probability": {"default": 0.1, "*|2001": 0.9},
          "oa_count": null, "seed": 5})"));
  EXPECT_EQ(s.n_articles, 10u);
  EXPECT_EQ(s.year_to, 2001);
  EXPECT_DOUBLE_EQ(s.oa_probability, 0.1);
  EXPECT_DOUBLE_EQ(s.oa_probability_by_cell.at("*|2001"), 0.9);
}

TEST(Corpus, ExactOaCount) {
  corpus::CorpusSpec spec;
  spec.n_articles = 500;
  spec.oa_count = 60;
  spec.generate_web = false;
  const auto c = corpus::generate_corpus(spec);
  EXPECT_EQ(std::count_if(c.records.begin(), c.records.end(), oracle::is_oa), 60);
}

TEST(Corpus, PlantedMeanShift) {
  for (double m : {1.0, 2.0, 0.2}) {
    const auto rs = generated(60000, 31, m, 0.5);
    double s_oa = 0, s_noa = 0, n_oa = 0, n_noa = 0;
    for (const auto& r : rs) (oracle::is_oa(r) ? (s_oa += r.citation_count, n_oa += 1) : (s_noa += r.citation_count, n_noa += 1));
    EXPECT_NEAR((s_oa / n_oa) / (s_noa / n_noa), m, 0.06 * m) << m;
  }
}

TEST(Corpus, GroundTruthIsSound) {
  corpus::CorpusSpec spec;
  spec.n_articles = 200;
  spec.oa_probability = 0.5;
  spec.decoys.abstract_page_prob = 0.4;
  spec.decoys.dead_link_prob = 0.3;
  spec.decoys.chain_depth_distribution = {1, 1, 1, 1, 1, 1};
  spec.seed = 9;
  const auto c = corpus::generate_corpus(spec);
  for (std::size_t i = 0; i < c.records.size(); ++i) {
    const auto& g = c.truth[i];
    EXPECT_EQ(g.reachable, corpus::reachable_within(c.web, c.records[i], 3));
    if (g.oa) EXPECT_EQ(g.reachable, *g.chain_depth <= 3) << g.id;
    else EXPECT_FALSE(g.reachable);
  }
}

TEST(Corpus, ExportImportRoundTrip) {
  corpus::CorpusSpec spec;
  spec.n_articles = 60;
  spec.decoys.abstract_page_prob = 0.3;
  spec.decoys.dead_link_prob = 0.3;
  const auto c = corpus::generate_corpus(spec);
  const auto dir = std::filesystem::temp_directory_path() / "oacite_corpus_rt";
  std::filesystem::remove_all(dir);
  corpus::export_corpus(c, dir);
  const auto web = corpus::load_mock_web(dir / "mockweb");
  ASSERT_EQ(web.pages.size(), c.web.pages.size());
  for (const auto& [u, p] : c.web.pages) {
    EXPECT_EQ(web.pages.at(u).body, p.body);
    EXPECT_EQ(web.pages.at(u).format, p.format);
  }
  EXPECT_EQ(web.dead_links, c.web.dead_links);
  ASSERT_EQ(web.providers.size(), c.web.providers.size());
  EXPECT_EQ(web.providers[0].index, c.web.providers[0].index);
  EXPECT_EQ(corpus::load_ground_truth((dir / "ground_truth.jsonl").string()), c.truth);
  for (const auto& r : load_records((dir / "records.jsonl").string())) EXPECT_EQ(r.oa_status, OaStatus::UNKNOWN);
  std::filesystem::remove_all(dir);
}

TEST(Corpus, AuditSampling) {
  std::vector<DetectionEvidence> det;
  std::vector<corpus::GroundTruth> truth;
  for (int i = 0; i < 300; ++i) {
    DetectionEvidence e;
    e.article_id = "A" + std::to_string(i);
    e.verdict = i < 150 ? OaStatus::OA : OaStatus::NOA;
    e.url = "http://x/";
    det.push_back(e);
    corpus::GroundTruth g;
    g.id = e.article_id;
    g.oa = i < 150;
    truth.push_back(g);
  }
  // A perfect robot.
  EXPECT_EQ(corpus::run_audit(det, truth, 100, 1), (stats::ConfusionMatrix{100, 0, 0, 100}));
  // Same seed, same sample.
  truth[0].oa = false;
  truth[200].oa = true;
  EXPECT_EQ(corpus::run_audit(det, truth, 100, 5), corpus::run_audit(det, truth, 100, 5));
  // Not enough tagged records.
  try {
    corpus::run_audit(det, truth, 151, 1);
    FAIL();
  } catch (const corpus::AuditError& e) {
    EXPECT_EQ(e.robot_oa(), 150u);
    EXPECT_EQ(e.robot_noa(), 150u);
  }
}
