#include <doctest.h>

#include <random>
#include <sstream>

#include "mmblock/eval.hpp"

using namespace mmblock;

namespace {

using Rows = std::vector<std::vector<bool>>;

Rows random_rows(std::mt19937_64& rng, std::size_t n, std::size_t h, double p) {
  std::bernoulli_distribution b(p);
  Rows r(n, std::vector<bool>(h));
  for (auto& row : r)
    for (std::size_t k = 0; k < h; ++k) row[k] = b(rng);
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("confusion accounting examples") {
  const Rows truth{{true, false}, {false, false}, {true, true}};
  auto e = evaluate_blockage(truth, truth);
  CHECK(e.aggregate.accuracy() == 1.0);
  CHECK(e.aggregate.total() == 6);
  REQUIRE(e.per_step.size() == 2);

  const Rows negatives(4, std::vector<bool>(3, false));
  const Rows positives(4, std::vector<bool>(3, true));
  e = evaluate_blockage(positives, negatives);
  CHECK(e.aggregate.accuracy() == 0.0);
  REQUIRE(e.aggregate.precision().has_value());
  CHECK(*e.aggregate.precision() == 0.0);

  e = evaluate_blockage(negatives, positives);
  CHECK_FALSE(e.aggregate.precision().has_value());

  CHECK_THROWS_AS(evaluate_blockage(Rows{{true}}, Rows{{true}, {false}}), Error);
  CHECK_THROWS_AS(evaluate_blockage(Rows{{true}}, Rows{{true, false}}), Error);
}

TEST_CASE("confusion counts match an independent recount") {
  std::mt19937_64 rng(99);
  const auto pred = random_rows(rng, 200, 5, 0.3);
  const auto truth = random_rows(rng, 200, 5, 0.2);
  const auto e = evaluate_blockage(pred, truth);
  long tp[5] = {}, fp[5] = {}, tn[5] = {}, fn[5] = {};
  for (std::size_t i = 0; i < 200; ++i)
    for (std::size_t h = 0; h < 5; ++h) {
      const bool p = pred[i][h], t = truth[i][h];
      (p ? (t ? tp : fp) : (t ? fn : tn))[h] += 1;
    }
  long atp = 0, afp = 0, atn = 0, afn = 0;
  long correct_sum = 0;
  for (std::size_t h = 0; h < 5; ++h) {
    CHECK(e.per_step[h] == ConfusionCounts{tp[h], fp[h], tn[h], fn[h]});
    atp += tp[h], afp += fp[h], atn += tn[h], afn += fn[h];
    correct_sum += e.per_step[h].tp + e.per_step[h].tn;
  }
  CHECK(e.aggregate == ConfusionCounts{atp, afp, atn, afn});
  CHECK(e.aggregate.accuracy() == static_cast<double>(atp + atn) / 1000.0);
  CHECK(*e.aggregate.precision() == static_cast<double>(atp) / static_cast<double>(atp + afp));
  // per-horizon accuracies, count-weighted, give the aggregate
  CHECK(static_cast<double>(correct_sum) / 1000.0 == e.aggregate.accuracy());
}

TEST_CASE("localization error statistics") {
  std::vector<std::vector<Centroid>> truth{{{1, 1.0, 1.0, true}, {2, 2.0, 2.0, true}},
                                           {{1, 5.0, 0.0, true}, {2, 0.0, 0.0, true}}};
  auto e = evaluate_localization(truth, truth);
  CHECK(e.aggregate.mean == 0.0);
  CHECK(e.aggregate.p90 == 0.0);

  auto pred = truth;
  for (auto& row : pred)
    for (auto& c : row) c.x += 3.0, c.y += 4.0;
  e = evaluate_localization(pred, truth);
  CHECK(e.aggregate.count == 4);
  CHECK(e.aggregate.mean == 5.0);
  CHECK(e.aggregate.median == 5.0);
  REQUIRE(e.per_step.size() == 2);
  CHECK(e.per_step[1].mean == 5.0);

  const auto s = error_stats({4.0, 1.0, 3.0, 2.0});
  CHECK(s.mean == 2.5);
  CHECK(s.median == 2.5);
  CHECK(s.p90 == doctest::Approx(3.7));

  truth[0][0].valid = false;
  CHECK_THROWS_AS(evaluate_localization(pred, truth), Error);
}

TEST_CASE("multi-seed summary") {
  const std::vector<std::vector<double>> two{{0.7, 0.9}, {0.8, 0.9}};
  const auto r = multi_seed_report(two);
  CHECK(r.seeds == 2);
  CHECK(r.mean[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(r.stddev[0] == doctest::Approx(0.0707106781).epsilon(1e-9));
  CHECK(r.stddev[1] == 0.0);
  CHECK_THROWS_AS(multi_seed_report(std::vector<std::vector<double>>{{0.7}}), Error);
}

TEST_CASE("report csv schemas") {
  const Rows truth{{true, false}, {false, false}};
  const Rows pred{{true, true}, {false, false}};
  std::vector<MethodReport> reports{{"proposed", evaluate_blockage(pred, truth), std::nullopt},
                                    {"rf", evaluate_blockage(Rows(2, {false, false}), truth), std::nullopt}};
  const auto agg = lines(aggregate_csv(reports));
  REQUIRE(agg.size() == 3);
  CHECK(agg[0] == "method,accuracy,precision,tp,fp,tn,fn,total");
  CHECK(agg[1] == "proposed,0.75,0.5,1,1,2,0,4");
  CHECK(agg[2] == "rf,0.75,,0,0,3,1,4");

  const auto ph = lines(per_horizon_csv(reports));
  CHECK(ph[0] == "method,horizon,accuracy,precision,tp,fp,tn,fn,total");
  CHECK(ph.size() == 5);

  const std::vector<std::string> methods{"proposed"};
  const std::vector<SeedSummary> sums{multi_seed_report(std::vector<std::vector<double>>{{0.7}, {0.8}})};
  const auto ss = lines(seed_summary_csv(methods, sums));
  CHECK(ss[0] == "method,horizon,mean_accuracy,std_accuracy,seeds");
  CHECK(ss.size() == 2);

  const auto table = text_table(reports);
  CHECK(table.find("proposed") != std::string::npos);
  CHECK(table.find("rf") != std::string::npos);
}
