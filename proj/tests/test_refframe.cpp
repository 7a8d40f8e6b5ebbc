#include <doctest.h>

#include <random>
#include <sstream>

#include "leadframe/config.hpp"
#include "leadframe/errors.hpp"
#include "leadframe/refframe.hpp"
#include "oracle.hpp"
#include "paper_fixture.hpp"

using namespace leadframe;
using namespace leadframe::testing;

namespace {

CompiledPlan paper_plan() {
  const auto c = default_run_config();
  return CompiledPlan(c.plan, c.schema);
}

const TrainingRow& row_for(const TrainingSet& set, const std::string& id) {
  for (const auto& r : set.rows) {
    if (r.features.entity_id == id) return r;
  }
  FAIL("missing row " << id);
  return set.rows.front();
}

void check_row(const std::vector<double>& got, const std::vector<double>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

}  // namespace

TEST_CASE("detect_event_time on the paper panel") {
  auto t = paper_timelines();
  CHECK(detect_event_time(t["Kumarjit"])->label == "2016-10");
  CHECK(detect_event_time(t["Jitin"])->label == "2017-03");
  CHECK_FALSE(detect_event_time(t["Prabhu"]).has_value());
  CHECK_FALSE(detect_event_time(t["Aasheesh"]).has_value());
}

TEST_CASE("truncate_at_reference") {
  auto t = paper_timelines();
  const ReferenceFrameConfig lead1{1, EmptyWindowPolicy::Drop};

  auto k = truncate_at_reference(t["Kumarjit"], lead1);
  CHECK(k.label == 1);
  REQUIRE(k.records.size() == 9);
  CHECK(k.records.back().period.label == "2016-09");

  auto a = truncate_at_reference(t["Aasheesh"], lead1);
  CHECK(a.label == 0);
  CHECK(a.records.size() == 24);

  auto k0 = truncate_at_reference(t["Kumarjit"], {0, EmptyWindowPolicy::Drop});
  CHECK(k0.records.size() == 10);
  CHECK(k0.records.back().period.label == "2016-10");

  EntityTimeline only_event{"solo", {t["Prabhu"].records[0]}};
  only_event.records[0].entity_id = "solo";
  only_event.records[0].event_flag = 1;
  auto dropped = truncate_at_reference(only_event, lead1);
  CHECK(dropped.label == 1);
  CHECK(dropped.dropped);
  CHECK(dropped.records.empty());
  auto kept = truncate_at_reference(only_event, {1, EmptyWindowPolicy::EmitZeros});
  CHECK_FALSE(kept.dropped);
  CHECK(aggregate(kept, paper_plan()).values == std::vector<double>(5, 0.0));

  CHECK_THROWS_AS(truncate_at_reference(only_event, {-1, EmptyWindowPolicy::Drop}), Error);
}

TEST_CASE("lead time counts calendar periods across gaps") {
  // Event at 2020-06; the entity has no 2020-05 row, so t = 1 keeps through 2020-04.
  std::istringstream in(
      "id,t,x,y,flag\n"
      "g,2020-03,1,0,0\ng,2020-04,2,0,0\ng,2020-06,4,0,1\n");
  const auto timelines = build_timelines(parse_panel_csv(in, {"id", "t", "flag", {"x", "y"}}));
  auto kept = truncate_at_reference(timelines[0], {1, EmptyWindowPolicy::Drop});
  REQUIRE(kept.records.size() == 2);
  kept = truncate_at_reference(timelines[0], {2, EmptyWindowPolicy::Drop});
  REQUIRE(kept.records.size() == 2);
  kept = truncate_at_reference(timelines[0], {3, EmptyWindowPolicy::Drop});
  REQUIRE(kept.records.size() == 1);
}

TEST_CASE("aggregate reproduces the lead-time-1 paper rows") {
  auto t = paper_timelines();
  const auto plan = paper_plan();
  const ReferenceFrameConfig lead1{1, EmptyWindowPolicy::Drop};

  const auto k = aggregate(truncate_at_reference(t["Kumarjit"], lead1), plan).values;
  CHECK(k[0] == 10);
  CHECK(k[1] == 3);
  CHECK(k[2] == 4);
  CHECK(k[3] == 5.5);
  CHECK(k[4] == 3);

  const auto j = aggregate(truncate_at_reference(t["Jitin"], lead1), plan).values;
  CHECK(j[3] == doctest::Approx(26.0 / 3.0));
  CHECK(std::abs(j[3] - 8.6) < 0.1);

  const auto p = aggregate(truncate_at_reference(t["Prabhu"], lead1), plan).values;
  CHECK(p[3] == 0.0);
}

TEST_CASE("aggregate kinds") {
  const PanelSchema schema{"id", "t", "flag", {"a", "c"}};
  const AggregationPlan plan{{{"sum", AggregateKind::Sum, "a", {}},
                              {"nz", AggregateKind::CountNonzero, "a", {}},
                              {"max", AggregateKind::Max, "a", {}},
                              {"last", AggregateKind::Last, "a", {}},
                              {"ratio", AggregateKind::RatioOfSums, "a", "c"}}};
  const CompiledPlan compiled(plan, schema);
  std::istringstream in("id,t,a,c,flag\nz,1,3,1,0\nz,2,0,0,0\nz,3,5,3,0\nz,4,1,0,0\n");
  const auto timelines = build_timelines(parse_panel_csv(in, schema));
  const auto v = score_features(timelines[0], compiled).values;
  check_row(v, {9, 3, 5, 1, 9.0 / 4.0});

  TruncatedTimeline empty{"z", {}, 1, false};
  CHECK(aggregate(empty, compiled).values == std::vector<double>(5, 0.0));
}

TEST_CASE("unknown columns and bad plans") {
  const auto schema = default_run_config().schema;
  AggregationPlan plan{{{"x", AggregateKind::Sum, "nope", {}}}};
  try {
    CompiledPlan p(plan, schema);
    FAIL("expected UnknownColumn");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownColumn);
  }
  plan = {{{"x", AggregateKind::RatioOfSums, "complaints", "missing"}}};
  CHECK_THROWS_AS(CompiledPlan(plan, schema), Error);
  plan = {{{"x", AggregateKind::Sum, "complaints", {}}, {"x", AggregateKind::Max, "complaints", {}}}};
  CHECK_THROWS_AS(CompiledPlan(plan, schema), Error);
  CHECK_THROWS_AS(CompiledPlan(AggregationPlan{}, schema), Error);
}

TEST_CASE("build_training_set on the paper panel") {
  const auto timelines = build_timelines(paper_dataset());
  const auto plan = paper_plan();

  SUBCASE("lead time 1") {
    const auto set = build_training_set(timelines, {1, EmptyWindowPolicy::Drop}, plan);
    REQUIRE(set.rows.size() == 4);
    CHECK(set.rows[0].features.entity_id == "Aasheesh");
    CHECK(set.rows[3].features.entity_id == "Prabhu");
    CHECK(row_for(set, "Kumarjit").label == 1);
    CHECK(row_for(set, "Jitin").label == 1);
    CHECK(row_for(set, "Aasheesh").label == 0);
    CHECK(row_for(set, "Prabhu").label == 0);
    check_row(row_for(set, "Aasheesh").features.values, {8, 5, 2, 6, 4});
    check_row(row_for(set, "Prabhu").features.values, {2, 1, 0, 0, 0});
    // Promotions cell computes 1 (Feb-17 row) where the printed table shows 0.
    check_row(row_for(set, "Jitin").features.values, {1, 3, 3, 26.0 / 3.0, 1});
    CHECK(set.report.events == 2);
    CHECK(set.report.non_events == 2);
    CHECK(set.report.dropped_entities.empty());
  }
  SUBCASE("lead time 0") {
    const auto set = build_training_set(timelines, {0, EmptyWindowPolicy::Drop}, plan);
    check_row(row_for(set, "Jitin").features.values, {2, 4, 4, 8.25, 1});
    check_row(row_for(set, "Kumarjit").features.values, {10, 3, 4, 5.5, 3});
  }
  SUBCASE("impossible lead time") {
    const auto dropped = build_training_set(timelines, {100, EmptyWindowPolicy::Drop}, plan);
    CHECK(dropped.rows.size() == 2);
    CHECK(dropped.report.dropped_entities == std::vector<std::string>{"Jitin", "Kumarjit"});
    const auto zeros = build_training_set(timelines, {100, EmptyWindowPolicy::EmitZeros}, plan);
    CHECK(zeros.rows.size() == 4);
    CHECK(row_for(zeros, "Jitin").features.values == std::vector<double>(5, 0.0));
    CHECK(row_for(zeros, "Jitin").label == 1);
  }
  SUBCASE("empty collection") {
    const auto set = build_training_set(std::span<const EntityTimeline>{}, {1, EmptyWindowPolicy::Drop}, plan);
    CHECK(set.rows.empty());
    CHECK(set.report.events == 0);
    CHECK(set.report.non_events == 0);
    CHECK(set.report.dropped_entities.empty());
  }
}

TEST_CASE("score_features uses the whole history") {
  auto t = paper_timelines();
  const auto plan = paper_plan();
  check_row(score_features(t["Aasheesh"], plan).values, {8, 5, 2, 6, 4});
  check_row(score_features(t["Prabhu"], plan).values, {2, 1, 0, 0, 0});
  EntityTimeline zero{"z", {t["Prabhu"].records[1]}};
  CHECK(score_features(zero, plan).values == std::vector<double>(5, 0.0));
}

TEST_CASE("training set matches the brute-force oracle on random panels") {
  std::mt19937_64 rng(99);
  const auto plan = full_plan();
  for (int trial = 0; trial < 200; ++trial) {
    const auto data = random_panel(rng);
    const auto timelines = build_timelines(data);
    const CompiledPlan compiled(plan, data.schema);
    for (std::int64_t t = 0; t <= 3; ++t) {
      for (auto policy : {EmptyWindowPolicy::Drop, EmptyWindowPolicy::EmitZeros}) {
        const auto set = build_training_set(timelines, {t, policy}, compiled);
        const auto expected = brute_force_training_set(data, plan, t, policy);
        REQUIRE(set.rows.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) {
          CHECK(set.rows[i].features.entity_id == expected[i].entity_id);
          CHECK(set.rows[i].label == expected[i].label);
          CHECK(set.rows[i].features.values == expected[i].values);
        }
      }
    }
  }
}

TEST_CASE("transform properties on random panels") {
  std::mt19937_64 rng(7);
  const auto plan = full_plan();
  for (int trial = 0; trial < 100; ++trial) {
    const auto data = random_panel(rng);
    const auto timelines = build_timelines(data);
    const CompiledPlan compiled(plan, data.schema);

    for (const auto& tl : timelines) {
      const auto event = detect_event_time(tl);
      std::size_t prev = tl.records.size() + 1;
      for (std::int64_t t = 0; t <= 4; ++t) {
        const auto tr = truncate_at_reference(tl, {t, EmptyWindowPolicy::EmitZeros});
        // Nested prefixes: kept count non-increasing in t.
        CHECK(tr.records.size() <= prev);
        prev = tr.records.size();
        for (const auto& r : tr.records) {
          if (event) CHECK(r.period.ordinal <= event->ordinal - t);
        }
        if (!event) CHECK(tr.records.size() == tl.records.size());
        if (event && t == 0) {
          CHECK(!tr.records.empty());
          CHECK(tr.records.back().period == *event);
        }
      }
    }

    // Sum features non-increasing in t; non-event rows identical at every t.
    const auto base = build_training_set(timelines, {0, EmptyWindowPolicy::EmitZeros}, compiled);
    for (std::int64_t t = 1; t <= 4; ++t) {
      const auto set = build_training_set(timelines, {t, EmptyWindowPolicy::EmitZeros}, compiled);
      REQUIRE(set.rows.size() == base.rows.size());
      for (std::size_t i = 0; i < set.rows.size(); ++i) {
        if (base.rows[i].label == 0) CHECK(set.rows[i] == base.rows[i]);
        for (std::size_t k : {0u, 1u, 2u}) {
          CHECK(set.rows[i].features.values[k] <= base.rows[i].features.values[k]);
        }
      }
    }
  }
}

TEST_CASE("sum is additive over contiguous segments") {
  std::mt19937_64 rng(5);
  const auto data = random_panel(rng);
  const auto timelines = build_timelines(data);
  const CompiledPlan compiled({{{"s", AggregateKind::Sum, "a", {}}}}, data.schema);
  for (const auto& tl : timelines) {
    const std::span<const PanelRecord> all(tl.records);
    const double whole = aggregate({tl.entity_id, all, 0, false}, compiled).values[0];
    for (std::size_t cut = 0; cut <= all.size(); ++cut) {
      const double left = aggregate({tl.entity_id, all.first(cut), 0, false}, compiled).values[0];
      const double right = aggregate({tl.entity_id, all.subspan(cut), 0, false}, compiled).values[0];
      CHECK(left + right == whole);
    }
  }
}

TEST_CASE("training CSV is deterministic and readable") {
  const auto timelines = build_timelines(paper_dataset());
  const auto plan = paper_plan();
  std::ostringstream a;
  std::ostringstream b;
  write_training_csv(a, build_training_set(timelines, {1, EmptyWindowPolicy::Drop}, plan));
  write_training_csv(b, build_training_set(timelines, {1, EmptyWindowPolicy::Drop}, plan));
  CHECK(a.str() == b.str());
  CHECK(a.str().find("Aasheesh,8,5,2,6,4,0\n") != std::string::npos);

  std::istringstream in(a.str());
  const auto back = read_training_csv(in);
  CHECK(back.rows.size() == 4);
  CHECK(back.feature_names() == plan.plan().output_names());
  std::ostringstream c;
  write_training_csv(c, back);
  CHECK(c.str() == a.str());
}

TEST_CASE("report JSON") {
  TransformReport r{1, EmptyWindowPolicy::Drop, 2, 3, {"x"}};
  const auto text = report_to_json(r);
  CHECK(text.find("\"dropped_entities\": [\n    \"x\"\n  ]") != std::string::npos);
  CHECK(text.find("\"events\": 2") != std::string::npos);
}
