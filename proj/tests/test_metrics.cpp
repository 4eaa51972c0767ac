#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "webqe/metrics.hpp"

#include "support/test_support.hpp"

using namespace webqe;
using Catch::Approx;
using testsup::fixture_path;

namespace {

ranked_list make_list(const std::string& qid, const std::vector<std::string>& docs) {
    ranked_list out;
    out.query_id = qid;
    for (std::size_t i = 0; i < docs.size(); ++i)
        out.entries.push_back({docs[i], static_cast<double>(docs.size() - i),
                               static_cast<int>(i) + 1});
    return out;
}

qrels make_qrels(const std::string& qid, const std::vector<std::string>& rel,
                 const std::vector<std::string>& nonrel) {
    qrels out;
    auto& q = out.judgments[qid];
    for (const auto& d : rel) q[d] = 1;
    for (const auto& d : nonrel) q[d] = 0;
    return out;
}

bool close(double a, double b, double rel = 1e-9) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("average precision hand case", "[metrics]") {
    auto j = make_qrels("q", {"d1", "d3"}, {"d2"});
    auto run = make_list("q", {"d1", "d2", "d3"});
    CHECK(average_precision(run, j) == Approx(0.8333).margin(1e-4));
    CHECK(average_precision(run, j) == Approx(5.0 / 6.0).epsilon(1e-12));

    // unretrieved relevant documents still divide the sum
    auto partial = make_list("q", {"d1"});
    CHECK(average_precision(partial, j) == Approx(0.5).epsilon(1e-12));

    // unjudged docs count as nonrelevant for precision
    auto strays = make_list("q", {"x1", "d1", "d3"});
    CHECK(average_precision(strays, j) == Approx((1.0 / 2.0 + 2.0 / 3.0) / 2.0).epsilon(1e-12));

    auto empty_j = make_qrels("q", {}, {"d2"});
    CHECK_THROWS_AS(average_precision(run, empty_j), no_relevant_docs);
}

TEST_CASE("precision at k divides by k regardless of depth", "[metrics]") {
    auto j = make_qrels("q", {"d1", "d2", "d3", "d4"}, {"d5", "d6", "d7"});
    // 7 retrieved, 4 relevant
    auto run = make_list("q", {"d1", "d5", "d2", "d6", "d3", "d7", "d4"});
    CHECK(precision_at_k(run, j, 10) == Approx(0.4).epsilon(1e-12));
    CHECK(precision_at_k(run, j, 5) == Approx(3.0 / 5.0).epsilon(1e-12));
    CHECK(precision_at_k(run, j, 1) == 1.0);
    CHECK(precision_at_k(run, j, 30) == Approx(4.0 / 30.0).epsilon(1e-12));
    CHECK_THROWS_AS(precision_at_k(run, j, 0), std::invalid_argument);
}

TEST_CASE("bpref hand cases", "[metrics]") {
    SECTION("relevant above the nonrelevant scores 1") {
        auto j = make_qrels("q", {"d1", "d2"}, {"d3"});
        CHECK(bpref(make_list("q", {"d1", "d2", "d3"}), j) == 1.0);
    }
    SECTION("relevant below the nonrelevant scores 0") {
        auto j = make_qrels("q", {"d2", "d3"}, {"d1"});
        CHECK(bpref(make_list("q", {"d1", "d2", "d3"}), j) == 0.0);
    }
    SECTION("unjudged documents are invisible") {
        auto j = make_qrels("q", {"d1", "d3"}, {"d9"});
        CHECK(bpref(make_list("q", {"d1", "x1", "d3"}), j) == 1.0);
    }
    SECTION("no judged nonrelevant: every retrieved relevant counts fully") {
        auto j = make_qrels("q", {"d1", "d2", "d3"}, {});
        CHECK(bpref(make_list("q", {"d1", "x1", "d3"}), j) == Approx(2.0 / 3.0).epsilon(1e-12));
    }
    SECTION("contribution clamps at zero instead of going negative") {
        auto j = make_qrels("q", {"r1"}, {"n1", "n2", "n3"});
        double v = bpref(make_list("q", {"n1", "n2", "n3", "r1"}), j);
        CHECK(v == 0.0);
        CHECK(v >= 0.0);
    }
    SECTION("mixed ordering") {
        // R=2, N=2, denom=2; first rel has 1 nonrel above -> 0.5; second has 2 -> 0
        auto j = make_qrels("q", {"r1", "r2"}, {"n1", "n2"});
        CHECK(bpref(make_list("q", {"n1", "r1", "n2", "r2"}), j) ==
              Approx(0.25).epsilon(1e-12));
    }
    auto no_rel = make_qrels("q", {}, {"d1"});
    CHECK_THROWS_AS(bpref(make_list("q", {"d1"}), no_rel), no_relevant_docs);
}

TEST_CASE("set F1 over the full retrieved list", "[metrics]") {
    // 10 retrieved, 3 relevant retrieved, 5 relevant total: P=0.3, R=0.6
    auto j = make_qrels("q", {"r1", "r2", "r3", "r4", "r5"}, {});
    std::vector<std::string> docs = {"r1", "x1", "r2", "x2", "x3",
                                     "r3", "x4", "x5", "x6", "x7"};
    CHECK(f_measure(make_list("q", docs), j) == Approx(0.4).epsilon(1e-12));
    CHECK(f_measure(make_list("q", {}), j) == 0.0);
    CHECK(f_measure(make_list("q", {"x1", "x2"}), j) == 0.0);
    CHECK(f_measure(make_list("q", {"r1", "r2", "r3", "r4", "r5"}), j) == 1.0);
}

TEST_CASE("interpolated precision-recall curve", "[metrics]") {
    auto j = make_qrels("q", {"d1", "d3"}, {"d2"});
    auto pr = interpolated_pr(make_list("q", {"d1", "d2", "d3"}), j);
    for (int level = 0; level <= 5; ++level)
        CHECK(pr[static_cast<std::size_t>(level)] == 1.0);
    for (int level = 6; level <= 10; ++level)
        CHECK(pr[static_cast<std::size_t>(level)] == Approx(2.0 / 3.0).epsilon(1e-12));

    // nothing relevant retrieved: flat zero
    auto none = interpolated_pr(make_list("q", {"x1", "x2"}), j);
    for (double v : none) CHECK(v == 0.0);

    // perfect run: flat one
    auto perfect = interpolated_pr(make_list("q", {"d1", "d3"}), j);
    for (double v : perfect) CHECK(v == 1.0);
}

TEST_CASE("mean and geometric-mean MAP", "[metrics]") {
    std::vector<double> aps = {0.25, 0.64};
    CHECK(mean_ap(aps) == Approx(0.445).margin(1e-4));
    CHECK(gmap(aps) == Approx(0.4000).margin(1e-4));
    CHECK(gmap(aps) == Approx(std::sqrt(0.25 * 0.64)).epsilon(1e-9));

    // the epsilon clamp keeps all-zero queries from zeroing the geometric mean
    CHECK(gmap({0.0, 0.0}) == Approx(gm_map_epsilon).epsilon(1e-12));
    CHECK(gmap({1.0}) == Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(mean_ap({}), std::invalid_argument);
    CHECK_THROWS_AS(gmap({}), std::invalid_argument);
}

TEST_CASE("geometric mean never exceeds the arithmetic mean above the clamp",
          "[metrics]") {
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> ap_dist(gm_map_epsilon, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        int n = std::uniform_int_distribution<int>(1, 12)(rng);
        std::vector<double> aps;
        for (int i = 0; i < n; ++i) aps.push_back(ap_dist(rng));
        CHECK(gmap(aps) <= mean_ap(aps) + 1e-12);
        CHECK(gmap(aps) > 0.0);
    }
}

TEST_CASE("relative improvement hand values", "[metrics]") {
    CHECK(relative_improvement(0.3481, 0.2765) == Approx(25.89).margin(0.01));
    CHECK(relative_improvement(0.2495, 0.1907) == Approx(30.83).margin(0.01));
    CHECK(relative_improvement(0.2158, 0.1907) == Approx(13.16).margin(0.01));
    CHECK(relative_improvement(0.5, 0.5) == 0.0);
    CHECK(relative_improvement(0.1, 0.2) == Approx(-50.0).epsilon(1e-12));
    CHECK_THROWS_AS(relative_improvement(0.5, 0.0), zero_baseline);
    CHECK_THROWS_AS(relative_improvement(0.5, -0.1), zero_baseline);
}

TEST_CASE("evaluate() skips judgment-less queries and zero-fills missing ones",
          "[metrics]") {
    qrels j;
    j.judgments["q1"] = {{"d1", 1}, {"d2", 0}};
    j.judgments["q2"] = {{"d3", 1}, {"d4", 1}};
    j.judgments["q3"] = {{"d5", 0}};  // no relevant docs -> skipped

    std::vector<ranked_list> run = {make_list("q1", {"d1", "d2"}),
                                    make_list("q9", {"d9"})};  // q2 missing, q9 unknown
    metrics_report rep = evaluate(run, j);

    CHECK(rep.n_queries == 2);
    CHECK(rep.skipped == std::vector<std::string>{"q3"});
    REQUIRE(rep.per_query.count("q1"));
    REQUIRE(rep.per_query.count("q2"));
    CHECK_FALSE(rep.per_query.count("q9"));

    CHECK(rep.per_query.at("q1").ap == 1.0);
    const auto& q2 = rep.per_query.at("q2");
    CHECK(q2.ap == 0.0);
    CHECK(q2.p10 == 0.0);
    CHECK(q2.bpref == 0.0);
    CHECK(q2.f1 == 0.0);
    CHECK(q2.rel_ret == 0);
    CHECK(q2.retrieved == 0);
    CHECK(q2.n_relevant == 2);

    CHECK(rep.map == Approx(0.5).epsilon(1e-12));  // (1.0 + 0.0) / 2
    CHECK(rep.total_relevant == 3);
    CHECK(rep.total_rel_ret == 1);
    CHECK(rep.total_retrieved == 2);

    // all queries skipped -> empty report, no division by zero
    qrels only_skips;
    only_skips.judgments["qa"] = {{"d1", 0}};
    metrics_report none = evaluate({}, only_skips);
    CHECK(none.n_queries == 0);
    CHECK(none.map == 0.0);
    CHECK(none.skipped.size() == 1);
}

TEST_CASE("evaluate() agrees with the frozen reference cases", "[metrics][oracle]") {
    std::ifstream in(fixture_path("eval_reference.json"));
    REQUIRE(in);
    nlohmann::json fixture = nlohmann::json::parse(in);
    const auto& cases = fixture.at("cases");
    REQUIRE(cases.size() == 50);

    for (const auto& c : cases) {
        INFO("case " << c.at("name").get<std::string>());
        qrels j;
        std::vector<ranked_list> run;
        for (const auto& q : c.at("queries")) {
            std::string qid = q.at("query_id").get<std::string>();
            auto& docs = j.judgments[qid];
            for (const auto& d : q.at("relevant")) docs[d.get<std::string>()] = 1;
            for (const auto& d : q.at("nonrelevant")) docs[d.get<std::string>()] = 0;
            run.push_back(make_list(qid, q.at("ranked").get<std::vector<std::string>>()));
        }

        metrics_report rep = evaluate(run, j);
        const auto& expected = c.at("expected_per_query");
        REQUIRE(rep.per_query.size() == expected.size());
        for (const auto& [qid, m] : rep.per_query) {
            INFO("query " << qid);
            const auto& e = expected.at(qid);
            CHECK(close(m.ap, e.at("ap").get<double>()));
            CHECK(close(m.p5, e.at("p5").get<double>()));
            CHECK(close(m.p10, e.at("p10").get<double>()));
            CHECK(close(m.p20, e.at("p20").get<double>()));
            CHECK(close(m.p30, e.at("p30").get<double>()));
            CHECK(close(m.bpref, e.at("bpref").get<double>()));
            CHECK(close(m.f1, e.at("f1").get<double>()));
            CHECK(m.rel_ret == e.at("rel_ret").get<long long>());
            CHECK(m.n_relevant == e.at("n_relevant").get<long long>());
            CHECK(m.retrieved == e.at("retrieved").get<long long>());
            auto pr = e.at("pr").get<std::vector<double>>();
            REQUIRE(pr.size() == 11);
            for (std::size_t i = 0; i < 11; ++i) CHECK(close(m.pr[i], pr[i]));

            // structural sanity alongside the value checks
            CHECK((m.ap >= 0.0 && m.ap <= 1.0));
            CHECK((m.bpref >= 0.0 && m.bpref <= 1.0));
            CHECK((m.f1 >= 0.0 && m.f1 <= 1.0));
            for (std::size_t i = 1; i < 11; ++i) CHECK(m.pr[i - 1] >= m.pr[i]);
        }

        const auto& agg = c.at("expected_aggregate");
        CHECK(close(rep.map, agg.at("map").get<double>()));
        CHECK(close(rep.gm_map, agg.at("gm_map").get<double>()));
        CHECK(close(rep.mean_p5, agg.at("mean_p5").get<double>()));
        CHECK(close(rep.mean_p10, agg.at("mean_p10").get<double>()));
        CHECK(close(rep.mean_p20, agg.at("mean_p20").get<double>()));
        CHECK(close(rep.mean_p30, agg.at("mean_p30").get<double>()));
        CHECK(close(rep.mean_bpref, agg.at("mean_bpref").get<double>()));
        CHECK(close(rep.mean_f1, agg.at("mean_f1").get<double>()));
        CHECK(rep.total_rel_ret == agg.at("total_rel_ret").get<long long>());
        CHECK(rep.total_relevant == agg.at("total_relevant").get<long long>());
        CHECK(rep.total_retrieved == agg.at("total_retrieved").get<long long>());
        CHECK(rep.n_queries == agg.at("n_queries").get<std::size_t>());
        auto mean_pr = agg.at("mean_pr").get<std::vector<double>>();
        for (std::size_t i = 0; i < 11; ++i) CHECK(close(rep.mean_pr[i], mean_pr[i]));
    }
}
