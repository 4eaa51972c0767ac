#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "webqe/fetch.hpp"
#include "webqe/websource.hpp"

#include "support/test_support.hpp"

using namespace webqe;
using Catch::Matchers::ContainsSubstring;
using testsup::fixture_path;
using testsup::scratch_dir;

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

serp_entry entry(std::string qid, std::string eng, int rank, std::string url) {
    return serp_entry{std::move(qid), std::move(eng), rank, std::move(url)};
}

class vector_provider : public result_provider {
public:
    std::vector<serp_entry> stored;
    std::vector<serp_entry> results(const std::string& qid, const engine_id& eng) override {
        std::vector<serp_entry> out;
        for (const auto& e : stored)
            if (e.query_id == qid && e.engine == eng) out.push_back(e);
        return out;
    }
};

}  // namespace

TEST_CASE("acquire_serp truncates and renumbers", "[websource]") {
    vector_provider p;
    for (int r = 1; r <= 8; ++r)
        p.stored.push_back(entry("q1", "bing", r, "https://site" + std::to_string(r) + ".org/"));

    SECTION("top n with contiguous ranks") {
        auto got = acquire_serp("q1", "bing", 3, p);
        REQUIRE(got.size() == 3);
        CHECK(got[0].url == "https://site1.org/");
        CHECK(got[2].url == "https://site3.org/");
        for (std::size_t i = 0; i < got.size(); ++i)
            CHECK(got[i].rank == static_cast<int>(i) + 1);
    }
    SECTION("asking for more than available returns all, renumbered") {
        auto got = acquire_serp("q1", "bing", 50, p);
        REQUIRE(got.size() == 8);
        CHECK(got.back().rank == 8);
    }
    SECTION("n < 1 is invalid") {
        CHECK_THROWS_AS(acquire_serp("q1", "bing", 0, p), std::invalid_argument);
    }
    SECTION("no results is an empty_result error naming query and engine") {
        CHECK_THROWS_MATCHES(acquire_serp("q9", "bing", 3, p), empty_result,
                             Catch::Matchers::MessageMatches(ContainsSubstring("q9") &&
                                                             ContainsSubstring("bing")));
    }
}

TEST_CASE("blocklist matches hosts, not substrings", "[websource]") {
    blocklist b{{"amazon.com", "Tracker.NET"}};
    CHECK(b.blocks("https://amazon.com/dp/123"));
    CHECK(b.blocks("https://www.amazon.com/dp/123"));
    CHECK(b.blocks("http://smile.amazon.com"));
    CHECK_FALSE(b.blocks("https://notamazon.com/"));
    CHECK_FALSE(b.blocks("https://amazon.company.org/"));
    // host extraction: case, userinfo, port, path, query, fragment
    CHECK(b.blocks("https://user:pw@Sub.AMAZON.com:8443/x?y=1#z"));
    CHECK(b.blocks("http://a.tracker.net/pixel.gif"));
    CHECK_FALSE(b.blocks("https://en.wikipedia.org/wiki/Amazon"));
}

TEST_CASE("standard blocklist covers ad and video hosts", "[websource]") {
    blocklist b = blocklist::standard();
    CHECK(b.blocks("https://www.youtube.com/watch?v=abc"));
    CHECK(b.blocks("https://ad.doubleclick.net/ddm/x"));
    CHECK(b.blocks("https://www.amazon.com/gp/product/1"));
    CHECK_FALSE(b.blocks("https://arxiv.org/abs/1234"));
    CHECK_FALSE(b.blocks("https://www.nature.com/articles/x"));
}

TEST_CASE("blocklist loads from file with comments", "[websource]") {
    scratch_dir dir("blocklist");
    auto path = dir.file("blocked.txt");
    {
        std::ofstream out(path);
        out << "# ad networks\n"
            << "  example-ads.com  \r\n"
            << "\n"
            << "spam.io\n";
    }
    blocklist b = blocklist::from_file(path);
    REQUIRE(b.domain_patterns.size() == 2);
    CHECK(b.blocks("https://cdn.example-ads.com/x.js"));
    CHECK(b.blocks("http://spam.io/"));
    CHECK_FALSE(b.blocks("https://example.com/"));
    CHECK_THROWS_AS(blocklist::from_file(dir.file("missing.txt")), std::runtime_error);
}

TEST_CASE("filter_urls drops blocked hosts and renumbers", "[websource]") {
    blocklist b{{"blocked.org"}};
    std::vector<serp_entry> in = {
        entry("q", "e", 1, "https://keep1.org/"),
        entry("q", "e", 2, "https://blocked.org/a"),
        entry("q", "e", 3, "https://keep2.org/"),
        entry("q", "e", 4, "https://sub.blocked.org/b"),
        entry("q", "e", 5, "https://keep3.org/"),
    };
    auto out = filter_urls(in, b);
    REQUIRE(out.size() == 3);
    CHECK(out[0].url == "https://keep1.org/");
    CHECK(out[1].url == "https://keep2.org/");
    CHECK(out[2].url == "https://keep3.org/");
    for (std::size_t i = 0; i < out.size(); ++i)
        CHECK(out[i].rank == static_cast<int>(i) + 1);
    // filtering an already-filtered list changes nothing
    auto again = filter_urls(out, b);
    REQUIRE(again.size() == out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(again[i].url == out[i].url);
        CHECK(again[i].rank == out[i].rank);
    }
}

TEST_CASE("url_list_provider parses tab-separated result lists", "[websource]") {
    scratch_dir dir("urllist");
    auto path = dir.file("urls.tsv");
    {
        std::ofstream out(path);
        out << "# query_id\tengine\trank\turl\n"
            << "q1\tbing\t2\thttps://b2.org/\r\n"
            << "q1\tbing\t1\thttps://b1.org/\n"
            << "\n"
            << "q1\tgoogle\t1\thttps://g1.org/\n"
            << "q2\tbing\t1\thttps://other.org/\n";
    }
    url_list_provider p(path);
    auto bing = p.results("q1", "bing");
    REQUIRE(bing.size() == 2);  // sorted by rank despite file order
    CHECK(bing[0].url == "https://b1.org/");
    CHECK(bing[1].url == "https://b2.org/");
    CHECK(p.results("q1", "google").size() == 1);
    CHECK(p.results("q1", "duckduckgo").empty());
    CHECK(p.results("zz", "bing").empty());
}

TEST_CASE("url_list_provider reports malformed lines with their number", "[websource]") {
    scratch_dir dir("urllist-bad");
    SECTION("missing field") {
        auto path = dir.file("short.tsv");
        std::ofstream(path) << "q1\tbing\t1\thttps://ok.org/\n"
                            << "q1\tbing\n";
        CHECK_THROWS_WITH(url_list_provider(path), ContainsSubstring(":2:"));
    }
    SECTION("non-numeric rank") {
        auto path = dir.file("rank.tsv");
        std::ofstream(path) << "q1\tbing\tfirst\thttps://ok.org/\n";
        CHECK_THROWS_WITH(url_list_provider(path),
                          ContainsSubstring(":1:") && ContainsSubstring("first"));
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(url_list_provider(dir.file("absent.tsv")), provider_unreachable);
    }
}

TEST_CASE("snapshot fixture round-trips byte-identically", "[websource]") {
    auto fixture = fixture_path("snapshot.jsonl");
    snapshot snap = snapshot::load(fixture);
    REQUIRE(snap.metadata.has_value());
    CHECK(snap.metadata->provider == "fixture");
    CHECK(snap.metadata->n_requested == 20);
    CHECK(snap.entries.size() == 300);  // 5 topics x 3 engines x 20 ranks

    scratch_dir dir("snapround");
    auto copy = dir.file("copy.jsonl");
    snap.save(copy);
    CHECK(read_file(copy) == read_file(fixture));
}

TEST_CASE("snapshot write sorts entries and keeps html when present", "[websource]") {
    snapshot snap;
    snap.entries.push_back({entry("q2", "bing", 1, "u3"), std::nullopt, "t3", "2026-01-01T00:00:00Z"});
    snap.entries.push_back({entry("q1", "bing", 2, "u2"), std::string("<p>x</p>"), "t2",
                            "2026-01-01T00:00:00Z"});
    snap.entries.push_back({entry("q1", "bing", 1, "u1"), std::nullopt, "t1", "2026-01-01T00:00:00Z"});

    std::ostringstream out;
    snap.write(out);
    std::istringstream in(out.str());
    snapshot back = snapshot::read(in);
    CHECK_FALSE(back.metadata.has_value());
    REQUIRE(back.entries.size() == 3);
    CHECK(back.entries[0].entry.url == "u1");
    CHECK(back.entries[1].entry.url == "u2");
    CHECK(back.entries[2].entry.url == "u3");
    REQUIRE(back.entries[1].raw_html.has_value());
    CHECK(*back.entries[1].raw_html == "<p>x</p>");
    CHECK_FALSE(back.entries[0].raw_html.has_value());
}

TEST_CASE("snapshot read validates structure", "[websource]") {
    SECTION("metadata after the first line is rejected") {
        std::istringstream in(
            "{\"query_id\":\"q\",\"engine\":\"e\",\"rank\":1,\"url\":\"u\"}\n"
            "{\"created_at\":\"now\",\"provider\":\"p\",\"n_requested\":1}\n");
        CHECK_THROWS_WITH(snapshot::read(in, "s"), ContainsSubstring("s:2"));
    }
    SECTION("invalid JSON names the line") {
        std::istringstream in("{\"created_at\":\"x\"}\nnot json\n");
        CHECK_THROWS_WITH(snapshot::read(in, "s"), ContainsSubstring("s:2"));
    }
    SECTION("record with wrong field type names the line") {
        std::istringstream in("{\"query_id\":\"q\",\"engine\":\"e\",\"rank\":\"one\",\"url\":\"u\"}\n");
        CHECK_THROWS_WITH(snapshot::read(in, "s"), ContainsSubstring("s:1"));
    }
    SECTION("blank lines are skipped") {
        std::istringstream in(
            "\n{\"query_id\":\"q\",\"engine\":\"e\",\"rank\":1,\"url\":\"u\"}\n\n");
        snapshot snap = snapshot::read(in);
        CHECK(snap.entries.size() == 1);
    }
}

TEST_CASE("snapshot_provider serves ranked per-engine lists", "[websource]") {
    snapshot snap = snapshot::load(fixture_path("snapshot.jsonl"));
    snapshot_provider p(std::move(snap));
    auto got = p.results("T01", "bing");
    REQUIRE(got.size() == 20);
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got[i].rank == static_cast<int>(i) + 1);
    CHECK(p.results("T01", "altavista").empty());
}

TEST_CASE("build_corpus orders engines lexicographically and caps per engine", "[websource]") {
    snapshot snap = snapshot::load(fixture_path("snapshot.jsonl"));
    auto docs = build_corpus(snap, "T02", {"google", "bing"}, 4);
    REQUIRE(docs.size() == 8);
    for (int i = 0; i < 4; ++i) {
        CHECK(docs[static_cast<std::size_t>(i)].entry.engine == "bing");
        CHECK(docs[static_cast<std::size_t>(i)].entry.rank == i + 1);
    }
    for (int i = 4; i < 8; ++i) {
        CHECK(docs[static_cast<std::size_t>(i)].entry.engine == "google");
        CHECK(docs[static_cast<std::size_t>(i)].entry.rank == i - 3);
    }
}

TEST_CASE("build_corpus validates its inputs", "[websource]") {
    snapshot snap = snapshot::load(fixture_path("snapshot.jsonl"));
    CHECK_THROWS_AS(build_corpus(snap, "T01", {"bing"}, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_corpus(snap, "T01", {}, 5), std::invalid_argument);
    CHECK_THROWS_MATCHES(build_corpus(snap, "T01", {"bing", "yandex"}, 5), missing_engine_data,
                         Catch::Matchers::MessageMatches(ContainsSubstring("yandex")));
}

TEST_CASE("build_corpus skips empty documents without consuming slots", "[websource]") {
    snapshot snap;
    snap.entries.push_back({entry("q", "bing", 1, "u1"), std::nullopt, "", "t"});
    snap.entries.push_back({entry("q", "bing", 2, "u2"), std::nullopt, "text two", "t"});
    snap.entries.push_back({entry("q", "bing", 3, "u3"), std::nullopt, "text three", "t"});
    auto docs = build_corpus(snap, "q", {"bing"}, 2);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].entry.url == "u2");
    CHECK(docs[1].entry.url == "u3");
}

TEST_CASE("build_corpus dedup collapses repeated urls but consumes their slot",
          "[websource]") {
    // The fixture mirrors each topic's bing rank-1 page as google rank-2.
    snapshot snap = snapshot::load(fixture_path("snapshot.jsonl"));
    auto plain = build_corpus(snap, "T03", {"bing", "google"}, 2);
    REQUIRE(plain.size() == 4);
    CHECK(plain[0].entry.url == plain[3].entry.url);  // bing#1 == google#2

    auto deduped = build_corpus(snap, "T03", {"bing", "google"}, 2, true);
    REQUIRE(deduped.size() == 3);  // duplicate used up google's second slot
    CHECK(deduped[0].entry.engine == "bing");
    CHECK(deduped[1].entry.engine == "bing");
    CHECK(deduped[2].entry.engine == "google");
    CHECK(deduped[2].entry.rank == 1);

    std::set<std::string> urls;
    for (const auto& d : deduped) urls.insert(d.entry.url);
    CHECK(urls.size() == deduped.size());
}

TEST_CASE("build_snapshot fetches with a pluggable fetcher", "[websource]") {
    fetch_options opts;
    opts.politeness_ms = 0;

    std::map<std::string, std::string> pages = {
        {"https://a.org/1", "<p>alpha page</p>"},
        {"https://b.org/1", "<p>beta page</p>"},
        {"https://b.org/2", std::string("\0binary", 7)},
    };
    std::atomic<int> calls{0};
    fetcher_fn stub = [&](const std::string& url) -> std::optional<std::string> {
        ++calls;
        auto it = pages.find(url);
        if (it == pages.end()) return std::nullopt;
        return it->second;
    };

    std::vector<serp_entry> wanted = {
        entry("q1", "bing", 2, "https://b.org/1"),
        entry("q1", "bing", 1, "https://a.org/1"),
        entry("q1", "bing", 3, "https://b.org/2"),
        entry("q1", "bing", 4, "https://missing.org/x"),
    };

    snapshot snap = build_snapshot(wanted, stub, opts);
    REQUIRE(snap.entries.size() == 4);
    CHECK(calls == 4);
    // sorted by rank, whatever order fetches completed in
    CHECK(snap.entries[0].entry.url == "https://a.org/1");
    CHECK(snap.entries[0].extracted_text == "alpha page");
    CHECK(snap.entries[1].extracted_text == "beta page");
    CHECK(snap.entries[2].extracted_text.empty());  // binary payload
    CHECK(snap.entries[3].extracted_text.empty());  // fetch failure
    for (const auto& d : snap.entries) {
        CHECK_FALSE(d.fetched_at.empty());
        CHECK_FALSE(d.raw_html.has_value());  // include_html defaults off
    }

    SECTION("existing entries are reused without refetching") {
        calls = 0;
        snapshot again = build_snapshot(wanted, stub, opts, &snap);
        CHECK(calls == 0);
        REQUIRE(again.entries.size() == 4);
        CHECK(again.entries[0].extracted_text == "alpha page");
    }
    SECTION("new entries fetch alongside reused ones") {
        calls = 0;
        auto extra = wanted;
        extra.push_back(entry("q2", "bing", 1, "https://a.org/1"));
        snapshot again = build_snapshot(extra, stub, opts, &snap);
        CHECK(calls == 1);
        CHECK(again.entries.size() == 5);
    }
    SECTION("include_html keeps raw bytes") {
        fetch_options keep = opts;
        keep.include_html = true;
        snapshot with_html = build_snapshot({entry("q", "e", 1, "https://a.org/1")}, stub, keep);
        REQUIRE(with_html.entries.size() == 1);
        REQUIRE(with_html.entries[0].raw_html.has_value());
        CHECK(*with_html.entries[0].raw_html == "<p>alpha page</p>");
    }
}
