#pragma once

// Pseudo-relevant document acquisition: SERP entries, URL filtering, snapshot
// persistence and per-engine corpus assembly. Providers abstract over where
// result lists come from (snapshot file, URL-list file, live client) so the
// pipeline itself never needs network access.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "webqe/html.hpp"

namespace webqe {

using engine_id = std::string;

class provider_unreachable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class empty_result : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class missing_engine_data : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct serp_entry {
    std::string query_id;
    engine_id engine;
    int rank = 0;  // 1-based
    std::string url;
};

struct web_document {
    serp_entry entry;
    std::optional<std::string> raw_html;
    std::string extracted_text;
    std::string fetched_at;  // ISO-8601 UTC
};

namespace websource_detail {

inline std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

// Host part of a URL, lowercased: scheme://host[:port]/path -> host.
inline std::string url_host(std::string_view url) {
    std::string_view rest = url;
    std::size_t scheme = rest.find("//");
    if (scheme != std::string_view::npos) rest = rest.substr(scheme + 2);
    std::size_t end = rest.find_first_of("/?#");
    if (end != std::string_view::npos) rest = rest.substr(0, end);
    std::size_t at = rest.find('@');  // userinfo
    if (at != std::string_view::npos) rest = rest.substr(at + 1);
    std::size_t colon = rest.find(':');
    if (colon != std::string_view::npos) rest = rest.substr(0, colon);
    return lower_ascii(rest);
}

// True when host equals the pattern or ends with ".pattern".
inline bool host_matches(const std::string& host, const std::string& pattern) {
    if (host == pattern) return true;
    if (host.size() > pattern.size() &&
        host.compare(host.size() - pattern.size(), pattern.size(), pattern) == 0 &&
        host[host.size() - pattern.size() - 1] == '.')
        return true;
    return false;
}

}  // namespace websource_detail

struct blocklist {
    std::vector<std::string> domain_patterns;

    bool blocks(std::string_view url) const {
        std::string host = websource_detail::url_host(url);
        for (const auto& p : domain_patterns)
            if (websource_detail::host_matches(host, websource_detail::lower_ascii(p)))
                return true;
        return false;
    }

    // Common advertising / video / e-commerce domains; extend via file.
    static blocklist standard() {
        return blocklist{{"doubleclick.net", "googlesyndication.com", "googleadservices.com",
                          "adservice.google.com", "taboola.com", "outbrain.com",
                          "youtube.com", "vimeo.com", "dailymotion.com", "tiktok.com",
                          "amazon.com", "amazon.in", "ebay.com", "aliexpress.com",
                          "flipkart.com", "walmart.com", "etsy.com"}};
    }

    // One domain-suffix pattern per line; '#' starts a comment.
    static blocklist from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open blocklist file: " + path.string());
        blocklist b;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t s = line.find_first_not_of(" \t");
            if (s == std::string::npos || line[s] == '#') continue;
            std::size_t e = line.find_last_not_of(" \t");
            b.domain_patterns.push_back(line.substr(s, e - s + 1));
        }
        return b;
    }
};

struct snapshot_metadata {
    std::string created_at;
    std::string provider;
    int n_requested = 0;
};

// A persisted set of fetched documents, the reproducible stand-in for live
// search results. One structured record per line, sorted by
// (query_id, engine, rank); an optional first line carries file metadata.
struct snapshot {
    std::optional<snapshot_metadata> metadata;
    std::vector<web_document> entries;

    void sort_entries() {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const web_document& a, const web_document& b) {
                             return std::tie(a.entry.query_id, a.entry.engine, a.entry.rank) <
                                    std::tie(b.entry.query_id, b.entry.engine, b.entry.rank);
                         });
    }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write snapshot file: " + path.string());
        write(out);
    }

    void write(std::ostream& out) const {
        using ordered = nlohmann::ordered_json;
        if (metadata) {
            ordered m;
            m["created_at"] = metadata->created_at;
            m["provider"] = metadata->provider;
            m["n_requested"] = metadata->n_requested;
            out << m.dump() << '\n';
        }
        std::vector<const web_document*> sorted;
        sorted.reserve(entries.size());
        for (const auto& e : entries) sorted.push_back(&e);
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const web_document* a, const web_document* b) {
                             return std::tie(a->entry.query_id, a->entry.engine, a->entry.rank) <
                                    std::tie(b->entry.query_id, b->entry.engine, b->entry.rank);
                         });
        for (const web_document* d : sorted) {
            ordered r;
            r["query_id"] = d->entry.query_id;
            r["engine"] = d->entry.engine;
            r["rank"] = d->entry.rank;
            r["url"] = d->entry.url;
            r["fetched_at"] = d->fetched_at;
            r["text"] = d->extracted_text;
            if (d->raw_html) r["html"] = *d->raw_html;
            out << r.dump() << '\n';
        }
    }

    static snapshot load(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open snapshot file: " + path.string());
        return read(in, path.string());
    }

    static snapshot read(std::istream& in, const std::string& name = "<stream>") {
        snapshot snap;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                         ": snapshot parse error: " + e.what());
            }
            if (!j.is_object())
                throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                         ": snapshot record is not an object");
            if (!j.contains("query_id")) {
                if (lineno != 1 || snap.metadata)
                    throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                             ": metadata line allowed only at the top");
                snapshot_metadata m;
                m.created_at = j.value("created_at", "");
                m.provider = j.value("provider", "");
                m.n_requested = j.value("n_requested", 0);
                snap.metadata = m;
                continue;
            }
            try {
                web_document d;
                d.entry.query_id = j.at("query_id").get<std::string>();
                d.entry.engine = j.at("engine").get<std::string>();
                d.entry.rank = j.at("rank").get<int>();
                d.entry.url = j.at("url").get<std::string>();
                d.fetched_at = j.value("fetched_at", "");
                d.extracted_text = j.value("text", "");
                if (j.contains("html")) d.raw_html = j.at("html").get<std::string>();
                snap.entries.push_back(std::move(d));
            } catch (const nlohmann::json::exception& e) {
                throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                         ": bad snapshot record: " + e.what());
            }
        }
        snap.sort_entries();
        return snap;
    }
};

// Source of ranked result lists for a query.
class result_provider {
public:
    virtual ~result_provider() = default;
    virtual std::vector<serp_entry> results(const std::string& query_id,
                                            const engine_id& engine) = 0;
};

// Serves stored snapshot entries.
class snapshot_provider : public result_provider {
public:
    explicit snapshot_provider(snapshot snap) : snap_(std::move(snap)) {}

    std::vector<serp_entry> results(const std::string& query_id,
                                    const engine_id& engine) override {
        std::vector<serp_entry> out;
        for (const auto& d : snap_.entries)
            if (d.entry.query_id == query_id && d.entry.engine == engine)
                out.push_back(d.entry);
        std::stable_sort(out.begin(), out.end(),
                         [](const serp_entry& a, const serp_entry& b) { return a.rank < b.rank; });
        return out;
    }

    const snapshot& data() const { return snap_; }

private:
    snapshot snap_;
};

// Reads `query_id <TAB> engine <TAB> rank <TAB> url` lines.
class url_list_provider : public result_provider {
public:
    explicit url_list_provider(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in)
            throw provider_unreachable("cannot open URL list file: " + path.string());
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ss(line);
            serp_entry e;
            std::string rank;
            if (!std::getline(ss, e.query_id, '\t') || !std::getline(ss, e.engine, '\t') ||
                !std::getline(ss, rank, '\t') || !std::getline(ss, e.url))
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": expected query_id<TAB>engine<TAB>rank<TAB>url");
            try {
                e.rank = std::stoi(rank);
            } catch (const std::exception&) {
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": bad rank '" + rank + "'");
            }
            entries_[{e.query_id, e.engine}].push_back(std::move(e));
        }
        for (auto& [key, list] : entries_)
            std::stable_sort(list.begin(), list.end(),
                             [](const serp_entry& a, const serp_entry& b) {
                                 return a.rank < b.rank;
                             });
    }

    std::vector<serp_entry> results(const std::string& query_id,
                                    const engine_id& engine) override {
        auto it = entries_.find({query_id, engine});
        return it == entries_.end() ? std::vector<serp_entry>{} : it->second;
    }

private:
    std::map<std::pair<std::string, engine_id>, std::vector<serp_entry>> entries_;
};

// The top-n ranked results for a query from one engine, ranks renumbered 1..len.
inline std::vector<serp_entry> acquire_serp(const std::string& query_id,
                                            const engine_id& engine, int n,
                                            result_provider& provider) {
    if (n < 1) throw std::invalid_argument("acquire_serp: n must be >= 1");
    std::vector<serp_entry> all = provider.results(query_id, engine);
    if (all.empty())
        throw empty_result("no results for query '" + query_id + "' on engine '" + engine +
                           "'");
    if (static_cast<int>(all.size()) > n) all.resize(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < all.size(); ++i)
        all[i].rank = static_cast<int>(i) + 1;
    return all;
}

// Drops blocklisted hosts and renumbers the survivors contiguously from 1.
inline std::vector<serp_entry> filter_urls(const std::vector<serp_entry>& entries,
                                           const blocklist& blocked) {
    std::vector<serp_entry> out;
    out.reserve(entries.size());
    for (const auto& e : entries)
        if (!blocked.blocks(e.url)) out.push_back(e);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i].rank = static_cast<int>(i) + 1;
    return out;
}

// The combined expansion corpus for one query: the top n_docs non-empty
// documents per requested engine, engines in lexicographic order, ranks
// ascending within an engine. With dedup, later copies of an already-seen URL
// are dropped. A snapshot with no record at all for a requested
// (query, engine) pair is an error; present-but-empty documents just shrink
// that engine's contribution.
inline std::vector<web_document> build_corpus(const snapshot& snap, const std::string& query_id,
                                              const std::set<engine_id>& engines, int n_docs,
                                              bool dedup = false) {
    if (n_docs < 1) throw std::invalid_argument("build_corpus: n_docs must be >= 1");
    if (engines.empty()) throw std::invalid_argument("build_corpus: no engines requested");
    std::vector<web_document> out;
    std::unordered_set<std::string> seen_urls;
    for (const auto& engine : engines) {  // std::set iterates in sorted order
        std::vector<const web_document*> candidates;
        bool covered = false;
        for (const auto& d : snap.entries) {
            if (d.entry.query_id == query_id && d.entry.engine == engine) {
                covered = true;
                if (!d.extracted_text.empty()) candidates.push_back(&d);
            }
        }
        if (!covered)
            throw missing_engine_data("snapshot has no entries for query '" + query_id +
                                      "' on engine '" + engine + "'");
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const web_document* a, const web_document* b) {
                             return a->entry.rank < b->entry.rank;
                         });
        int taken = 0;
        for (const web_document* d : candidates) {
            if (taken == n_docs) break;
            ++taken;  // duplicates consume their slot and are then collapsed
            if (dedup && !seen_urls.insert(d->entry.url).second) continue;
            out.push_back(*d);
        }
    }
    return out;
}

}  // namespace webqe
