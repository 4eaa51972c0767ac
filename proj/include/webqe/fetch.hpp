#pragma once

// Page fetching for snapshot construction. The fetcher is a plain callable so
// tests substitute an in-memory map; only http_fetcher touches the network.
// Fetches are polite (per-host delay), bounded-concurrency and retried once
// by default; the resulting snapshot is sorted and reproducible regardless of
// completion order.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "webqe/html.hpp"
#include "webqe/websource.hpp"

namespace webqe {

struct fetch_options {
    int timeout_sec = 15;
    int retries = 1;
    int politeness_ms = 500;   // delay between requests to the same host
    int max_in_flight = 4;     // concurrently fetched hosts
    bool include_html = false; // keep raw bytes in the snapshot
};

// url -> body, or nullopt on failure (after retries).
using fetcher_fn = std::function<std::optional<std::string>(const std::string& url)>;

inline std::string utc_timestamp_now() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Real HTTP(S) fetcher. Skips responses that do not look like text/HTML.
inline fetcher_fn http_fetcher(const fetch_options& options) {
    return [options](const std::string& url) -> std::optional<std::string> {
        std::size_t scheme_end = url.find("://");
        if (scheme_end == std::string::npos) return std::nullopt;
        std::string scheme = url.substr(0, scheme_end);
        std::size_t path_start = url.find('/', scheme_end + 3);
        std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
        std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

        for (int attempt = 0; attempt <= options.retries; ++attempt) {
            httplib::Client client(origin);
            client.set_connection_timeout(options.timeout_sec, 0);
            client.set_read_timeout(options.timeout_sec, 0);
            client.set_follow_location(true);
            httplib::Result res = client.Get(path);
            if (res && res->status >= 200 && res->status < 300) {
                std::string type = res->get_header_value("Content-Type");
                if (!type.empty() && type.find("html") == std::string::npos &&
                    type.find("text") == std::string::npos)
                    return std::nullopt;  // PDFs, images and friends are skipped
                return res->body;
            }
        }
        return std::nullopt;
    };
}

// Fetches every entry and assembles a sorted snapshot. Documents whose fetch
// fails or whose payload is undecodable get empty text (and are later passed
// over by corpus assembly). Entries already present in `existing` are reused
// untouched, which makes re-runs idempotent.
inline snapshot build_snapshot(const std::vector<serp_entry>& entries, fetcher_fn fetch,
                               const fetch_options& options,
                               const snapshot* existing = nullptr) {
    snapshot out;
    std::vector<const serp_entry*> todo;
    if (existing) {
        for (const auto& d : existing->entries) out.entries.push_back(d);
    }
    auto already_have = [&](const serp_entry& e) {
        for (const auto& d : out.entries)
            if (d.entry.query_id == e.query_id && d.entry.engine == e.engine &&
                d.entry.rank == e.rank && d.entry.url == e.url)
                return true;
        return false;
    };
    for (const auto& e : entries)
        if (!already_have(e)) todo.push_back(&e);

    // one queue per host keeps the politeness delay local to that host
    std::map<std::string, std::vector<const serp_entry*>> by_host;
    for (const serp_entry* e : todo) by_host[websource_detail::url_host(e->url)].push_back(e);

    std::mutex out_mutex;
    std::vector<std::map<std::string, std::vector<const serp_entry*>>::iterator> hosts;
    for (auto it = by_host.begin(); it != by_host.end(); ++it) hosts.push_back(it);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= hosts.size()) break;
            bool first = true;
            for (const serp_entry* e : hosts[i]->second) {
                if (!first && options.politeness_ms > 0)
                    std::this_thread::sleep_for(
                        std::chrono::milliseconds(options.politeness_ms));
                first = false;
                web_document d;
                d.entry = *e;
                d.fetched_at = utc_timestamp_now();
                std::optional<std::string> body = fetch(e->url);
                if (body) {
                    try {
                        d.extracted_text = extract_text(*body);
                        if (options.include_html) d.raw_html = *body;
                    } catch (const undecodable_content&) {
                        d.extracted_text.clear();
                    }
                }
                std::lock_guard<std::mutex> lock(out_mutex);
                out.entries.push_back(std::move(d));
            }
        }
    };
    int n_threads = std::max(1, std::min<int>(options.max_in_flight,
                                              static_cast<int>(hosts.size())));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    out.sort_entries();
    return out;
}

}  // namespace webqe
