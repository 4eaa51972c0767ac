#pragma once

// Interchange file formats of the TREC ecosystem: 6-column run files,
// 4-column relevance judgments, and tab-separated topic titles.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "webqe/ranking.hpp"

namespace webqe {

// Relevance judgments: grade 0 = judged nonrelevant, >= 1 = relevant;
// unjudged (query, doc) pairs are simply absent.
struct qrels {
    std::map<std::string, std::unordered_map<std::string, int>> judgments;

    // -1 when the pair is unjudged.
    int grade(const std::string& query_id, const std::string& doc_id) const {
        auto q = judgments.find(query_id);
        if (q == judgments.end()) return -1;
        auto d = q->second.find(doc_id);
        return d == q->second.end() ? -1 : d->second;
    }

    long long n_relevant(const std::string& query_id) const {
        auto q = judgments.find(query_id);
        if (q == judgments.end()) return 0;
        long long n = 0;
        for (const auto& [doc, g] : q->second)
            if (g > 0) ++n;
        return n;
    }

    long long n_nonrelevant(const std::string& query_id) const {
        auto q = judgments.find(query_id);
        if (q == judgments.end()) return 0;
        long long n = 0;
        for (const auto& [doc, g] : q->second)
            if (g == 0) ++n;
        return n;
    }

    // Standard 4-column format: query_id 0 doc_id grade.
    static qrels from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open qrels file: " + path.string());
        qrels out;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ss(line);
            std::string qid, iter, doc;
            int grade = 0;
            if (!(ss >> qid >> iter >> doc >> grade))
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": expected 'query_id 0 doc_id grade'");
            auto [it, inserted] = out.judgments[qid].emplace(doc, grade);
            if (!inserted)
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": duplicate judgment for (" + qid + ", " + doc + ")");
        }
        return out;
    }
};

// Topic titles in file order, ids unique.
struct topic_set {
    std::vector<std::pair<std::string, std::string>> topics;  // (query_id, title)

    static topic_set from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open topics file: " + path.string());
        topic_set out;
        std::unordered_map<std::string, int> seen;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            std::size_t tab = line.find('\t');
            if (tab == std::string::npos)
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": expected 'query_id<TAB>title'");
            std::string qid = line.substr(0, tab);
            if (!seen.emplace(qid, 1).second)
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": duplicate topic id '" + qid + "'");
            out.topics.emplace_back(std::move(qid), line.substr(tab + 1));
        }
        return out;
    }
};

inline std::string format_run_score(double score) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", score);
    return buf;
}

// Writes ranked lists in the 6-column run format:
// query_id Q0 doc_id rank score run_tag
inline void write_run(const std::vector<ranked_list>& lists, const std::string& run_tag,
                      std::ostream& out) {
    for (const auto& list : lists)
        for (const auto& e : list.entries)
            out << list.query_id << " Q0 " << e.doc_id << ' ' << e.rank << ' '
                << format_run_score(e.score) << ' ' << run_tag << '\n';
    if (!out) throw std::runtime_error("run output stream failed");
}

inline void write_run(const std::vector<ranked_list>& lists, const std::string& run_tag,
                      const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write run file: " + path.string());
    write_run(lists, run_tag, out);
}

// Parses a run file back into ranked lists (query order = first appearance;
// entries re-sorted by rank column).
inline std::vector<ranked_list> parse_run(std::istream& in,
                                          const std::string& name = "<stream>") {
    std::vector<ranked_list> lists;
    std::unordered_map<std::string, std::size_t> index_of;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string qid, q0, doc, tag;
        int rank = 0;
        double score = 0.0;
        if (!(ss >> qid >> q0 >> doc >> rank >> score >> tag))
            throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                     ": expected 'query_id Q0 doc_id rank score tag'");
        auto [it, inserted] = index_of.emplace(qid, lists.size());
        if (inserted) {
            lists.emplace_back();
            lists.back().query_id = qid;
        }
        lists[it->second].entries.push_back({doc, score, rank});
    }
    for (auto& list : lists)
        std::stable_sort(list.entries.begin(), list.entries.end(),
                         [](const ranked_list::entry& a, const ranked_list::entry& b) {
                             return a.rank < b.rank;
                         });
    return lists;
}

inline std::vector<ranked_list> parse_run_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open run file: " + path.string());
    return parse_run(in, path.string());
}

}  // namespace webqe
