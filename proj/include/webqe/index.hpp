#pragma once

// Inverted index over the target document collection: stemmed unigram
// postings plus the collection statistics the weighting models need.
// Immutable once built; concurrent readers are safe.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "webqe/analysis.hpp"

namespace webqe {

class duplicate_doc_id : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct indexed_collection {
    struct posting {
        int doc = 0;  // index into doc_ids
        long long tf = 0;
    };

    std::vector<std::string> doc_ids;
    std::vector<long long> doc_lengths;  // analyzed token counts
    std::unordered_map<std::string, std::vector<posting>> postings;
    long long total_terms = 0;
    double avg_doc_length = 0.0;

    int doc_count() const { return static_cast<int>(doc_ids.size()); }

    long long df(const std::string& term) const {
        auto it = postings.find(term);
        return it == postings.end() ? 0 : static_cast<long long>(it->second.size());
    }

    long long tf(const std::string& term, int doc) const {
        auto it = postings.find(term);
        if (it == postings.end()) return 0;
        const auto& list = it->second;
        auto p = std::lower_bound(list.begin(), list.end(), doc,
                                  [](const posting& a, int d) { return a.doc < d; });
        return p != list.end() && p->doc == doc ? p->tf : 0;
    }
};

// Builds the index; the analyzer is applied as-is, so pass stemming=true for
// the standard retrieval setup.
inline indexed_collection build_index(
    const std::vector<std::pair<std::string, std::string>>& documents,
    const analyzer_config& analyzer) {
    indexed_collection index;
    std::unordered_map<std::string, int> seen;
    for (const auto& [doc_id, text] : documents) {
        if (!seen.emplace(doc_id, 1).second)
            throw duplicate_doc_id("duplicate doc_id '" + doc_id + "'");
        int doc = static_cast<int>(index.doc_ids.size());
        index.doc_ids.push_back(doc_id);
        std::vector<std::string> tokens = tokenize(text, analyzer);
        index.doc_lengths.push_back(static_cast<long long>(tokens.size()));
        index.total_terms += static_cast<long long>(tokens.size());
        std::unordered_map<std::string, long long> tf;
        for (const auto& t : tokens) ++tf[t];
        for (const auto& [term, count] : tf)
            index.postings[term].push_back({doc, count});
    }
    for (auto& [term, list] : index.postings)
        std::sort(list.begin(), list.end(),
                  [](const indexed_collection::posting& a,
                     const indexed_collection::posting& b) { return a.doc < b.doc; });
    index.avg_doc_length = index.doc_count() == 0
                               ? 0.0
                               : static_cast<double>(index.total_terms) /
                                     static_cast<double>(index.doc_count());
    return index;
}

// Index artifact: a stats line, one line per document, then one line per
// term with its postings, terms sorted so the file is reproducible.
inline void save_index(const indexed_collection& index, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write index file: " + path.string());
    using ordered = nlohmann::ordered_json;
    ordered stats;
    stats["doc_count"] = index.doc_count();
    stats["total_terms"] = index.total_terms;
    out << stats.dump() << '\n';
    for (int d = 0; d < index.doc_count(); ++d) {
        ordered doc;
        doc["doc_id"] = index.doc_ids[static_cast<std::size_t>(d)];
        doc["length"] = index.doc_lengths[static_cast<std::size_t>(d)];
        out << doc.dump() << '\n';
    }
    std::vector<std::string> terms;
    terms.reserve(index.postings.size());
    for (const auto& [term, list] : index.postings) terms.push_back(term);
    std::sort(terms.begin(), terms.end());
    for (const auto& term : terms) {
        ordered rec;
        rec["term"] = term;
        ordered p = ordered::array();
        for (const auto& post : index.postings.at(term))
            p.push_back({post.doc, post.tf});
        rec["postings"] = std::move(p);
        out << rec.dump() << '\n';
    }
    if (!out) throw std::runtime_error("index output stream failed");
}

inline indexed_collection load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open index file: " + path.string());
    indexed_collection index;
    std::string line;
    std::size_t lineno = 0;
    int doc_count = -1;
    try {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line);
            if (lineno == 1) {
                doc_count = j.at("doc_count").get<int>();
                index.total_terms = j.at("total_terms").get<long long>();
            } else if (j.contains("doc_id")) {
                index.doc_ids.push_back(j.at("doc_id").get<std::string>());
                index.doc_lengths.push_back(j.at("length").get<long long>());
            } else {
                auto& list = index.postings[j.at("term").get<std::string>()];
                for (const auto& p : j.at("postings"))
                    list.push_back({p.at(0).get<int>(), p.at(1).get<long long>()});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                 ": bad index record: " + e.what());
    }
    if (doc_count != index.doc_count())
        throw std::runtime_error(path.string() + ": document count mismatch");
    index.avg_doc_length = index.doc_count() == 0
                               ? 0.0
                               : static_cast<double>(index.total_terms) /
                                     static_cast<double>(index.doc_count());
    return index;
}

// Loads a collection from a directory of text files (doc_id = filename) or a
// line-delimited structured file of {doc_id, text} records.
inline std::vector<std::pair<std::string, std::string>> load_collection(
    const std::filesystem::path& path) {
    std::vector<std::pair<std::string, std::string>> docs;
    if (std::filesystem::is_directory(path)) {
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(path))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            std::ifstream in(f, std::ios::binary);
            std::ostringstream body;
            body << in.rdbuf();
            docs.emplace_back(f.filename().string(), body.str());
        }
        return docs;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open collection file: " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            docs.emplace_back(j.at("doc_id").get<std::string>(),
                              j.at("text").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": bad collection record: " + e.what());
        }
    }
    return docs;
}

}  // namespace webqe
