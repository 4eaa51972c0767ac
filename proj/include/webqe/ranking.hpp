#pragma once

// Weighted-term ranked retrieval over an indexed collection. BM25 and TF-IDF
// are built in; other weighting schemes plug in through the model registry.
// Also the bridge that turns an expanded query into weighted search terms.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "webqe/analysis.hpp"
#include "webqe/expansion.hpp"
#include "webqe/index.hpp"

namespace webqe {

struct weighted_query_term {
    std::string term;    // stemmed at this boundary
    double weight = 1.0; // > 0
};

struct ranked_list {
    struct entry {
        std::string doc_id;
        double score = 0.0;
        int rank = 0;
    };
    std::string query_id;
    std::vector<entry> entries;  // score descending, doc_id ascending on ties
};

// Per-term scoring interface: contribution of one matching term occurrence
// profile (tf, df, doc length) under the collection statistics.
class weighting_model {
public:
    virtual ~weighting_model() = default;
    virtual std::string id() const = 0;
    virtual double term_score(long long tf, long long df, long long doc_len,
                              const indexed_collection& index) const = 0;
};

class bm25_model : public weighting_model {
public:
    explicit bm25_model(double k1 = 1.2, double b = 0.75) : k1_(k1), b_(b) {}

    std::string id() const override { return "bm25"; }

    double term_score(long long tf, long long df, long long doc_len,
                      const indexed_collection& index) const override {
        if (tf == 0) return 0.0;
        double d = static_cast<double>(index.doc_count());
        double idf = std::log((d - static_cast<double>(df) + 0.5) /
                                  (static_cast<double>(df) + 0.5) +
                              1.0);
        double norm = 1.0 - b_ + b_ * static_cast<double>(doc_len) / index.avg_doc_length;
        double tf_part = (static_cast<double>(tf) * (k1_ + 1.0)) /
                         (static_cast<double>(tf) + k1_ * norm);
        return idf * tf_part;
    }

private:
    double k1_;
    double b_;
};

class tfidf_model : public weighting_model {
public:
    std::string id() const override { return "tfidf"; }

    double term_score(long long tf, long long df, long long /*doc_len*/,
                      const indexed_collection& index) const override {
        if (tf == 0 || df == 0) return 0.0;
        return static_cast<double>(tf) *
               std::log(static_cast<double>(index.doc_count()) / static_cast<double>(df));
    }
};

// Name -> factory registry; DFR-style models can be added without touching
// the search path. Parameters arrive as a name -> value map.
using model_params = std::map<std::string, double>;
using model_factory = std::function<std::unique_ptr<weighting_model>(const model_params&)>;

inline std::map<std::string, model_factory>& model_registry() {
    static std::map<std::string, model_factory> registry = {
        {"bm25",
         [](const model_params& p) -> std::unique_ptr<weighting_model> {
             double k1 = p.count("k1") ? p.at("k1") : 1.2;
             double b = p.count("b") ? p.at("b") : 0.75;
             return std::make_unique<bm25_model>(k1, b);
         }},
        {"tfidf",
         [](const model_params&) -> std::unique_ptr<weighting_model> {
             return std::make_unique<tfidf_model>();
         }},
    };
    return registry;
}

inline void register_model(const std::string& name, model_factory factory) {
    model_registry()[name] = std::move(factory);
}

inline std::unique_ptr<weighting_model> make_model(const std::string& name,
                                                   const model_params& params = {}) {
    auto it = model_registry().find(name);
    if (it == model_registry().end())
        throw std::invalid_argument("unknown weighting model '" + name + "'");
    return it->second(params);
}

// Score of one document for a weighted query under a model.
inline double score_doc(const std::vector<weighted_query_term>& query, int doc,
                        const indexed_collection& index, const weighting_model& model) {
    double score = 0.0;
    for (const auto& qt : query) {
        long long tf = index.tf(qt.term, doc);
        if (tf == 0) continue;
        score += qt.weight *
                 model.term_score(tf, index.df(qt.term), index.doc_lengths[
                                      static_cast<std::size_t>(doc)], index);
    }
    return score;
}

inline double score_bm25(const std::vector<weighted_query_term>& query, int doc,
                         const indexed_collection& index, double k1 = 1.2, double b = 0.75) {
    return score_doc(query, doc, index, bm25_model(k1, b));
}

inline double score_tfidf(const std::vector<weighted_query_term>& query, int doc,
                          const indexed_collection& index) {
    return score_doc(query, doc, index, tfidf_model());
}

// Ranks every document containing at least one query term; ties break on
// doc_id ascending so the ordering is total. Truncated to r_max.
inline ranked_list search(const std::vector<weighted_query_term>& query,
                          const indexed_collection& index, const weighting_model& model,
                          int r_max = 1000, const std::string& query_id = "") {
    ranked_list out;
    out.query_id = query_id;
    if (query.empty() || r_max < 1) return out;

    std::vector<char> candidate(static_cast<std::size_t>(index.doc_count()), 0);
    for (const auto& qt : query) {
        auto it = index.postings.find(qt.term);
        if (it == index.postings.end()) continue;
        for (const auto& p : it->second) candidate[static_cast<std::size_t>(p.doc)] = 1;
    }
    for (int doc = 0; doc < index.doc_count(); ++doc) {
        if (!candidate[static_cast<std::size_t>(doc)]) continue;
        out.entries.push_back(
            {index.doc_ids[static_cast<std::size_t>(doc)], score_doc(query, doc, index, model),
             0});
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const ranked_list::entry& a, const ranked_list::entry& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.doc_id < b.doc_id;
              });
    if (static_cast<int>(out.entries.size()) > r_max)
        out.entries.resize(static_cast<std::size_t>(r_max));
    for (std::size_t i = 0; i < out.entries.size(); ++i)
        out.entries[i].rank = static_cast<int>(i) + 1;
    return out;
}

// Search-time analysis of a raw (unstemmed) term list: tokens re-analyzed
// under the index's analyzer, duplicate stems merged by summing weights.
inline std::vector<weighted_query_term> analyze_query_terms(
    const std::vector<std::pair<std::string, double>>& terms,
    const analyzer_config& analyzer) {
    std::map<std::string, double> merged;  // ordered for determinism
    for (const auto& [raw, weight] : terms)
        for (const auto& tok : tokenize(raw, analyzer))
            merged[tok] += weight;
    std::vector<weighted_query_term> out;
    out.reserve(merged.size());
    for (const auto& [term, weight] : merged) out.push_back({term, weight});
    return out;
}

// Baseline query: every original term at weight 1.0.
inline std::vector<weighted_query_term> build_baseline_query(
    const query& q, const analyzer_config& analyzer) {
    std::vector<std::pair<std::string, double>> terms;
    terms.reserve(q.terms.size());
    for (const auto& t : q.terms) terms.emplace_back(t, 1.0);
    return analyze_query_terms(terms, analyzer);
}

// Expanded query at the retrieval boundary: original terms keep weight 1.0;
// expansion-term correlation scores are min-max normalized onto
// [weight_floor, 1] (all-equal scores map to 1) and scaled by beta.
inline std::vector<weighted_query_term> build_expanded_query(
    const expanded_query& eq, const analyzer_config& analyzer, double beta = 0.5,
    double weight_floor = 0.05) {
    std::vector<std::pair<std::string, double>> terms;
    terms.reserve(eq.original.terms.size() + eq.expansion.size());
    for (const auto& t : eq.original.terms) terms.emplace_back(t, 1.0);
    if (!eq.expansion.empty()) {
        double lo = eq.expansion.front().second;
        double hi = lo;
        for (const auto& [term, score] : eq.expansion) {
            lo = std::min(lo, score);
            hi = std::max(hi, score);
        }
        for (const auto& [term, score] : eq.expansion) {
            double unit = hi > lo ? (score - lo) / (hi - lo) : 1.0;
            terms.emplace_back(term, beta * (weight_floor + (1.0 - weight_floor) * unit));
        }
    }
    return analyze_query_terms(terms, analyzer);
}

}  // namespace webqe
