#pragma once

// The scoring core of the expansion pipeline: corpus statistics over the
// combined pseudo-relevant documents, tf-itf candidate ranking, document
// term weights, cosine similarity between term weight vectors, the iterative
// nearest-neighbour selection loop, and whole-query correlation scoring.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "webqe/analysis.hpp"
#include "webqe/websource.hpp"

namespace webqe {

class empty_corpus : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class unknown_term : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class unknown_document : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class zero_vector : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class insufficient_terms : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Token statistics of the combined feedback-document collection: per-document
// term frequencies, per-document distinct-term counts, per-term totals and
// the total token count.
struct corpus {
    std::vector<std::string> doc_ids;
    std::vector<std::unordered_map<std::string, long long>> doc_tf;
    std::vector<long long> distinct_terms;         // per-document |DT_j|
    long long total_tokens = 0;                    // T
    std::unordered_map<std::string, long long> term_totals;

    std::size_t n_docs() const { return doc_ids.size(); }

    long long tf(const std::string& term, std::size_t j) const {
        const auto& m = doc_tf.at(j);
        auto it = m.find(term);
        return it == m.end() ? 0 : it->second;
    }

    bool has_term(const std::string& term) const {
        return term_totals.find(term) != term_totals.end();
    }
};

// Assembles a corpus from per-document token lists (document order kept).
inline corpus corpus_from_tokens(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& docs) {
    corpus c;
    for (const auto& [id, tokens] : docs) {
        c.doc_ids.push_back(id);
        auto& tf = c.doc_tf.emplace_back();
        for (const auto& t : tokens) {
            ++tf[t];
            ++c.term_totals[t];
            ++c.total_tokens;
        }
        c.distinct_terms.push_back(static_cast<long long>(tf.size()));
    }
    if (c.total_tokens == 0) throw empty_corpus("no tokens survived analysis");
    return c;
}

// Tokenizes the extracted text of each document and assembles the corpus.
inline corpus build_stats(const std::vector<web_document>& docs,
                          const analyzer_config& analyzer) {
    if (docs.empty()) throw empty_corpus("no documents");
    std::vector<std::pair<std::string, std::vector<std::string>>> token_docs;
    token_docs.reserve(docs.size());
    for (const auto& d : docs) {
        std::string id = d.entry.engine + ":" + std::to_string(d.entry.rank);
        token_docs.emplace_back(std::move(id), tokenize(d.extracted_text, analyzer));
    }
    return corpus_from_tokens(token_docs);
}

enum class score_stage { tf_itf, cosine, correlation };

struct scored_term {
    std::string term;
    double score = 0.0;
    score_stage stage = score_stage::tf_itf;
};

struct knn_params {
    int k = 40;   // output size
    int l = 2;    // least-scoring terms dropped per iteration
    int r0 = 5;   // iteration count
};

struct expansion_config {
    int n_docs = 20;          // feedback documents per engine
    int m_intermediate = 100; // tf-itf candidates kept (the C_exp size)
    knn_params knn;
    int n_final = 15;         // expansion terms in the reformulated query
    std::set<engine_id> engines;
    bool dedup = false;
    analyzer_config analyzer; // no stemming: candidates keep surface forms

    void validate() const {
        if (n_docs < 1) throw std::invalid_argument("n_docs must be >= 1");
        if (!(n_final <= knn.k && knn.k <= m_intermediate))
            throw std::invalid_argument("need n_final <= k <= m_intermediate");
        if (knn.k < knn.r0) throw std::invalid_argument("need k >= r0");
        if (knn.l < 0 || knn.r0 < 1) throw std::invalid_argument("bad knn params");
        if (engines.empty()) throw std::invalid_argument("no engines configured");
    }
};

struct query {
    std::string id;
    std::vector<std::string> terms;  // tokenized title words, unstemmed
};

struct expanded_query {
    query original;
    std::vector<std::pair<std::string, double>> expansion;  // (term, correlation score)
};

// Frequency-damped specificity score of a corpus term: f * ln(T / f) where f
// is the term's total occurrence count. Peaks at mid-frequency terms.
inline double tf_itf(const std::string& term, const corpus& c) {
    auto it = c.term_totals.find(term);
    if (it == c.term_totals.end()) throw unknown_term("tf_itf: unknown term '" + term + "'");
    double f = static_cast<double>(it->second);
    return f * std::log(static_cast<double>(c.total_tokens) / f);
}

// All distinct corpus terms scored by tf_itf, best first (ties alphabetical),
// truncated to the top m. This ordered list is the intermediate candidate set.
inline std::vector<scored_term> rank_by_tf_itf(const corpus& c, int m) {
    if (m < 1) throw std::invalid_argument("rank_by_tf_itf: m must be >= 1");
    std::vector<scored_term> out;
    out.reserve(c.term_totals.size());
    for (const auto& [term, total] : c.term_totals)
        out.push_back({term, tf_itf(term, c), score_stage::tf_itf});
    std::sort(out.begin(), out.end(), [](const scored_term& a, const scored_term& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.term < b.term;
    });
    if (static_cast<int>(out.size()) > m) out.resize(static_cast<std::size_t>(m));
    return out;
}

// Weight of a term inside one document: tf(t, j) * ln(T / |DT_j|); zero when
// the term does not occur in the document.
inline double doc_weight(const std::string& term, std::size_t j, const corpus& c) {
    if (j >= c.n_docs())
        throw unknown_document("doc_weight: no document at index " + std::to_string(j));
    long long tf = c.tf(term, j);
    if (tf == 0) return 0.0;
    return static_cast<double>(tf) *
           std::log(static_cast<double>(c.total_tokens) /
                    static_cast<double>(c.distinct_terms[j]));
}

// Dot product of the two terms' per-document weight vectors.
inline double term_correlation(const std::string& a, const std::string& b, const corpus& c) {
    if (!c.has_term(a)) throw unknown_term("term_correlation: unknown term '" + a + "'");
    if (!c.has_term(b)) throw unknown_term("term_correlation: unknown term '" + b + "'");
    double sum = 0.0;
    for (std::size_t j = 0; j < c.n_docs(); ++j) {
        long long tfa = c.tf(a, j);
        if (tfa == 0) continue;
        long long tfb = c.tf(b, j);
        if (tfb == 0) continue;
        double log_part = std::log(static_cast<double>(c.total_tokens) /
                                   static_cast<double>(c.distinct_terms[j]));
        // evaluated as weight * weight so equal weights yield bit-equal products
        sum += (static_cast<double>(tfa) * log_part) * (static_cast<double>(tfb) * log_part);
    }
    return sum;
}

namespace expansion_detail {

// Cosine with zero-magnitude vectors treated as similarity 0; the selection
// loop must keep going on degenerate corpora where every weight is zero.
inline double cosine_or_zero(const std::string& a, const std::string& b, const corpus& c,
                             double self_a, double self_b) {
    if (self_a <= 0.0 || self_b <= 0.0) return 0.0;
    return term_correlation(a, b, c) / std::sqrt(self_a * self_b);
}

}  // namespace expansion_detail

// Angle-based similarity of two term weight vectors, in [0, 1].
inline double cosine_sim(const std::string& a, const std::string& b, const corpus& c) {
    double self_a = term_correlation(a, a, c);
    double self_b = term_correlation(b, b, c);
    if (self_a <= 0.0)
        throw zero_vector("cosine_sim: term '" + a + "' has an all-zero weight vector");
    if (self_b <= 0.0)
        throw zero_vector("cosine_sim: term '" + b + "' has an all-zero weight vector");
    return term_correlation(a, b, c) / std::sqrt(self_a * self_b);
}

// Iterative nearest-neighbour selection. Input is the candidate list sorted
// by tf_itf descending. Each of the r0 iterations moves the current best
// candidate into the output, re-scores the rest by cosine similarity to it
// and discards the l weakest; the k - r0 best survivors are then appended.
// Ties always break alphabetically. Output order: the r0 picks in selection
// order, then the appended survivors best-first.
inline std::vector<std::string> knn_select(const std::vector<scored_term>& c_exp,
                                           const corpus& c, const knn_params& params) {
    if (params.k < params.r0) throw std::invalid_argument("knn_select: need k >= r0");
    if (params.l < 0 || params.r0 < 1) throw std::invalid_argument("knn_select: bad params");
    long long need = static_cast<long long>(params.k) +
                     static_cast<long long>(params.l) * params.r0;
    if (static_cast<long long>(c_exp.size()) < need)
        throw insufficient_terms("knn_select: candidate list has " +
                                 std::to_string(c_exp.size()) + " terms, need at least " +
                                 std::to_string(need));

    struct pool_entry {
        std::string term;
        double score;
    };
    std::vector<pool_entry> pool;
    pool.reserve(c_exp.size());
    for (const auto& st : c_exp) pool.push_back({st.term, st.score});

    // self-correlations are reused across every cosine in the loop
    std::unordered_map<std::string, double> self;
    self.reserve(pool.size());
    for (const auto& p : pool) self[p.term] = term_correlation(p.term, p.term, c);

    auto argmax = [](const std::vector<pool_entry>& v) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (v[i].score > v[best].score ||
                (v[i].score == v[best].score && v[i].term < v[best].term))
                best = i;
        }
        return best;
    };

    std::vector<std::string> nn;
    nn.reserve(static_cast<std::size_t>(params.k));
    for (int iter = 0; iter < params.r0; ++iter) {
        std::size_t best = argmax(pool);
        std::string t = pool[best].term;
        nn.push_back(t);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
        if (pool.empty()) break;  // only possible in the final iteration
        for (auto& p : pool)
            p.score = expansion_detail::cosine_or_zero(p.term, t, c, self[p.term], self[t]);
        if (params.l > 0) {
            std::sort(pool.begin(), pool.end(), [](const pool_entry& a, const pool_entry& b) {
                if (a.score != b.score) return a.score < b.score;
                return a.term < b.term;
            });
            pool.erase(pool.begin(),
                       pool.begin() + std::min<std::ptrdiff_t>(
                                          params.l, static_cast<std::ptrdiff_t>(pool.size())));
        }
    }

    std::sort(pool.begin(), pool.end(), [](const pool_entry& a, const pool_entry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.term < b.term;
    });
    for (std::size_t i = 0;
         i < pool.size() && static_cast<int>(nn.size()) < params.k; ++i)
        nn.push_back(pool[i].term);
    return nn;
}

// Mean correlation of a candidate with the whole query: (1/|Q|) * sum over
// query terms of term_correlation. Query terms missing from the corpus add
// nothing to the sum but still count in |Q|.
inline double correlation_score(const std::string& term, const query& q, const corpus& c) {
    if (!c.has_term(term))
        throw unknown_term("correlation_score: unknown term '" + term + "'");
    if (q.terms.empty()) throw std::invalid_argument("correlation_score: empty query");
    double sum = 0.0;
    for (const auto& qt : q.terms)
        if (c.has_term(qt)) sum += term_correlation(term, qt, c);
    return sum / static_cast<double>(q.terms.size());
}

// The full per-query expansion pipeline: corpus assembly, tf-itf candidate
// ranking, nearest-neighbour selection, correlation reweighting against the
// whole query, then the top n_final terms (original query terms excluded).
inline expanded_query expand_query(const query& q, const snapshot& snap,
                                   const expansion_config& config) {
    config.validate();
    std::vector<web_document> docs =
        build_corpus(snap, q.id, config.engines, config.n_docs, config.dedup);
    corpus c = build_stats(docs, config.analyzer);
    std::vector<scored_term> candidates = rank_by_tf_itf(c, config.m_intermediate);
    std::vector<std::string> nn = knn_select(candidates, c, config.knn);

    std::vector<scored_term> reweighted;
    reweighted.reserve(nn.size());
    for (const auto& t : nn)
        reweighted.push_back({t, correlation_score(t, q, c), score_stage::correlation});
    std::sort(reweighted.begin(), reweighted.end(),
              [](const scored_term& a, const scored_term& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.term < b.term;
              });

    std::set<std::string> original(q.terms.begin(), q.terms.end());
    expanded_query out;
    out.original = q;
    for (const auto& st : reweighted) {
        if (static_cast<int>(out.expansion.size()) == config.n_final) break;
        if (original.count(st.term)) continue;
        out.expansion.emplace_back(st.term, st.score);
    }
    return out;
}

}  // namespace webqe
