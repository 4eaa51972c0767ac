#pragma once

// The IR metric suite: average precision, precision at k, bpref, set F1,
// 11-point interpolated precision-recall, and the aggregate report.
// Conventions follow the standard evaluation tooling: unjudged retrieved
// documents count as nonrelevant everywhere except bpref, which ignores them.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "webqe/trec.hpp"

namespace webqe {

class no_relevant_docs : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class zero_baseline : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double gm_map_epsilon = 1e-5;

// (1/R) * sum of precision at each rank holding a relevant document.
inline double average_precision(const ranked_list& ranked, const qrels& judgments) {
    long long r = judgments.n_relevant(ranked.query_id);
    if (r == 0)
        throw no_relevant_docs("query '" + ranked.query_id + "' has no relevant documents");
    double sum = 0.0;
    long long rel_seen = 0;
    for (std::size_t i = 0; i < ranked.entries.size(); ++i) {
        if (judgments.grade(ranked.query_id, ranked.entries[i].doc_id) > 0) {
            ++rel_seen;
            sum += static_cast<double>(rel_seen) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(r);
}

// Divisor is k even when fewer than k documents were retrieved.
inline double precision_at_k(const ranked_list& ranked, const qrels& judgments, int k) {
    if (k < 1) throw std::invalid_argument("precision_at_k: k must be >= 1");
    long long rel = 0;
    std::size_t limit = std::min<std::size_t>(ranked.entries.size(),
                                              static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < limit; ++i)
        if (judgments.grade(ranked.query_id, ranked.entries[i].doc_id) > 0) ++rel;
    return static_cast<double>(rel) / static_cast<double>(k);
}

// Binary preference: how often judged-relevant documents rank above
// judged-nonrelevant ones. Unjudged documents are invisible to it.
inline double bpref(const ranked_list& ranked, const qrels& judgments) {
    long long r = judgments.n_relevant(ranked.query_id);
    if (r == 0)
        throw no_relevant_docs("query '" + ranked.query_id + "' has no relevant documents");
    long long n = judgments.n_nonrelevant(ranked.query_id);
    double denom = static_cast<double>(std::min(r, n));
    double sum = 0.0;
    long long nonrel_above = 0;
    for (const auto& e : ranked.entries) {
        int g = judgments.grade(ranked.query_id, e.doc_id);
        if (g > 0) {
            sum += n == 0 ? 1.0
                          : 1.0 - static_cast<double>(std::min<long long>(
                                      nonrel_above, std::min(r, n))) /
                                      denom;
        } else if (g == 0) {
            ++nonrel_above;
        }
    }
    return sum / static_cast<double>(r);
}

inline long long relevant_retrieved(const ranked_list& ranked, const qrels& judgments) {
    long long rel = 0;
    for (const auto& e : ranked.entries)
        if (judgments.grade(ranked.query_id, e.doc_id) > 0) ++rel;
    return rel;
}

// Set-based F1 over the full retrieved list.
inline double f_measure(const ranked_list& ranked, const qrels& judgments) {
    long long r = judgments.n_relevant(ranked.query_id);
    if (r == 0)
        throw no_relevant_docs("query '" + ranked.query_id + "' has no relevant documents");
    long long rel_ret = relevant_retrieved(ranked, judgments);
    if (rel_ret == 0 || ranked.entries.empty()) return 0.0;
    double p = static_cast<double>(rel_ret) / static_cast<double>(ranked.entries.size());
    double rec = static_cast<double>(rel_ret) / static_cast<double>(r);
    return 2.0 * p * rec / (p + rec);
}

// Interpolated precision at recall levels 0.0, 0.1, ..., 1.0: the maximum
// precision over all ranks whose recall reaches the level.
inline std::array<double, 11> interpolated_pr(const ranked_list& ranked,
                                              const qrels& judgments) {
    long long r = judgments.n_relevant(ranked.query_id);
    if (r == 0)
        throw no_relevant_docs("query '" + ranked.query_id + "' has no relevant documents");
    std::vector<std::pair<double, double>> points;  // (recall, precision) per rank
    long long rel_seen = 0;
    for (std::size_t i = 0; i < ranked.entries.size(); ++i) {
        if (judgments.grade(ranked.query_id, ranked.entries[i].doc_id) > 0) ++rel_seen;
        points.emplace_back(static_cast<double>(rel_seen) / static_cast<double>(r),
                            static_cast<double>(rel_seen) / static_cast<double>(i + 1));
    }
    std::array<double, 11> out{};
    for (int level = 0; level <= 10; ++level) {
        double rho = static_cast<double>(level) / 10.0;
        double best = 0.0;
        for (const auto& [recall, precision] : points)
            if (recall >= rho - 1e-12) best = std::max(best, precision);
        out[static_cast<std::size_t>(level)] = best;
    }
    return out;
}

inline double mean_ap(const std::vector<double>& aps) {
    if (aps.empty()) throw std::invalid_argument("mean_ap: no queries");
    double sum = 0.0;
    for (double ap : aps) sum += ap;
    return sum / static_cast<double>(aps.size());
}

inline double gmap(const std::vector<double>& aps, double epsilon = gm_map_epsilon) {
    if (aps.empty()) throw std::invalid_argument("gmap: no queries");
    double sum = 0.0;
    for (double ap : aps) sum += std::log(std::max(ap, epsilon));
    return std::exp(sum / static_cast<double>(aps.size()));
}

inline double relative_improvement(double new_value, double baseline) {
    if (baseline <= 0.0)
        throw zero_baseline("relative improvement undefined for baseline <= 0");
    return 100.0 * (new_value - baseline) / baseline;
}

struct query_metrics {
    double ap = 0.0;
    double p5 = 0.0;
    double p10 = 0.0;
    double p20 = 0.0;
    double p30 = 0.0;
    double bpref = 0.0;
    double f1 = 0.0;
    long long rel_ret = 0;
    long long n_relevant = 0;
    long long retrieved = 0;
    std::array<double, 11> pr{};
};

struct metrics_report {
    std::map<std::string, query_metrics> per_query;
    std::vector<std::string> skipped;  // queries with no relevant docs
    double map = 0.0;
    double gm_map = 0.0;
    double mean_p5 = 0.0;
    double mean_p10 = 0.0;
    double mean_p20 = 0.0;
    double mean_p30 = 0.0;
    double mean_bpref = 0.0;
    double mean_f1 = 0.0;
    long long total_rel_ret = 0;
    long long total_relevant = 0;
    long long total_retrieved = 0;
    std::array<double, 11> mean_pr{};
    std::size_t n_queries = 0;
};

// Evaluates a run against judgments. Every qrels query with at least one
// relevant document participates; those absent from the run score zero.
// Queries with no relevant document are skipped and listed.
inline metrics_report evaluate(const std::vector<ranked_list>& run, const qrels& judgments) {
    std::map<std::string, const ranked_list*> by_id;
    for (const auto& list : run) by_id[list.query_id] = &list;

    metrics_report report;
    std::vector<double> aps;
    for (const auto& [qid, docs] : judgments.judgments) {
        long long r = 0;
        for (const auto& [doc, g] : docs)
            if (g > 0) ++r;
        if (r == 0) {
            report.skipped.push_back(qid);
            continue;
        }
        ranked_list empty;
        empty.query_id = qid;
        const ranked_list& ranked = by_id.count(qid) ? *by_id.at(qid) : empty;

        query_metrics m;
        m.ap = average_precision(ranked, judgments);
        m.p5 = precision_at_k(ranked, judgments, 5);
        m.p10 = precision_at_k(ranked, judgments, 10);
        m.p20 = precision_at_k(ranked, judgments, 20);
        m.p30 = precision_at_k(ranked, judgments, 30);
        m.bpref = bpref(ranked, judgments);
        m.f1 = f_measure(ranked, judgments);
        m.rel_ret = relevant_retrieved(ranked, judgments);
        m.n_relevant = r;
        m.retrieved = static_cast<long long>(ranked.entries.size());
        m.pr = interpolated_pr(ranked, judgments);

        aps.push_back(m.ap);
        report.mean_p5 += m.p5;
        report.mean_p10 += m.p10;
        report.mean_p20 += m.p20;
        report.mean_p30 += m.p30;
        report.mean_bpref += m.bpref;
        report.mean_f1 += m.f1;
        report.total_rel_ret += m.rel_ret;
        report.total_relevant += r;
        report.total_retrieved += m.retrieved;
        for (std::size_t i = 0; i < 11; ++i) report.mean_pr[i] += m.pr[i];
        report.per_query.emplace(qid, m);
    }
    report.n_queries = aps.size();
    if (!aps.empty()) {
        double n = static_cast<double>(aps.size());
        report.map = mean_ap(aps);
        report.gm_map = gmap(aps);
        report.mean_p5 /= n;
        report.mean_p10 /= n;
        report.mean_p20 /= n;
        report.mean_p30 /= n;
        report.mean_bpref /= n;
        report.mean_f1 /= n;
        for (auto& v : report.mean_pr) v /= n;
    }
    return report;
}

}  // namespace webqe
