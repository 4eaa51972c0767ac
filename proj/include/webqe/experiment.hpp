#pragma once

// Experiment orchestration shared by the command-line tool and the tests:
// topic analysis, per-topic expansion with failure collection, baseline and
// expanded searches, metric reports, parameter sweeps and the file renderers
// for all of them. Everything here is deterministic given identical inputs.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "webqe/config.hpp"
#include "webqe/expansion.hpp"
#include "webqe/index.hpp"
#include "webqe/metrics.hpp"
#include "webqe/ranking.hpp"
#include "webqe/trec.hpp"

namespace webqe {

// Topic titles analyzed into unstemmed query-term lists. Topics whose title
// yields no tokens are dropped (reported by the caller via the size change).
inline std::vector<query> queries_from_topics(const topic_set& topics,
                                              const analyzer_config& analyzer) {
    std::vector<query> out;
    out.reserve(topics.topics.size());
    for (const auto& [qid, title] : topics.topics) {
        query q{qid, tokenize(title, analyzer)};
        if (!q.terms.empty()) out.push_back(std::move(q));
    }
    return out;
}

struct expand_failure {
    std::string query_id;
    std::string message;
};

// Expands every query, collecting per-query failures instead of aborting.
inline std::vector<expanded_query> expand_topics(const std::vector<query>& queries,
                                                 const snapshot& snap,
                                                 const expansion_config& config,
                                                 std::vector<expand_failure>& failures) {
    std::vector<expanded_query> out;
    out.reserve(queries.size());
    for (const auto& q : queries) {
        try {
            out.push_back(expand_query(q, snap, config));
        } catch (const std::exception& e) {
            failures.push_back({q.id, e.what()});
        }
    }
    return out;
}

// One structured record per query: original terms, scored expansion terms
// and an echo of the knobs that produced them.
inline void write_expanded_queries(const std::vector<expanded_query>& queries,
                                   const expansion_config& config, std::ostream& out) {
    using ordered = nlohmann::ordered_json;
    ordered config_echo;
    config_echo["engines"] = std::vector<std::string>(config.engines.begin(),
                                                      config.engines.end());
    config_echo["n_docs"] = config.n_docs;
    config_echo["m_intermediate"] = config.m_intermediate;
    config_echo["knn_k"] = config.knn.k;
    config_echo["knn_l"] = config.knn.l;
    config_echo["knn_r0"] = config.knn.r0;
    config_echo["n_final"] = config.n_final;
    config_echo["dedup"] = config.dedup;
    for (const auto& eq : queries) {
        ordered rec;
        rec["query_id"] = eq.original.id;
        rec["original_terms"] = eq.original.terms;
        ordered terms = ordered::array();
        for (const auto& [term, score] : eq.expansion) {
            ordered t;
            t["term"] = term;
            t["score"] = score;
            terms.push_back(std::move(t));
        }
        rec["expansion"] = std::move(terms);
        rec["config"] = config_echo;
        out << rec.dump() << '\n';
    }
    if (!out) throw std::runtime_error("expanded-query output stream failed");
}

inline std::vector<expanded_query> read_expanded_queries(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open expanded-query file: " + path.string());
    std::vector<expanded_query> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            expanded_query eq;
            eq.original.id = j.at("query_id").get<std::string>();
            eq.original.terms = j.at("original_terms").get<std::vector<std::string>>();
            for (const auto& t : j.at("expansion"))
                eq.expansion.emplace_back(t.at("term").get<std::string>(),
                                          t.at("score").get<double>());
            out.push_back(std::move(eq));
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": bad expanded-query record: " + e.what());
        }
    }
    return out;
}

// Expansion-term overview across engine combinations, one block per topic.
inline std::string render_expansion_report(
    const std::vector<std::pair<std::string, std::vector<expanded_query>>>& by_combo) {
    // collect topic order from the first combo that mentions each topic
    std::vector<std::pair<std::string, std::string>> topics;  // (id, original terms)
    for (const auto& [combo, queries] : by_combo) {
        for (const auto& eq : queries) {
            bool known = false;
            for (const auto& [id, title] : topics) known = known || id == eq.original.id;
            if (!known) {
                std::string joined;
                for (const auto& t : eq.original.terms)
                    joined += (joined.empty() ? "" : " ") + t;
                topics.emplace_back(eq.original.id, joined);
            }
        }
    }
    std::size_t width = 5;
    for (const auto& [combo, queries] : by_combo) width = std::max(width, combo.size());

    std::ostringstream out;
    for (const auto& [id, title] : topics) {
        out << "topic " << id << "  (" << title << ")\n";
        for (const auto& [combo, queries] : by_combo) {
            const expanded_query* found = nullptr;
            for (const auto& eq : queries)
                if (eq.original.id == id) found = &eq;
            out << "  " << std::left << std::setw(static_cast<int>(width)) << combo << " : ";
            if (!found) {
                out << "(no expansion)";
            } else {
                bool first = true;
                for (const auto& [term, score] : found->expansion) {
                    if (!first) out << ", ";
                    out << term;
                    first = false;
                }
            }
            out << '\n';
        }
        out << '\n';
    }
    return out.str();
}

// Baseline run: raw topic terms, uniform weight 1.0, stemmed at search time.
inline std::vector<ranked_list> search_baseline(const std::vector<query>& queries,
                                                const indexed_collection& index,
                                                const analyzer_config& analyzer,
                                                const weighting_model& model, int r_max) {
    std::vector<ranked_list> out;
    out.reserve(queries.size());
    for (const auto& q : queries)
        out.push_back(search(build_baseline_query(q, analyzer), index, model, r_max, q.id));
    return out;
}

// Expanded run: original terms at weight 1.0 plus reweighted expansion terms.
inline std::vector<ranked_list> search_expanded(const std::vector<expanded_query>& queries,
                                                const indexed_collection& index,
                                                const analyzer_config& analyzer,
                                                const weighting_model& model, double beta,
                                                double weight_floor, int r_max) {
    std::vector<ranked_list> out;
    out.reserve(queries.size());
    for (const auto& eq : queries)
        out.push_back(search(build_expanded_query(eq, analyzer, beta, weight_floor), index,
                             model, r_max, eq.original.id));
    return out;
}

inline std::string format_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

inline std::string render_metrics_table(const metrics_report& report) {
    std::ostringstream out;
    out << "query      AP      P@5     P@10    P@20    P@30    bpref   F1      rel_ret\n";
    for (const auto& [qid, m] : report.per_query) {
        out << std::left << std::setw(10) << qid << ' ' << format_metric(m.ap) << "  "
            << format_metric(m.p5) << "  " << format_metric(m.p10) << "  "
            << format_metric(m.p20) << "  " << format_metric(m.p30) << "  "
            << format_metric(m.bpref) << "  " << format_metric(m.f1) << "  " << m.rel_ret
            << '/' << m.n_relevant << '\n';
    }
    out << std::left << std::setw(10) << "all" << ' ' << format_metric(report.map) << "  "
        << format_metric(report.mean_p5) << "  " << format_metric(report.mean_p10) << "  "
        << format_metric(report.mean_p20) << "  " << format_metric(report.mean_p30) << "  "
        << format_metric(report.mean_bpref) << "  " << format_metric(report.mean_f1) << "  "
        << report.total_rel_ret << '/' << report.total_relevant << '\n';
    out << "MAP     " << format_metric(report.map) << '\n';
    out << "GM_MAP  " << format_metric(report.gm_map) << '\n';
    for (const auto& qid : report.skipped)
        out << "warning: query " << qid << " has no relevant documents; skipped\n";
    return out.str();
}

inline nlohmann::ordered_json metrics_to_json(const metrics_report& report) {
    using ordered = nlohmann::ordered_json;
    ordered j;
    ordered per_query = ordered::object();
    for (const auto& [qid, m] : report.per_query) {
        ordered q;
        q["ap"] = m.ap;
        q["p5"] = m.p5;
        q["p10"] = m.p10;
        q["p20"] = m.p20;
        q["p30"] = m.p30;
        q["bpref"] = m.bpref;
        q["f1"] = m.f1;
        q["rel_ret"] = m.rel_ret;
        q["n_relevant"] = m.n_relevant;
        q["retrieved"] = m.retrieved;
        q["pr"] = m.pr;
        per_query[qid] = std::move(q);
    }
    j["per_query"] = std::move(per_query);
    ordered agg;
    agg["map"] = report.map;
    agg["gm_map"] = report.gm_map;
    agg["mean_p5"] = report.mean_p5;
    agg["mean_p10"] = report.mean_p10;
    agg["mean_p20"] = report.mean_p20;
    agg["mean_p30"] = report.mean_p30;
    agg["mean_bpref"] = report.mean_bpref;
    agg["mean_f1"] = report.mean_f1;
    agg["total_rel_ret"] = report.total_rel_ret;
    agg["total_relevant"] = report.total_relevant;
    agg["total_retrieved"] = report.total_retrieved;
    agg["mean_pr"] = report.mean_pr;
    agg["n_queries"] = report.n_queries;
    j["aggregate"] = std::move(agg);
    j["skipped"] = report.skipped;
    return j;
}

// Averaged 11-point interpolated precision-recall curve as CSV.
inline void write_pr_csv(const metrics_report& report, std::ostream& out) {
    out << "recall_level,precision\n";
    for (std::size_t i = 0; i < report.mean_pr.size(); ++i) {
        char level[8];
        std::snprintf(level, sizeof(level), "%.1f", static_cast<double>(i) / 10.0);
        out << level << ',' << format_metric(report.mean_pr[i]) << '\n';
    }
}

enum class sweep_axis { docs, terms };

struct sweep_row {
    int value = 0;
    std::string model;
    double map = 0.0;
    bool failed = false;
    std::string error;
};

// The full pipeline for one grid point, reduced to its MAP. The terms axis
// widens the selection pool when the requested n_final exceeds the default k
// (n_final <= k must keep holding across the grid).
inline double sweep_point_map(const experiment_config& base, sweep_axis axis, int value,
                              const std::vector<query>& queries, const snapshot& snap,
                              const indexed_collection& index, const qrels& judgments) {
    experiment_config cfg = base;
    if (axis == sweep_axis::docs) {
        cfg.n_docs = value;
    } else {
        cfg.n_final = value;
        cfg.knn_k = std::max(cfg.knn_k, value);
        cfg.m_intermediate = std::max(cfg.m_intermediate, cfg.knn_k + cfg.knn_l * cfg.knn_r0);
    }
    std::vector<expand_failure> failures;
    std::vector<expanded_query> expanded =
        expand_topics(queries, snap, cfg.make_expansion(), failures);
    if (!failures.empty())
        throw std::runtime_error("expansion failed for query '" + failures.front().query_id +
                                 "': " + failures.front().message);
    std::unique_ptr<weighting_model> model = make_model(cfg.model, cfg.make_model_params());
    std::vector<ranked_list> run = search_expanded(
        expanded, index, cfg.retrieval_analyzer(), *model, cfg.beta, cfg.weight_floor,
        cfg.r_max);
    return evaluate(run, judgments).map;
}

// Runs every grid point (in parallel when threads > 1) and returns rows in
// grid order regardless of completion order.
inline std::vector<sweep_row> run_sweep(const experiment_config& base, sweep_axis axis,
                                        const std::vector<query>& queries,
                                        const snapshot& snap, const indexed_collection& index,
                                        const qrels& judgments) {
    const std::vector<int>& grid =
        axis == sweep_axis::docs ? base.sweep_docs : base.sweep_terms;
    if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
    std::vector<sweep_row> rows(grid.size());
    std::atomic<std::size_t> next{0};
    int n_threads = std::max(1, std::min<int>(base.threads, static_cast<int>(grid.size())));

    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) break;
            sweep_row& row = rows[i];
            row.value = grid[i];
            row.model = base.model;
            try {
                row.map = sweep_point_map(base, axis, grid[i], queries, snap, index, judgments);
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
            }
        }
    };
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

inline void write_sweep_csv(const std::vector<sweep_row>& rows, sweep_axis axis,
                            std::ostream& out) {
    out << (axis == sweep_axis::docs ? "n_docs" : "n_terms") << ",model,map\n";
    for (const auto& row : rows) {
        out << row.value << ',' << row.model << ',';
        if (row.failed)
            out << "error: " << row.error;
        else
            out << format_metric(row.map);
        out << '\n';
    }
}

}  // namespace webqe
