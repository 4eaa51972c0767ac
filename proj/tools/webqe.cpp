// webqe — web-corpus query expansion experiments from the command line.
//
// Subcommands cover the full pipeline: fetch (build a snapshot of search
// results), expand (mine expansion terms), index (build the inverted index),
// search (baseline or expanded runs), eval (metric reports and baseline
// comparison) and sweep (parameter grids as CSV). Every knob lives in a JSON
// config file; command-line flags override file values.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "webqe/config.hpp"
#include "webqe/experiment.hpp"
#include "webqe/fetch.hpp"
#include "webqe/metrics.hpp"
#include "webqe/trec.hpp"

namespace fs = std::filesystem;
using namespace webqe;

namespace {

int fail(const std::string& command, const std::string& message) {
    nlohmann::ordered_json j;
    j["status"] = "error";
    j["command"] = command;
    j["message"] = message;
    std::cerr << j.dump() << '\n';
    return 1;
}

int partial(const std::string& command, const nlohmann::ordered_json& failures) {
    nlohmann::ordered_json j;
    j["status"] = "partial";
    j["command"] = command;
    j["failures"] = failures;
    std::cerr << j.dump() << '\n';
    return 1;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::string combo_name(const std::set<engine_id>& engines) {
    std::string name;
    for (const auto& e : engines) name += (name.empty() ? "" : "+") + e;
    return name;
}

// Holds optional flag values so file config loads first and explicit flags
// still win afterwards.
struct overrides {
    std::optional<std::string> engines;
    std::optional<int> n_docs, m_intermediate, knn_k, knn_l, knn_r0, n_final;
    std::optional<bool> dedup, drop_numeric;
    std::optional<int> min_len, max_len, r_max, threads;
    std::optional<std::string> stoplist, blocklist, model;
    std::optional<double> bm25_k1, bm25_b, beta, weight_floor;
    std::optional<std::string> snapshot, url_list, collection, topics, qrels, out_dir;
    std::optional<std::string> sweep_docs, sweep_terms;

    void apply(experiment_config& cfg) const {
        if (engines) {
            cfg.engines.clear();
            for (const auto& e : split_csv(*engines)) cfg.engines.insert(e);
        }
        if (n_docs) cfg.n_docs = *n_docs;
        if (m_intermediate) cfg.m_intermediate = *m_intermediate;
        if (knn_k) cfg.knn_k = *knn_k;
        if (knn_l) cfg.knn_l = *knn_l;
        if (knn_r0) cfg.knn_r0 = *knn_r0;
        if (n_final) cfg.n_final = *n_final;
        if (dedup) cfg.dedup = *dedup;
        if (drop_numeric) cfg.drop_numeric = *drop_numeric;
        if (min_len) cfg.min_len = *min_len;
        if (max_len) cfg.max_len = *max_len;
        if (r_max) cfg.r_max = *r_max;
        if (threads) cfg.threads = *threads;
        if (stoplist) cfg.stoplist_path = *stoplist;
        if (blocklist) cfg.blocklist_path = *blocklist;
        if (model) cfg.model = *model;
        if (bm25_k1) cfg.bm25_k1 = *bm25_k1;
        if (bm25_b) cfg.bm25_b = *bm25_b;
        if (beta) cfg.beta = *beta;
        if (weight_floor) cfg.weight_floor = *weight_floor;
        if (snapshot) cfg.snapshot_path = *snapshot;
        if (url_list) cfg.url_list_path = *url_list;
        if (collection) cfg.collection_path = *collection;
        if (topics) cfg.topics_path = *topics;
        if (qrels) cfg.qrels_path = *qrels;
        if (out_dir) cfg.out_dir = *out_dir;
        auto parse_grid = [](const std::string& s) {
            std::vector<int> grid;
            for (const auto& v : split_csv(s)) grid.push_back(std::stoi(v));
            return grid;
        };
        if (sweep_docs) cfg.sweep_docs = parse_grid(*sweep_docs);
        if (sweep_terms) cfg.sweep_terms = parse_grid(*sweep_terms);
    }
};

void require_path(const std::string& what, const std::string& path) {
    if (path.empty()) throw std::runtime_error(what + " path not configured");
    if (!fs::exists(path)) throw std::runtime_error(what + " not found: " + path);
}

indexed_collection obtain_index(const experiment_config& cfg, const std::string& index_path,
                                bool verbose) {
    std::string artifact = index_path.empty()
                               ? (fs::path(cfg.out_dir) / "index.jsonl").string()
                               : index_path;
    if (fs::exists(artifact)) {
        if (verbose) std::cerr << "loading index artifact " << artifact << '\n';
        return load_index(artifact);
    }
    require_path("collection", cfg.collection_path);
    if (verbose) std::cerr << "indexing collection " << cfg.collection_path << '\n';
    return build_index(load_collection(cfg.collection_path), cfg.retrieval_analyzer());
}

std::string improvement_line(const char* label, double value, double baseline) {
    std::ostringstream out;
    out << label << format_metric(value) << "  vs baseline " << format_metric(baseline);
    if (baseline > 0.0) {
        double delta = relative_improvement(value, baseline);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", std::abs(delta));
        const char* arrow = delta > 0 ? "↑" : delta < 0 ? "↓" : "=";
        out << "  (" << arrow << buf << "%)";
    }
    return out.str();
}

int cmd_fetch(const experiment_config& cfg, bool include_html, bool verbose) {
    require_path("topics", cfg.topics_path);
    require_path("url-list", cfg.url_list_path);
    std::string snapshot_out = cfg.snapshot_path.empty()
                                   ? (fs::path(cfg.out_dir) / "snapshot.jsonl").string()
                                   : cfg.snapshot_path;

    topic_set topics = topic_set::from_file(cfg.topics_path);
    url_list_provider provider(cfg.url_list_path);
    blocklist blocked = cfg.make_blocklist();

    std::vector<serp_entry> wanted;
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (const auto& [qid, title] : topics.topics) {
        for (const auto& engine : cfg.engines) {
            try {
                std::vector<serp_entry> serp = acquire_serp(qid, engine, cfg.n_docs, provider);
                std::vector<serp_entry> kept = filter_urls(serp, blocked);
                wanted.insert(wanted.end(), kept.begin(), kept.end());
            } catch (const std::exception& e) {
                nlohmann::ordered_json f;
                f["query_id"] = qid;
                f["engine"] = engine;
                f["message"] = e.what();
                failures.push_back(std::move(f));
            }
        }
    }

    std::optional<snapshot> existing;
    if (fs::exists(snapshot_out)) existing = snapshot::load(snapshot_out);
    std::size_t already = existing ? existing->entries.size() : 0;

    fetch_options options;
    options.include_html = include_html;
    snapshot snap =
        build_snapshot(wanted, http_fetcher(options), options,
                       existing ? &*existing : nullptr);
    snap.metadata = snapshot_metadata{utc_timestamp_now(), "url_list:" + cfg.url_list_path,
                                      cfg.n_docs};
    fs::create_directories(fs::path(snapshot_out).parent_path().empty()
                               ? "."
                               : fs::path(snapshot_out).parent_path().string());
    snap.save(snapshot_out);
    if (verbose)
        std::cerr << "snapshot " << snapshot_out << ": " << snap.entries.size()
                  << " records (" << snap.entries.size() - already << " new)\n";
    std::cout << snapshot_out << '\n';
    if (!failures.empty()) return partial("fetch", failures);
    return 0;
}

int cmd_expand(const experiment_config& cfg, const std::vector<std::string>& combo_flags,
               bool verbose) {
    require_path("snapshot", cfg.snapshot_path);
    require_path("topics", cfg.topics_path);
    fs::create_directories(cfg.out_dir);

    snapshot snap = snapshot::load(cfg.snapshot_path);
    topic_set topics = topic_set::from_file(cfg.topics_path);
    std::vector<query> queries = queries_from_topics(topics, cfg.expansion_analyzer());

    std::vector<std::set<engine_id>> combos;
    if (combo_flags.empty()) {
        combos.push_back(cfg.engines);
    } else {
        for (const auto& flag : combo_flags) {
            std::set<engine_id> combo;
            for (const auto& e : split_csv(flag)) combo.insert(e);
            if (combo.empty()) throw std::runtime_error("empty --combo value");
            combos.push_back(std::move(combo));
        }
    }

    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    std::vector<std::pair<std::string, std::vector<expanded_query>>> by_combo;
    for (const auto& combo : combos) {
        expansion_config econfig = cfg.make_expansion();
        econfig.engines = combo;
        std::vector<expand_failure> combo_failures;
        std::vector<expanded_query> expanded =
            expand_topics(queries, snap, econfig, combo_failures);
        std::string name = combo_name(combo);
        std::string out_path = (fs::path(cfg.out_dir) / ("expanded-" + name + ".jsonl")).string();
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        write_expanded_queries(expanded, econfig, out);
        if (verbose)
            std::cerr << "combo " << name << ": " << expanded.size() << " queries -> "
                      << out_path << '\n';
        for (const auto& f : combo_failures) {
            nlohmann::ordered_json rec;
            rec["combo"] = name;
            rec["query_id"] = f.query_id;
            rec["message"] = f.message;
            failures.push_back(std::move(rec));
        }
        by_combo.emplace_back(std::move(name), std::move(expanded));
    }

    std::string report_path = (fs::path(cfg.out_dir) / "expansion_report.txt").string();
    std::ofstream report(report_path, std::ios::binary);
    report << render_expansion_report(by_combo);
    std::cout << report_path << '\n';
    if (!failures.empty()) return partial("expand", failures);
    return 0;
}

int cmd_index(const experiment_config& cfg, bool verbose) {
    require_path("collection", cfg.collection_path);
    fs::create_directories(cfg.out_dir);
    indexed_collection index =
        build_index(load_collection(cfg.collection_path), cfg.retrieval_analyzer());
    std::string out_path = (fs::path(cfg.out_dir) / "index.jsonl").string();
    save_index(index, out_path);
    if (verbose)
        std::cerr << "indexed " << index.doc_count() << " documents, "
                  << index.postings.size() << " terms\n";
    std::cout << out_path << '\n';
    return 0;
}

int cmd_search(const experiment_config& cfg, const std::string& expanded_path,
               const std::string& index_path, std::string tag, bool verbose) {
    fs::create_directories(cfg.out_dir);
    indexed_collection index = obtain_index(cfg, index_path, verbose);
    std::unique_ptr<weighting_model> model = make_model(cfg.model, cfg.make_model_params());

    std::vector<ranked_list> run;
    if (expanded_path.empty()) {
        require_path("topics", cfg.topics_path);
        topic_set topics = topic_set::from_file(cfg.topics_path);
        std::vector<query> queries = queries_from_topics(topics, cfg.expansion_analyzer());
        run = search_baseline(queries, index, cfg.retrieval_analyzer(), *model, cfg.r_max);
        if (tag.empty()) tag = cfg.model + "-baseline";
    } else {
        require_path("expanded-query file", expanded_path);
        std::vector<expanded_query> expanded = read_expanded_queries(expanded_path);
        run = search_expanded(expanded, index, cfg.retrieval_analyzer(), *model, cfg.beta,
                              cfg.weight_floor, cfg.r_max);
        if (tag.empty()) tag = cfg.model + "-expanded";
    }
    std::string out_path = (fs::path(cfg.out_dir) / (tag + ".run")).string();
    write_run(run, tag, fs::path(out_path));
    if (verbose) std::cerr << "run " << out_path << ": " << run.size() << " queries\n";
    std::cout << out_path << '\n';
    return 0;
}

int cmd_eval(const experiment_config& cfg, const std::string& run_path,
             const std::string& baseline_path, std::string name) {
    require_path("run", run_path);
    require_path("qrels", cfg.qrels_path);
    fs::create_directories(cfg.out_dir);

    qrels judgments = qrels::from_file(cfg.qrels_path);
    metrics_report report = evaluate(parse_run_file(run_path), judgments);
    std::cout << render_metrics_table(report);

    if (!baseline_path.empty()) {
        require_path("baseline run", baseline_path);
        metrics_report base = evaluate(parse_run_file(baseline_path), judgments);
        std::cout << improvement_line("MAP     ", report.map, base.map) << '\n'
                  << improvement_line("GM_MAP  ", report.gm_map, base.gm_map) << '\n'
                  << improvement_line("bpref   ", report.mean_bpref, base.mean_bpref) << '\n'
                  << improvement_line("P@10    ", report.mean_p10, base.mean_p10) << '\n';
    }

    if (name.empty()) name = fs::path(run_path).stem().string();
    std::string json_path = (fs::path(cfg.out_dir) / ("eval-" + name + ".json")).string();
    std::ofstream json_out(json_path, std::ios::binary);
    json_out << metrics_to_json(report).dump(2) << '\n';
    std::string pr_path = (fs::path(cfg.out_dir) / ("pr-" + name + ".csv")).string();
    std::ofstream pr_out(pr_path, std::ios::binary);
    write_pr_csv(report, pr_out);
    return 0;
}

int cmd_sweep(const experiment_config& cfg, const std::string& axis_flag, bool verbose) {
    require_path("snapshot", cfg.snapshot_path);
    require_path("topics", cfg.topics_path);
    require_path("qrels", cfg.qrels_path);
    fs::create_directories(cfg.out_dir);

    sweep_axis axis;
    if (axis_flag == "docs") axis = sweep_axis::docs;
    else if (axis_flag == "terms") axis = sweep_axis::terms;
    else throw std::runtime_error("--axis must be 'docs' or 'terms'");

    snapshot snap = snapshot::load(cfg.snapshot_path);
    topic_set topics = topic_set::from_file(cfg.topics_path);
    std::vector<query> queries = queries_from_topics(topics, cfg.expansion_analyzer());
    indexed_collection index = obtain_index(cfg, "", verbose);
    qrels judgments = qrels::from_file(cfg.qrels_path);

    std::vector<sweep_row> rows = run_sweep(cfg, axis, queries, snap, index, judgments);
    std::string out_path = (fs::path(cfg.out_dir) / ("sweep-" + axis_flag + ".csv")).string();
    std::ofstream out(out_path, std::ios::binary);
    write_sweep_csv(rows, axis, out);
    std::cout << out_path << '\n';

    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        if (row.failed) {
            nlohmann::ordered_json f;
            f["value"] = row.value;
            f["message"] = row.error;
            failures.push_back(std::move(f));
        }
    }
    if (!failures.empty()) return partial("sweep", failures);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "webqe — query expansion from web search results, with ranked retrieval "
        "and IR evaluation.\n\n"
        "Config file keys (JSON; every key also has a flag, flags win):\n"
        "  engines, n_docs, m_intermediate, knn_k, knn_l, knn_r0, n_final, dedup,\n"
        "  min_len, max_len, drop_numeric, stoplist_path, model, bm25_k1, bm25_b,\n"
        "  beta, weight_floor, r_max, snapshot_path, url_list_path, collection_path,\n"
        "  topics_path, qrels_path, blocklist_path, out_dir, sweep_docs, sweep_terms,\n"
        "  threads\n"};
    app.require_subcommand(1);

    std::string config_path;
    bool verbose = false;
    int seed = 0;
    overrides ov;

    app.add_option("--config", config_path, "JSON config file (flags override its values)");
    app.add_option("--out-dir", ov.out_dir, "output directory (config: out_dir)");
    app.add_option("--seed", seed, "random seed (reserved; pipeline is deterministic)");
    app.add_flag("--verbose", verbose, "progress details on stderr");

    app.add_option("--engines", ov.engines,
                   "comma-separated engine ids (config: engines)");
    app.add_option("--n-docs", ov.n_docs, "feedback documents per engine (config: n_docs)");
    app.add_option("--m-intermediate", ov.m_intermediate,
                   "intermediate candidate count (config: m_intermediate)");
    app.add_option("--knn-k", ov.knn_k, "selected neighbour count (config: knn_k)");
    app.add_option("--knn-l", ov.knn_l, "terms dropped per iteration (config: knn_l)");
    app.add_option("--knn-r0", ov.knn_r0, "selection iterations (config: knn_r0)");
    app.add_option("--n-final", ov.n_final, "final expansion terms (config: n_final)");
    app.add_flag("--dedup{true},--no-dedup{false}", ov.dedup,
                 "collapse duplicate URLs across engines (config: dedup)");
    app.add_option("--min-len", ov.min_len, "minimum token length (config: min_len)");
    app.add_option("--max-len", ov.max_len, "maximum token length (config: max_len)");
    app.add_flag("--drop-numeric{true},--keep-numeric{false}", ov.drop_numeric,
                 "drop purely numeric tokens (config: drop_numeric)");
    app.add_option("--stoplist", ov.stoplist,
                   "stoplist file, one word per line (config: stoplist_path)");
    app.add_option("--blocklist", ov.blocklist,
                   "domain blocklist file (config: blocklist_path)");
    app.add_option("--model", ov.model, "weighting model: bm25 | tfidf (config: model)");
    app.add_option("--bm25-k1", ov.bm25_k1, "BM25 k1 (config: bm25_k1)");
    app.add_option("--bm25-b", ov.bm25_b, "BM25 b (config: bm25_b)");
    app.add_option("--beta", ov.beta, "expansion weight factor (config: beta)");
    app.add_option("--weight-floor", ov.weight_floor,
                   "lower bound of normalized expansion weights (config: weight_floor)");
    app.add_option("--r-max", ov.r_max, "ranked list depth (config: r_max)");
    app.add_option("--snapshot", ov.snapshot, "snapshot file (config: snapshot_path)");
    app.add_option("--url-list", ov.url_list,
                   "URL list file for fetch (config: url_list_path)");
    app.add_option("--collection", ov.collection,
                   "target document collection (config: collection_path)");
    app.add_option("--topics", ov.topics, "topics file (config: topics_path)");
    app.add_option("--qrels", ov.qrels, "relevance judgments (config: qrels_path)");
    app.add_option("--sweep-docs", ov.sweep_docs,
                   "comma-separated docs-axis grid (config: sweep_docs)");
    app.add_option("--sweep-terms", ov.sweep_terms,
                   "comma-separated terms-axis grid (config: sweep_terms)");
    app.add_option("--threads", ov.threads, "sweep worker threads (config: threads)");

    bool include_html = false;
    CLI::App* fetch = app.add_subcommand("fetch", "fetch pages and build a snapshot");
    fetch->fallthrough();
    fetch->add_flag("--include-html", include_html, "store raw HTML in the snapshot");

    std::vector<std::string> combo_flags;
    CLI::App* expand = app.add_subcommand("expand", "mine expansion terms per topic");
    expand->fallthrough();
    expand->add_option("--combo", combo_flags,
                       "engine combination (comma-separated, repeatable); default: "
                       "configured engines");

    CLI::App* index_cmd = app.add_subcommand("index", "build the inverted index artifact");
    index_cmd->fallthrough();

    std::string expanded_path, index_path, tag;
    CLI::App* search_cmd =
        app.add_subcommand("search", "run a baseline or expanded retrieval");
    search_cmd->fallthrough();
    search_cmd->add_option("--expanded", expanded_path,
                           "expanded-query file; omit for the baseline run");
    search_cmd->add_option("--index", index_path, "index artifact path");
    search_cmd->add_option("--tag", tag, "run tag / output file stem");

    std::string run_path, baseline_path, eval_name;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a run against qrels");
    eval_cmd->fallthrough();
    eval_cmd->add_option("--run", run_path, "run file to evaluate")->required();
    eval_cmd->add_option("--baseline", baseline_path,
                         "baseline run for improvement percentages");
    eval_cmd->add_option("--name", eval_name, "report file stem");

    std::string axis_flag;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "grid sweep over n_docs or n_terms, CSV out");
    sweep_cmd->fallthrough();
    sweep_cmd->add_option("--axis", axis_flag, "sweep axis: docs | terms")->required();

    CLI11_PARSE(app, argc, argv);

    std::string command = app.get_subcommands().front()->get_name();
    try {
        experiment_config cfg;
        if (!config_path.empty()) cfg.load_file(config_path);
        ov.apply(cfg);
        (void)seed;

        if (command == "fetch") return cmd_fetch(cfg, include_html, verbose);
        if (command == "expand") return cmd_expand(cfg, combo_flags, verbose);
        if (command == "index") return cmd_index(cfg, verbose);
        if (command == "search")
            return cmd_search(cfg, expanded_path, index_path, tag, verbose);
        if (command == "eval") return cmd_eval(cfg, run_path, baseline_path, eval_name);
        if (command == "sweep") return cmd_sweep(cfg, axis_flag, verbose);
        return fail(command, "unknown command");
    } catch (const std::exception& e) {
        return fail(command, e.what());
    }
}
