#pragma once

// Experiment configuration: one JSON file holds every knob; command-line
// flags override file values. Field names here are the config keys.

#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "webqe/analysis.hpp"
#include "webqe/expansion.hpp"
#include "webqe/ranking.hpp"

namespace webqe {

struct experiment_config {
    // engines (the combination selects the pipeline variant)
    std::set<engine_id> engines = {"bing", "duckduckgo", "google"};

    // expansion
    int n_docs = 20;
    int m_intermediate = 100;
    int knn_k = 40;
    int knn_l = 2;
    int knn_r0 = 5;
    int n_final = 15;
    bool dedup = false;

    // analyzer
    int min_len = 2;
    int max_len = 40;
    bool drop_numeric = false;
    std::string stoplist_path;  // empty = embedded SMART list

    // retrieval
    std::string model = "bm25";
    double bm25_k1 = 1.2;
    double bm25_b = 0.75;
    double beta = 0.5;          // global expansion-weight factor
    double weight_floor = 0.05; // lower bound of normalized expansion weights
    int r_max = 1000;

    // paths
    std::string snapshot_path;
    std::string url_list_path;  // fetch input when no snapshot exists yet
    std::string collection_path;
    std::string topics_path;
    std::string qrels_path;
    std::string blocklist_path;  // empty = built-in list
    std::string out_dir = "out";

    // sweeps
    std::vector<int> sweep_docs = {5, 10, 15, 20, 25, 30, 50};
    std::vector<int> sweep_terms = {5, 10, 15, 20, 25, 30, 50};
    int threads = 1;

    analyzer_config make_analyzer(bool stemming) const {
        analyzer_config a;
        a.stops = stoplist_path.empty() ? stoplist::smart() : stoplist::from_file(stoplist_path);
        a.stemming = stemming;
        a.min_len = min_len;
        a.max_len = max_len;
        a.drop_numeric = drop_numeric;
        return a;
    }

    analyzer_config expansion_analyzer() const { return make_analyzer(false); }
    analyzer_config retrieval_analyzer() const { return make_analyzer(true); }

    expansion_config make_expansion() const {
        expansion_config e;
        e.n_docs = n_docs;
        e.m_intermediate = m_intermediate;
        e.knn = knn_params{knn_k, knn_l, knn_r0};
        e.n_final = n_final;
        e.engines = engines;
        e.dedup = dedup;
        e.analyzer = expansion_analyzer();
        return e;
    }

    model_params make_model_params() const {
        return {{"k1", bm25_k1}, {"b", bm25_b}};
    }

    blocklist make_blocklist() const {
        return blocklist_path.empty() ? blocklist::standard()
                                      : blocklist::from_file(blocklist_path);
    }

    // Overlays values from a JSON config file onto the current settings.
    void load_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file: " + path.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::parse_error& e) {
            throw std::runtime_error(path.string() + ": config parse error: " + e.what());
        }
        if (!j.is_object()) throw std::runtime_error(path.string() + ": config must be an object");

        auto get_int = [&](const char* key, int& slot) {
            if (j.contains(key)) slot = j.at(key).get<int>();
        };
        auto get_double = [&](const char* key, double& slot) {
            if (j.contains(key)) slot = j.at(key).get<double>();
        };
        auto get_bool = [&](const char* key, bool& slot) {
            if (j.contains(key)) slot = j.at(key).get<bool>();
        };
        auto get_string = [&](const char* key, std::string& slot) {
            if (j.contains(key)) slot = j.at(key).get<std::string>();
        };

        if (j.contains("engines")) {
            engines.clear();
            for (const auto& e : j.at("engines")) engines.insert(e.get<std::string>());
        }
        get_int("n_docs", n_docs);
        get_int("m_intermediate", m_intermediate);
        get_int("knn_k", knn_k);
        get_int("knn_l", knn_l);
        get_int("knn_r0", knn_r0);
        get_int("n_final", n_final);
        get_bool("dedup", dedup);
        get_int("min_len", min_len);
        get_int("max_len", max_len);
        get_bool("drop_numeric", drop_numeric);
        get_string("stoplist_path", stoplist_path);
        get_string("model", model);
        get_double("bm25_k1", bm25_k1);
        get_double("bm25_b", bm25_b);
        get_double("beta", beta);
        get_double("weight_floor", weight_floor);
        get_int("r_max", r_max);
        get_string("snapshot_path", snapshot_path);
        get_string("url_list_path", url_list_path);
        get_string("collection_path", collection_path);
        get_string("topics_path", topics_path);
        get_string("qrels_path", qrels_path);
        get_string("blocklist_path", blocklist_path);
        get_string("out_dir", out_dir);
        if (j.contains("sweep_docs"))
            sweep_docs = j.at("sweep_docs").get<std::vector<int>>();
        if (j.contains("sweep_terms"))
            sweep_terms = j.at("sweep_terms").get<std::vector<int>>();
        get_int("threads", threads);
    }
};

}  // namespace webqe
