#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "boltzfold/analysis.hpp"
#include "boltzfold/energy_model.hpp"
#include "boltzfold/errors.hpp"
#include "boltzfold/fingerprint.hpp"
#include "boltzfold/folding.hpp"
#include "boltzfold/io.hpp"
#include "boltzfold/rng.hpp"
#include "boltzfold/selex.hpp"
#include "boltzfold/structure_graph.hpp"

namespace fs = std::filesystem;
using namespace boltzfold;

namespace {

struct GlobalOpts {
    std::string params_path;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string workdir = ".";
};

EnergyParameters resolve_params(const GlobalOpts& g) {
    std::string path = g.params_path;
    if (path.empty())
        if (const char* env = std::getenv("BOLTZFOLD_PARAMS")) path = env;
    return path.empty() ? toy_parameters() : load_parameters(path);
}

Sequence make_seq(const std::string& bases, const std::string& id = "seq") {
    Sequence s{id, bases};
    s.validate();
    return s;
}

std::string fmt_energy(double e) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", e == 0.0 ? 0.0 : e);
    return buf;
}

// ---------------------------------------------------------------- pipeline

struct PipelineConfig {
    std::string reads_path;
    int kmer_k = 4;
    int radius = 1;
    int n_samples = 1000;
    int exhaustive_limit = kDefaultExhaustiveLimit;
    int topics = 25;
    int clusters = 0;  // 0 = silhouette sweep
    int sweep_min = 5, sweep_max = 50;
    int k_neighbors = 10;
    double lambda = 1.0;
    int top_m = 10;
    double count_pct = 90.0, pressure_pct = 10.0;
    double perplexity = 30.0;
    int tsne_iters = 500;

    std::string fingerprint_config() const {
        std::ostringstream s;
        s << kmer_k << '|' << radius << '|' << n_samples << '|' << exhaustive_limit;
        return s.str();
    }
    std::string analysis_config() const {
        std::ostringstream s;
        s << topics << '|' << clusters << '|' << sweep_min << '|' << sweep_max << '|'
          << k_neighbors << '|' << lambda << '|' << top_m << '|' << count_pct << '|'
          << pressure_pct << '|' << perplexity << '|' << tsne_iters;
        return s.str();
    }
};

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class StageManifest {
  public:
    explicit StageManifest(const std::string& path) : path_(path) {
        if (fs::exists(path_)) {
            try {
                entries_ = nlohmann::json::parse(read_text_file(path_));
            } catch (...) {
                entries_ = nlohmann::json::object();
            }
        } else {
            entries_ = nlohmann::json::object();
        }
    }

    bool up_to_date(const std::string& stage, const std::string& hash,
                    const std::vector<std::string>& outputs) const {
        auto it = entries_.find(stage);
        if (it == entries_.end() || (*it)["hash"] != hash) return false;
        for (const std::string& o : outputs)
            if (!fs::exists(o)) return false;
        return true;
    }

    void record(const std::string& stage, const std::string& hash) {
        entries_[stage]["hash"] = hash;
        write_text_file(path_, entries_.dump(2) + "\n");
    }

  private:
    std::string path_;
    nlohmann::json entries_;
};

// Runs a stage unless the manifest says its inputs are unchanged and its
// outputs exist. Returns the stage hash, which downstream stages chain on.
template <typename Fn>
std::string run_stage(StageManifest& manifest, const std::string& stage,
                      const std::string& input_hash, const std::vector<std::string>& outputs,
                      Fn&& fn) {
    std::string hash = std::to_string(fnv1a(stage + "\x1f" + input_hash));
    if (manifest.up_to_date(stage, hash, outputs)) {
        std::cerr << "[pipeline] " << stage << ": up to date\n";
        return hash;
    }
    std::cerr << "[pipeline] " << stage << ": running\n";
    try {
        fn();
    } catch (const std::exception& e) {
        std::cerr << "pipeline stage '" << stage << "' failed: " << e.what() << "\n";
        std::exit(1);
    }
    manifest.record(stage, hash);
    return hash;
}

int cmd_pipeline(const GlobalOpts& g, const PipelineConfig& cfg) {
    EnergyParameters params = resolve_params(g);
    params.validate();
    Thermo thermo;

    fs::create_directories(g.workdir);
    fs::create_directories(fs::path(g.workdir) / "topics");
    fs::create_directories(fs::path(g.workdir) / "clusters");
    fs::create_directories(fs::path(g.workdir) / "figures");
    auto wpath = [&](const std::string& rel) { return (fs::path(g.workdir) / rel).string(); };

    StageManifest manifest(wpath("manifest.json"));
    std::string reads_text = read_text_file(cfg.reads_path);

    // -- ingest: reads -> filtered profiles --------------------------------
    std::string h_ingest;
    {
        std::string input = std::to_string(fnv1a(reads_text)) + "|" +
                            std::to_string(cfg.count_pct) + "|" +
                            std::to_string(cfg.pressure_pct);
        h_ingest = run_stage(manifest, "ingest", input, {wpath("profiles.tsv")}, [&] {
            auto records = filter_mutations(parse_reads_text(reads_text));
            auto profiles = build_profiles(records);
            label_anomalies(profiles, cfg.count_pct, cfg.pressure_pct);
            std::vector<std::string> ids;
            for (std::size_t i = 0; i < profiles.size(); ++i)
                ids.push_back("apt" + std::to_string(i));
            write_profiles_tsv(wpath("profiles.tsv"), ids, profiles);
        });
    }

    auto load_profiles = [&] {
        auto records = filter_mutations(parse_reads_text(reads_text));
        auto profiles = build_profiles(records);
        label_anomalies(profiles, cfg.count_pct, cfg.pressure_pct);
        return profiles;
    };

    // -- embed: ensembles + fingerprints -> feature matrices ---------------
    std::string h_embed;
    {
        std::string input = h_ingest + "|" + cfg.fingerprint_config() + "|" +
                            std::to_string(g.seed);
        h_embed = run_stage(manifest, "embed", input, {wpath("ebof.tsv"), wpath("en.tsv")}, [&] {
            auto profiles = load_profiles();
            std::vector<Sequence> seqs;
            for (std::size_t i = 0; i < profiles.size(); ++i)
                seqs.push_back(make_seq(profiles[i].sequence, "apt" + std::to_string(i)));

            std::vector<EnsembleDistribution> ensembles(seqs.size());
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (std::size_t i = next++; i < seqs.size(); i = next++)
                    ensembles[i] = boltzmann_ensemble(
                        seqs[i], params, thermo, cfg.n_samples,
                        derive_seed(g.seed, "ensemble-" + seqs[i].id), cfg.exhaustive_limit);
            };
            std::vector<std::thread> pool;
            for (int t = 1; t < g.jobs; ++t) pool.emplace_back(worker);
            worker();
            for (auto& t : pool) t.join();

            std::vector<std::pair<Sequence, const EnsembleDistribution*>> corpus;
            for (std::size_t i = 0; i < seqs.size(); ++i)
                corpus.emplace_back(seqs[i], &ensembles[i]);

            FeatureDictionary face_dict =
                build_dictionary(corpus, FeatureKind::FACE, params, 0);
            FeatureDictionary nbh_dict =
                build_dictionary(corpus, FeatureKind::NEIGHBORHOOD, params, cfg.radius);
            FeatureDictionary km_dict = kmer_dictionary(cfg.kmer_k);

            MatrixSegmentSpec face_seg{"FACE", &face_dict, {}};
            MatrixSegmentSpec km_seg{"KMER", &km_dict, {}};
            MatrixSegmentSpec nbh_seg{"NBH", &nbh_dict, {}};
            for (std::size_t i = 0; i < seqs.size(); ++i) {
                face_seg.rows.push_back(
                    expected_bag_of_faces(seqs[i], ensembles[i], params, face_dict));
                km_seg.rows.push_back(kmer_counts(seqs[i], cfg.kmer_k, km_dict));
                nbh_seg.rows.push_back(
                    expected_bag_of_neighborhoods(seqs[i], ensembles[i], cfg.radius, nbh_dict));
            }
            std::vector<std::string> ids;
            for (const Sequence& s : seqs) ids.push_back(s.id);
            write_matrix_tsv(wpath("ebof.tsv"), assemble_matrix(ids, {face_seg, km_seg}));
            write_matrix_tsv(wpath("en.tsv"), assemble_matrix(ids, {nbh_seg}));
        });
    }

    FeatureMatrix X = read_matrix_tsv(wpath("ebof.tsv"));
    const int n = X.rows();
    Eigen::MatrixXd Xe(n, X.cols());
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < X.cols(); ++c) Xe(r, c) = X.at(r, c);

    // Desk-scale clamps: keep NMF rank, neighbor count, sweep bounds and
    // perplexity valid for small corpora.
    int topics = std::max(1, std::min(cfg.topics, std::min(n, X.cols())));
    int k_nb = std::max(1, std::min(cfg.k_neighbors, n - 1));
    int sweep_min = std::max(2, cfg.sweep_min);
    int sweep_max = std::min(cfg.sweep_max, n - 2);
    double perplexity = std::min(cfg.perplexity, (n - 1) / 3.0);

    // -- topics: NMF -------------------------------------------------------
    std::string h_topics;
    {
        std::string input = h_embed + "|" + cfg.analysis_config() + "|" + std::to_string(g.seed);
        h_topics = run_stage(
            manifest, "topics", input,
            {wpath("topics/doc_topic.tsv"), wpath("topics/topic_feature.tsv")}, [&] {
                TopicModel tm = nmf(Xe, topics, 500, 1e-9, derive_seed(g.seed, "nmf"));
                write_topics_tsv(wpath("topics"), tm, X.row_ids);
            });
    }

    TopicModel tm = nmf(Xe, topics, 500, 1e-9, derive_seed(g.seed, "nmf"));

    // -- cluster: spectral on the topic embedding --------------------------
    std::string h_cluster;
    {
        std::string input = h_topics + "|" + cfg.analysis_config() + "|" + std::to_string(g.seed);
        h_cluster = run_stage(manifest, "cluster", input, {wpath("clusters/clusters.tsv")}, [&] {
            int k = cfg.clusters > 0
                        ? std::min(cfg.clusters, n - 1)
                        : silhouette_sweep(tm.M, sweep_min, std::max(sweep_min, sweep_max),
                                           derive_seed(g.seed, "sweep"), k_nb);
            Eigen::MatrixXd A = knn_similarity(tm.M, k_nb);
            Clustering cl = spectral_clustering(A, k, derive_seed(g.seed, "cluster"));
            write_clusters_tsv(wpath("clusters/clusters.tsv"), X.row_ids, cl);
        });
    }

    Clustering clustering;
    {
        std::istringstream in(read_text_file(wpath("clusters/clusters.tsv")));
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            clustering.assignments.push_back(std::stoi(line.substr(line.find('\t') + 1)));
        }
        clustering.k = *std::max_element(clustering.assignments.begin(),
                                         clustering.assignments.end()) + 1;
    }

    auto profiles = load_profiles();
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = profiles[i].final_cpm_score;

    // -- attribute: ridge on the raw features ------------------------------
    AttributionModel am = ridge_fit(Xe, y, cfg.lambda);
    std::string h_attr;
    {
        std::string input = h_cluster + "|" + std::to_string(cfg.lambda);
        h_attr = run_stage(manifest, "attribute", input, {wpath("attribution.json")}, [&] {
            nlohmann::ordered_json j;
            j["lambda"] = am.lambda;
            nlohmann::ordered_json coef = nlohmann::ordered_json::object();
            for (int c = 0; c < am.w.size(); ++c) coef[X.column_keys[c]] = am.w(c);
            j["coefficients"] = std::move(coef);
            auto names = [&](const std::vector<int>& idx) {
                nlohmann::ordered_json a = nlohmann::ordered_json::array();
                for (int i : idx) a.push_back(X.column_keys[i]);
                return a;
            };
            j["top_negative"] = names(am.top_neg);
            j["top_positive"] = names(am.top_pos);
            write_text_file(wpath("attribution.json"), j.dump(2) + "\n");
        });
    }

    // -- anomalies + recommendations ---------------------------------------
    ClusterAnomalyReport report = cluster_delta(Xe, am, clustering, cfg.top_m);
    std::vector<const AptamerProfile*> prof_ptrs;
    for (const auto& p : profiles) prof_ptrs.push_back(&p);
    report.recommended = recommend(clustering, prof_ptrs);

    std::string h_anom;
    {
        std::string input = h_attr + "|" + std::to_string(cfg.top_m);
        h_anom = run_stage(manifest, "anomalies", input,
                           {wpath("anomalies.json"), wpath("recommendations.json")}, [&] {
                               write_anomalies_json(wpath("anomalies.json"), report, clustering,
                                                    X.row_ids);
                               nlohmann::ordered_json j = nlohmann::ordered_json::object();
                               for (const auto& [c, rec] : report.recommended) {
                                   j[std::to_string(c)] = {
                                       {"by_count", X.row_ids[rec.first]},
                                       {"by_pressure", X.row_ids[rec.second]}};
                               }
                               write_text_file(wpath("recommendations.json"), j.dump(2) + "\n");
                           });
    }

    // -- tsne + figures ----------------------------------------------------
    std::string h_tsne;
    {
        std::string input = h_topics + "|" + std::to_string(perplexity) + "|" +
                            std::to_string(cfg.tsne_iters) + "|" + std::to_string(g.seed);
        h_tsne = run_stage(manifest, "tsne", input, {wpath("tsne.tsv")}, [&] {
            TsneResult ts = tsne(tm.M, perplexity, cfg.tsne_iters, derive_seed(g.seed, "tsne"));
            write_coords_tsv(wpath("tsne.tsv"), X.row_ids, ts.Y);
        });
    }

    {
        std::string input = h_tsne + "|" + h_anom + "|" + h_ingest;
        run_stage(manifest, "figures", input, {wpath("figures/tsne.svg")}, [&] {
            std::vector<std::string> ids;
            Eigen::MatrixXd Y = read_coords_tsv(wpath("tsne.tsv"), ids);
            std::map<int, ScatterMark> marks;
            for (int i = 0; i < n; ++i) {
                if (profiles[i].label == AnomalyLabel::HC_LP)
                    marks[i] = {ScatterMark::RED_CROSS};
                else if (profiles[i].label == AnomalyLabel::LC_HP)
                    marks[i] = {ScatterMark::GREEN_CROSS};
            }
            for (const auto& [c, rec] : report.recommended) {
                if (!marks.count(rec.first)) marks[rec.first] = {ScatterMark::BLUE_CROSS};
                if (!marks.count(rec.second)) marks[rec.second] = {ScatterMark::BLUE_CROSS};
            }
            write_text_file(wpath("figures/tsne.svg"),
                            render_scatter_svg(Y, clustering.assignments, marks,
                                               report.anomalous_clusters));
        });
    }

    std::cerr << "[pipeline] done\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Aptamer structure-ensemble fingerprinting and SELEX anomaly analysis"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--params", g.params_path, "Energy parameter TSV (default: built-in set)");
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--jobs", g.jobs, "Worker threads for the embedding stage")
        ->check(CLI::PositiveNumber);
    app.add_option("--workdir", g.workdir, "Artifact directory");

    // fold
    std::string seq_arg;
    auto* fold = app.add_subcommand("fold", "MFE structure of one sequence");
    fold->add_option("sequence", seq_arg)->required();

    // ensemble
    int ens_samples = 1000, ens_limit = kDefaultExhaustiveLimit;
    bool ens_exhaustive = false;
    auto* ensemble = app.add_subcommand("ensemble", "Boltzmann ensemble TSV to stdout");
    ensemble->add_option("sequence", seq_arg)->required();
    ensemble->add_option("--samples", ens_samples);
    ensemble->add_flag("--exhaustive", ens_exhaustive);
    ensemble->add_option("--limit", ens_limit);

    // pairs
    auto* pairs = app.add_subcommand("pairs", "Base-pair probability matrix TSV");
    pairs->add_option("sequence", seq_arg)->required();

    // motzkin
    std::string db_arg;
    auto* motzkin = app.add_subcommand("motzkin", "Motzkin path of a dot-bracket string");
    motzkin->add_option("structure", db_arg)->required();

    // fingerprint
    int fp_k = 4, fp_radius = 1, fp_samples = 1000, fp_limit = kDefaultExhaustiveLimit;
    std::string fp_kind = "face", fp_out;
    auto* fingerprint = app.add_subcommand("fingerprint", "Expected fingerprint JSON");
    fingerprint->add_option("sequence", seq_arg)->required();
    fingerprint->add_option("--kind", fp_kind)->check(CLI::IsMember({"face", "nbh", "kmer"}));
    fingerprint->add_option("--k", fp_k);
    fingerprint->add_option("--radius", fp_radius);
    fingerprint->add_option("--samples", fp_samples);
    fingerprint->add_option("--limit", fp_limit);
    fingerprint->add_option("--out", fp_out);

    // ingest
    std::string reads_path;
    double count_pct = 90.0, pressure_pct = 10.0;
    auto* ingest = app.add_subcommand("ingest", "SELEX reads to profiles.tsv");
    ingest->add_option("reads", reads_path)->required();
    ingest->add_option("--count-pct", count_pct);
    ingest->add_option("--pressure-pct", pressure_pct);

    // pipeline
    PipelineConfig cfg;
    auto* pipeline = app.add_subcommand("pipeline", "Full analysis pipeline into --workdir");
    pipeline->add_option("reads", cfg.reads_path)->required();
    pipeline->add_option("--k", cfg.kmer_k)->check(CLI::PositiveNumber);
    pipeline->add_option("--radius", cfg.radius)->check(CLI::NonNegativeNumber);
    pipeline->add_option("--samples", cfg.n_samples)->check(CLI::PositiveNumber);
    pipeline->add_option("--limit", cfg.exhaustive_limit);
    pipeline->add_option("--topics", cfg.topics)->check(CLI::PositiveNumber);
    pipeline->add_option("--clusters", cfg.clusters);
    pipeline->add_option("--sweep-min", cfg.sweep_min);
    pipeline->add_option("--sweep-max", cfg.sweep_max);
    pipeline->add_option("--neighbors", cfg.k_neighbors);
    pipeline->add_option("--lambda", cfg.lambda);
    pipeline->add_option("--top-m", cfg.top_m);
    pipeline->add_option("--count-pct", cfg.count_pct);
    pipeline->add_option("--pressure-pct", cfg.pressure_pct);
    pipeline->add_option("--perplexity", cfg.perplexity);
    pipeline->add_option("--tsne-iters", cfg.tsne_iters);

    // nmf / cluster / attribute / anomalies / recommend / tsne: file-level
    // wrappers over the library on an existing matrix
    std::string matrix_path, out_path;
    int op_topics = 25, op_clusters = 25, op_neighbors = 10, op_topm = 10;
    double op_lambda = 1.0, op_perplexity = 30.0;
    int op_iters = 500;
    std::string profiles_path, clusters_path, labels_path;

    auto* nmf_cmd = app.add_subcommand("nmf", "NMF of a feature matrix into topics/");
    nmf_cmd->add_option("matrix", matrix_path)->required();
    nmf_cmd->add_option("--topics", op_topics);

    auto* cluster_cmd = app.add_subcommand("cluster", "Spectral clustering of a matrix");
    cluster_cmd->add_option("matrix", matrix_path)->required();
    cluster_cmd->add_option("--clusters", op_clusters);
    cluster_cmd->add_option("--neighbors", op_neighbors);
    cluster_cmd->add_option("--out", out_path);

    auto* attribute_cmd = app.add_subcommand("attribute", "Ridge attribution of scores");
    attribute_cmd->add_option("matrix", matrix_path)->required();
    attribute_cmd->add_option("profiles", profiles_path)->required();
    attribute_cmd->add_option("--lambda", op_lambda);
    attribute_cmd->add_option("--out", out_path);

    auto* anomalies_cmd = app.add_subcommand("anomalies", "Cluster anomaly report");
    anomalies_cmd->add_option("matrix", matrix_path)->required();
    anomalies_cmd->add_option("profiles", profiles_path)->required();
    anomalies_cmd->add_option("clusters", clusters_path)->required();
    anomalies_cmd->add_option("--lambda", op_lambda);
    anomalies_cmd->add_option("--top-m", op_topm);
    anomalies_cmd->add_option("--out", out_path);

    auto* recommend_cmd = app.add_subcommand("recommend", "Per-cluster recommendations");
    recommend_cmd->add_option("profiles", profiles_path)->required();
    recommend_cmd->add_option("clusters", clusters_path)->required();
    recommend_cmd->add_option("--out", out_path);

    auto* tsne_cmd = app.add_subcommand("tsne", "2-D t-SNE of a matrix");
    tsne_cmd->add_option("matrix", matrix_path)->required();
    tsne_cmd->add_option("--perplexity", op_perplexity);
    tsne_cmd->add_option("--iters", op_iters);
    tsne_cmd->add_option("--out", out_path);

    auto* plot_cmd = app.add_subcommand("plot", "SVG scatter of 2-D coordinates");
    plot_cmd->add_option("coords", matrix_path)->required();
    plot_cmd->add_option("--clusters", clusters_path);
    plot_cmd->add_option("--labels", labels_path);
    plot_cmd->add_option("--out", out_path);

    CLI11_PARSE(app, argc, argv);

    try {
        EnergyParameters params = resolve_params(g);
        params.validate();
        Thermo thermo;

        if (fold->parsed()) {
            auto [s, e] = fold_mfe(make_seq(seq_arg), params);
            std::cout << s.dot_bracket() << "  " << fmt_energy(e) << "\n";
            return 0;
        }
        if (ensemble->parsed()) {
            Sequence s = make_seq(seq_arg);
            EnsembleDistribution ens =
                ens_exhaustive
                    ? exhaustive_ensemble(s, params, thermo, ens_limit)
                    : boltzmann_ensemble(s, params, thermo, ens_samples,
                                         derive_seed(g.seed, "ensemble"), ens_limit);
            std::cout << "structure\tenergy\tprobability\n";
            for (const EnsembleEntry& e : ens.entries)
                std::cout << e.structure.dot_bracket() << '\t' << format_double(e.energy)
                          << '\t' << format_double(e.probability) << '\n';
            return 0;
        }
        if (pairs->parsed()) {
            Sequence s = make_seq(seq_arg);
            PairProbabilityMatrix m = base_pair_probabilities(s, params, thermo);
            std::cout << "i\tj\tp\n";
            for (int i = 0; i < m.n; ++i)
                for (int j = i + 1; j < m.n; ++j)
                    if (m.pair(i, j) > 0)
                        std::cout << i + 1 << '\t' << j + 1 << '\t'
                                  << format_double(m.pair(i, j)) << '\n';
            std::cout << "# unpaired";
            for (int i = 0; i < m.n; ++i) std::cout << '\t' << format_double(m.p_unpaired[i]);
            std::cout << '\n';
            return 0;
        }
        if (motzkin->parsed()) {
            MotzkinVector v = motzkin_path(SecondaryStructure::from_dot_bracket(db_arg));
            for (std::size_t i = 0; i < v.y_values.size(); ++i)
                std::cout << (i ? "\t" : "") << v.y_values[i];
            std::cout << '\n';
            return 0;
        }
        if (fingerprint->parsed()) {
            Sequence s = make_seq(seq_arg);
            EnsembleDistribution ens = boltzmann_ensemble(
                s, params, thermo, fp_samples, derive_seed(g.seed, "ensemble"), fp_limit);
            std::vector<std::pair<Sequence, const EnsembleDistribution*>> corpus{{s, &ens}};
            Fingerprint fp;
            FeatureDictionary dict;
            std::string segment;
            if (fp_kind == "face") {
                dict = build_dictionary(corpus, FeatureKind::FACE, params, 0);
                fp = expected_bag_of_faces(s, ens, params, dict);
                segment = "FACE";
            } else if (fp_kind == "nbh") {
                dict = build_dictionary(corpus, FeatureKind::NEIGHBORHOOD, params, fp_radius);
                fp = expected_bag_of_neighborhoods(s, ens, fp_radius, dict);
                segment = "NBH";
            } else {
                dict = kmer_dictionary(fp_k);
                fp = kmer_counts(s, fp_k, dict);
                segment = "KMER";
            }
            std::string out = fp_out.empty() ? "/dev/stdout" : fp_out;
            write_fingerprint_json(out, s.id, segment, fp);
            return 0;
        }
        if (ingest->parsed()) {
            auto records = filter_mutations(parse_reads(reads_path));
            auto profiles = build_profiles(records);
            label_anomalies(profiles, count_pct, pressure_pct);
            std::vector<std::string> ids;
            for (std::size_t i = 0; i < profiles.size(); ++i)
                ids.push_back("apt" + std::to_string(i));
            fs::create_directories(g.workdir);
            write_profiles_tsv((fs::path(g.workdir) / "profiles.tsv").string(), ids, profiles);
            return 0;
        }
        if (pipeline->parsed()) {
            if (!fs::exists(cfg.reads_path)) {
                std::cerr << "reads file not found: " << cfg.reads_path << "\n";
                return 2;
            }
            return cmd_pipeline(g, cfg);
        }

        auto load_matrix = [&] {
            FeatureMatrix m = read_matrix_tsv(matrix_path);
            Eigen::MatrixXd X(m.rows(), m.cols());
            for (int r = 0; r < m.rows(); ++r)
                for (int c = 0; c < m.cols(); ++c) X(r, c) = m.at(r, c);
            return std::pair{std::move(m), std::move(X)};
        };
        auto load_cluster_file = [](const std::string& path) {
            Clustering cl;
            std::istringstream in(read_text_file(path));
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                cl.assignments.push_back(std::stoi(line.substr(line.find('\t') + 1)));
            }
            cl.k = cl.assignments.empty()
                       ? 0
                       : *std::max_element(cl.assignments.begin(), cl.assignments.end()) + 1;
            return cl;
        };
        auto load_profile_file = [](const std::string& path) {
            std::vector<AptamerProfile> profiles;
            std::istringstream in(read_text_file(path));
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                std::vector<std::string> f;
                std::size_t start = 0;
                while (true) {
                    std::size_t tab = line.find('\t', start);
                    f.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
                    if (tab == std::string::npos) break;
                    start = tab + 1;
                }
                if (f.size() != 5) throw ValidationError("bad profiles file: " + path);
                AptamerProfile p;
                p.sequence = f[1];
                p.final_cpm_score = std::stod(f[2]);
                p.total_pressure = std::stod(f[3]);
                p.label = f[4] == std::string("HC_LP")   ? AnomalyLabel::HC_LP
                          : f[4] == std::string("LC_HP") ? AnomalyLabel::LC_HP
                                                         : AnomalyLabel::NONE;
                profiles.push_back(std::move(p));
            }
            return profiles;
        };

        if (nmf_cmd->parsed()) {
            auto [m, X] = load_matrix();
            int t = std::max(1, std::min(op_topics, static_cast<int>(std::min(X.rows(), X.cols()))));
            TopicModel tm = nmf(X, t, 500, 1e-9, derive_seed(g.seed, "nmf"));
            fs::create_directories(fs::path(g.workdir) / "topics");
            write_topics_tsv((fs::path(g.workdir) / "topics").string(), tm, m.row_ids);
            return 0;
        }
        if (cluster_cmd->parsed()) {
            auto [m, X] = load_matrix();
            Eigen::MatrixXd A =
                knn_similarity(X, std::min<int>(op_neighbors, X.rows() - 1));
            Clustering cl = spectral_clustering(A, std::min<int>(op_clusters, X.rows() - 1),
                                                derive_seed(g.seed, "cluster"));
            write_clusters_tsv(out_path.empty() ? "/dev/stdout" : out_path, m.row_ids, cl);
            return 0;
        }
        if (attribute_cmd->parsed()) {
            auto [m, X] = load_matrix();
            auto profiles = load_profile_file(profiles_path);
            if (static_cast<long>(profiles.size()) != X.rows())
                throw ValidationError("matrix rows != profile count");
            Eigen::VectorXd y(X.rows());
            for (long i = 0; i < X.rows(); ++i) y(i) = profiles[i].final_cpm_score;
            AttributionModel am = ridge_fit(X, y, op_lambda);
            nlohmann::ordered_json j;
            j["lambda"] = am.lambda;
            nlohmann::ordered_json coef = nlohmann::ordered_json::object();
            for (int c = 0; c < am.w.size(); ++c) coef[m.column_keys[c]] = am.w(c);
            j["coefficients"] = std::move(coef);
            write_text_file(out_path.empty() ? "/dev/stdout" : out_path, j.dump(2) + "\n");
            return 0;
        }
        if (anomalies_cmd->parsed()) {
            auto [m, X] = load_matrix();
            auto profiles = load_profile_file(profiles_path);
            Clustering cl = load_cluster_file(clusters_path);
            Eigen::VectorXd y(X.rows());
            for (long i = 0; i < X.rows(); ++i) y(i) = profiles[i].final_cpm_score;
            AttributionModel am = ridge_fit(X, y, op_lambda);
            ClusterAnomalyReport report = cluster_delta(X, am, cl, op_topm);
            std::vector<const AptamerProfile*> ptrs;
            for (const auto& p : profiles) ptrs.push_back(&p);
            report.recommended = recommend(cl, ptrs);
            write_anomalies_json(out_path.empty() ? "/dev/stdout" : out_path, report, cl,
                                 m.row_ids);
            return 0;
        }
        if (recommend_cmd->parsed()) {
            auto profiles = load_profile_file(profiles_path);
            Clustering cl = load_cluster_file(clusters_path);
            std::vector<const AptamerProfile*> ptrs;
            for (const auto& p : profiles) ptrs.push_back(&p);
            auto rec = recommend(cl, ptrs);
            nlohmann::ordered_json j = nlohmann::ordered_json::object();
            for (const auto& [c, r] : rec)
                j[std::to_string(c)] = {{"by_count", r.first}, {"by_pressure", r.second}};
            write_text_file(out_path.empty() ? "/dev/stdout" : out_path, j.dump(2) + "\n");
            return 0;
        }
        if (tsne_cmd->parsed()) {
            auto [m, X] = load_matrix();
            double perp = std::min(op_perplexity, (X.rows() - 1) / 3.0);
            TsneResult ts = tsne(X, perp, op_iters, derive_seed(g.seed, "tsne"));
            write_coords_tsv(out_path.empty() ? "/dev/stdout" : out_path, m.row_ids, ts.Y);
            return 0;
        }
        if (plot_cmd->parsed()) {
            std::vector<std::string> ids;
            Eigen::MatrixXd Y = read_coords_tsv(matrix_path, ids);
            std::vector<int> assign;
            if (!clusters_path.empty()) {
                Clustering cl = load_cluster_file(clusters_path);
                assign = cl.assignments;
            }
            std::map<int, ScatterMark> marks;
            if (!labels_path.empty() && fs::exists(labels_path)) {
                auto profiles = load_profile_file(labels_path);
                for (std::size_t i = 0; i < profiles.size() && i < ids.size(); ++i) {
                    if (profiles[i].label == AnomalyLabel::HC_LP)
                        marks[static_cast<int>(i)] = {ScatterMark::RED_CROSS};
                    else if (profiles[i].label == AnomalyLabel::LC_HP)
                        marks[static_cast<int>(i)] = {ScatterMark::GREEN_CROSS};
                }
            }
            write_text_file(out_path.empty() ? "/dev/stdout" : out_path,
                            render_scatter_svg(Y, assign, marks, {}));
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
