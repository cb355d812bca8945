#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "boltzfold/analysis.hpp"
#include "boltzfold/energy_model.hpp"
#include "boltzfold/errors.hpp"
#include "boltzfold/fingerprint.hpp"
#include "boltzfold/folding.hpp"
#include "boltzfold/rng.hpp"
#include "boltzfold/selex.hpp"
#include "boltzfold/structure_graph.hpp"

namespace py = pybind11;
using namespace boltzfold;

namespace {

EnergyParameters params_from(const std::string& path) {
    return path.empty() ? toy_parameters() : load_parameters(path);
}

Sequence seq_of(const std::string& bases) {
    Sequence s{"seq", bases};
    s.validate();
    return s;
}

py::list ensemble_to_list(const EnsembleDistribution& ens) {
    py::list out;
    for (const EnsembleEntry& e : ens.entries)
        out.append(py::make_tuple(e.structure.dot_bracket(), e.energy, e.probability));
    return out;
}

py::dict fingerprint_to_dict(const Fingerprint& fp) {
    py::dict out;
    for (const auto& [col, v] : fp.values)
        out[py::str(fp.dictionary->entries[col])] = v;
    return out;
}

py::dict profile_to_dict(const AptamerProfile& p) {
    py::dict d;
    d["sequence"] = p.sequence;
    d["cpm_by_library"] = p.cpm_by_library;
    d["pressure_by_library"] = p.pressure_by_library;
    d["final_cpm_score"] = p.final_cpm_score;
    d["total_pressure"] = p.total_pressure;
    d["label"] = std::string(anomaly_label_name(p.label));
    return d;
}

}  // namespace

PYBIND11_MODULE(_boltzfold, m) {
    m.doc() = "DNA secondary-structure ensembles, motif fingerprints, and SELEX analysis";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.def(
        "fold_mfe",
        [](const std::string& bases, const std::string& params_path) {
            auto [s, e] = fold_mfe(seq_of(bases), params_from(params_path));
            return py::make_tuple(s.dot_bracket(), e);
        },
        py::arg("sequence"), py::arg("params_path") = "",
        "Minimum free-energy structure and its energy (kcal/mol).");

    m.def(
        "structure_energy",
        [](const std::string& bases, const std::string& db, const std::string& params_path) {
            EnergyParameters p = params_from(params_path);
            Sequence s = seq_of(bases);
            SecondaryStructure st = SecondaryStructure::from_dot_bracket(db);
            st.validate(s, p);
            return structure_energy(s, st, p);
        },
        py::arg("sequence"), py::arg("structure"), py::arg("params_path") = "");

    m.def(
        "partition_function",
        [](const std::string& bases, const std::string& params_path) {
            Thermo t;
            auto [z, g] = partition_function(seq_of(bases), params_from(params_path), t);
            return py::make_tuple(z, g);
        },
        py::arg("sequence"), py::arg("params_path") = "",
        "Partition function Z and ensemble free energy G.");

    m.def(
        "pair_probabilities",
        [](const std::string& bases, const std::string& params_path) {
            Thermo t;
            PairProbabilityMatrix m =
                base_pair_probabilities(seq_of(bases), params_from(params_path), t);
            py::dict pairs;
            for (int i = 0; i < m.n; ++i)
                for (int j = i + 1; j < m.n; ++j)
                    if (m.pair(i, j) > 0) pairs[py::make_tuple(i, j)] = m.pair(i, j);
            return py::make_tuple(m.p_unpaired, pairs);
        },
        py::arg("sequence"), py::arg("params_path") = "",
        "Per-position unpaired probabilities and the sparse pair matrix (0-based).");

    m.def(
        "ensemble",
        [](const std::string& bases, int n_samples, std::uint64_t seed, int limit,
           const std::string& params_path) {
            Thermo t;
            return ensemble_to_list(boltzmann_ensemble(seq_of(bases), params_from(params_path),
                                                       t, n_samples, seed, limit));
        },
        py::arg("sequence"), py::arg("n_samples") = 1000, py::arg("seed") = 0,
        py::arg("limit") = kDefaultExhaustiveLimit, py::arg("params_path") = "",
        "Boltzmann ensemble as (dot_bracket, energy, probability) tuples.");

    m.def(
        "motzkin_path",
        [](const std::string& db) {
            return motzkin_path(SecondaryStructure::from_dot_bracket(db)).y_values;
        },
        py::arg("structure"));

    m.def(
        "expected_bag_of_faces",
        [](const std::string& bases, int n_samples, std::uint64_t seed,
           const std::string& params_path) {
            Thermo t;
            EnergyParameters p = params_from(params_path);
            Sequence s = seq_of(bases);
            EnsembleDistribution ens = boltzmann_ensemble(s, p, t, n_samples, seed);
            FeatureDictionary dict = build_dictionary({{s, &ens}}, FeatureKind::FACE, p, 0);
            return fingerprint_to_dict(expected_bag_of_faces(s, ens, p, dict));
        },
        py::arg("sequence"), py::arg("n_samples") = 1000, py::arg("seed") = 0,
        py::arg("params_path") = "",
        "Ensemble-expected face fingerprint keyed by TYPE[:lengths]@energy.");

    m.def(
        "expected_bag_of_neighborhoods",
        [](const std::string& bases, int radius, int n_samples, std::uint64_t seed,
           const std::string& params_path) {
            Thermo t;
            EnergyParameters p = params_from(params_path);
            Sequence s = seq_of(bases);
            EnsembleDistribution ens = boltzmann_ensemble(s, p, t, n_samples, seed);
            FeatureDictionary dict =
                build_dictionary({{s, &ens}}, FeatureKind::NEIGHBORHOOD, p, radius);
            return fingerprint_to_dict(expected_bag_of_neighborhoods(s, ens, radius, dict));
        },
        py::arg("sequence"), py::arg("radius") = 1, py::arg("n_samples") = 1000,
        py::arg("seed") = 0, py::arg("params_path") = "");

    m.def(
        "kmer_counts",
        [](const std::string& bases, int k) {
            FeatureDictionary dict = kmer_dictionary(k);
            return fingerprint_to_dict(kmer_counts(seq_of(bases), k, dict));
        },
        py::arg("sequence"), py::arg("k") = 4);

    m.def(
        "selex_profiles",
        [](const std::string& reads_path, double count_pct, double pressure_pct) {
            auto profiles = build_profiles(filter_mutations(parse_reads(reads_path)));
            label_anomalies(profiles, count_pct, pressure_pct);
            py::list out;
            for (const auto& p : profiles) out.append(profile_to_dict(p));
            return out;
        },
        py::arg("reads_path"), py::arg("count_pct") = 90.0, py::arg("pressure_pct") = 10.0,
        "Filtered, scored, and labeled aptamer profiles from a reads TSV.");

    m.def(
        "nmf",
        [](const Eigen::MatrixXd& X, int topics, int max_iters, std::uint64_t seed) {
            TopicModel tm = nmf(X, topics, max_iters, 1e-9, seed);
            return py::make_tuple(tm.M, tm.H, tm.final_objective);
        },
        py::arg("X"), py::arg("topics"), py::arg("max_iters") = 500, py::arg("seed") = 0);

    m.def(
        "spectral_clustering",
        [](const Eigen::MatrixXd& X, int k_clusters, int k_neighbors, std::uint64_t seed) {
            Eigen::MatrixXd A = knn_similarity(X, k_neighbors);
            Clustering cl = spectral_clustering(A, k_clusters, seed);
            return py::make_tuple(cl.assignments, cl.silhouette);
        },
        py::arg("X"), py::arg("k_clusters"), py::arg("k_neighbors") = 10, py::arg("seed") = 0,
        "Cluster rows of X: kNN Gaussian similarity, then Laplacian embedding + k-means.");

    m.def(
        "tsne",
        [](const Eigen::MatrixXd& X, double perplexity, int iters, std::uint64_t seed) {
            TsneResult r = tsne(X, perplexity, iters, seed);
            return py::make_tuple(r.Y, r.final_kl);
        },
        py::arg("X"), py::arg("perplexity") = 30.0, py::arg("iters") = 1000,
        py::arg("seed") = 0);
}
