#include "boltzfold/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "boltzfold/errors.hpp"

namespace boltzfold {

std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw ValidationError("number formatting failed");
    return std::string(buf, end);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << content;
    if (!out) throw ValidationError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        f.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    return f;
}

}  // namespace

void write_matrix_tsv(const std::string& path, const FeatureMatrix& m) {
    std::ostringstream out;
    out << "id";
    for (const std::string& key : m.column_keys) out << '\t' << key;
    out << '\n';
    for (int r = 0; r < m.rows(); ++r) {
        out << m.row_ids[r];
        for (int c = 0; c < m.cols(); ++c) out << '\t' << format_double(m.at(r, c));
        out << '\n';
    }
    write_text_file(path, out.str());
}

FeatureMatrix read_matrix_tsv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty matrix file", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_tabs(line);
    if (header.empty() || header[0] != "id") throw ParseError("matrix header must start with 'id'", 1);

    FeatureMatrix m;
    m.column_keys.assign(header.begin() + 1, header.end());
    // Recover the named segments from the key prefixes.
    for (int c = 0; c < m.cols(); ++c) {
        std::size_t colon = m.column_keys[c].find(':');
        std::string name = colon == std::string::npos ? "" : m.column_keys[c].substr(0, colon);
        if (m.segments.empty() || m.segments.back().name != name)
            m.segments.push_back({name, c, c + 1});
        else
            m.segments.back().end = c + 1;
    }

    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f = split_tabs(line);
        if (static_cast<int>(f.size()) != m.cols() + 1)
            throw ParseError("row width mismatch", lineno);
        m.row_ids.push_back(f[0]);
        for (int c = 0; c < m.cols(); ++c) {
            try {
                m.data.push_back(std::stod(f[c + 1]));
            } catch (const std::exception&) {
                throw ParseError("bad number '" + f[c + 1] + "'", lineno);
            }
        }
    }
    return m;
}

void write_fingerprint_json(const std::string& path, const std::string& id,
                            const std::string& segment, const Fingerprint& fp) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["segment"] = segment;
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    if (!fp.dictionary) throw ValidationError("fingerprint has no dictionary");
    for (const auto& [col, v] : fp.values) values[fp.dictionary->entries[col]] = v;
    j["values"] = std::move(values);
    j["dropped_features"] = fp.dropped_features;
    write_text_file(path, j.dump(2) + "\n");
}

void write_profiles_tsv(const std::string& path, const std::vector<std::string>& ids,
                        const std::vector<AptamerProfile>& profiles) {
    if (ids.size() != profiles.size()) throw ValidationError("id/profile count mismatch");
    std::ostringstream out;
    out << "id\tsequence\tfinal_cpm_score\ttotal_pressure\tlabel\n";
    for (std::size_t i = 0; i < profiles.size(); ++i)
        out << ids[i] << '\t' << profiles[i].sequence << '\t'
            << format_double(profiles[i].final_cpm_score) << '\t'
            << format_double(profiles[i].total_pressure) << '\t'
            << anomaly_label_name(profiles[i].label) << '\n';
    write_text_file(path, out.str());
}

void write_clusters_tsv(const std::string& path, const std::vector<std::string>& ids,
                        const Clustering& clustering) {
    if (ids.size() != clustering.assignments.size())
        throw ValidationError("id/assignment count mismatch");
    std::ostringstream out;
    out << "id\tcluster\n";
    for (std::size_t i = 0; i < ids.size(); ++i)
        out << ids[i] << '\t' << clustering.assignments[i] << '\n';
    write_text_file(path, out.str());
}

void write_topics_tsv(const std::string& dir, const TopicModel& model,
                      const std::vector<std::string>& row_ids) {
    {
        std::ostringstream out;
        out << "id";
        for (int t = 0; t < model.topics; ++t) out << "\ttopic" << t;
        out << '\n';
        for (int r = 0; r < model.M.rows(); ++r) {
            out << row_ids[r];
            for (int t = 0; t < model.topics; ++t) out << '\t' << format_double(model.M(r, t));
            out << '\n';
        }
        write_text_file(dir + "/doc_topic.tsv", out.str());
    }
    {
        std::ostringstream out;
        out << "topic";
        for (int c = 0; c < model.H.cols(); ++c) out << "\tf" << c;
        out << '\n';
        for (int t = 0; t < model.topics; ++t) {
            out << "topic" << t;
            for (int c = 0; c < model.H.cols(); ++c) out << '\t' << format_double(model.H(t, c));
            out << '\n';
        }
        write_text_file(dir + "/topic_feature.tsv", out.str());
    }
}

void write_coords_tsv(const std::string& path, const std::vector<std::string>& ids,
                      const Eigen::MatrixXd& Y) {
    if (static_cast<long>(ids.size()) != Y.rows())
        throw ValidationError("id/coordinate count mismatch");
    std::ostringstream out;
    out << "id\tx\ty\n";
    for (long r = 0; r < Y.rows(); ++r)
        out << ids[r] << '\t' << format_double(Y(r, 0)) << '\t' << format_double(Y(r, 1)) << '\n';
    write_text_file(path, out.str());
}

Eigen::MatrixXd read_coords_tsv(const std::string& path, std::vector<std::string>& ids) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty coordinates file", 1);
    std::vector<std::vector<double>> rows;
    ids.clear();
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f = split_tabs(line);
        if (f.size() != 3) throw ParseError("expected id, x, y", lineno);
        try {
            rows.push_back({std::stod(f[1]), std::stod(f[2])});
        } catch (const std::exception&) {
            throw ParseError("bad coordinate", lineno);
        }
        ids.push_back(f[0]);
    }
    Eigen::MatrixXd Y(rows.size(), 2);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        Y(r, 0) = rows[r][0];
        Y(r, 1) = rows[r][1];
    }
    return Y;
}

void write_anomalies_json(const std::string& path, const ClusterAnomalyReport& report,
                          const Clustering& clustering,
                          const std::vector<std::string>& ids) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [c, delta] : report.delta) {
        nlohmann::ordered_json entry;
        entry["delta"] = delta;
        nlohmann::ordered_json members = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < clustering.assignments.size(); ++i)
            if (clustering.assignments[i] == c) members.push_back(ids[i]);
        entry["members"] = std::move(members);
        entry["anomalous"] =
            std::find(report.anomalous_clusters.begin(), report.anomalous_clusters.end(), c) !=
            report.anomalous_clusters.end();
        auto rec = report.recommended.find(c);
        if (rec != report.recommended.end())
            entry["recommended"] = {ids[rec->second.first], ids[rec->second.second]};
        else
            entry["recommended"] = nlohmann::ordered_json::array();
        j[std::to_string(c)] = std::move(entry);
    }
    write_text_file(path, j.dump(2) + "\n");
}

namespace {

const char* kPalette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
                          "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd",
                          "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string render_scatter_svg(const Eigen::MatrixXd& Y, const std::vector<int>& clusters,
                               const std::map<int, ScatterMark>& marks,
                               const std::vector<int>& outlined_clusters) {
    if (Y.cols() != 2) throw ValidationError("scatter input must be N x 2");
    if (!clusters.empty() && static_cast<long>(clusters.size()) != Y.rows())
        throw ValidationError("cluster labels do not match point count");

    const double W = 640, H = 480, pad = 30;
    double xmin = Y.rows() ? Y.col(0).minCoeff() : 0, xmax = Y.rows() ? Y.col(0).maxCoeff() : 1;
    double ymin = Y.rows() ? Y.col(1).minCoeff() : 0, ymax = Y.rows() ? Y.col(1).maxCoeff() : 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto sx = [&](double x) { return pad + (x - xmin) / (xmax - xmin) * (W - 2 * pad); };
    auto sy = [&](double y) { return H - pad - (y - ymin) / (ymax - ymin) * (H - 2 * pad); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    std::set<int> outlined(outlined_clusters.begin(), outlined_clusters.end());
    for (long i = 0; i < Y.rows(); ++i) {
        double x = sx(Y(i, 0)), y = sy(Y(i, 1));
        int c = clusters.empty() ? 0 : clusters[i];
        const char* color = kPalette[((c % 20) + 20) % 20];
        const char* stroke = outlined.count(c) ? "black" : "none";
        out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"" << color
            << "\" stroke=\"" << stroke << "\" stroke-width=\"1.5\"/>\n";
        auto mk = marks.find(static_cast<int>(i));
        if (mk != marks.end()) {
            const char* mc = mk->second.kind == ScatterMark::RED_CROSS    ? "red"
                             : mk->second.kind == ScatterMark::GREEN_CROSS ? "green"
                                                                           : "blue";
            out << "<path d=\"M" << x - 6 << " " << y - 6 << " L" << x + 6 << " " << y + 6
                << " M" << x - 6 << " " << y + 6 << " L" << x + 6 << " " << y - 6
                << "\" stroke=\"" << mc << "\" stroke-width=\"2\"/>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace boltzfold
