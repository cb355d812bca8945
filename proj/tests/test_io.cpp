#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <string>

#include "boltzfold/errors.hpp"
#include "boltzfold/io.hpp"

using namespace boltzfold;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("bfio-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

}  // namespace

TEST_CASE("feature matrix TSV round trip") {
    TempDir tmp;
    FeatureMatrix m;
    m.row_ids = {"a", "b"};
    m.column_keys = {"FACE:STACK@-2.0", "FACE:HAIRPIN:3@+3.0", "KMER:AAAA"};
    m.segments = {{"FACE", 0, 2}, {"KMER", 2, 3}};
    m.data = {1.25, 0.0, 3.0, 0.5, 2.0, 0.0};

    write_matrix_tsv(tmp.file("m.tsv"), m);
    FeatureMatrix r = read_matrix_tsv(tmp.file("m.tsv"));
    CHECK(r.row_ids == m.row_ids);
    CHECK(r.column_keys == m.column_keys);
    REQUIRE(r.segments.size() == 2);
    CHECK(r.segments[0].name == "FACE");
    CHECK(r.segments[1].begin == 2);
    for (int i = 0; i < 2; ++i)
        for (int c = 0; c < 3; ++c) CHECK(r.at(i, c) == m.at(i, c));

    // identical content on rewrite
    write_matrix_tsv(tmp.file("m2.tsv"), r);
    CHECK(read_text_file(tmp.file("m.tsv")) == read_text_file(tmp.file("m2.tsv")));
}

TEST_CASE("coords TSV round trip") {
    TempDir tmp;
    Eigen::MatrixXd Y(2, 2);
    Y << 1.5, -2.25, 0.0, 3.0;
    write_coords_tsv(tmp.file("y.tsv"), {"p", "q"}, Y);
    std::vector<std::string> ids;
    Eigen::MatrixXd R = read_coords_tsv(tmp.file("y.tsv"), ids);
    CHECK(ids == std::vector<std::string>{"p", "q"});
    CHECK((R - Y).norm() == 0.0);
}

TEST_CASE("format_double is stable and round-trippable") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-0.0) == "0");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(std::stod(format_double(-12345.678901234567)) == -12345.678901234567);
}

TEST_CASE("scatter SVG draws one marker per point") {
    Eigen::MatrixXd Y(3, 2);
    Y << 0, 0, 1, 0, 0, 1;
    std::string svg = render_scatter_svg(Y, {0, 0, 1}, {}, {});
    std::size_t circles = 0, at = 0;
    while ((at = svg.find("<circle", at)) != std::string::npos) {
        ++circles;
        ++at;
    }
    CHECK(circles == 3);
    CHECK(svg.find("<svg") != std::string::npos);

    Eigen::MatrixXd bad(2, 3);
    CHECK_THROWS_AS(render_scatter_svg(bad, {}, {}, {}), ValidationError);
}
