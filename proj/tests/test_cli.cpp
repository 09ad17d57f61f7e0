#include "seer/cli/config.hpp"
#include "seer/cli/csv.hpp"
#include "seer/cli/ingest.hpp"
#include "seer/cli/pipeline.hpp"
#include "seer/cli/report.hpp"
#include "seer/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace seer;
using namespace seer::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
    static int counter = 0;
    fs::path p = fs::temp_directory_path() /
                 ("seer_cli_" + std::to_string(::getpid()) + "_" + tag + "_" + std::to_string(counter++));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

RunConfig config_from(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

CsvTable csv_from(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

const char* kDivergenceCsv =
    "id,x1,x2,z,y1,y2,y3\n"
    "a,1,1,1,1,1.01,1.01\n"
    "b,1,-1,-1,1,-1.01,-1.01\n"
    "c,-1,1,-1,-1,-0.99,-0.99\n"
    "d,-1,-1,1,-1,0.99,0.99\n";

const char* kDivergenceIni =
    "[dataset]\npath = div.csv\n\n"
    "[model]\ndependent = Y\nalgorithm = seer_a3\ndependent_components = 1\noutput = out\n\n"
    "[group Y]\nvariables = y1, y2, y3\n\n"
    "[group X]\nvariables = x1, x2\n\n"
    "[group Z]\nvariables = z\n";

/// Loading of the single X component, by variable.
std::map<std::string, double> x_loadings(const fs::path& dir) {
    std::map<std::string, double> out;
    for (const auto& row : read_loadings((dir / "loadings.tsv").string()))
        if (row.group == "X") out[row.variable] = row.loading;
    return out;
}

/// Random dataset with three predictor groups and a two-variable dependent block.
std::string random_csv(std::uint64_t seed, int n) {
    testing::Gen g(seed);
    std::ostringstream os;
    os.precision(17);
    os << "name,w,a1,a2,a3,b1,b2,c1,c2,c3,y1,y2\n";
    for (int i = 0; i < n; ++i) {
        const double f = g.normal(), h = g.normal();
        os << "obs" << i << ',' << g.uniform(0.5, 1.5);
        for (int j = 0; j < 3; ++j) os << ',' << f + 0.5 * g.normal();
        for (int j = 0; j < 2; ++j) os << ',' << h + 0.5 * g.normal();
        for (int j = 0; j < 3; ++j) os << ',' << g.normal();
        os << ',' << f + h + 0.3 * g.normal() << ',' << f - 0.5 * h + 0.3 * g.normal() << '\n';
    }
    return os.str();
}

const char* kRandomIni =
    "[dataset]\npath = data.csv\nweights = w\n\n"
    "[model]\ndependent = Y\nalgorithm = seer_a3\ndependent_components = 2\n\n"
    "[options]\ncomponent_tol = 1e-10\n\n"
    "[group Y]\nvariables = y1, y2\n\n"
    "[group A]\nvariables = a1, a2, a3\ncomponents = 2\nmin_components = 1\n\n"
    "[group B]\nvariables = b1, b2\nmetric = inverse_gram\n\n"
    "[group C]\nvariables = c1, c2, c3\nmetric = block_inverse\nblocks = c1, c2 | c3\ncomponents = 2\n";

} // namespace

TEST_CASE("csv: quoting, escapes, line ends and byte-order mark") {
    const auto t = csv_from("\xEF\xBB\xBF" "name, v\r\n\"a, \"\"b\"\"\",1.5\r\n\"multi\nline\", -2e3\n");
    REQUIRE(t.header.size() == 2);
    CHECK(t.header[0] == "name");
    CHECK(t.header[1] == "v");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][0] == "a, \"b\"");
    CHECK(t.rows[1][0] == "multi\nline");
    double v = 0;
    CHECK(parse_number(t.rows[1][1], v));
    CHECK(v == -2000.0);
    CHECK(t.column("v") == 1);
    CHECK(t.column("missing") == -1);
}

TEST_CASE("csv: malformed inputs") {
    CHECK_THROWS_AS(csv_from("a,b\n1,2,3\n"), ConfigError);
    CHECK_THROWS_AS(csv_from("a,b\n\"1,2\n"), ConfigError);
    CHECK_THROWS_AS(csv_from(""), ConfigError);
    const auto t = csv_from("a,b\n1,2");  // no trailing newline
    CHECK(t.rows.size() == 1);
}

TEST_CASE("csv: number parsing is whole-cell and finite") {
    double v = 0;
    CHECK(parse_number(" +3.25 ", v));
    CHECK(v == 3.25);
    CHECK_FALSE(parse_number("", v));
    CHECK_FALSE(parse_number("3.2x", v));
    CHECK_FALSE(parse_number("1,5", v));
    CHECK_FALSE(parse_number("nan", v));
    CHECK_FALSE(parse_number("inf", v));
}

TEST_CASE("config: sections, group order and defaults") {
    const auto cfg = config_from(kRandomIni);
    CHECK(cfg.dataset_path == "data.csv");
    CHECK(cfg.weights_column == "w");
    CHECK(cfg.dependent.name == "Y");
    REQUIRE(cfg.predictors.size() == 3);
    CHECK(cfg.predictors[0].name == "A");
    CHECK(cfg.predictors[1].name == "B");
    CHECK(cfg.predictors[2].name == "C");
    CHECK(cfg.predictors[0].components == 2);
    CHECK(cfg.predictors[0].min_components == 1);
    CHECK(cfg.predictors[1].metric == MetricKind::inverse_gram);
    CHECK(cfg.predictors[2].metric == MetricKind::block_inverse);
    REQUIRE(cfg.predictors[2].blocks.size() == 2);
    CHECK(cfg.predictors[2].blocks[1] == std::vector<std::string>{"c3"});
    CHECK(cfg.dependent_components == 2);
    CHECK(cfg.options.component_tol == doctest::Approx(1e-10));
    CHECK(cfg.algorithm == Algorithm::seer_a3);
    CHECK_FALSE(cfg.seed.has_value());
}

TEST_CASE("config: inline comments") {
    const auto cfg = config_from("[dataset]\npath = d.csv   ; relative\n[model]\ndependent = Y # the outcome\n"
                                 "algorithm = select ; backward\n[group Y]\nvariables = y\n"
                                 "[group X]\nvariables = a, b ; two\nmetric = inverse_gram ; whitened\n");
    CHECK(cfg.dataset_path == "d.csv");
    CHECK(cfg.algorithm == Algorithm::select);
    CHECK(cfg.predictors[0].variables == std::vector<std::string>{"a", "b"});
    CHECK(cfg.predictors[0].metric == MetricKind::inverse_gram);
}

TEST_CASE("config: rejects bad input") {
    const std::string base = "[dataset]\npath = d.csv\n[model]\ndependent = Y\n[group Y]\nvariables = y\n";
    CHECK_THROWS_AS(config_from(base), ConfigError);  // no predictor group
    CHECK_NOTHROW(config_from(base + "[group X]\nvariables = x\n"));
    CHECK_THROWS_AS(config_from(base + "[group X]\nvariables = x\ncolour = red\n"), ConfigError);
    CHECK_THROWS_AS(config_from(base + "[group X]\nvariables = x, y\n"), ConfigError);  // y twice
    CHECK_THROWS_AS(config_from(base + "[group X]\nvariables = x\nmetric = fancy\n"), ConfigError);
    CHECK_THROWS_AS(config_from(base + "[group X]\nvariables = x\nmetric = block_inverse\n"), ConfigError);
    CHECK_THROWS_AS(config_from(base + "[group X]\nvariables = x\ncomponents = -1\n"), ConfigError);
    CHECK_THROWS_AS(config_from(base + "[group X]\nvariables = x\n[extra]\nk = v\n"), ConfigError);
    CHECK_THROWS_AS(config_from("[model]\ndependent = Y\n[group Y]\nvariables = y\n[group X]\nvariables = x\n"),
                    ConfigError);
    CHECK_THROWS_AS(config_from("[dataset]\npath = d.csv\n[model]\ndependent = Q\n[group X]\nvariables = x\n"),
                    ConfigError);
    CHECK_THROWS_AS(config_from(base + "[group X]\nvariables = x\n[options]\nmax_outer = many\n"), ConfigError);
    CHECK_THROWS_AS(config_from(base + "[group X]\nvariables = x\n[group X]\nvariables = q\n"), ConfigError);
    CHECK_THROWS_AS(algorithm_from_string("pca"), ConfigError);
}

TEST_CASE("ingest: identifiers, weights and standardization") {
    const auto cfg = config_from(kRandomIni);
    const auto table = csv_from(random_csv(3, 30));
    const auto pm = prepare_model(cfg, table);
    CHECK(pm.ids.front() == "obs0");
    CHECK(pm.ids.back() == "obs29");
    REQUIRE(pm.model.predictors.size() == 3);
    const Weights& w = pm.model.weights;
    CHECK(w.p().sum() == doctest::Approx(1.0));
    for (const auto& b : pm.model.predictors) {
        for (Index j = 0; j < b.x.cols(); ++j) {
            CHECK(std::abs(w.means(b.x)(j)) < 1e-12);
            CHECK(w.norm2(b.x.col(j)) == doctest::Approx(1.0));
        }
    }
    CHECK(pm.model.predictors[2].metric.kind() == MetricKind::block_inverse);
    CHECK(pm.model.predictors[2].metric.matrix()(0, 2) == 0.0);
    CHECK(pm.min_counts == std::vector<Index>{1, 0, 0});

    // A numeric first column is data, not an identifier.
    const auto plain = csv_from("x,y\n1,2\n2,1\n3,5\n");
    const auto cfg2 = config_from("[dataset]\npath=d\n[model]\ndependent=Y\n[group Y]\nvariables=y\n"
                                  "[group X]\nvariables=x\n");
    const auto pm2 = prepare_model(cfg2, plain);
    CHECK(pm2.ids == std::vector<std::string>{"1", "2", "3"});
}

TEST_CASE("ingest: diagnostics") {
    const auto cfg = config_from("[dataset]\npath=d\nweights=w\n[model]\ndependent=Y\n[group Y]\nvariables=y\n"
                                 "[group X]\nvariables=x\n");
    CHECK_THROWS_AS(prepare_model(cfg, csv_from("x,w\n1,1\n2,1\n")), MissingVariable);
    CHECK_THROWS_AS(prepare_model(cfg, csv_from("id,x,w\na,1,1\nb,2,1\n")), MissingVariable);
    try {
        prepare_model(cfg, csv_from("x,y,w\n1,2,1\n2,oops,1\n3,3,1\n"));
        FAIL("expected NonNumericCell");
    } catch (const NonNumericCell& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("'y'") != std::string::npos);
    }
    CHECK_THROWS_AS(prepare_model(cfg, csv_from("x,y,w\n1,2,1\n2,1,0\n3,3,1\n")), InvalidWeights);
    CHECK_THROWS_AS(prepare_model(cfg, csv_from("x,y,w\n1,2,1\n2,1,-1\n3,3,1\n")), InvalidWeights);
    CHECK_THROWS_AS(prepare_model(cfg, csv_from("x,y,w\n1,2,1\n1,1,1\n1,3,1\n")), ConstantColumn);
}

TEST_CASE("cli: divergence dataset separates seer_a3 from seer_b2") {
    const fs::path dir = scratch_dir("divergence");
    write_text(dir / "div.csv", kDivergenceCsv);
    write_text(dir / "div.ini", kDivergenceIni);

    RunRequest req;
    req.config_path = (dir / "div.ini").string();
    req.out_dir = (dir / "a3").string();
    execute(req);
    auto la = x_loadings(dir / "a3");
    CHECK(std::abs(la["x1"]) == doctest::Approx(1.0));
    CHECK(std::abs(la["x2"]) < 1e-8);

    req.algorithm = Algorithm::seer_b2;
    req.out_dir = (dir / "b2").string();
    execute(req);
    auto lb = x_loadings(dir / "b2");
    CHECK(std::abs(lb["x2"]) == doctest::Approx(1.0));
    CHECK(std::abs(lb["x1"]) < 1e-8);
    fs::remove_all(dir);
}

TEST_CASE("cli: output directory precedence") {
    const fs::path dir = scratch_dir("outdir");
    write_text(dir / "div.csv", kDivergenceCsv);
    write_text(dir / "div.ini", kDivergenceIni);
    RunRequest req;
    req.config_path = (dir / "div.ini").string();

    ::unsetenv("SEER_OUT_DIR");
    CHECK(fs::path(execute(req).output_dir) == dir / "out");
    CHECK(fs::exists(dir / "out" / "summary.tsv"));

    ::setenv("SEER_OUT_DIR", (dir / "env").c_str(), 1);
    CHECK(fs::path(execute(req).output_dir) == dir / "env");
    req.out_dir = (dir / "flag").string();
    CHECK(fs::path(execute(req).output_dir) == dir / "flag");
    ::unsetenv("SEER_OUT_DIR");
    CHECK(fs::exists(dir / "env" / "components.tsv"));
    CHECK(fs::exists(dir / "flag" / "components.tsv"));
    fs::remove_all(dir);
}

TEST_CASE("cli: machine files reload to the fitted values") {
    const fs::path dir = scratch_dir("reload");
    write_text(dir / "data.csv", random_csv(11, 40));
    write_text(dir / "model.ini", kRandomIni);
    RunRequest req;
    req.config_path = (dir / "model.ini").string();
    req.out_dir = (dir / "out").string();
    const auto outcome = execute(req);
    const auto& mc = outcome.fit.components;

    const auto scores = read_scores((dir / "out" / "scores.tsv").string());
    CHECK(scores.ids == outcome.prepared.ids);
    const MatrixXd f = mc.predictor_scores();
    REQUIRE(scores.values.cols() == f.cols() + static_cast<Index>(mc.dependent.size()));
    CHECK(scores.columns.front() == "A^1");
    CHECK((scores.values.leftCols(f.cols()) - f).cwiseAbs().maxCoeff() < 1e-12);
    for (std::size_t l = 0; l < mc.dependent.size(); ++l)
        CHECK((scores.values.col(f.cols() + static_cast<Index>(l)) - mc.dependent[l].score).cwiseAbs().maxCoeff() <
              1e-12);

    const auto loadings = read_loadings((dir / "out" / "loadings.tsv").string());
    std::size_t at = 0;
    for (std::size_t r = 0; r < mc.groups.size(); ++r)
        for (const auto& c : mc.groups[r])
            for (Index j = 0; j < c.loading.size(); ++j, ++at) {
                REQUIRE(at < loadings.size());
                CHECK(loadings[at].group == mc.group_names[r]);
                CHECK(loadings[at].rank == c.rank);
                CHECK(std::abs(loadings[at].loading - c.loading(j)) < 1e-12);
            }

    const auto summary = read_summary((dir / "out" / "summary.tsv").string());
    CHECK(summary.at("algorithm") == "seer_a3");
    CHECK(std::abs(std::stod(summary.at("criterion")) - mc.criterion) <= 1e-12 * std::max(1.0, mc.criterion));
    CHECK(summary.at("group") == "A:2,B:1,C:2");
    fs::remove_all(dir);
}

TEST_CASE("cli: human tables") {
    const fs::path dir = scratch_dir("tables");
    write_text(dir / "data.csv", random_csv(5, 40));
    write_text(dir / "model.ini", kRandomIni);
    RunRequest req;
    req.config_path = (dir / "model.ini").string();
    req.out_dir = (dir / "out").string();
    req.outputs.planes = {parse_plane("A:1,2"), parse_plane("Y:1,2")};
    const auto outcome = execute(req);

    std::istringstream r2(slurp(dir / "out" / "r2_table.tsv"));
    std::string line;
    std::getline(r2, line);
    CHECK(line == "response\tR2\tA^1\tA^2\tB^1\tC^1\tC^2");
    std::getline(r2, line);
    CHECK(line.rfind("Y^1\t", 0) == 0);
    int rows = 1;
    while (std::getline(r2, line)) ++rows;
    CHECK(rows == 4);  // Y^1, Y^2, y1, y2

    std::istringstream comp(slurp(dir / "out" / "components.tsv"));
    std::getline(comp, line);
    CHECK(line == "group\trank\tvalue\tvariable\tloading\tcorrelation");
    std::getline(comp, line);
    CHECK(line.rfind("A\t1\t", 0) == 0);

    const std::string plane = slurp(dir / "out" / "plane_A_1_2.tsv");
    CHECK(plane.rfind("kind\tgroup\tname\tA^1\tA^2\n", 0) == 0);
    CHECK(plane.find("variable\tA\ta3\t") != std::string::npos);
    CHECK(plane.find("variable\tB\t") == std::string::npos);
    CHECK(plane.find("observation\t-\tobs39\t") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "plane_Y_1_2.tsv"));

    std::ostringstream by_index;
    write_plane(by_index, outcome.prepared, outcome.fit, parse_plane("1:1,2"), false);
    CHECK(by_index.str() == plane);

    std::ostringstream all;
    write_plane(all, outcome.prepared, outcome.fit, parse_plane("C:1,2"), true);
    CHECK(all.str().find("variable\tB\tb2\t") != std::string::npos);
    CHECK(all.str().find("variable\tY\ty1\t") != std::string::npos);

    req.out_dir = (dir / "bad").string();
    req.outputs.planes = {parse_plane("B:1,2")};
    CHECK_THROWS_AS(execute(req), UnknownComponent);
    CHECK_FALSE(fs::exists(dir / "bad"));
    req.outputs.planes = {parse_plane("Nope:1,2")};
    CHECK_THROWS_AS(execute(req), UnknownComponent);
    CHECK_THROWS_AS(parse_plane("A1,2"), ConfigError);
    CHECK_THROWS_AS(parse_plane("A:1"), ConfigError);
    CHECK(parse_plane("a:b:2,3").group == "a:b");

    CHECK(fixed3(-0.0001) == "0.000");
    CHECK(fixed3(0.4004) == "0.400");
    fs::remove_all(dir);
}

TEST_CASE("cli: single-group methods merge predictor groups") {
    const fs::path dir = scratch_dir("pls");
    write_text(dir / "data.csv", random_csv(8, 30));
    write_text(dir / "model.ini", kRandomIni);
    RunRequest req;
    req.config_path = (dir / "model.ini").string();
    req.out_dir = (dir / "out").string();
    req.algorithm = Algorithm::ln_pls2;
    const auto outcome = execute(req);
    REQUIRE(outcome.fit.predictors.size() == 1);
    CHECK(outcome.fit.predictors.front().name == "A+B+C");
    CHECK(outcome.fit.predictors.front().x.cols() == 8);
    CHECK(outcome.fit.components.groups.front().size() == 5);
    CHECK(outcome.fit.components.dependent.size() == 2);
    const MatrixXd& m = outcome.fit.predictors.front().metric.matrix();
    CHECK(m.block(0, 3, 3, 2).isZero());

    req.algorithm = Algorithm::pls1;
    CHECK_THROWS_AS(execute(req), ConfigError);  // two dependent variables
    fs::remove_all(dir);
}

TEST_CASE("cli: selection writes its trace and respects floors") {
    const fs::path dir = scratch_dir("select");
    write_text(dir / "data.csv", random_csv(21, 40));
    write_text(dir / "model.ini", kRandomIni);
    RunRequest req;
    req.config_path = (dir / "model.ini").string();
    req.out_dir = (dir / "out").string();
    req.algorithm = Algorithm::select;
    const auto outcome = execute(req);
    REQUIRE(outcome.fit.selection.has_value());
    const auto& sel = *outcome.fit.selection;
    CHECK(sel.final_counts[0] >= 1);
    const std::string text = slurp(dir / "out" / "selection.tsv");
    CHECK(text.rfind("step\tremoved_group\tremoved_rank\tscore:A\tscore:B\tscore:C\trefit_criterion\n", 0) == 0);
    CHECK(text.find("final\t-\tA:") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("cli: repeated runs write identical files") {
    const fs::path dir = scratch_dir("repeat");
    write_text(dir / "data.csv", random_csv(2, 35));
    write_text(dir / "model.ini", kRandomIni);
    RunRequest req;
    req.config_path = (dir / "model.ini").string();
    req.outputs.planes = {parse_plane("A:1,2")};
    req.out_dir = (dir / "one").string();
    execute(req);
    req.out_dir = (dir / "two").string();
    execute(req);
    int files = 0;
    for (const auto& e : fs::directory_iterator(dir / "one")) {
        ++files;
        CHECK(slurp(e.path()) == slurp(dir / "two" / e.path().filename()));
    }
    CHECK(files >= 8);
    fs::remove_all(dir);
}
