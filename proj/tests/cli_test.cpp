// End-to-end runs of the command-line tool. The test harness exports
// TCM_CLI with the built binary's path.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "tcm/dataset.hpp"

using namespace tcm;

namespace {

std::string cli_path() {
    const char* p = std::getenv("TCM_CLI");
    REQUIRE_MESSAGE(p != nullptr, "TCM_CLI must point at the built binary");
    return p;
}

int run(const std::string& command) {
    int status = std::system(command.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

// 21 training and 9 test examples from well-separated clouds.
struct Corpus {
    helpers::TempDir dir{"cli"};
    std::filesystem::path train = dir.path() / "train.csv";
    std::filesystem::path test = dir.path() / "test.csv";

    Corpus() {
        SynthConfig config;
        config.n_per_class = 15;
        config.dimension = 2;
        config.separation = 3.0;
        config.seed = 5;
        Dataset data = generate_synthetic(config);
        auto [tr, te] = split_dataset(data, 0.7, 6);
        save_examples(tr, train.string());
        save_examples(te, test.string());
    }
};

}  // namespace

TEST_CASE("transduce writes the per-point table deterministically") {
    Corpus c;
    const std::string cli = cli_path();
    auto out1 = c.dir.path() / "points1.csv";
    auto out2 = c.dir.path() / "points2.csv";
    std::string base = cli + " transduce --train " + q(c.train) + " --test " +
                       q(c.test) + " --kernel rbf --gamma 0.5 --C 2 --out ";
    CHECK(run(base + q(out1)) == 0);
    CHECK(run(base + q(out2)) == 0);

    std::string text = slurp(out1);
    CHECK(text == slurp(out2));
    CHECK(text.rfind("id,true_label,prediction,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 10);  // header + 9 points

    SUBCASE("the scatter export consumes the table") {
        auto scatter = c.dir.path() / "scatter.csv";
        CHECK(run(cli + " scatter --in " + q(out1) + " --out " + q(scatter)) == 0);
        std::string rows = slurp(scatter);
        CHECK(rows.rfind("confidence,possibility,outcome\n", 0) == 0);
        CHECK(std::count(rows.begin(), rows.end(), '\n') == 10);
    }
}

TEST_CASE("transduce accepts feature-only query files") {
    Corpus c;
    const std::string cli = cli_path();
    auto queries = c.dir.path() / "queries.csv";
    {
        std::ofstream out(queries);
        out << "x0,x1\n1.5,0.0\n-1.5,0.2\n";
    }
    auto table = c.dir.path() / "points.csv";
    CHECK(run(cli + " transduce --train " + q(c.train) + " --test " + q(queries) +
              " --unlabeled --out " + q(table)) == 0);
    std::string text = slurp(table);
    // Lines start "id," then an empty true_label cell.
    CHECK(text.find("\n0,,") != std::string::npos);
    CHECK(text.find("\n1,,") != std::string::npos);

    SUBCASE("scatter needs the labels the table lacks") {
        auto scatter = c.dir.path() / "scatter.csv";
        CHECK(run(cli + " scatter --in " + q(table) + " --out " + q(scatter) +
                  " 2>/dev/null") == 2);
    }
}

TEST_CASE("evaluate emits the cluster report") {
    Corpus c;
    const std::string cli = cli_path();
    auto report1 = c.dir.path() / "r1.txt";
    auto report2 = c.dir.path() / "r2.txt";
    std::string base = cli + " evaluate --train " + q(c.train) + " --test " +
                       q(c.test) + " --kernel poly --degree 2 --C 1 --out ";
    CHECK(run(base + q(report1)) == 0);
    CHECK(run(base + q(report2)) == 0);

    std::string text = slurp(report1);
    CHECK(text == slurp(report2));
    CHECK(text.rfind("n_test,9\n", 0) == 0);
    CHECK(text.find("\npossibility_full,") != std::string::npos);
    CHECK(text.find("\npossibility_reduced,") != std::string::npos);
}

TEST_CASE("calibrate reports one row per level") {
    helpers::TempDir dir("cli_cal");
    const std::string cli = cli_path();
    auto out1 = dir.path() / "c1.csv";
    auto out2 = dir.path() / "c2.csv";
    std::string base = cli +
                       " calibrate --epsilons 0.1,0.5 --trials 10 --seed 3"
                       " --n-per-class 3 --separation 2 --out ";
    CHECK(run(base + q(out1)) == 0);
    CHECK(run(base + q(out2)) == 0);

    std::string text = slurp(out1);
    CHECK(text == slurp(out2));
    CHECK(text.rfind("epsilon,n_trials,n_confident_errors,empirical_rate\n", 0) == 0);
    CHECK(text.find("\n0.1,10,") != std::string::npos);
    CHECK(text.find("\n0.5,10,") != std::string::npos);
}

TEST_CASE("validate averages a proper measure to one") {
    helpers::TempDir dir("cli_val");
    const std::string cli = cli_path();
    auto out = dir.path() / "v.csv";
    CHECK(run(cli_path() +
              " validate --measure sv-count --size 4 --samples 3 --seed 2 --out " +
              q(out)) == 0);
    std::string text = slurp(out);
    CHECK(text.rfind("sample,average,abs_deviation\n", 0) == 0);
    std::size_t tail = text.rfind("max_deviation,");
    REQUIRE(tail != std::string::npos);
    double worst = std::stod(text.substr(tail + 14));
    CHECK(worst < 1e-6);

    SUBCASE("the exchangeable oracle agrees on distinct samples") {
        auto out2 = dir.path() / "v2.csv";
        CHECK(run(cli + " validate --measure multi:2 --size 4 --samples 2 --seed 2"
                        " --oracle exchangeable --out " +
                  q(out2)) == 0);
        std::string other = slurp(out2);
        std::size_t t2 = other.rfind("max_deviation,");
        REQUIRE(t2 != std::string::npos);
        CHECK(std::stod(other.substr(t2 + 14)) < 1e-6);
    }
}

TEST_CASE("validate exposes an invalid measure") {
    helpers::TempDir dir("cli_val_bad");
    auto out = dir.path() / "v.csv";
    CHECK(run(cli_path() +
              " validate --measure const:2 --size 3 --samples 2 --seed 1 --out " +
              q(out)) == 0);
    std::string text = slurp(out);
    CHECK(text.find("0,2,1\n") != std::string::npos);
    CHECK(text.find("1,2,1\n") != std::string::npos);
    CHECK(text.find("max_deviation,1\n") != std::string::npos);
}

TEST_CASE("usage errors exit with code 1") {
    Corpus c;
    const std::string cli = cli_path();
    CHECK(run(cli + " transduce --no-such-flag 2>/dev/null") == 1);
    CHECK(run(cli + " no-such-subcommand 2>/dev/null") == 1);
    CHECK(run(cli + " 2>/dev/null") == 1);
    CHECK(run(cli + " transduce --train " + q(c.train) + " --test " + q(c.test) +
              " --measure weighted >/dev/null 2>&1") == 1);
    CHECK(run(cli + " transduce --train " + q(c.train) + " --test " + q(c.test) +
              " --measure multi:2 >/dev/null 2>&1") == 1);
    CHECK(run(cli + " transduce --train " + q(c.train) + " --test " + q(c.test) +
              " --kernel cubic >/dev/null 2>&1") == 1);
    CHECK(run(cli + " --help >/dev/null") == 0);
}

TEST_CASE("data errors exit with code 2") {
    Corpus c;
    const std::string cli = cli_path();
    CHECK(run(cli + " transduce --train /nonexistent.csv --test " + q(c.test) +
              " 2>/dev/null") == 2);

    auto single = c.dir.path() / "single.csv";
    {
        std::ofstream out(single);
        out << "x0,label\n0.0,1\n1.0,1\n";
    }
    CHECK(run(cli + " transduce --train " + q(single) + " --test " + q(c.test) +
              " >/dev/null 2>&1") == 2);

    auto bad_header = c.dir.path() / "bad.csv";
    {
        std::ofstream out(bad_header);
        out << "a,b\n1,2\n";
    }
    CHECK(run(cli + " scatter --in " + q(bad_header) + " --out " +
              q(c.dir.path() / "s.csv") + " 2>/dev/null") == 2);
}

TEST_CASE("numerical failures exit with code 3") {
    Corpus c;
    CHECK(run(cli_path() + " evaluate --train " + q(c.train) + " --test " +
              q(c.test) + " --max-iter 1 >/dev/null 2>&1") == 3);
}

TEST_CASE("label column and token overrides") {
    helpers::TempDir dir("cli_tokens");
    const std::string cli = cli_path();
    auto train = dir.path() / "train.csv";
    auto test = dir.path() / "test.csv";
    {
        std::ofstream out(train);
        out << "verdict,x0\nspam,0.0\nham,1.0\nspam,0.2\nham,0.8\n";
    }
    {
        std::ofstream out(test);
        out << "verdict,x0\nspam,0.1\n";
    }
    auto table = dir.path() / "points.csv";
    CHECK(run(cli + " transduce --train " + q(train) + " --test " + q(test) +
              " --label-col 0 --pos-token spam --neg-token ham --out " +
              q(table)) == 0);
    std::string text = slurp(table);
    CHECK(text.find("\n0,1,") != std::string::npos);  // true_label parsed as +1
}
