#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using doctest::Approx;

namespace {

std::string data_path(const std::string& name) {
    return std::string(FINSPEC_TEST_DATA_DIR) + "/" + name;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    out << content;
    REQUIRE(out.good());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    std::string out_path = data_path("cli_out_" + std::to_string(counter) + ".txt");
    std::string err_path = data_path("cli_err_" + std::to_string(counter) + ".txt");
    ++counter;
    std::string cmd = std::string(FINSPEC_CLI_PATH) + " " + args + " > " + out_path + " 2> " +
                      err_path;
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

// Parses a CSV artifact: provenance line, header line, then numeric rows.
struct Csv {
    std::string provenance;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Csv parse_csv(const std::string& text) {
    Csv csv;
    std::istringstream in(text);
    std::string line;
    REQUIRE(std::getline(in, line));
    csv.provenance = line;
    REQUIRE(std::getline(in, line));
    std::istringstream hdr(line);
    std::string cell;
    while (std::getline(hdr, cell, ',')) csv.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
        csv.rows.push_back(std::move(vals));
    }
    return csv;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("decompose emits a full-mass spectral measure") {
    RunResult r = run_cli("decompose --n 100");
    REQUIRE(r.exit_code == 0);
    Csv csv = parse_csv(r.out);
    CHECK(csv.provenance.rfind("# finspec ", 0) == 0);
    CHECK(csv.provenance.find("command=decompose") != std::string::npos);
    CHECK(csv.provenance.find("config_hash=") != std::string::npos);
    REQUIRE(csv.header == std::vector<std::string>{"lambda", "mass", "cumulative"});
    REQUIRE(csv.rows.size() == 100);
    double mass = 0.0;
    for (const auto& row : csv.rows) mass += row[1];
    CHECK(std::fabs(mass - 1.0) <= 1e-12);
    CHECK(csv.rows.back()[2] == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("asymmetric user matrix exits 2 and names the entry pair") {
    const std::string path = data_path("cli_asym.csv");
    write_file(path, "1,2\n3,4\n");
    RunResult r = run_cli("decompose --config " + data_path("cli_asym_cfg.json"));
    // Missing config also exits 2; write the real config and rerun.
    write_file(data_path("cli_asym_cfg.json"),
               std::string("{\"operator\":{\"kind\":\"user-matrix\",\"path\":\"") + path +
                   "\"}, \"n\": 2}");
    r = run_cli("decompose --config " + data_path("cli_asym_cfg.json"));
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("(0,1)") != std::string::npos);
    CHECK(r.err.find("(1,0)") != std::string::npos);
}

TEST_CASE("decompose of the diagonal family with probe e3 is a single unit jump") {
    write_file(data_path("cli_diag_cfg.json"),
               "{\"operator\":{\"kind\":\"diagonal-unbounded\",\"rate\":1.0},"
               "\"probe\":{\"kind\":\"basis\",\"index\":3},\"n\":5}");
    RunResult r = run_cli("decompose --config " + data_path("cli_diag_cfg.json"));
    REQUIRE(r.exit_code == 0);
    Csv csv = parse_csv(r.out);
    REQUIRE(csv.rows.size() == 5);
    for (const auto& row : csv.rows) {
        if (row[0] == Approx(3.0)) {
            CHECK(row[1] == Approx(1.0).epsilon(1e-13));
        } else {
            CHECK(row[1] == Approx(0.0).scale(1).epsilon(1e-13));
        }
    }
}

TEST_CASE("stone sweep on a single zero eigenvalue halves its error per step") {
    write_file(data_path("cli_zero.csv"), "0\n");
    write_file(data_path("cli_stone_cfg.json"),
               std::string("{\"operator\":{\"kind\":\"user-matrix\",\"path\":\"") +
                   data_path("cli_zero.csv") +
                   "\"},\"n\":1,"
                   "\"stone\":{\"a\":-1.0,\"b\":1.0,"
                   "\"epsilons\":[0.1,0.05,0.025,0.0125,0.00625,0.003125,0.0015625,"
                   "0.00078125,0.000390625,0.0001953125]}}");
    RunResult r = run_cli("stone --config " + data_path("cli_stone_cfg.json"));
    REQUIRE(r.exit_code == 0);
    Csv csv = parse_csv(r.out);
    REQUIRE(csv.header == std::vector<std::string>{"epsilon", "error", "ratio"});
    REQUIRE(csv.rows.size() == 10);
    double final_ratio = csv.rows.back()[2];
    CHECK(final_ratio >= 0.45);
    CHECK(final_ratio <= 0.55);
}

TEST_CASE("stone interval below the spectrum keeps all errors at quadrature scale") {
    write_file(data_path("cli_five.csv"), "5\n");
    write_file(data_path("cli_stone_below.json"),
               std::string("{\"operator\":{\"kind\":\"user-matrix\",\"path\":\"") +
                   data_path("cli_five.csv") +
                   "\"},\"n\":1,\"stone\":{\"a\":-3.0,\"b\":-1.0,\"epsilons\":[0.01,0.001]}}");
    RunResult r = run_cli("stone --config " + data_path("cli_stone_below.json"));
    REQUIRE(r.exit_code == 0);
    for (const auto& row : parse_csv(r.out).rows) CHECK(row[1] <= 0.01);
}

TEST_CASE("stone endpoint on an eigenvalue exits 2 through the continuity guard") {
    write_file(data_path("cli_zero2.csv"), "0\n");
    write_file(data_path("cli_stone_bad.json"),
               std::string("{\"operator\":{\"kind\":\"user-matrix\",\"path\":\"") +
                   data_path("cli_zero2.csv") +
                   "\"},\"n\":1,\"stone\":{\"a\":0.0,\"b\":1.0,\"epsilons\":[0.01]}}");
    RunResult r = run_cli("stone --config " + data_path("cli_stone_bad.json"));
    CHECK(r.exit_code == 2);
}

TEST_CASE("verify passes on the free jacobi family") {
    RunResult r = run_cli("verify --n 150 --output -");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"pass\": true") != std::string::npos);
}

TEST_CASE("verify with tolerance scale zero reports roundoff violations and exits 1") {
    RunResult r = run_cli("verify --n 60 --tolerance-scale 0");
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("\"pass\": false") != std::string::npos);
    CHECK(r.out.find("violations") != std::string::npos);
}

TEST_CASE("verify passes on the hermite family") {
    write_file(data_path("cli_hermite.json"),
               "{\"operator\":{\"kind\":\"hermite-position\"},\"n\":120}");
    RunResult r = run_cli("verify --config " + data_path("cli_hermite.json"));
    CHECK(r.exit_code == 0);
}

TEST_CASE("verify artifacts are byte-identical across runs and thread counts") {
    std::string a = data_path("cli_det_a.json");
    std::string b = data_path("cli_det_b.json");
    std::string c = data_path("cli_det_c.json");
    REQUIRE(run_cli("verify --n 80 --seed 7 --output " + a).exit_code == 0);
    REQUIRE(run_cli("verify --n 80 --seed 7 --output " + b).exit_code == 0);
    REQUIRE(run_cli("verify --n 80 --seed 7 --threads 4 --output " + c).exit_code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) == slurp(c));
}

TEST_CASE("verify rejects csv output") {
    RunResult r = run_cli("verify --n 20 --format csv");
    CHECK(r.exit_code == 2);
}

TEST_CASE("cdf emits monotone values with the expected midpoint") {
    write_file(data_path("cli_cdf.json"),
               "{\"n\":50,\"cdf\":{\"lambda-grid\":{\"from\":-3.0,\"to\":3.0,\"count\":13}}}");
    RunResult r = run_cli("cdf --config " + data_path("cli_cdf.json"));
    REQUIRE(r.exit_code == 0);
    Csv csv = parse_csv(r.out);
    REQUIRE(csv.rows.size() == 13);
    double prev = -1.0;
    for (const auto& row : csv.rows) {
        CHECK(row[3] >= prev);
        prev = row[3];
    }
    CHECK(csv.rows.front()[3] == Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(csv.rows.back()[3] == Approx(1.0).epsilon(1e-12));
    CHECK(csv.rows[6][3] == Approx(0.5).epsilon(0.05));
}

TEST_CASE("converge flags the persistent atom of the diagonal family") {
    write_file(data_path("cli_conv.json"),
               "{\"operator\":{\"kind\":\"diagonal-unbounded\",\"rate\":1.0},"
               "\"output\":{\"format\":\"json\"},"
               "\"converge\":{\"ns\":[4,6,8],\"lambda-grid\":[0.5,1.5,2.5],"
               "\"oracle\":{\"kind\":\"point-masses\",\"points\":[[1.0,1.0]]}}}");
    RunResult r = run_cli("converge --config " + data_path("cli_conv.json"));
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("\"persistent_atoms\": [") != std::string::npos);
    CHECK(r.out.find("1.0") != std::string::npos);
    CHECK(r.out.find("\"sup_distance\"") != std::string::npos);
}

TEST_CASE("tails emits certificates for every N and K") {
    write_file(data_path("cli_tails.json"),
               "{\"n\":60,\"tails\":{\"ks\":[0.5,1.5,2.5]}}");
    RunResult r = run_cli("tails --config " + data_path("cli_tails.json"));
    REQUIRE(r.exit_code == 0);
    Csv csv = parse_csv(r.out);
    REQUIRE(csv.rows.size() == 9);  // 3 derived Ns x 3 cutoffs
    for (const auto& row : csv.rows) CHECK(row[7] == 1.0);
}

TEST_CASE("resolvent-check passes on the free jacobi family") {
    RunResult r = run_cli("resolvent-check --n 80 --format json --seed 3");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("\"pass\": true") != std::string::npos);
}

TEST_CASE("flags override config fields") {
    write_file(data_path("cli_override.json"), "{\"n\":10}");
    RunResult r = run_cli("decompose --config " + data_path("cli_override.json") + " --n 20");
    REQUIRE(r.exit_code == 0);
    CHECK(parse_csv(r.out).rows.size() == 20);
}

TEST_CASE("config hash is stable for equal configs and moves when n changes") {
    RunResult a = run_cli("decompose --n 12");
    RunResult b = run_cli("decompose --n 12");
    RunResult c = run_cli("decompose --n 13");
    auto hash_of = [](const std::string& text) {
        std::size_t at = text.find("config_hash=");
        REQUIRE(at != std::string::npos);
        return text.substr(at + 12, 16);
    };
    CHECK(hash_of(a.out) == hash_of(b.out));
    CHECK(hash_of(a.out) != hash_of(c.out));
}

TEST_CASE("usage errors exit 2") {
    CHECK(run_cli("decompose --no-such-flag").exit_code == 2);
    CHECK(run_cli("no-such-command").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);
    write_file(data_path("cli_badjson.json"), "{not json");
    CHECK(run_cli("decompose --config " + data_path("cli_badjson.json")).exit_code == 2);
    CHECK(run_cli("decompose --config " + data_path("cli_nonexistent.json")).exit_code == 2);
    write_file(data_path("cli_badn.json"), "{\"n\": -5}");
    CHECK(run_cli("decompose --config " + data_path("cli_badn.json")).exit_code == 2);
}

TEST_CASE("artifacts write atomically to the requested path") {
    std::string path = data_path("cli_artifact.csv");
    RunResult r = run_cli("decompose --n 5 --output " + path);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());
    Csv csv = parse_csv(slurp(path));
    CHECK(csv.rows.size() == 5);
    std::ifstream tmp(path + ".tmp");
    CHECK(!tmp.good());
}

}  // TEST_SUITE
