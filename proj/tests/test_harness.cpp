#include <cstdio>

#include <catch2/catch_amalgamated.hpp>

#include "ringpir/harness.hpp"

using namespace ringpir;

namespace {

std::vector<TrialRecord> stripped(const std::vector<TrialRecord>& records) {
    std::vector<TrialRecord> out;
    for (const TrialRecord& r : records) out.push_back(strip_timing(r));
    return out;
}

}  // namespace

TEST_CASE("roundtrip campaign replays byte-identically modulo wall time") {
    ExperimentConfig cfg;
    cfg.t = 4;
    cfg.trials = 12;
    cfg.seed = 2024;
    cfg.repair = true;
    const CampaignResult a = run_roundtrip(cfg);
    const CampaignResult b = run_roundtrip(cfg);
    REQUIRE(a.records.size() == b.records.size());
    const auto sa = stripped(a.records), sb = stripped(b.records);
    for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sa[i].dump() == sb[i].dump());

    // Thread count must not change the records either.
    ExperimentConfig cfg4 = cfg;
    cfg4.threads = 4;
    const CampaignResult c = run_roundtrip(cfg4);
    const auto sc = stripped(c.records);
    for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sa[i].dump() == sc[i].dump());
}

TEST_CASE("attack campaign replays and its summary is recomputable") {
    ExperimentConfig cfg;
    cfg.t = 9;
    cfg.trials = 8;
    cfg.seed = 55;
    const CampaignResult a = run_attack(cfg);
    const CampaignResult b = run_attack(cfg);
    const auto sa = stripped(a.records), sb = stripped(b.records);
    for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sa[i].dump() == sb[i].dump());

    std::size_t successes = 0;
    for (const TrialRecord& r : a.records)
        if (r.value("success", false)) ++successes;
    CHECK(a.summary["successes"].get<std::size_t>() == successes);
    CHECK(a.summary["trials"].get<std::size_t>() == cfg.trials);
}

TEST_CASE("single-trial campaign emits one record") {
    ExperimentConfig cfg;
    cfg.trials = 1;
    cfg.repair = true;
    const CampaignResult res = run_roundtrip(cfg);
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0]["trial"] == 0);
    CHECK(res.records[0].contains("lambda"));
    CHECK(res.records[0].contains("seed"));
}

TEST_CASE("database files round-trip and validate") {
    const SchemeParams params = example41::params();
    const Mat db = example41::database();
    const nlohmann::json j = db_to_json(db, params);
    CHECK(db_from_json(j, params) == db);

    nlohmann::json bad = j;
    bad["rows"][0][0] = 6;  // outside [0, m')
    CHECK_THROWS_AS(db_from_json(bad, params), std::invalid_argument);
    nlohmann::json wrong_m = j;
    wrong_m["m"] = 100;
    CHECK_THROWS_AS(db_from_json(wrong_m, params), std::invalid_argument);
    nlohmann::json missing = j;
    missing.erase("rows");
    CHECK_THROWS_AS(db_from_json(missing, params), std::invalid_argument);

    const std::string path = "/tmp/ringpir_db_test.json";
    save_db(path, db, params);
    CHECK(load_db(path, params) == db);
    std::remove(path.c_str());
}

TEST_CASE("fixed database feeds every trial") {
    const SchemeParams params = make_params(36, 5, 3, 2, 3, 3);
    Rng rng(3);
    const Mat db = random_database(params, rng);
    const std::string path = "/tmp/ringpir_db_fixed.json";
    save_db(path, db, params);

    ExperimentConfig cfg;
    cfg.t = 3;
    cfg.trials = 5;
    cfg.repair = true;
    cfg.db_path = path;
    const CampaignResult res = run_roundtrip(cfg);
    for (const TrialRecord& r : res.records) CHECK(r.value("success", false));
    std::remove(path.c_str());
}

TEST_CASE("config json mirrors the flags") {
    ExperimentConfig cfg;
    config_from_json(nlohmann::json::parse(R"({
        "m": 36, "n": 5, "s": 3, "r": 2, "t": 17, "L": 3,
        "seed": 9, "trials": 4, "repair": true,
        "nf_convention": "standard",
        "suite": {"name": "default"},
        "format": "csv"
    })"),
                     cfg);
    CHECK(cfg.t == 17);
    CHECK(cfg.seed == 9);
    CHECK(cfg.repair);
    CHECK(cfg.nf == NfConvention::Standard);
    CHECK(cfg.format == "csv");
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"nf_convention": "bogus"})"), cfg),
                    std::invalid_argument);

    // Explicit generator lists build a usable suite.
    ExperimentConfig cfg2;
    config_from_json(nlohmann::json::parse(R"({
        "m": 36, "n": 5, "s": 3, "r": 2, "t": 3, "L": 3,
        "suite": {"g_in": [20, 28], "tilde": [[1, 9], [17, 1], [33, 21]],
                  "M": [[1, 0, 2], [0, 1, 0], [1, 1, 0]]}
    })"),
                     cfg2);
    const CodeSuite suite = build_suite(cfg2.params(), cfg2.suite);
    CHECK(suite.h_in == example41::printed_h_in());
}

TEST_CASE("paper example report passes and is sensitive to corruption") {
    const PaperExampleReport ok = run_paper_example();
    CHECK(ok.pass);
    CHECK(ok.failures.empty());

    Mat corrupted = example41::database();
    corrupted.at(0, 2) = (corrupted.at(0, 2) + 1) % 6;  // inside DB^2
    const PaperExampleReport bad = run_paper_example(false, corrupted);
    CHECK_FALSE(bad.pass);

    const PaperExampleReport with_repair = run_paper_example(true);
    REQUIRE(with_repair.detail.contains("repair"));
    for (const auto& lam : with_repair.detail["repair"]["lambda"]) {
        CHECK(lam["lambda"] == 4);
        CHECK_FALSE(lam["pass"].get<bool>());
    }
}

TEST_CASE("csv summary has one header and one row") {
    ExperimentConfig cfg;
    cfg.trials = 2;
    cfg.repair = true;
    const CampaignResult res = run_roundtrip(cfg);
    const std::string csv = summary_to_csv(res.summary);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK(csv.find("success_rate") != std::string::npos);
}
