#pragma once

#include <algorithm>
#include <chrono>
#include <sstream>

#include "ringpir/attack.hpp"
#include "ringpir/fixtures.hpp"
#include "ringpir/io.hpp"

namespace ringpir {

// Code-suite selection: a named fixture or explicit generator data.
struct SuiteSpec {
    std::string name = "default";  // "default" or "example41"
    std::optional<std::vector<u64>> g_in;                 // inner generator coefficients
    std::optional<std::vector<std::vector<u64>>> tilde;   // s outer generators
    std::optional<std::vector<std::vector<u64>>> m_rows;  // s x s mixing matrix
};

inline CodeSuite build_suite(const SchemeParams& params, const SuiteSpec& spec) {
    if (spec.g_in || spec.tilde || spec.m_rows) {
        if (!spec.g_in || !spec.tilde || !spec.m_rows)
            throw std::invalid_argument("suite: g_in, tilde and M must be given together");
        std::vector<u64> gc = *spec.g_in;
        gc.resize(params.n, 0);
        const Poly g_in = make_poly(params.mod.m, std::move(gc));
        std::vector<Poly> tilde;
        for (const auto& coeffs : *spec.tilde) {
            std::vector<u64> c = coeffs;
            c.resize(params.n, 0);
            tilde.push_back(make_poly(params.mod.m, std::move(c)));
        }
        Mat mixing = make_mat(params.mod.m, spec.m_rows->size(), spec.m_rows->empty() ? 0 : spec.m_rows->front().size());
        for (std::size_t i = 0; i < mixing.rows; ++i)
            for (std::size_t j = 0; j < mixing.cols; ++j) mixing.at(i, j) = (*spec.m_rows)[i][j] % params.mod.m;
        return make_suite(params, g_in, tilde, mixing);
    }
    if (spec.name == "default") return default_suite(params);
    if (spec.name == "example41") return example41::suite();
    throw std::invalid_argument("suite: unknown fixture name '" + spec.name + "'");
}

struct ExperimentConfig {
    u64 m = 36;
    std::size_t n = 5, s = 3, r = 2, t = 5, L = 3;
    u64 seed = 1;
    std::size_t trials = 100;
    NfConvention nf = NfConvention::Alternative;
    bool repair = false;
    SuiteSpec suite;
    std::string db_path;  // optional fixed database
    std::string out;      // optional output path
    std::string format = "json";
    unsigned threads = 1;
    std::vector<std::size_t> t_sweep;  // extra t values for the attack timing table

    SchemeParams params() const { return make_params(m, n, s, r, t, L); }
};

inline void config_from_json(const nlohmann::json& j, ExperimentConfig& cfg) {
    if (j.contains("m")) cfg.m = j["m"].get<u64>();
    if (j.contains("n")) cfg.n = j["n"].get<std::size_t>();
    if (j.contains("s")) cfg.s = j["s"].get<std::size_t>();
    if (j.contains("r")) cfg.r = j["r"].get<std::size_t>();
    if (j.contains("t")) cfg.t = j["t"].get<std::size_t>();
    if (j.contains("L")) cfg.L = j["L"].get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<u64>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<std::size_t>();
    if (j.contains("repair")) cfg.repair = j["repair"].get<bool>();
    if (j.contains("nf_convention")) {
        const std::string v = j["nf_convention"].get<std::string>();
        if (v == "standard")
            cfg.nf = NfConvention::Standard;
        else if (v == "alternative")
            cfg.nf = NfConvention::Alternative;
        else
            throw std::invalid_argument("config: nf_convention must be standard or alternative");
    }
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("format")) cfg.format = j["format"].get<std::string>();
    if (j.contains("db")) cfg.db_path = j["db"].get<std::string>();
    if (j.contains("t_sweep")) cfg.t_sweep = j["t_sweep"].get<std::vector<std::size_t>>();
    if (j.contains("suite")) {
        const auto& s = j["suite"];
        if (s.is_string()) {
            cfg.suite.name = s.get<std::string>();
        } else {
            if (s.contains("name")) cfg.suite.name = s["name"].get<std::string>();
            if (s.contains("g_in")) cfg.suite.g_in = s["g_in"].get<std::vector<u64>>();
            if (s.contains("tilde")) cfg.suite.tilde = s["tilde"].get<std::vector<std::vector<u64>>>();
            if (s.contains("M")) cfg.suite.m_rows = s["M"].get<std::vector<std::vector<u64>>>();
        }
    }
}

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// One record per trial, replayable from its seed.  Every field except the
// wall-clock timings is a pure function of (config, seed).
using TrialRecord = nlohmann::json;

inline TrialRecord strip_timing(TrialRecord rec) {
    rec.erase("timing_ms");
    return rec;
}

struct CampaignResult {
    std::vector<TrialRecord> records;
    nlohmann::json summary;
};

namespace detail {

inline double percentile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double idx = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace detail

namespace detail {

inline void require_valid_suite(const SchemeParams& params, const CodeSuite& suite) {
    const ValidationReport rep = validate_suite(params, suite);
    if (!rep.recovery_conditions_ok()) {
        std::string why;
        for (const std::string& note : rep.notes) why += " " + note + ";";
        throw std::invalid_argument("suite fails the query-generation conditions:" + why);
    }
}

}  // namespace detail

// Seeded plant-query-respond-recover trials.
inline CampaignResult run_roundtrip(const ExperimentConfig& cfg) {
    const SchemeParams params = cfg.params();
    const CodeSuite suite = build_suite(params, cfg.suite);
    detail::require_valid_suite(params, suite);
    std::optional<Mat> fixed_db;
    if (!cfg.db_path.empty()) fixed_db = load_db(cfg.db_path, params);

    CampaignResult result;
    result.records.resize(cfg.trials);
    ringpir::detail::parallel_for(cfg.trials, cfg.threads, [&](std::size_t k) {
        const u64 seed = split_seed(cfg.seed, k);
        Rng rng(seed);
        const Mat db = fixed_db ? *fixed_db : random_database(params, rng);
        const std::size_t d = 1 + rng.below(params.t);

        TrialRecord rec;
        rec["trial"] = k;
        rec["seed"] = seed;
        rec["d_planted"] = d;
        nlohmann::json timing;
        QueryGenOptions opt;
        opt.nf.convention = cfg.nf;
        opt.repair = cfg.repair;
        try {
            auto start = std::chrono::steady_clock::now();
            const auto [query, secrets] = query_gen(params, suite, d, rng, opt);
            timing["query"] = elapsed_ms(start);

            std::vector<u64> lambdas;
            for (const Poly& u : secrets.u_diag) lambdas.push_back(lambda_check(u, suite.h_in, params.mod).lambda);
            rec["lambda"] = lambdas;
            rec["gamma"] = secrets.gamma;

            start = std::chrono::steady_clock::now();
            const Response resp = server_respond(db, query, params);
            timing["respond"] = elapsed_ms(start);

            start = std::chrono::steady_clock::now();
            const RecoveryOutcome out = recover(resp, suite, secrets, params);
            timing["recover"] = elapsed_ms(start);

            bool success = out.status == RecoveryStatus::Recovered;
            for (std::size_t i = 0; i < params.L && success; ++i)
                for (std::size_t j = 0; j < params.r; ++j)
                    success = success && out.file.at(i, j) == db.at(i, (d - 1) * params.r + j);
            rec["status"] = out.status == RecoveryStatus::Recovered
                                ? "recovered"
                                : (out.status == RecoveryStatus::Ambiguous ? "ambiguous" : "nosolution");
            rec["success"] = success;
            if (out.status == RecoveryStatus::Ambiguous) {
                nlohmann::json amb = nlohmann::json::array();
                for (const auto& a : out.ambiguous)
                    amb.push_back({{"row", a.row}, {"col", a.col}, {"candidates", a.candidates}});
                rec["ambiguity"] = amb;
            }
        } catch (const SamplerExhausted& ex) {
            rec["status"] = "sampler_exhausted";
            rec["success"] = false;
            rec["error"] = ex.what();
        }
        rec["timing_ms"] = timing;
        result.records[k] = std::move(rec);
    });

    std::size_t successes = 0;
    double lambda_sum = 0.0;
    std::size_t lambda_count = 0;
    std::vector<double> recover_ms;
    for (const TrialRecord& rec : result.records) {
        if (rec.value("success", false)) ++successes;
        if (rec.contains("lambda"))
            for (const auto& l : rec["lambda"]) {
                lambda_sum += l.get<double>();
                ++lambda_count;
            }
        if (rec.contains("timing_ms") && rec["timing_ms"].contains("recover"))
            recover_ms.push_back(rec["timing_ms"]["recover"].get<double>());
    }
    result.summary["command"] = "roundtrip";
    result.summary["trials"] = cfg.trials;
    result.summary["successes"] = successes;
    result.summary["success_rate"] = cfg.trials ? static_cast<double>(successes) / static_cast<double>(cfg.trials) : 0.0;
    result.summary["mean_lambda"] = lambda_count ? lambda_sum / static_cast<double>(lambda_count) : 0.0;
    result.summary["recover_ms_p50"] = detail::percentile(recover_ms, 0.5);
    result.summary["recover_ms_p90"] = detail::percentile(recover_ms, 0.9);
    result.summary["repair"] = cfg.repair;
    result.summary["nf_convention"] = to_string(cfg.nf);
    return result;
}

// Seeded plant-attack-compare trials; per-prime and intersected success are
// reported separately because a single prime can be uninformative.
inline CampaignResult run_attack(const ExperimentConfig& cfg) {
    const SchemeParams params = cfg.params();
    const CodeSuite suite = build_suite(params, cfg.suite);
    detail::require_valid_suite(params, suite);

    CampaignResult result;
    result.records.resize(cfg.trials);
    ringpir::detail::parallel_for(cfg.trials, cfg.threads, [&](std::size_t k) {
        const u64 seed = split_seed(cfg.seed, k);
        Rng rng(seed);
        const std::size_t d = 1 + rng.below(params.t);

        TrialRecord rec;
        rec["trial"] = k;
        rec["seed"] = seed;
        rec["d_planted"] = d;
        nlohmann::json timing;
        QueryGenOptions opt;
        opt.nf.convention = cfg.nf;
        opt.repair = cfg.repair;
        try {
            auto start = std::chrono::steady_clock::now();
            const auto [query, secrets] = query_gen(params, suite, d, rng, opt);
            timing["query"] = elapsed_ms(start);

            AttackOptions aopt;
            aopt.convention = cfg.nf;
            start = std::chrono::steady_clock::now();
            const AttackResult att = attack(query, params, aopt);
            timing["attack"] = elapsed_ms(start);

            nlohmann::json dims = nlohmann::json::array();
            nlohmann::json per_prime_hit = nlohmann::json::array();
            for (const PrimeAttack& pa : att.per_prime) {
                dims.push_back(pa.dims);
                per_prime_hit.push_back(std::find(pa.argmin.begin(), pa.argmin.end(), d) != pa.argmin.end() &&
                                        pa.argmin.size() == 1);
            }
            rec["per_prime_dims"] = dims;
            rec["per_prime_unique_hit"] = per_prime_hit;
            rec["intersection"] = att.intersection;
            rec["verdict"] = att.verdict == AttackVerdict::Unique
                                 ? "unique"
                                 : (att.verdict == AttackVerdict::Ambiguous ? "ambiguous" : "empty");
            rec["d_hat"] = att.d_hat;
            rec["success"] = att.verdict == AttackVerdict::Unique && att.d_hat == d;
        } catch (const SamplerExhausted& ex) {
            rec["verdict"] = "sampler_exhausted";
            rec["success"] = false;
            rec["error"] = ex.what();
        }
        rec["timing_ms"] = timing;
        result.records[k] = std::move(rec);
    });

    const std::size_t ell = params.mod.ell();
    std::vector<std::size_t> per_prime_hits(ell, 0);
    std::size_t successes = 0;
    std::vector<double> attack_ms;
    for (const TrialRecord& rec : result.records) {
        if (rec.value("success", false)) ++successes;
        if (rec.contains("per_prime_unique_hit"))
            for (std::size_t i = 0; i < ell; ++i)
                if (rec["per_prime_unique_hit"][i].get<bool>()) ++per_prime_hits[i];
        if (rec.contains("timing_ms") && rec["timing_ms"].contains("attack"))
            attack_ms.push_back(rec["timing_ms"]["attack"].get<double>());
    }
    result.summary["command"] = "attack";
    result.summary["trials"] = cfg.trials;
    result.summary["successes"] = successes;
    result.summary["success_rate"] = cfg.trials ? static_cast<double>(successes) / static_cast<double>(cfg.trials) : 0.0;
    nlohmann::json pp = nlohmann::json::array();
    for (std::size_t i = 0; i < ell; ++i) {
        pp.push_back({{"p", params.mod.factors[i].p},
                      {"rate", cfg.trials ? static_cast<double>(per_prime_hits[i]) / static_cast<double>(cfg.trials)
                                          : 0.0}});
    }
    result.summary["per_prime_unique_rate"] = pp;
    result.summary["attack_ms_p50"] = detail::percentile(attack_ms, 0.5);
    result.summary["attack_ms_p90"] = detail::percentile(attack_ms, 0.9);
    result.summary["nf_convention"] = to_string(cfg.nf);

    if (!cfg.t_sweep.empty()) {
        nlohmann::json sweep = nlohmann::json::array();
        for (std::size_t t_val : cfg.t_sweep) {
            ExperimentConfig sub = cfg;
            sub.t = t_val;
            sub.t_sweep.clear();
            const SchemeParams sp = sub.params();
            const CodeSuite ss = build_suite(sp, sub.suite);
            // Median attack time over a handful of seeded queries.
            std::vector<double> times;
            const std::size_t reps = std::max<std::size_t>(3, std::min<std::size_t>(cfg.trials, 9));
            for (std::size_t k = 0; k < reps; ++k) {
                Rng rng(split_seed(cfg.seed ^ 0x5eedULL, k));
                const std::size_t d = 1 + rng.below(sp.t);
                QueryGenOptions opt;
                opt.nf.convention = cfg.nf;
                const auto [query, secrets] = query_gen(sp, ss, d, rng, opt);
                const auto start = std::chrono::steady_clock::now();
                AttackOptions aopt;
                aopt.convention = cfg.nf;
                (void)attack(query, sp, aopt);
                times.push_back(elapsed_ms(start));
            }
            sweep.push_back({{"t", t_val}, {"attack_ms_median", detail::percentile(times, 0.5)}});
        }
        result.summary["t_sweep"] = sweep;
    }
    return result;
}

// Golden reproduction of the built-in worked example: fixed inputs through
// query/respond/recover, the two final systems checked entry-exact, the
// ambiguity sets checked, then the attack verdict for the same query.
struct PaperExampleReport {
    bool pass = true;
    std::vector<std::string> failures;
    nlohmann::json detail;
};

inline PaperExampleReport run_paper_example(bool repair = false, const std::optional<Mat>& db_override = std::nullopt) {
    PaperExampleReport report;
    auto fail = [&](const std::string& msg) {
        report.pass = false;
        report.failures.push_back(msg);
    };

    const SchemeParams params = example41::params();
    const CodeSuite suite = example41::suite();
    const QuerySecrets secrets = example41::secrets();
    const Query query = example41::query();
    const Mat db = db_override ? *db_override : example41::database();

    const ValidationReport val = validate_suite(params, suite);
    if (!val.nested || !val.meets_inner || !val.meets_dual_minus_inner) fail("conditions 1-2 do not hold");
    if (val.no_hensel_lifts) fail("condition 3 unexpectedly holds");
    report.detail["conditions"] = {{"nested", val.nested},
                                   {"meets_inner", val.meets_inner},
                                   {"meets_dual_minus_inner", val.meets_dual_minus_inner},
                                   {"no_hensel_lifts", val.no_hensel_lifts},
                                   {"m_invertible", val.m_invertible}};

    if (!row_span_equal_zm(params.mod, parity_check_zm(suite.c_in), example41::printed_h_in()))
        fail("H_IN row span mismatch");

    const Response resp = server_respond(db, query, params);
    const RecoverySystems sys = compute_final_systems(resp, suite, secrets, params);
    const std::vector<u64> z0_expect{9, 9, 0, 0, 0};
    const std::vector<u64> z1_expect{27, 27, 0, 0, 0};
    if (sys.z[0] != z0_expect) fail("z_0 mismatch");
    if (sys.z[1] != z1_expect) fail("z_1 mismatch");
    if (!sys.b[0].is_zero()) fail("first system right-hand side is not zero");
    const Mat b1_expect = mat_from(36, {{18, 18, 0, 0, 0}, {27, 27, 0, 0, 0}, {27, 27, 0, 0, 0}});
    if (sys.b[1] != b1_expect) fail("second system right-hand side mismatch");
    report.detail["z"] = {sys.z[0], sys.z[1]};

    const RecoveryOutcome out = solve_final_systems(sys, params);
    if (out.status != RecoveryStatus::Ambiguous) fail("recovery unexpectedly unambiguous");
    auto candidates_at = [&](std::size_t row, std::size_t col) -> std::vector<u64> {
        for (const auto& a : out.ambiguous)
            if (a.row == row && a.col == col) return a.candidates;
        return {};
    };
    if (candidates_at(1, 1) != std::vector<u64>{0, 4}) fail("x_11 candidate set is not {0, 4}");
    if (candidates_at(2, 2) != std::vector<u64>{1, 5}) fail("x_22 candidate set is not {1, 5}");
    nlohmann::json amb = nlohmann::json::array();
    for (const auto& a : out.ambiguous) amb.push_back({{"row", a.row}, {"col", a.col}, {"candidates", a.candidates}});
    report.detail["ambiguity"] = amb;

    const AttackResult att = attack(query, params, {});
    report.detail["attack"] = {{"verdict", att.verdict == AttackVerdict::Unique
                                               ? "unique"
                                               : (att.verdict == AttackVerdict::Ambiguous ? "ambiguous" : "empty")},
                               {"d_hat", att.d_hat},
                               {"d_planted", secrets.d}};

    if (repair) {
        nlohmann::json lam = nlohmann::json::array();
        for (const Poly& u : secrets.u_diag) {
            const LambdaResult lr = lambda_check(u, suite.h_in, params.mod);
            lam.push_back({{"lambda", lr.lambda}, {"pass", lr.pass}});
        }
        report.detail["repair"] = {{"lambda", lam},
                                   {"note", "repair resampling engages: fixture entries fail lambda >= m'"}};
    }
    return report;
}

// Free-density experiment (random generator matrices over one chain ring).
inline nlohmann::json run_free_density(u64 p, u32 e, std::size_t length, std::size_t rows, std::size_t trials,
                                       u64 seed) {
    Rng rng(seed);
    const double density = empirical_free_density(p, e, length, rows, trials, rng);
    return {{"command", "free-density"}, {"p", p}, {"e", e},     {"length", length},
            {"rows", rows},              {"trials", trials},     {"seed", seed}, {"density", density}};
}

inline void write_records_jsonl(const std::string& path, const std::vector<TrialRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    for (const TrialRecord& rec : records) out << rec.dump() << "\n";
}

inline std::string summary_to_csv(const nlohmann::json& summary) {
    std::ostringstream header, row;
    bool first = true;
    for (auto it = summary.begin(); it != summary.end(); ++it) {
        if (it.value().is_structured()) continue;
        if (!first) {
            header << ",";
            row << ",";
        }
        header << it.key();
        if (it.value().is_string())
            row << it.value().get<std::string>();
        else
            row << it.value().dump();
        first = false;
    }
    return header.str() + "\n" + row.str() + "\n";
}

inline void write_summary_csv(const std::string& path, const nlohmann::json& summary) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << summary_to_csv(summary);
}

}  // namespace ringpir
