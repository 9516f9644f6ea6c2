#pragma once

#include <fstream>

#include <json.hpp>

#include "ringpir/pir.hpp"

namespace ringpir {

// Database file schema: {"m": .., "m_prime": .., "L": .., "r": .., "t": ..,
// "rows": [[..], ..]} with r*t integers in [0, m') per row.
inline nlohmann::json db_to_json(const Mat& db, const SchemeParams& params) {
    nlohmann::json j;
    j["m"] = params.mod.m;
    j["m_prime"] = params.mod.m_prime;
    j["L"] = params.L;
    j["r"] = params.r;
    j["t"] = params.t;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < db.rows; ++i) rows.push_back(mat_row(db, i));
    j["rows"] = rows;
    return j;
}

inline Mat db_from_json(const nlohmann::json& j, const SchemeParams& params) {
    for (const char* key : {"m", "m_prime", "L", "r", "t", "rows"})
        if (!j.contains(key)) throw std::invalid_argument(std::string("database file: missing field ") + key);
    if (j["m"].get<u64>() != params.mod.m || j["m_prime"].get<u64>() != params.mod.m_prime)
        throw std::invalid_argument("database file: modulus does not match parameters");
    if (j["L"].get<std::size_t>() != params.L || j["r"].get<std::size_t>() != params.r ||
        j["t"].get<std::size_t>() != params.t)
        throw std::invalid_argument("database file: shape does not match parameters");
    const auto& rows = j["rows"];
    if (!rows.is_array() || rows.size() != params.L) throw std::invalid_argument("database file: bad row count");
    Mat db = make_mat(params.mod.m, params.L, params.r * params.t);
    for (std::size_t i = 0; i < params.L; ++i) {
        if (rows[i].size() != params.r * params.t) throw std::invalid_argument("database file: bad row width");
        for (std::size_t c = 0; c < rows[i].size(); ++c) {
            const u64 v = rows[i][c].get<u64>();
            if (v >= params.mod.m_prime) throw std::invalid_argument("database file: entry not in [0, m')");
            db.at(i, c) = v;
        }
    }
    return db;
}

inline Mat load_db(const std::string& path, const SchemeParams& params) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open database file: " + path);
    nlohmann::json j;
    in >> j;
    return db_from_json(j, params);
}

inline void save_db(const std::string& path, const Mat& db, const SchemeParams& params) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write database file: " + path);
    out << db_to_json(db, params).dump(2) << "\n";
}

}  // namespace ringpir
