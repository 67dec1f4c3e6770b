#include "opsf/solution.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace opsf {

using json = nlohmann::ordered_json;

namespace {

json map_to_json(const std::map<std::string, double>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

std::map<std::string, double> map_from_json(const json& j) {
    std::map<std::string, double> m;
    for (auto it = j.begin(); it != j.end(); ++it) m[it.key()] = it.value().get<double>();
    return m;
}

} // namespace

std::string solution_to_json(const Solution& sol) {
    json doc;
    doc["status"] = sol.meta.status;
    doc["strategy"] = sol.meta.strategy;
    doc["backend"] = sol.meta.backend;
    doc["alpha"] = sol.alpha;
    doc["gamma"] = sol.gamma;
    doc["objective"] = sol.objective_value;
    doc["risk_served"] = sol.risk_served;
    doc["load_served"] = sol.load_served;
    doc["objective_terms"] = {{"risk", sol.risk_term()},
                              {"load", sol.load_term()},
                              {"penalty", sol.penalty_term()}};
    doc["energized_blocks"] = json::array();
    for (const auto& b : sol.energized_blocks) doc["energized_blocks"].push_back(b);
    doc["closed_switches"] = json::array();
    for (const auto& s : sol.closed_switches) doc["closed_switches"].push_back(s);
    doc["w"] = map_to_json(sol.w);
    doc["p"] = map_to_json(sol.p);
    doc["q"] = map_to_json(sol.q);
    doc["pg"] = map_to_json(sol.pg);
    doc["qg"] = map_to_json(sol.qg);
    doc["meta"] = {{"solve_seconds", sol.meta.solve_seconds},
                   {"gap", sol.meta.gap},
                   {"iterations", sol.meta.iterations},
                   {"loops_generated", sol.meta.loops_generated},
                   {"model_constraints", sol.meta.model_constraints},
                   {"model_binaries", sol.meta.model_binaries},
                   {"model_continuous", sol.meta.model_continuous}};
    return doc.dump(2) + "\n";
}

Solution solution_from_json_string(const std::string& text) {
    json doc = json::parse(text);
    Solution sol;
    sol.meta.status = doc.value("status", "optimal");
    sol.meta.strategy = doc.value("strategy", "");
    sol.meta.backend = doc.value("backend", "");
    sol.alpha = doc.at("alpha").get<double>();
    sol.gamma = doc.at("gamma").get<double>();
    sol.objective_value = doc.at("objective").get<double>();
    sol.risk_served = doc.value("risk_served", 0.0);
    sol.load_served = doc.value("load_served", 0.0);
    for (const auto& b : doc.at("energized_blocks")) sol.energized_blocks.insert(b.get<std::string>());
    for (const auto& s : doc.at("closed_switches")) sol.closed_switches.insert(s.get<std::string>());
    sol.w = map_from_json(doc.at("w"));
    sol.p = map_from_json(doc.at("p"));
    sol.q = map_from_json(doc.at("q"));
    sol.pg = map_from_json(doc.at("pg"));
    sol.qg = map_from_json(doc.at("qg"));
    if (doc.contains("meta")) {
        const json& m = doc.at("meta");
        sol.meta.solve_seconds = m.value("solve_seconds", 0.0);
        sol.meta.gap = m.value("gap", 0.0);
        sol.meta.iterations = m.value("iterations", 0);
        sol.meta.loops_generated = m.value("loops_generated", 0);
        sol.meta.model_constraints = m.value("model_constraints", std::size_t{0});
        sol.meta.model_binaries = m.value("model_binaries", std::size_t{0});
        sol.meta.model_continuous = m.value("model_continuous", std::size_t{0});
    }
    return sol;
}

Solution read_solution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NetworkError("cannot open solution file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return solution_from_json_string(buf.str());
}

void write_solution(const Solution& sol, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw NetworkError("cannot write solution file '" + path + "'");
    out << solution_to_json(sol);
}

} // namespace opsf
