#include "cmdpsim/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cmdpsim/errors.hpp"

namespace cmdpsim {

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    return doc;
}

} // namespace

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

CmdpModel load_model(const std::string& path) {
    const json doc = read_json(path);
    CmdpModel model;
    try {
        model.num_states = doc.at("num_states").get<int>();
        model.gamma = doc.at("gamma").get<double>();
        model.beta = doc.at("beta").get<double>();
        model.r_max = doc.at("r_max").get<double>();
        model.c_max = doc.at("c_max").get<double>();
        model.initial_state = doc.at("initial_state").get<int>();
        for (const json& state : doc.at("states")) {
            std::vector<ActionDynamics> tables;
            for (const json& action : state.at("actions")) {
                ActionDynamics table;
                table.action = action.at("id").get<int>();
                for (const json& seg : action.at("segments")) {
                    DisturbanceSegment segment;
                    segment.lo = seg.at("lo").get<double>();
                    segment.hi = seg.at("hi").get<double>();
                    segment.next_state = seg.at("next").get<int>();
                    segment.reward = seg.at("reward").get<double>();
                    segment.cost = seg.at("cost").get<double>();
                    table.segments.push_back(segment);
                }
                tables.push_back(std::move(table));
            }
            model.dynamics.push_back(std::move(tables));
        }
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    const ValidationReport report = validate_model(model);
    if (!report.ok()) throw ValidationError(path + ": " + report.joined());
    return model;
}

void save_model(const CmdpModel& model, const std::string& path) {
    json doc;
    doc["num_states"] = model.num_states;
    doc["gamma"] = model.gamma;
    doc["beta"] = model.beta;
    doc["r_max"] = model.r_max;
    doc["c_max"] = model.c_max;
    doc["initial_state"] = model.initial_state;
    json states = json::array();
    for (const auto& tables : model.dynamics) {
        json actions = json::array();
        for (const ActionDynamics& table : tables) {
            json segments = json::array();
            for (const DisturbanceSegment& seg : table.segments) {
                segments.push_back({{"lo", seg.lo},
                                    {"hi", seg.hi},
                                    {"next", seg.next_state},
                                    {"reward", seg.reward},
                                    {"cost", seg.cost}});
            }
            actions.push_back({{"id", table.action}, {"segments", std::move(segments)}});
        }
        states.push_back({{"actions", std::move(actions)}});
    }
    doc["states"] = std::move(states);
    write_text_file(path, doc.dump(2) + "\n");
}

PolicySet load_policy_set(const std::string& path, const CmdpModel& model) {
    const json doc = read_json(path);
    PolicySet set;
    try {
        for (const json& entry : doc.at("policies")) {
            Policy policy;
            policy.action_of = entry.get<std::vector<int>>();
            set.policies.push_back(std::move(policy));
        }
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    const ValidationReport report = validate_policy_set(model, set);
    if (!report.ok()) throw ValidationError(path + ": " + report.joined());
    return set;
}

void save_policy_set(const PolicySet& set, const std::string& path) {
    json doc;
    json policies = json::array();
    for (const Policy& policy : set.policies) policies.push_back(policy.action_of);
    doc["policies"] = std::move(policies);
    write_text_file(path, doc.dump(2) + "\n");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Trim to the shortest representation that still round-trips.
    for (int precision = 1; precision < 17; ++precision) {
        char probe[40];
        std::snprintf(probe, sizeof(probe), "%.*g", precision, v);
        double parsed = 0.0;
        std::sscanf(probe, "%lf", &parsed);
        if (parsed == v) return probe;
    }
    return buf;
}

std::string feasible_mask(const std::vector<int>& feasible, int num_policies) {
    std::string mask(static_cast<size_t>(num_policies), '0');
    for (int p : feasible) mask[static_cast<size_t>(p)] = '1';
    return mask;
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
    std::ostringstream out;
    out << "n,feasible_mask,chosen,chosen_value_mean,infeasible\n";
    for (const IterationRecord& record : trace.iterations) {
        out << record.n << ',' << feasible_mask(record.feasible, trace.num_policies) << ','
            << record.chosen << ',' << format_double(record.chosen_value_mean) << ','
            << (record.infeasible ? 1 : 0) << '\n';
    }
    write_text_file(path, out.str());
}

void write_oracle_csv(const OracleReport& report, const std::string& path) {
    std::ostringstream out;
    out << "policy,value,cost";
    for (int h : report.horizons) out << ",value_h" << h << ",cost_h" << h;
    out << '\n';
    for (int p = 0; p < report.num_policies(); ++p) {
        out << p << ',' << format_double(report.value[p]) << ',' << format_double(report.cost[p]);
        for (size_t h = 0; h < report.horizons.size(); ++h)
            out << ',' << format_double(report.value_h[h][p]) << ','
                << format_double(report.cost_h[h][p]);
        out << '\n';
    }
    write_text_file(path, out.str());
}

} // namespace cmdpsim
