#pragma once

#include "fluxmdp/simplex.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fluxmdp {

class TraceError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

template <typename Num>
json num_to_json(const Num& v) {
    if constexpr (Numerics<Num>::mode == NumericMode::Exact)
        return json(v.str());
    else
        return json(v);
}

template <typename Num>
Num num_from_json(const json& j) {
    if constexpr (Numerics<Num>::mode == NumericMode::Exact) {
        if (!j.is_string()) throw TraceError("exact trace numbers must be strings");
        return Rational(j.get<std::string>());
    } else {
        if (!j.is_number()) throw TraceError("float trace numbers must be JSON numbers");
        return j.get<double>();
    }
}

template <typename Num>
json num_array(const std::vector<Num>& v) {
    json out = json::array();
    for (const Num& x : v) out.push_back(num_to_json(x));
    return out;
}

template <typename Num>
std::vector<Num> num_array_from(const json& j) {
    std::vector<Num> out;
    for (const json& x : j) out.push_back(num_from_json<Num>(x));
    return out;
}

} // namespace detail

/**
 * Trace files are JSON Lines: a header object, one object per pivot, and a
 * closing object with the final policy. Exact-mode numbers are serialized as
 * "num/den" strings so replaying a trace loses nothing.
 */
template <typename Num>
std::string serialize_trace(const PivotTrace<Num>& trace) {
    std::ostringstream out;
    json header{{"format", "fluxmdp-trace-v1"},
                {"digest", trace.digest},
                {"mode", to_string(trace.mode)},
                {"initial", trace.initial.choice},
                {"light", trace.light},
                {"seed", trace.seed ? json(*trace.seed) : json(nullptr)}};
    out << header.dump() << '\n';
    for (const PivotRecord<Num>& rec : trace.records) {
        json created(nullptr);
        if (rec.cycle_created) {
            created = json{{"actions", rec.cycle_created->actions},
                           {"gamma", rec.cycle_created->discount_product.str()},
                           {"dominator", rec.cycle_created->dominating_action},
                           {"dominator_discount", rec.cycle_created->dominating_discount.str()}};
        }
        json jr{{"iteration", rec.iteration},
                {"entering", rec.entering},
                {"leaving", rec.leaving},
                {"state", rec.state},
                {"gain", detail::num_to_json(rec.gain)},
                {"objective_before", detail::num_to_json(rec.objective_before)},
                {"objective_after", detail::num_to_json(rec.objective_after)},
                {"cycle_created", std::move(created)},
                {"cycles_broken", rec.cycles_broken}};
        if (!trace.light) {
            jr["values_before"] = detail::num_array(rec.values_before);
            jr["values_after"] = detail::num_array(rec.values_after);
        }
        out << jr.dump() << '\n';
    }
    json footer{{"iterations", trace.iterations()},
                {"final_policy", trace.final_policy.choice},
                {"final_values", detail::num_array(trace.final_values)},
                {"final_objective", detail::num_to_json(trace.final_objective)},
                {"termination", to_string(trace.termination)}};
    out << footer.dump() << '\n';
    return out.str();
}

/// Mode recorded in a trace file's header line, without parsing the rest.
inline NumericMode trace_mode(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw TraceError("empty trace");
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.is_object() || !header.contains("mode"))
        throw TraceError("trace header is malformed");
    const std::string mode = header["mode"].get<std::string>();
    if (mode == "exact") return NumericMode::Exact;
    if (mode == "float") return NumericMode::Float64;
    throw TraceError("unknown trace mode: " + mode);
}

template <typename Num>
PivotTrace<Num> parse_trace(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<json> lines;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw TraceError("trace contains a malformed JSON line");
        lines.push_back(std::move(j));
    }
    if (lines.size() < 2) throw TraceError("trace needs a header and a footer");

    const json& header = lines.front();
    if (header.value("format", "") != "fluxmdp-trace-v1")
        throw TraceError("not a fluxmdp trace file");
    if (trace_mode(text) != Numerics<Num>::mode)
        throw TraceError("trace mode does not match the requested numeric type");

    PivotTrace<Num> trace;
    trace.digest = header.at("digest").get<std::string>();
    trace.initial.choice = header.at("initial").get<std::vector<int>>();
    trace.light = header.value("light", false);
    if (header.contains("seed") && header["seed"].is_number_unsigned())
        trace.seed = header["seed"].get<std::uint64_t>();

    for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
        const json& jr = lines[i];
        PivotRecord<Num> rec;
        rec.iteration = jr.at("iteration").get<std::uint64_t>();
        rec.entering = jr.at("entering").get<int>();
        rec.leaving = jr.at("leaving").get<int>();
        rec.state = jr.at("state").get<int>();
        rec.gain = detail::num_from_json<Num>(jr.at("gain"));
        rec.objective_before = detail::num_from_json<Num>(jr.at("objective_before"));
        rec.objective_after = detail::num_from_json<Num>(jr.at("objective_after"));
        if (jr.contains("values_before"))
            rec.values_before = detail::num_array_from<Num>(jr["values_before"]);
        if (jr.contains("values_after"))
            rec.values_after = detail::num_array_from<Num>(jr["values_after"]);
        if (jr.contains("cycle_created") && !jr["cycle_created"].is_null()) {
            const json& jc = jr["cycle_created"];
            CycleEvent ev;
            ev.actions = jc.at("actions").get<std::vector<int>>();
            ev.discount_product = Rational(jc.at("gamma").get<std::string>());
            ev.dominating_action = jc.at("dominator").get<int>();
            ev.dominating_discount = Rational(jc.at("dominator_discount").get<std::string>());
            rec.cycle_created = std::move(ev);
        }
        if (jr.contains("cycles_broken"))
            rec.cycles_broken = jr["cycles_broken"].get<std::vector<std::vector<int>>>();
        trace.records.push_back(std::move(rec));
    }

    const json& footer = lines.back();
    trace.final_policy.choice = footer.at("final_policy").get<std::vector<int>>();
    trace.final_values = detail::num_array_from<Num>(footer.at("final_values"));
    trace.final_objective = detail::num_from_json<Num>(footer.at("final_objective"));
    const std::string term = footer.at("termination").get<std::string>();
    trace.termination = term == "optimal" ? Termination::Optimal : Termination::IterationCap;
    return trace;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

/// Policy files are {"choice": [action ids]}.
inline Policy load_policy(const std::string& path, const Mdp& inst) {
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("choice"))
        throw PolicyError("policy file must be an object with a \"choice\" array");
    Policy pi;
    pi.choice = j["choice"].get<std::vector<int>>();
    validate_policy(inst, pi);
    return pi;
}

inline void save_policy(const std::string& path, const Policy& pi) {
    write_file(path, json{{"choice", pi.choice}}.dump() + "\n");
}

} // namespace fluxmdp
