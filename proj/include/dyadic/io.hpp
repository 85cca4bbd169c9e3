#pragma once

// JSON forms:
//   StepFunction  {"breakpoints":[0,...,1],"values":[...]}
//   LeafFunction  {"arity":a,"depth":d,"values":[...]}   (depth-first leaf order)
//   NodeSet       {"leaves":[indices]}
//   AuditReport   {"seed":s,"complete":b,"passed":b,"suites":[{suite,cases,violations,worst_margin,seed}]}

#include "dyadic/audit.hpp"
#include "dyadic/step_function.hpp"
#include "dyadic/tree.hpp"

#include <json.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace dyadic {

using json = nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        throw ConstraintError(std::string("missing JSON field \"") + key + "\"");
    return j.at(key);
}

template <typename T>
T read(const json& j, const char* key)
{
    try {
        return require(j, key).get<T>();
    } catch (const json::exception& e) {
        throw ConstraintError(std::string("bad JSON field \"") + key + "\": " + e.what());
    }
}

} // namespace detail

inline json to_json(const StepFunction& g)
{
    return {{"breakpoints", g.breakpoints()}, {"values", g.values()}};
}

inline StepFunction step_function_from_json(const json& j)
{
    return {detail::read<std::vector<double>>(j, "breakpoints"), detail::read<std::vector<double>>(j, "values")};
}

inline json to_json(const LeafFunction& phi)
{
    return {{"arity", phi.tree().arity()}, {"depth", phi.tree().depth()}, {"values", phi.values()}};
}

inline LeafFunction leaf_function_from_json(const json& j)
{
    const Tree tree(detail::read<int>(j, "arity"), detail::read<int>(j, "depth"));
    return {tree, detail::read<std::vector<double>>(j, "values")};
}

inline json to_json(const NodeSet& k) { return {{"leaves", k.members()}}; }

inline NodeSet node_set_from_json(const json& j, const Tree& tree)
{
    return NodeSet::from_leaves(tree, detail::read<std::vector<std::size_t>>(j, "leaves"));
}

inline json to_json(const SuiteResult& r)
{
    return {{"suite", r.suite},
            {"cases", r.cases},
            {"violations", r.violations},
            {"worst_margin", std::isfinite(r.worst_margin) ? json(r.worst_margin) : json(nullptr)},
            {"seed", r.seed}};
}

inline json to_json(const AuditReport& report)
{
    json suites = json::array();
    for (const auto& s : report.suites)
        suites.push_back(to_json(s));
    return {{"seed", report.seed},
            {"complete", report.complete},
            {"passed", report.passed()},
            {"violations", report.violations()},
            {"suites", std::move(suites)}};
}

} // namespace dyadic
