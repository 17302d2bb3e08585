#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "chainlp/error.hpp"
#include "chainlp/model.hpp"
#include "chainlp/oracle.hpp"
#include "chainlp/reduction.hpp"

// Instance files and reports.
//
// An instance file is a JSON object in exactly one of two forms:
//
//     {"q": [...], "B": b, "C": c}      mechanism form (types in any order)
//     {"q": [...], "z": [...], "K": k}  LP form (q sorted)
//
// plus optional "name" and "seed".  Every number may be a JSON number or a
// string holding an exact rational ("3/4") or decimal ("0.1").  Strings are
// parsed exactly for the oracle; JSON numbers are taken at their binary
// value.

namespace chainlp::io {

using Json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

struct Number {
    double value = 0.0;
    oracle::Rational exact;
};

struct MechanismForm {
    std::vector<Number> q;
    Number B;
    Number C;
};

struct LpForm {
    std::vector<Number> q;
    std::vector<Number> z;
    Number K;
};

struct InstanceFile {
    std::optional<std::string> name;
    std::optional<std::uint64_t> seed;
    std::variant<MechanismForm, LpForm> body;

    bool is_mechanism() const { return std::holds_alternative<MechanismForm>(body); }
};

inline Number parse_number(const Json& j, const std::string& what) {
    Number n;
    if (j.is_string()) {
        n.exact = oracle::parse_rational(j.get<std::string>());
        n.value = n.exact.get_d();
    } else if (j.is_number()) {
        n.value = j.get<double>();
        if (!std::isfinite(n.value))
            throw Error(ErrorCode::InvalidArgument, what + " is not finite");
        n.exact = oracle::Rational(n.value);
    } else {
        throw Error(ErrorCode::InvalidArgument, what + " must be a number or a rational string");
    }
    return n;
}

inline std::vector<Number> parse_array(const Json& j, const std::string& what) {
    if (!j.is_array())
        throw Error(ErrorCode::InvalidArgument, what + " must be an array");
    std::vector<Number> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(parse_number(j[i], what + "[" + std::to_string(i) + "]"));
    return out;
}

inline InstanceFile parse_instance(const Json& j) {
    if (!j.is_object())
        throw Error(ErrorCode::InvalidArgument, "instance must be a JSON object");
    const bool mech = j.contains("B") || j.contains("C");
    const bool lp = j.contains("z") || j.contains("K");
    if (mech == lp)
        throw Error(ErrorCode::InvalidArgument, "instance must contain exactly one of {B, C} or {z, K}");
    if (!j.contains("q"))
        throw Error(ErrorCode::InvalidArgument, "instance is missing q");

    InstanceFile file;
    if (j.contains("name"))
        file.name = j.at("name").get<std::string>();
    if (j.contains("seed"))
        file.seed = j.at("seed").get<std::uint64_t>();
    auto need = [&](const char* key) -> const Json& {
        if (!j.contains(key))
            throw Error(ErrorCode::InvalidArgument, std::string("instance is missing ") + key);
        return j.at(key);
    };
    if (mech)
        file.body = MechanismForm{parse_array(j.at("q"), "q"), parse_number(need("B"), "B"), parse_number(need("C"), "C")};
    else
        file.body = LpForm{parse_array(j.at("q"), "q"), parse_array(need("z"), "z"), parse_number(need("K"), "K")};
    return file;
}

inline InstanceFile read_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open instance file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, "'" + path + "' is not valid JSON: " + e.what());
    }
    return parse_instance(j);
}

inline std::vector<double> values(const std::vector<Number>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& n : v)
        out.push_back(n.value);
    return out;
}

inline MechanismInstance to_mechanism(const MechanismForm& m) {
    return MechanismInstance(values(m.q), m.B.value, m.C.value);
}

inline LpInstance to_lp(const LpForm& f) { return validate(values(f.q), values(f.z), f.K.value); }

/// Exact LP for the oracle; mechanism types are sorted in the same order as
/// `mech` and their weights derived in rationals.
inline oracle::RationalInstance exact_lp(const MechanismForm& m, const MechanismInstance& mech) {
    oracle::RationalInstance r;
    for (std::size_t k : mech.original_order())
        r.q.push_back(m.q[k].exact);
    r.z = oracle::budget_weights(r.q);
    r.K = m.B.exact / m.C.exact;
    return r;
}

inline oracle::RationalInstance exact_lp(const LpForm& f) {
    oracle::RationalInstance r;
    for (const auto& n : f.q)
        r.q.push_back(n.exact);
    for (const auto& n : f.z)
        r.z.push_back(n.exact);
    r.K = f.K.exact;
    return r;
}

/// 17 significant digits, enough to round-trip any double.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void write_json(std::ostream& os, const Json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
    case Json::value_t::number_float:
        os << format_number(j.get<double>());
        break;
    case Json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            break;
        }
        // Arrays of scalars stay on one line.
        bool flat = true;
        for (const auto& e : j)
            flat = flat && !e.is_structured();
        os << '[';
        bool first = true;
        for (const auto& e : j) {
            os << (first ? "" : ",");
            if (flat)
                os << (first ? "" : " ");
            else
                os << '\n' << pad;
            write_json(os, e, indent, depth + 1);
            first = false;
        }
        if (!flat)
            os << '\n' << close_pad;
        os << ']';
        break;
    }
    case Json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            break;
        }
        os << '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            os << (first ? "\n" : ",\n") << pad << Json(it.key()).dump() << ": ";
            write_json(os, it.value(), indent, depth + 1);
            first = false;
        }
        os << '\n' << close_pad << '}';
        break;
    }
    default:
        os << j.dump();
    }
}

} // namespace detail

inline void write_json(std::ostream& os, const Json& j) {
    detail::write_json(os, j, 2, 0);
    os << '\n';
}

inline std::string to_string(const Json& j) {
    std::ostringstream os;
    write_json(os, j);
    return os.str();
}

inline Json to_json(std::span<const double> v) {
    Json a = Json::array();
    for (double x : v)
        a.push_back(x);
    return a;
}

inline Json to_json(const RewardSchedule& f) {
    Json a = Json::array();
    for (const auto& bp : f.breakpoints())
        a.push_back(Json{{"threshold", bp.threshold}, {"level", bp.level}});
    return a;
}

/// Agent indices are reported in caller order.
inline Json to_json(const IncentiveReport& r, const MechanismInstance& mech) {
    Json agents = Json::array();
    for (const auto& a : r.agents) {
        agents.push_back(Json{{"agent", mech.original_order()[a.agent]},
                              {"passed", a.passed},
                              {"quality", a.target},
                              {"utility", a.target_utility},
                              {"best_deviation", a.best_deviation},
                              {"deviation_utility", a.deviation_utility}});
    }
    return Json{{"passed", r.passed()},
                {"total_reward", r.total_reward},
                {"budget_ok", r.budget_ok},
                {"nonnegative", r.nonnegative},
                {"agents", std::move(agents)}};
}

} // namespace chainlp::io
