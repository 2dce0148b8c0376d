#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sympd/polynomial.hpp"

namespace sympd {

// Term-list wire format, bit-exact reproducible:
//   [{"c":"<int>" or "<p>/<q>","e":[<exp per var>]}, ...]
// Terms appear in the canonical (descending grlex) order, coefficients in
// lowest terms with the denominator written only when it is not 1.

inline nlohmann::ordered_json terms_to_json(const Polynomial& p) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& t : p.terms()) {
        nlohmann::ordered_json term;
        term["c"] = to_string(t.coeff);
        nlohmann::ordered_json exps = nlohmann::ordered_json::array();
        for (std::size_t v = 0; v < p.arena().size(); ++v) exps.push_back(t.mono[v]);
        term["e"] = std::move(exps);
        arr.push_back(std::move(term));
    }
    return arr;
}

inline Polynomial terms_from_json(const nlohmann::json& arr, const VariableArena& arena) {
    if (!arr.is_array()) throw std::invalid_argument("poly parse: term list is not an array");
    std::vector<Polynomial::Term> terms;
    terms.reserve(arr.size());
    for (const auto& item : arr) {
        if (!item.is_object() || !item.contains("c") || !item.contains("e"))
            throw std::invalid_argument("poly parse: term must be {\"c\":...,\"e\":[...]}");
        Rational c = parse_rational(item.at("c").get<std::string>());
        if (c == 0) throw std::invalid_argument("poly parse: zero coefficient stored");
        const auto& exps = item.at("e");
        if (!exps.is_array() || exps.size() != arena.size())
            throw std::invalid_argument("poly parse: exponent list does not match arena size");
        Monomial m(arena.size());
        for (std::size_t v = 0; v < arena.size(); ++v) {
            const auto& e = exps.at(v);
            if (!e.is_number_unsigned()) throw std::invalid_argument("poly parse: exponent must be a non-negative integer");
            m.set(v, e.get<unsigned>());
        }
        terms.push_back({m, std::move(c)});
    }
    return Polynomial::from_terms(arena, std::move(terms));
}

inline std::string poly_serialize(const Polynomial& p) { return terms_to_json(p).dump(); }

inline Polynomial poly_parse(const std::string& text, const VariableArena& arena) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("poly parse: malformed JSON: ") + e.what());
    }
    return terms_from_json(j, arena);
}

/// Standalone polynomial document: {"vars":[...],"terms":[...]}.
inline std::string poly_serialize_with_header(const Polynomial& p) {
    nlohmann::ordered_json doc;
    doc["vars"] = p.arena().names();
    doc["terms"] = terms_to_json(p);
    return doc.dump();
}

inline Polynomial poly_parse_with_header(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("poly parse: malformed JSON: ") + e.what());
    }
    if (!j.contains("vars") || !j.contains("terms"))
        throw std::invalid_argument("poly parse: document needs \"vars\" and \"terms\"");
    VariableArena arena(j.at("vars").get<std::vector<std::string>>());
    return terms_from_json(j.at("terms"), arena);
}

}  // namespace sympd
