#pragma once

#include <string>

#include <json.hpp>

#include "ejspec/algebra.hpp"

namespace ejspec {

// Element wire format:
//   {"algebra": [{"kind":"sym","n":2}, {"kind":"spin","n":3}, {"kind":"diag","n":4}],
//    "parts":   [[[...],[...]], {"x0":..., "xbar":[...]}, [...]]}
// Sym parts are row-major full matrices; symmetry is validated at load with a
// maximum asymmetry of 1e-12 and the lower triangle is authoritative.
nlohmann::json element_to_json(const Element& x);
Element element_from_json(const nlohmann::json& doc);

nlohmann::json frame_to_json(const JordanFrame& frame);
JordanFrame frame_from_json(const nlohmann::json& doc);

// Serializes with every floating value printed to 17 significant digits, so
// output bytes are reproducible and round-trip exactly.
std::string dump_json(const nlohmann::json& doc, int indent = 2);

}  // namespace ejspec
