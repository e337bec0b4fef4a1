#include "ejspec/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdint>

namespace ejspec {

namespace {

constexpr double kMaxAsymmetry = 1e-12;

const char* kind_name(FactorKind kind) {
    switch (kind) {
        case FactorKind::Diagonal: return "diag";
        case FactorKind::Sym: return "sym";
        case FactorKind::Spin: return "spin";
    }
    return "?";
}

FactorKind kind_from_name(const std::string& name) {
    if (name == "diag") return FactorKind::Diagonal;
    if (name == "sym") return FactorKind::Sym;
    if (name == "spin") return FactorKind::Spin;
    throw ValidationError("unknown factor kind '" + name + "'");
}

double number_at(const nlohmann::json& node, const char* what) {
    if (!node.is_number()) throw ValidationError(std::string(what) + ": expected a number");
    return node.get<double>();
}

void write_escaped(const std::string& text, std::string& out) {
    out += '"';
    for (char ch : text) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    out += '"';
}

void write_node(const nlohmann::json& node, int indent, int depth, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    switch (node.type()) {
        case nlohmann::json::value_t::null:
            out += "null";
            break;
        case nlohmann::json::value_t::boolean:
            out += node.get<bool>() ? "true" : "false";
            break;
        case nlohmann::json::value_t::number_integer: {
            out += std::to_string(node.get<std::int64_t>());
            break;
        }
        case nlohmann::json::value_t::number_unsigned: {
            out += std::to_string(node.get<std::uint64_t>());
            break;
        }
        case nlohmann::json::value_t::number_float: {
            double value = node.get<double>();
            if (!std::isfinite(value)) {
                out += "null";
                break;
            }
            if (value == 0.0) value = 0.0;  // drop the sign of negative zero
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", value);
            out += buf;
            break;
        }
        case nlohmann::json::value_t::string:
            write_escaped(node.get<std::string>(), out);
            break;
        case nlohmann::json::value_t::array: {
            if (node.empty()) {
                out += "[]";
                break;
            }
            out += "[\n";
            for (std::size_t i = 0; i < node.size(); ++i) {
                out += pad_in;
                write_node(node[i], indent, depth + 1, out);
                if (i + 1 < node.size()) out += ',';
                out += '\n';
            }
            out += pad + "]";
            break;
        }
        case nlohmann::json::value_t::object: {
            if (node.empty()) {
                out += "{}";
                break;
            }
            out += "{\n";
            std::size_t i = 0;
            for (auto it = node.begin(); it != node.end(); ++it, ++i) {
                out += pad_in;
                write_escaped(it.key(), out);
                out += ": ";
                write_node(it.value(), indent, depth + 1, out);
                if (i + 1 < node.size()) out += ',';
                out += '\n';
            }
            out += pad + "}";
            break;
        }
        default:
            throw ValidationError("unsupported JSON value type");
    }
}

}  // namespace

nlohmann::json element_to_json(const Element& x) {
    nlohmann::json algebra = nlohmann::json::array();
    nlohmann::json parts = nlohmann::json::array();
    for (int f = 0; f < x.algebra().factor_count(); ++f) {
        const Factor& factor = x.algebra().factors()[f];
        algebra.push_back({{"kind", kind_name(factor.kind)}, {"n", factor.n}});
        auto data = x.part(f);
        switch (factor.kind) {
            case FactorKind::Diagonal: {
                parts.push_back(std::vector<double>(data.begin(), data.end()));
                break;
            }
            case FactorKind::Sym: {
                nlohmann::json rows = nlohmann::json::array();
                for (int i = 0; i < factor.n; ++i) {
                    std::vector<double> row(factor.n);
                    for (int j = 0; j < factor.n; ++j) row[j] = x.sym_at(f, i, j);
                    rows.push_back(row);
                }
                parts.push_back(rows);
                break;
            }
            case FactorKind::Spin: {
                parts.push_back({{"x0", data[0]},
                                 {"xbar", std::vector<double>(data.begin() + 1, data.end())}});
                break;
            }
        }
    }
    return {{"algebra", algebra}, {"parts", parts}};
}

Element element_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("algebra") || !doc.contains("parts"))
        throw ValidationError("element: expected {\"algebra\": [...], \"parts\": [...]}");
    const auto& algebra_node = doc["algebra"];
    const auto& parts_node = doc["parts"];
    if (!algebra_node.is_array() || !parts_node.is_array() ||
        algebra_node.size() != parts_node.size() || algebra_node.empty())
        throw ValidationError("element: algebra and parts must be matching nonempty arrays");

    std::vector<Factor> factors;
    for (const auto& entry : algebra_node) {
        if (!entry.is_object() || !entry.contains("kind") || !entry.contains("n"))
            throw ValidationError("element: each factor needs \"kind\" and \"n\"");
        factors.push_back({kind_from_name(entry["kind"].get<std::string>()),
                           entry["n"].get<int>()});
    }
    Element x((AlgebraDescriptor(factors)));

    for (int f = 0; f < static_cast<int>(factors.size()); ++f) {
        const Factor& factor = factors[f];
        const auto& part = parts_node[f];
        switch (factor.kind) {
            case FactorKind::Diagonal: {
                if (!part.is_array() || static_cast<int>(part.size()) != factor.n)
                    throw ValidationError("element: diag part has wrong length");
                for (int i = 0; i < factor.n; ++i) x.part(f)[i] = number_at(part[i], "diag part");
                break;
            }
            case FactorKind::Sym: {
                if (!part.is_array() || static_cast<int>(part.size()) != factor.n)
                    throw ValidationError("element: sym part has wrong row count");
                std::vector<double> full(factor.n * factor.n);
                for (int i = 0; i < factor.n; ++i) {
                    const auto& row = part[i];
                    if (!row.is_array() || static_cast<int>(row.size()) != factor.n)
                        throw ValidationError("element: sym part has wrong column count");
                    for (int j = 0; j < factor.n; ++j)
                        full[i * factor.n + j] = number_at(row[j], "sym part");
                }
                for (int i = 0; i < factor.n; ++i)
                    for (int j = 0; j < i; ++j)
                        if (std::abs(full[i * factor.n + j] - full[j * factor.n + i]) >
                            kMaxAsymmetry)
                            throw ValidationError("element: sym part is not symmetric");
                for (int i = 0; i < factor.n; ++i)
                    for (int j = 0; j <= i; ++j) x.sym_set(f, i, j, full[i * factor.n + j]);
                break;
            }
            case FactorKind::Spin: {
                if (!part.is_object() || !part.contains("x0") || !part.contains("xbar"))
                    throw ValidationError("element: spin part needs \"x0\" and \"xbar\"");
                const auto& xbar = part["xbar"];
                if (!xbar.is_array() || static_cast<int>(xbar.size()) != factor.n - 1)
                    throw ValidationError("element: spin xbar has wrong length");
                x.part(f)[0] = number_at(part["x0"], "spin x0");
                for (int k = 1; k < factor.n; ++k)
                    x.part(f)[k] = number_at(xbar[k - 1], "spin xbar");
                break;
            }
        }
    }
    return x;
}

nlohmann::json frame_to_json(const JordanFrame& frame) {
    nlohmann::json out = nlohmann::json::array();
    for (const Element& c : frame.idempotents) out.push_back(element_to_json(c));
    return out;
}

JordanFrame frame_from_json(const nlohmann::json& doc) {
    if (!doc.is_array() || doc.empty())
        throw ValidationError("frame: expected a nonempty array of elements");
    JordanFrame frame;
    for (const auto& entry : doc) frame.idempotents.push_back(element_from_json(entry));
    for (const Element& c : frame.idempotents)
        if (!(c.algebra() == frame.idempotents[0].algebra()))
            throw ValidationError("frame: idempotents live in different algebras");
    return frame;
}

std::string dump_json(const nlohmann::json& doc, int indent) {
    std::string out;
    write_node(doc, indent, 0, out);
    out += '\n';
    return out;
}

}  // namespace ejspec
