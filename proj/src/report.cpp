#include "jetflow/report.hpp"

#include <cstdio>
#include <fstream>

#include "jetflow/errors.hpp"

namespace jetflow {

JsonValue JsonValue::array() {
    JsonValue v;
    v.kind = Kind::Array;
    return v;
}

JsonValue JsonValue::object() {
    JsonValue v;
    v.kind = Kind::Object;
    return v;
}

JsonValue& JsonValue::set(const std::string& key, JsonValue v) {
    members.emplace_back(key, std::move(v));
    return *this;
}

JsonValue& JsonValue::push(JsonValue v) {
    items.push_back(std::move(v));
    return *this;
}

std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void escape_into(const std::string& s, std::string& out) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

void serialize(const JsonValue& v, std::string& out, int depth) {
    const std::string pad(2 * depth, ' ');
    const std::string pad_in(2 * (depth + 1), ' ');
    switch (v.kind) {
        case JsonValue::Kind::Null: out += "null"; break;
        case JsonValue::Kind::Bool: out += v.boolean ? "true" : "false"; break;
        case JsonValue::Kind::Int: out += std::to_string(v.integer); break;
        case JsonValue::Kind::Double: out += format_double(v.number); break;
        case JsonValue::Kind::String: escape_into(v.text, out); break;
        case JsonValue::Kind::Array: {
            if (v.items.empty()) {
                out += "[]";
                break;
            }
            out += "[\n";
            for (std::size_t i = 0; i < v.items.size(); ++i) {
                out += pad_in;
                serialize(v.items[i], out, depth + 1);
                if (i + 1 < v.items.size()) out += ',';
                out += '\n';
            }
            out += pad + "]";
            break;
        }
        case JsonValue::Kind::Object: {
            if (v.members.empty()) {
                out += "{}";
                break;
            }
            out += "{\n";
            for (std::size_t i = 0; i < v.members.size(); ++i) {
                out += pad_in;
                escape_into(v.members[i].first, out);
                out += ": ";
                serialize(v.members[i].second, out, depth + 1);
                if (i + 1 < v.members.size()) out += ',';
                out += '\n';
            }
            out += pad + "}";
            break;
        }
    }
}

}  // namespace

std::string to_json(const JsonValue& v) {
    std::string out;
    serialize(v, out, 0);
    out += '\n';
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path);
    f << content;
    if (!f) throw Error("write failed: " + path);
}

void write_csv_file(const std::string& path, const std::vector<std::string>& columns,
                    const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out += columns[i];
        out += (i + 1 < columns.size()) ? "," : "\n";
    }
    for (const auto& row : rows) {
        if (row.size() != columns.size()) throw Error("csv row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += format_double(row[i]);
            out += (i + 1 < row.size()) ? "," : "\n";
        }
    }
    write_text_file(path, out);
}

}  // namespace jetflow
