#ifndef JETFLOW_REPORT_HPP
#define JETFLOW_REPORT_HPP

#include <string>
#include <utility>
#include <vector>

namespace jetflow {

// Insertion-ordered JSON value with fixed 17-significant-digit float
// formatting, so identical runs serialize byte-identically.
struct JsonValue {
    enum class Kind { Null, Bool, Int, Double, String, Array, Object };
    Kind kind = Kind::Null;

    bool boolean = false;
    long long integer = 0;
    double number = 0.0;
    std::string text;
    std::vector<JsonValue> items;
    std::vector<std::pair<std::string, JsonValue>> members;

    JsonValue() = default;
    JsonValue(bool v) : kind(Kind::Bool), boolean(v) {}
    JsonValue(int v) : kind(Kind::Int), integer(v) {}
    JsonValue(long long v) : kind(Kind::Int), integer(v) {}
    JsonValue(unsigned long long v) : kind(Kind::Int), integer(static_cast<long long>(v)) {}
    JsonValue(double v) : kind(Kind::Double), number(v) {}
    JsonValue(const char* v) : kind(Kind::String), text(v) {}
    JsonValue(std::string v) : kind(Kind::String), text(std::move(v)) {}

    static JsonValue array();
    static JsonValue object();

    JsonValue& set(const std::string& key, JsonValue v);  // object member
    JsonValue& push(JsonValue v);                         // array element
};

std::string format_double(double v);  // %.17g
std::string to_json(const JsonValue& v);

void write_text_file(const std::string& path, const std::string& content);

// CSV with a mandatory header row and %.17g cells.
void write_csv_file(const std::string& path, const std::vector<std::string>& columns,
                    const std::vector<std::vector<double>>& rows);

}  // namespace jetflow

#endif
