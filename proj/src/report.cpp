#include "apbias/report.hpp"

#include <cstdio>

namespace apbias {

std::string fmt_g10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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
    return out;
}

void JsonWriter::comma() {
    if (need_comma_) out_ += ",";
    need_comma_ = false;
}

JsonWriter& JsonWriter::begin_object() {
    comma();
    out_ += "{";
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += "}";
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::begin_array(const std::string& key) {
    comma();
    out_ += "\"" + json_escape(key) + "\":[";
    return *this;
}

JsonWriter& JsonWriter::begin_object_in_array() {
    comma();
    out_ += "{";
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += "]";
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, const std::string& value) {
    comma();
    out_ += "\"" + json_escape(key) + "\":\"" + json_escape(value) + "\"";
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, double value) {
    comma();
    out_ += "\"" + json_escape(key) + "\":" + fmt_g10(value);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, std::uint64_t value) {
    comma();
    out_ += "\"" + json_escape(key) + "\":" + std::to_string(value);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, std::int64_t value) {
    comma();
    out_ += "\"" + json_escape(key) + "\":" + std::to_string(value);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::field_raw(const std::string& key, const std::string& raw_json) {
    comma();
    out_ += "\"" + json_escape(key) + "\":" + raw_json;
    need_comma_ = true;
    return *this;
}

} // namespace apbias
