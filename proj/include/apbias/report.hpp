// Deterministic report emission: fixed key order, floats always printed with
// 10 significant digits, no locale dependence. Reports must be byte-identical
// across runs and worker counts, which rules out default float round-tripping.

#pragma once
#include <cstdint>
#include <string>

namespace apbias {

// "%.10g" rendering of a double.
std::string fmt_g10(double v);

// Minimal JSON string escaping (quotes, backslash, control characters).
std::string json_escape(const std::string& s);

class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array(const std::string& key); // inside an object
    JsonWriter& begin_object_in_array();
    JsonWriter& end_array();
    JsonWriter& field(const std::string& key, const std::string& value);
    JsonWriter& field(const std::string& key, double value);
    JsonWriter& field(const std::string& key, std::uint64_t value);
    JsonWriter& field(const std::string& key, std::int64_t value);
    JsonWriter& field_raw(const std::string& key, const std::string& raw_json);
    const std::string& str() const { return out_; }

private:
    void comma();
    std::string out_;
    bool need_comma_ = false;
};

} // namespace apbias
