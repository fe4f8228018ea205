#pragma once

// Text output shared by the library emitters and the CLI: every float is
// written with 17 significant digits, files are UTF-8 with LF endings.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace equishrink::io {

/// "%.17g"; non-finite values become "inf", "-inf" or "nan".
std::string format_double(double v);

/// Minimal streaming JSON writer. Keys and values are written in call order;
/// the caller is responsible for well-formed nesting.
class JsonWriter {
 public:
  explicit JsonWriter(std::ostream& out, int indent = 2);

  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);

  JsonWriter& value(double v);  // non-finite values are written as null
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(std::string_view v);
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }
  JsonWriter& null();
  JsonWriter& value(const std::vector<double>& v);

  template <class T>
  JsonWriter& field(std::string_view k, const T& v) {
    key(k);
    return value(v);
  }

 private:
  void before_value();
  void newline();

  std::ostream& out_;
  int indent_;
  struct Level {
    bool is_object;
    bool empty;
  };
  std::vector<Level> stack_;
  bool after_key_ = false;
};

std::string json_escape(std::string_view s);

/// Quotes a CSV field when it contains a separator, quote or newline.
std::string csv_field(std::string_view s);

}  // namespace equishrink::io

namespace equishrink {
/// Library version string (from the build).
const char* version();
}  // namespace equishrink
