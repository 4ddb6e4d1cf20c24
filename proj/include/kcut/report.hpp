#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kcut::report {

// Shortest-safe text form with 17 significant digits; non-finite values
// render as nan, inf, -inf.
std::string format_real(double v);

// Small streaming JSON emitter.  Reals are written with format_real so that
// output is stable across platforms; non-finite reals become null.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view name);

  JsonWriter& value(double v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
  JsonWriter& value(bool v);
  JsonWriter& value(std::string_view v);
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }
  JsonWriter& null();

  const std::string& str() const { return out_; }

 private:
  void open(char bracket);
  void close(char bracket);
  void before_value();
  void newline();

  std::string out_;
  std::vector<bool> empty_;
  bool after_key_ = false;
};

// Writes text to path with LF line endings untouched; throws ConfigError on I/O failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace kcut::report
