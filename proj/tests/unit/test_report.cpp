#include <cmath>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "kcut/errors.hpp"
#include "kcut/report.hpp"

using namespace kcut;

TEST_CASE("reals print with 17 significant digits") {
  CHECK(report::format_real(0.1) == "0.10000000000000001");
  CHECK(report::format_real(1.0) == "1");
  CHECK(report::format_real(-2.5e-300) == "-2.5e-300");
  CHECK(report::format_real(1.0 / 3.0) == "0.33333333333333331");
  CHECK(report::format_real(NAN) == "nan");
  CHECK(report::format_real(HUGE_VAL) == "inf");
  CHECK(report::format_real(-HUGE_VAL) == "-inf");
}

TEST_CASE("JSON writer output parses back") {
  report::JsonWriter w;
  w.begin_object();
  w.key("name").value("a \"quoted\"\nline");
  w.key("x").value(0.1);
  w.key("bad").value(NAN);
  w.key("list").begin_array().value(1).value(std::uint64_t{18446744073709551615u}).end_array();
  w.key("empty").begin_object().end_object();
  w.key("flag").value(true);
  w.end_object();
  const auto j = nlohmann::json::parse(w.str());
  CHECK(j["name"] == "a \"quoted\"\nline");
  CHECK(j["x"].get<double>() == 0.1);
  CHECK(j["bad"].is_null());
  CHECK(j["list"][1].get<std::uint64_t>() == 18446744073709551615u);
  CHECK(j["empty"].empty());
  CHECK(j["flag"] == true);
}

TEST_CASE("write_file reports unwritable paths") {
  CHECK_THROWS_AS(report::write_file("/nonexistent-dir/x.csv", "a"), ConfigError);
}
