#include <doctest.h>

#include <string>

#include "nlcb/config.hpp"

using namespace nlcb;

namespace {

Config parse(const std::string& text) { return Config::parse_string(text, "test.toml"); }

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

} // namespace

TEST_CASE("values of every kind parse") {
  const Config cfg = parse("# experiment\n"
                           "[geometry]\n"
                           "elements = 40   # mesh\n"
                           "length = 1e-1\n"
                           "label = \"flat # beam\"\n"
                           "curved = false\n"
                           "cuts = [0.25, 0.5, 0.75]\n"
                           "names = [\"a\", \"b\"]\n"
                           "\n"
                           "[load]\n"
                           "frequency = \"f1\"\n"
                           "amplitude = -2.5e3\n");
  CHECK(cfg.integer("geometry", "elements") == 40);
  CHECK(cfg.number("geometry", "length") == 0.1);
  CHECK(cfg.str("geometry", "label") == "flat # beam");
  CHECK(cfg.boolean("geometry", "curved") == false);
  CHECK(cfg.numbers("geometry", "cuts") == std::vector<double>{0.25, 0.5, 0.75});
  CHECK(cfg.strings("geometry", "names") == std::vector<std::string>{"a", "b"});
  CHECK(cfg.number("load", "amplitude") == -2500.0);
  CHECK(cfg.kind("load", "frequency") == Config::Value::Kind::String);

  CHECK(cfg.sections() == std::vector<std::string>{"geometry", "load"});
  CHECK(cfg.has("geometry", "elements"));
  CHECK(!cfg.has("geometry", "missing"));
  CHECK(cfg.number("geometry", "missing", 7.5) == 7.5);
  CHECK(cfg.str("load", "shape", "sine") == "sine");
  CHECK(cfg.boolean("load", "flag", true) == true);
}

TEST_CASE("diagnostics carry file and line") {
  CHECK(error_of("[a]\nx = 1\nx = 2\n").find("test.toml:3") != std::string::npos);
  CHECK(error_of("x = 1\n").find("test.toml:1") != std::string::npos);
  CHECK(error_of("[a]\ny = \n").find("test.toml:2") != std::string::npos);
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS_AS(parse("[a\nx = 1\n"), ConfigError);          // unterminated header
  CHECK_THROWS_AS(parse("[a]\nx 1\n"), ConfigError);           // missing equals
  CHECK_THROWS_AS(parse("[a]\nx = 1q\n"), ConfigError);        // trailing junk in number
  CHECK_THROWS_AS(parse("[a]\nx = \"open\n"), ConfigError);    // unterminated string
  CHECK_THROWS_AS(parse("[a]\nx = [1, 2\n"), ConfigError);     // unterminated array
  CHECK_THROWS_AS(parse("[a]\nx = [[1]]\n"), ConfigError);     // nested array
  CHECK_THROWS_AS(parse("[a]\n[a]\nx = 1\n"), ConfigError);    // duplicate section
  CHECK_THROWS_AS(parse("x = 1\n[a]\n"), ConfigError);         // key outside any section
  CHECK_THROWS_AS(parse("[a]\nx = tru\n"), ConfigError);       // almost a bool
  CHECK_THROWS_AS(parse("[a b]\nx = 1\n"), ConfigError);       // bad section name
  CHECK_THROWS_AS(parse("[a]\nx y = 1\n"), ConfigError);       // bad key name
}

TEST_CASE("type mismatches are errors") {
  const Config cfg = parse("[a]\nx = 1.5\ns = \"hi\"\nv = [1, 2]\n");
  CHECK_THROWS_AS((void)cfg.str("a", "x"), ConfigError);
  CHECK_THROWS_AS((void)cfg.number("a", "s"), ConfigError);
  CHECK_THROWS_AS((void)cfg.boolean("a", "x"), ConfigError);
  CHECK_THROWS_AS((void)cfg.integer("a", "x"), ConfigError);  // 1.5 is not integral
  CHECK_THROWS_AS((void)cfg.numbers("a", "s"), ConfigError);
  CHECK_THROWS_AS((void)cfg.strings("a", "v"), ConfigError);
  CHECK_THROWS_AS((void)cfg.number("a", "missing"), ConfigError);
  CHECK_THROWS_AS((void)cfg.number("b", "x"), ConfigError);
}

TEST_CASE("escapes and whitespace") {
  const Config cfg = parse("[s]\n"
                           "quoted = \"a \\\"b\\\" \\\\ c\"\n"
                           "  indented = 3\n"
                           "spaced=4\n");
  CHECK(cfg.str("s", "quoted") == "a \"b\" \\ c");
  CHECK(cfg.integer("s", "indented") == 3);
  CHECK(cfg.integer("s", "spaced") == 4);
  CHECK(cfg.keys("s") == std::vector<std::string>{"quoted", "indented", "spaced"});
}
