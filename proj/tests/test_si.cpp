#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ampkit/si.hpp"

using namespace ampkit;

TEST_CASE("si suffixes decode bit-exactly") {
  CHECK(*parse_si("10p") == 10.0 * 1e-12);
  CHECK(*parse_si("1Meg") == 1e6 * *parse_si("1"));
  CHECK(*parse_si("1f") == 1e-15);
  CHECK(*parse_si("2.5n") == 2.5 * 1e-9);
  CHECK(*parse_si("10u") == 10.0 * 1e-6);
  CHECK(*parse_si("3m") == 3.0 * 1e-3);
  CHECK(*parse_si("4k") == 4.0 * 1e3);
  CHECK(*parse_si("10Meg") == 10.0 * 1e6);
  CHECK(*parse_si("1G") == 1e9);
}

TEST_CASE("plain numbers pass through") {
  CHECK(*parse_si("1e-11") == 1e-11);
  CHECK(*parse_si("-3.5") == -3.5);
  CHECK(*parse_si("0.5") == 0.5);
}

TEST_CASE("malformed inputs are rejected") {
  CHECK(!parse_si(""));
  CHECK(!parse_si("abc"));
  CHECK(!parse_si("1x"));
  CHECK(!parse_si("1MEG"));  // suffixes are case-sensitive
  CHECK(!parse_si("1 k"));
}

TEST_CASE("format_number round-trips") {
  for (double v : {1e-11, 1.2345678901234567e-5, 6.28e8, 42.0, 1.8}) {
    CHECK(*parse_si(format_number(v)) == v);
  }
}
