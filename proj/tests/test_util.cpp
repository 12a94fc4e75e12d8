#include "chainsim/util.hpp"

#include <doctest.h>

using namespace chainsim;

TEST_CASE("first integer extraction") {
    long long value = 0;
    CHECK(find_first_integer("I order 37 units", value));
    CHECK(value == 37);
    CHECK(find_first_integer("-5 sounds right", value));
    CHECK(value == -5);
    CHECK(find_first_integer("x = 3.5", value));
    CHECK(value == 3);
    CHECK_FALSE(find_first_integer("no idea", value));
    CHECK_FALSE(find_first_integer("", value));
    CHECK(find_first_integer("a-b 12", value));
    CHECK(value == 12);
}

TEST_CASE("marker extraction") {
    long long value = 0;
    CHECK(find_marker_value("...\nTOOL RECOMMENDATION: 10\n...", "TOOL RECOMMENDATION:", value));
    CHECK(value == 10);
    CHECK_FALSE(find_marker_value("nothing here", "TOOL RECOMMENDATION:", value));
}

TEST_CASE("round half up") {
    CHECK(round_half_up(2.5) == 3);
    CHECK(round_half_up(2.4999) == 2);
    CHECK(round_half_up(-2.5) == -2);
    CHECK(round_half_up(0.0) == 0);
}

TEST_CASE("fnv1a64 is stable") {
    CHECK(to_hex(fnv1a64("")) == to_hex(fnv1a64("")));
    CHECK(to_hex(fnv1a64("a")) != to_hex(fnv1a64("b")));
    CHECK(to_hex(fnv1a64("abc")).size() == 16);
}
