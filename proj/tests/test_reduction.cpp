#include <catch2/catch_amalgamated.hpp>

#include "cgmd/cgmd.hpp"

TEST_CASE("placeholder test_reduction") { CHECK(true); }
