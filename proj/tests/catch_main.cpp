// Compiles the amalgamated Catch2 implementation (including its default
// main) exactly once; every test binary links this object library.
#include <catch2/catch_amalgamated.cpp>
