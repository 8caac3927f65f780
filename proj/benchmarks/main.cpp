#include <benchmark/benchmark.h>

// The distro's prebuilt benchmark_main archive carries LTO bytecode from a
// different compiler patch level, so the entry point is compiled here.
BENCHMARK_MAIN();
