#define DOCTEST_CONFIG_IMPLEMENT
#include <cstdlib>

#include "doctest.h"

int main(int argc, char** argv) {
    setenv("OPENBLAS_NUM_THREADS", "1", 1);  // keep LAPACK single-threaded and deterministic
    return doctest::Context(argc, argv).run();
}
