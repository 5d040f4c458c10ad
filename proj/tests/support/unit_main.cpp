#include <gtest/gtest.h>

#include "test_support.hpp"

int main(int argc, char** argv) {
  testing_support::use_fixture_path();
  ::testing::InitGoogleTest(&argc, argv);
  return RUN_ALL_TESTS();
}
