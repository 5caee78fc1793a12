#pragma once

#include "helpers.hpp"

#include <doctest.h>

#include <cstdlib>

namespace test {

// Compares `actual` with fixtures/golden/<name>. With UPDATE_GOLDEN=1 in the
// environment the file is (re)written instead.
inline void check_golden(const std::string& name, const std::string& actual) {
  const auto path = fixture_path("golden") / name;
  if (const char* update = std::getenv("UPDATE_GOLDEN"); update && std::string(update) == "1") {
    std::filesystem::create_directories(path.parent_path());
    write_file(path, actual);
    MESSAGE("wrote golden file " << path.string());
    return;
  }
  REQUIRE_MESSAGE(std::filesystem::exists(path), "missing golden file " << path.string());
  CHECK(read_file(path) == actual);
}

}  // namespace test
