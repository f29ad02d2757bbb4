// Writes the C++-side interchange fixtures: make_fixtures <dir>

#include <filesystem>
#include <iostream>

#include "fixture_data.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  rdb::io::write_artifact(fixtures::grid(), dir / "cpp_grid.rcb");
  rdb::io::write_artifact(fixtures::cloud(), dir / "cpp_cloud.rcb");
  rdb::io::write_artifact(fixtures::cube(), dir / "cpp_cube.rcb");
  rdb::io::write_artifact(fixtures::rdc(), dir / "cpp_rdc.rcb");
  rdb::io::write_artifact(fixtures::adc(), dir / "cpp_adc.rcb");
  return 0;
}
