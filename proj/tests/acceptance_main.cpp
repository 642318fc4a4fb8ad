#include <iostream>

#include "heatlands/acceptance.hpp"
#include "heatlands/io.hpp"

int main(int argc, char** argv) {
  heatlands::AcceptanceOptions opts;
  auto rep = heatlands::run_acceptance(opts);
  std::cout << rep.summary();
  if (argc > 1) heatlands::write_json_file(argv[1], rep.to_json());
  return rep.failures() == 0 ? 0 : 1;
}
