#include <iostream>

#include <CLI11.hpp>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"eqres acceptance checks"};
  unsigned seed = 2024;
  std::vector<int> only;
  app.add_option("--seed", seed, "seed for the randomized checks");
  app.add_option("--only", only, "criterion ids to run");
  CLI11_PARSE(app, argc, argv);
  const auto res = eqres::acceptance::run_all(seed, std::cout, only);
  int failed = 0;
  for (const auto& r : res) failed += !r.pass;
  std::cout << res.size() - failed << "/" << res.size() << " passed" << std::endl;
  return failed ? 1 : 0;
}
