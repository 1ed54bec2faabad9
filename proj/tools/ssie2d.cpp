#include <iostream>

#include <CLI11.hpp>

#include "ssie2d/cli.hpp"

int main(int argc, char** argv) {
  using namespace ssie2d;
  CLI::App app{"2D TM scattering by composite dielectric cylinders"};
  cli::Options o;
  std::string angles, nearfield, acspw_list;

  app.add_option("command", o.command, "solve | sweep | converge | cond")
      ->required()
      ->check(CLI::IsMember({"solve", "sweep", "converge", "cond"}));
  app.add_option("--config", o.config, "scene config (JSON)")->required();
  std::string compare;
  app.add_option("--compare", compare, "also run the two-current reference")->check(CLI::IsMember({"pmchwt"}));
  app.add_option("--angles", angles, "bistatic observation angles START:END:N in degrees (default 0:360:361)");
  app.add_option("--fstart", o.fstart, "sweep start frequency, Hz");
  app.add_option("--fend", o.fend, "sweep end frequency, Hz");
  app.add_option("--npoints", o.npoints, "sweep frequency count");
  app.add_option("--acspw-list", acspw_list, "segments per free-space wavelength, comma separated");
  app.add_option("--reference", o.reference, "convergence reference")->check(CLI::IsMember({"pmchwt", "series"}));
  app.add_option("--nearfield", nearfield, "near-field grid START:END:N (square, metres)");
  app.add_option("--out", o.out, "output directory (default .)");

  CLI11_PARSE(app, argc, argv);

  try {
    o.compare_pmchwt = compare == "pmchwt";
    if (!angles.empty()) o.angles = cli::parse_range(angles, "--angles");
    if (!nearfield.empty()) o.nearfield = cli::parse_range(nearfield, "--nearfield");
    if (!acspw_list.empty()) o.acspw_list = cli::parse_list(acspw_list, "--acspw-list");
    const auto s = cli::run(o, std::cerr);
    std::cout << s.to_json().dump(2) << '\n';
  } catch (const ValidationError& e) {
    std::cerr << "ssie2d: invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ssie2d: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
