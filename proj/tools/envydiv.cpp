#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include <envydiv/cli.hpp>

int main(int argc, char **argv) {
  envydiv::RunConfig c;
  std::string out_path;

  CLI::App app{"Envy-free division of a cake among players with possibly hungry or empty-box preferences"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--out", out_path, "write JSON here instead of stdout");

  auto solver_flags = [&](CLI::App *sub) {
    sub->add_option("--tol", c.tolerance, "residual tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-depth", c.max_depth, "subdivision levels")->check(CLI::Range(1, 40));
    sub->add_option("--multistarts", c.multistarts, "cells kept per level")->check(CLI::Range(1, 4096));
    sub->add_option("--threads", c.threads, "worker threads, 0 for hardware concurrency");
    sub->add_flag("--raise-bottleneck", c.raise_bottleneck, "prefer divisions whose least assigned score is largest");
  };

  auto *solve = app.add_subcommand("solve", "find an envy-free division");
  solve->add_option("--prefs", c.prefs, "preference file")->required();
  solve->add_option("--space", c.space, "c1, c2 or c3")->required();
  solve->add_option("--r", c.r, "number of players");
  solve->add_option("--seed", c.seed, "validation sampling seed");
  solver_flags(solve);

  auto *validate = app.add_subcommand("validate", "sample preference properties");
  validate->add_option("--prefs", c.prefs, "preference file")->required();
  validate->add_option("--space", c.space, "space to lift onto");
  validate->add_option("--r", c.r, "number of players");
  validate->add_option("--property", c.properties, "covering, equivariance, p_dte, p_pe, continuity");
  validate->add_option("--samples", c.samples, "samples per property")->check(CLI::Range(1, 10'000'000));
  validate->add_option("--seed", c.seed, "sampling seed");

  auto *topology = app.add_subcommand("topology", "homology of a chessboard-type complex");
  topology->add_option("--complex", c.complex, "chessboard, gorbushka-join or join-power")->required();
  topology->add_option("--m", c.m, "rows of a chessboard complex");
  topology->add_option("--n", c.n, "columns of a chessboard complex");
  topology->add_option("--r", c.r, "players for the join complexes");
  topology->add_flag("--pseudomanifold", c.pseudomanifold, "also test the pseudomanifold property");

  auto *demo = app.add_subcommand("demo", "run a worked scenario");
  demo->add_option("name", c.demo, "gorbushka, burnt, gale or ppe")->required();
  demo->add_option("--r", c.r, "number of players");
  demo->add_option("--seed", c.seed, "sampling seed");
  solver_flags(demo);

  auto *brute = app.add_subcommand("brute", "exhaustive grid search for small r");
  brute->add_option("--prefs", c.prefs, "preference file")->required();
  brute->add_option("--space", c.space, "c1, c2 or c3")->required();
  brute->add_option("--r", c.r, "number of players");
  brute->add_option("--grid", c.grid, "grid resolution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : envydiv::exit_input;
  }

  c.command = app.get_subcommands().front()->get_name();

  if (out_path.empty()) {
    return envydiv::run(c, std::cout, std::cerr);
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << '\n';
    return envydiv::exit_input;
  }
  return envydiv::run(c, out, std::cerr);
}
