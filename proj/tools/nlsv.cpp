#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlsv/cli/run.hpp"

namespace {

std::string resolved_text(const nlsv::Config& c) {
  std::string out;
  for (const auto& [k, v] : c.resolved()) out += k + " = " + v + "\n";
  return out;
}

nlohmann::json manifest(const std::string& sub, const nlsv::cli::RunContext& ctx) {
  nlohmann::json j;
  j["subcommand"] = sub;
  j["config_digest"] = nlsv::cli::fnv1a_digest(resolved_text(ctx.config()));
  j["resolution_scale"] = ctx.scale();
  j["threads"] = nlsv::worker_count();
  j["parameters"] = ctx.config().resolved();
  j["outputs"] = ctx.outputs();
  j["info"] = ctx.infos();
  for (const auto& [label, seconds] : ctx.timings()) j["timings"][label] = seconds;
  for (const auto& m : ctx.checks())
    j["checks"].push_back({{"name", m.name}, {"pass", m.pass}, {"value", m.value}, {"limit", m.limit}, {"detail", m.detail}});
  j["pass"] = ctx.all_pass();
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dispersive estimates and scattering for NLS with a potential: experiment runner"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir = "out";
  int threads = 1, scale = 1;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--resolution-scale", scale, "multiplies N and divides time steps")->check(CLI::PositiveNumber);
  for (const auto& [name, fn] : nlsv::cli::subcommands()) app.add_subcommand(name);
  CLI11_PARSE(app, argc, argv);

  const std::string sub = app.get_subcommands().front()->get_name();
  nlsv::worker_count() = threads;
  try {
    const nlsv::Config config = config_path.empty() ? nlsv::Config() : nlsv::Config::load(config_path);
    nlsv::cli::RunContext ctx(config, out_dir, scale);
    ctx.timed("total", [&] { nlsv::cli::subcommands().at(sub)(ctx); });
    std::filesystem::create_directories(out_dir);
    std::ofstream(std::filesystem::path(out_dir) / "manifest.json") << manifest(sub, ctx).dump(2) << "\n";
    for (const auto& m : ctx.checks()) std::cout << nlsv::cli::check_line(m) << "\n";
    return ctx.all_pass() ? 0 : 1;
  } catch (const nlsv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
