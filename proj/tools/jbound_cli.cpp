#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "jbound/cli.hpp"

namespace {

struct Args {
  std::string config;
  std::string out = "-";
  std::string format;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

void add_common(CLI::App* sub, Args& a) {
  sub->add_option("--config", a.config, "JSON configuration file");
  sub->add_option("--out", a.out, "output path, - for stdout");
  sub->add_option("--format", a.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--seed", a.seed, "seed overriding the config");
  sub->add_flag("--quiet", a.quiet, "suppress notes on stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pointwise bounds from integral weight constraints"};
  app.require_subcommand(1);
  Args args;
  const char* help[] = {"bounds for ln|f(z)| over a grid of points",
                        "randomized Jensen inequality trials",
                        "Fock space example: optimal radius and gap factor",
                        "upper half-plane: mean-based against sup-based bound",
                        "averaged growth check for d-bar solutions in C",
                        "built-in verification checks"};
  for (std::size_t i = 0; i < jbound::cli::commands().size(); ++i)
    add_common(app.add_subcommand(jbound::cli::commands()[i], help[i]), args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : jbound::cli::kInvalid;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  nlohmann::json cfg = nlohmann::json::object();
  if (!args.config.empty()) {
    try {
      cfg = jbound::config::load_file(args.config);
    } catch (const jbound::Error& e) {
      std::cerr << jbound::cli::error_object(e).dump() << "\n";
      return jbound::cli::kInvalid;
    }
  }

  jbound::cli::RunOptions opt;
  if (!args.format.empty()) opt.format = args.format == "json" ? jbound::OutputFormat::Json : jbound::OutputFormat::Csv;
  opt.seed = args.seed;
  opt.quiet = args.quiet;

  if (args.out == "-") return jbound::cli::run(command, cfg, opt, std::cout, std::cerr);
  std::ofstream out(args.out, std::ios::binary);
  if (!out) {
    std::cerr << jbound::cli::error_object(jbound::Error(jbound::ErrorKind::IoError, "cannot open " + args.out)).dump() << "\n";
    return jbound::cli::kInvalid;
  }
  return jbound::cli::run(command, cfg, opt, out, std::cerr);
}
