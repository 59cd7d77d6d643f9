// tdvp: command-line front end.
//
//   tdvp <expect|husimi|evolve|equilibria|stability|quasienergy> --config FILE
//        [--out FILE] [--format csv|json] [--verify] [--threads N]
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or config error.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "tdvp/errors.hpp"
#include "tdvp/scenario.hpp"

namespace sc = tdvp::scenario;

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical coherent-state dynamics of a trapped ion"};
  app.set_version_flag("--version", std::string(sc::tool_version()));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  bool verify = false;
  unsigned threads = 0;

  const char* descriptions[][2] = {
      {"expect", "coherent-state expectations of the generators and moments"},
      {"husimi", "energy function on a grid over one mode's disk"},
      {"evolve", "integrate the Hamilton equations on the product disk"},
      {"equilibria", "critical points of the energy function"},
      {"stability", "Floquet stability map over (a_z, q_z) or (U0, V0)"},
      {"quasienergy", "quasienergy ladder of a stable mode"},
  };
  for (const auto& d : descriptions) {
    CLI::App* sub = app.add_subcommand(d[0], d[1]);
    sub->add_option("--config", config_path, "scenario file")->required();
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", threads, "worker threads for scans (0 = all cores)");
    if (std::string(d[0]) == "expect") {
      sub->add_flag("--verify", verify, "append truncated Fock-space oracle deltas");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const sc::Command command = sc::parse_command(name);
    const sc::ScenarioConfig cfg = sc::load_config(config_path, command);
    const sc::Outcome outcome = sc::run(cfg, {verify, threads});

    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) {
        std::cerr << "tdvp: cannot write '" << out_path << "'\n";
        return 1;
      }
    }
    std::ostream& out = out_path.empty() ? std::cout : file;
    if (format == "json") {
      sc::write_json(out, cfg, outcome.table);
    } else {
      sc::write_csv(out, cfg, outcome.table);
    }
    for (const std::string& m : outcome.messages) std::cerr << "tdvp " << name << ": " << m << '\n';
    return outcome.total_failure ? 1 : 0;
  } catch (const tdvp::IntegrationError& e) {
    std::cerr << "tdvp " << name << ": " << to_string(e.kind()) << " at t = " << e.time() << ": "
              << e.what() << '\n';
    return 1;
  } catch (const tdvp::NoSpectrumError& e) {
    std::cerr << "tdvp " << name << ": no spectrum (trace " << e.trace() << "): " << e.what()
              << '\n';
    return 1;
  } catch (const tdvp::Error& e) {
    std::cerr << "tdvp " << name << ": " << to_string(e.kind()) << ": " << e.what() << '\n';
    return e.kind() == tdvp::ErrorKind::config ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "tdvp " << name << ": " << e.what() << '\n';
    return 1;
  }
}
