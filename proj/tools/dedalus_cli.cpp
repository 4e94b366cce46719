// Command-line front end: check, transform, simulate, trace, verify,
// stable-check. Machine artifacts are canonical JSON; programs are text.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dedalus/dedalus.hpp"
#include "dedalus/model_io.hpp"

namespace fs = std::filesystem;

namespace {

// Paths that don't exist are retried under $DEDALUS_CORPUS, so corpus
// entries can be named by their file name alone.
fs::path resolve(const std::string& given) {
  fs::path p(given);
  if (fs::exists(p)) return p;
  if (const char* root = std::getenv("DEDALUS_CORPUS")) {
    fs::path alt = fs::path(root) / p;
    if (fs::exists(alt)) return alt;
  }
  return p;
}

std::string slurp(const std::string& given) {
  fs::path p = resolve(given);
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& out_file, const std::string& text) {
  if (out_file.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_file);
  if (!out) throw std::runtime_error("cannot write " + out_file);
  out << text;
}

dedalus::TransformMode parse_mode(const std::string& name) {
  if (name == "choice") return dedalus::TransformMode::Choice;
  if (name == "causal") return dedalus::TransformMode::Causal;
  if (name == "causfin") return dedalus::TransformMode::CausalFinite;
  throw CLI::ValidationError("--mode", "expected choice, causal or causfin");
}

dedalus::SchedulerPolicy parse_policy(const std::string& name) {
  if (name == "roundrobin") return dedalus::SchedulerPolicy::RoundRobin;
  if (name == "random") return dedalus::SchedulerPolicy::SeededRandom;
  if (name == "single") return dedalus::SchedulerPolicy::SingleDelivery;
  throw CLI::ValidationError("--scheduler", "expected roundrobin, random or single");
}

struct CommonOpts {
  std::string program_file;
  std::string instance_file;
  std::string scheduler = "roundrobin";
  std::uint64_t seed = 0;
  std::size_t transitions = 20;
  std::size_t max_delay = 1;
  std::string out_file;
};

void add_run_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--program", o.program_file, "Dedalus program file")->required();
  cmd->add_option("--instance", o.instance_file, "input instance JSON")->required();
  cmd->add_option("--scheduler", o.scheduler, "roundrobin | random | single");
  cmd->add_option("--seed", o.seed, "scheduler seed");
  cmd->add_option("--transitions", o.transitions, "number of transitions");
  cmd->add_option("--max-delay", o.max_delay, "delivery bound in addressee activations");
  cmd->add_option("--out", o.out_file, "output file (stdout if omitted)");
}

dedalus::RunPrefix run_from(const CommonOpts& o, const dedalus::DedalusProgram& d) {
  dedalus::DistributedInstance h = dedalus::parse_instance(slurp(o.instance_file), d);
  dedalus::Scheduler sched{parse_policy(o.scheduler), o.seed, o.max_delay};
  return dedalus::simulate(d, h, sched, o.transitions);
}

int cmd_check(const std::string& program_file) {
  try {
    dedalus::DedalusProgram d = dedalus::parse_dedalus(slurp(program_file));
    int deduc = 0, induc = 0, async = 0;
    for (const auto& r : d.rules()) {
      switch (r.kind) {
        case dedalus::RuleKind::Deductive: ++deduc; break;
        case dedalus::RuleKind::Inductive: ++induc; break;
        case dedalus::RuleKind::Async: ++async; break;
      }
    }
    for (const std::string& w : d.warnings()) std::cerr << "warning: " << w << "\n";
    std::cout << "valid: " << d.rules().size() << " rules (" << async << " async, "
              << induc << " inductive, " << deduc << " deductive)\n";
    return 0;
  } catch (const dedalus::ParseError& e) {
    std::cerr << "error at line " << e.line << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dedalus toolchain: validation, Datalog transformations, "
               "distributed simulation, stable-model correspondence"};
  app.require_subcommand(1);

  std::string check_file;
  CLI::App* check = app.add_subcommand("check", "validate a Dedalus program");
  check->add_option("--program", check_file, "Dedalus program file")->required();

  std::string tf_file, tf_mode = "causfin", tf_out;
  CLI::App* tf = app.add_subcommand("transform", "emit the pure Datalog translation");
  tf->add_option("--program", tf_file, "Dedalus program file")->required();
  tf->add_option("--mode", tf_mode, "choice | causal | causfin");
  tf->add_option("--out", tf_out, "output file (stdout if omitted)");

  CommonOpts sim_opts;
  CLI::App* sim = app.add_subcommand("simulate", "run the operational semantics");
  add_run_flags(sim, sim_opts);

  CommonOpts tr_opts;
  CLI::App* tr = app.add_subcommand("trace", "simulate and emit the run's trace");
  add_run_flags(tr, tr_opts);

  CommonOpts ver_opts;
  std::string ver_mode = "causfin";
  CLI::App* ver = app.add_subcommand(
      "verify", "simulate, build the stable-model candidate, check it, "
                "rebuild the run and compare traces");
  add_run_flags(ver, ver_opts);
  ver->add_option("--mode", ver_mode, "transformation used for the check (causfin)");

  std::string sc_program, sc_instance, sc_model, sc_mode = "causfin", sc_out;
  CLI::App* sc = app.add_subcommand("stable-check",
                                    "check a model candidate against a transformed program");
  sc->add_option("--program", sc_program, "Dedalus program file")->required();
  sc->add_option("--instance", sc_instance, "input instance JSON")->required();
  sc->add_option("--model", sc_model, "model candidate JSON")->required();
  sc->add_option("--mode", sc_mode, "choice | causal | causfin");
  sc->add_option("--out", sc_out, "output file (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return cmd_check(check_file);

    if (*tf) {
      dedalus::DedalusProgram d = dedalus::parse_dedalus(slurp(tf_file));
      dedalus::TransformedProgram p = dedalus::transform(d, parse_mode(tf_mode));
      std::ostringstream ss;
      for (const dedalus::Rule& r : p.rules) ss << r.to_string() << "\n";
      emit(tf_out, ss.str());
      return 0;
    }

    if (*sim) {
      dedalus::DedalusProgram d = dedalus::parse_dedalus(slurp(sim_opts.program_file));
      emit(sim_opts.out_file, dedalus::run_to_json(run_from(sim_opts, d)));
      return 0;
    }

    if (*tr) {
      dedalus::DedalusProgram d = dedalus::parse_dedalus(slurp(tr_opts.program_file));
      emit(tr_opts.out_file, dedalus::facts_to_json(dedalus::trace(run_from(tr_opts, d))));
      return 0;
    }

    if (*ver) {
      if (parse_mode(ver_mode) != dedalus::TransformMode::CausalFinite)
        throw std::runtime_error(
            "verify checks against the causality-finiteness transformation; "
            "use --mode causfin");
      dedalus::DedalusProgram d = dedalus::parse_dedalus(slurp(ver_opts.program_file));
      dedalus::DistributedInstance h =
          dedalus::parse_instance(slurp(ver_opts.instance_file), d);
      dedalus::Scheduler sched{parse_policy(ver_opts.scheduler), ver_opts.seed,
                               ver_opts.max_delay};
      dedalus::Report rep = dedalus::verify_theorem(d, h, sched, ver_opts.transitions);
      emit(ver_opts.out_file, dedalus::report_to_json(rep));
      std::cerr << (rep.pass ? "pass" : "FAIL") << " (t_ground=" << rep.window.t_ground
                << ", t_check=" << rep.window.t_check << ")";
      if (!rep.error.empty()) std::cerr << ": " << rep.error;
      std::cerr << "\n";
      return rep.pass ? 0 : 1;
    }

    if (*sc) {
      dedalus::DedalusProgram d = dedalus::parse_dedalus(slurp(sc_program));
      dedalus::DistributedInstance h = dedalus::parse_instance(slurp(sc_instance), d);
      dedalus::ModelCandidate m = dedalus::model_from_json(slurp(sc_model));
      dedalus::TransformedProgram p = dedalus::transform(d, parse_mode(sc_mode));
      dedalus::Instance base = dedalus::decl_input(h, {m.window.t_ground});
      dedalus::Verdict v = dedalus::windowed_stable_check(p, base, m);
      std::ostringstream ss;
      ss << "{\n \"accepted\": " << (v.accepted ? "true" : "false")
         << ",\n \"missing\": " << dedalus::facts_to_json(v.missing)
         << ",\n \"extra\": " << dedalus::facts_to_json(v.extra) << "}\n";
      emit(sc_out, ss.str());
      std::cerr << (v.accepted ? "stable" : "not stable") << " within t_check="
                << m.window.t_check << "\n";
      return v.accepted ? 0 : 1;
    }
  } catch (const dedalus::ParseError& e) {
    std::cerr << "error at line " << e.line << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
