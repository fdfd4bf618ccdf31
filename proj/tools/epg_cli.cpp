// Command-line front end for the endperiodic graph map library.
//
// Exit codes: 0 success, 1 verification failure, 2 bad input, 3 cap exceeded.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epg/dynamics.hpp"
#include "epg/fixtures.hpp"
#include "epg/io.hpp"
#include "epg/traintrack.hpp"

namespace {

using namespace epg;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", x);
  return buf;
}

EpgSystem make_fixture(const std::string& name) {
  if (auto s = fixture_by_name(name)) return *s;
  const std::string prefix = "perturbed-";
  if (name.rfind(prefix, 0) == 0) {
    try {
      return perturbed_shift(static_cast<unsigned>(std::stoul(name.substr(prefix.size()))));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidInput, "bad seed in '" + name + "'");
    }
  }
  std::string known;
  for (const auto& n : fixture_names()) known += " " + n;
  throw Error(ErrorKind::InvalidInput,
              "unknown fixture '" + name + "'; known:" + known + " perturbed-<seed>");
}

// Inputs name either a file on disk or, as a convenience, a built-in fixture.
EpgSystem load_named(const std::string& path) {
  if (!std::filesystem::exists(path) &&
      (fixture_by_name(path) || path.rfind("perturbed-", 0) == 0)) {
    return make_fixture(path);
  }
  return load_system(path);
}

void print_report(const RttReport& report) {
  std::cout << (report.pass ? "verify PASS" : "verify FAIL") << "\n";
  for (const auto& f : report.failures) std::cout << "failure: " << f << "\n";
  for (const auto& n : report.notes) std::cout << "note: " << n << "\n";
}

void write_move_log(const std::string& path, const std::vector<MoveRecord>& log) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write '" + path + "'");
  for (const auto& rec : log) {
    out << rec.name << "\t" << rec.detail << "\t";
    if (rec.lambda_after >= 0.0) {
      out << fmt(rec.lambda_after);
    } else {
      out << "-";
    }
    out << "\n";
  }
}

int run_validate(const std::string& file) {
  EpgSystem s = load_named(file);
  auto notes = validate_system(s);
  std::size_t end_edges = 0;
  for (const auto& e : s.graph.ends) end_edges += e.domain.edges.size();
  std::cout << "ok: " << s.graph.core.vertices.size() << " core vertices, "
            << s.graph.core.edges.size() << " core edges, " << s.graph.ends.size()
            << " ends (" << end_edges << " end edges), depth " << s.map.depth << "\n";
  for (const auto& n : notes) std::cout << "note: " << n << "\n";
  return 0;
}

int run_ends(const std::string& file) {
  EpgSystem s = load_named(file);
  Filtration f = build_filtration(s.graph, s.map);
  for (const auto& [id, kind] : f.end_kinds) {
    std::cout << id << "\t" << to_string(kind) << "\twindow " << f.windows.at(id) << "\n";
  }
  return 0;
}

int run_filtration(const std::string& file) {
  EpgSystem s = load_named(file);
  Filtration f = build_filtration(s.graph, s.map);
  std::cout << "strata: " << f.strata.size() << "\n";
  for (std::size_t k = 0; k < f.strata.size(); ++k) {
    const Stratum& st = f.strata[k];
    std::cout << "stratum " << k << " (" << (st.exponential ? "exponential" : "polynomial")
              << ", radius " << fmt(st.radius) << "):";
    for (const auto& e : st.edges) std::cout << " " << format_edge(e);
    std::cout << "\n";
  }
  std::cout << "lambda " << fmt(f.lambda()) << "\n";
  std::cout << "boundedness " << boundedness(s.map, f) << "\n";
  std::cout << "escaping window " << f.escaping_window.size() << " edges, backward window "
            << f.backward_window.size() << " edges\n";
  return 0;
}

int run_lambda(const std::string& file) {
  EpgSystem s = load_named(file);
  TrackedMap tm = TrackedMap::start(std::move(s));
  Filtration before = build_filtration(tm.sys.graph, tm.sys.map);
  std::cout << "initial lambda " << fmt(before.lambda()) << "\n";
  MinimizeOutcome out = minimize_lambda(tm);
  std::cout << "minimized lambda " << fmt(out.filtration.lambda()) << "\n";
  std::cout << "moves " << tm.log.size() << "\n";
  return out.cap_exceeded ? 3 : 0;
}

int run_traintrack(const std::string& file, const std::string& out_path,
                   const std::string& log_path, const Caps& caps) {
  EpgSystem s = load_named(file);
  TrackedMap tm = TrackedMap::start(std::move(s));
  RttResult result = to_relative_train_track(tm, caps);
  std::cout << "moves " << tm.log.size() << "\n";
  std::cout << "lambda " << fmt(result.filtration.lambda()) << "\n";
  std::cout << "boundedness " << boundedness(tm.sys.map, result.filtration) << "\n";
  print_report(result.report);
  save_system(out_path, tm.sys);
  Json corr;
  corr["forward"] = corr_to_json(tm.forward);
  corr["backward"] = corr_to_json(tm.backward);
  std::ofstream corr_out(out_path + ".corr");
  if (!corr_out) throw Error(ErrorKind::InvalidInput, "cannot write '" + out_path + ".corr'");
  corr_out << corr.dump(2) << "\n";
  if (!log_path.empty()) write_move_log(log_path, tm.log);
  if (result.cap_exceeded) return 3;
  return result.report.pass ? 0 : 1;
}

int run_verify(const std::string& file) {
  EpgSystem s = load_named(file);
  Filtration f = build_filtration(s.graph, s.map);
  RttReport report = verify_rtt(s, f);
  std::cout << "lambda " << fmt(f.lambda()) << "\n";
  print_report(report);
  return report.pass ? 0 : 1;
}

int run_growth(const std::string& file, const std::string& loop_text, const std::string& sub,
               int iters) {
  EpgSystem s = load_named(file);
  EdgePath loop = parse_path(loop_text);
  if (loop.empty()) throw Error(ErrorKind::InvalidInput, "--loop is empty");
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const OrientedEdge& nxt = loop[(i + 1) % loop.size()];
    if (!(oriented_head(s.graph, loop[i]) == oriented_tail(s.graph, nxt))) {
      throw Error(ErrorKind::InvalidInput,
                  "--loop is not a closed edge path at letter " + std::to_string(i));
    }
  }
  std::vector<EdgeAddr> marks;
  if (sub.rfind("stratum:", 0) == 0) {
    int idx = -1;
    try {
      idx = std::stoi(sub.substr(8));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidInput, "bad stratum index in '" + sub + "'");
    }
    Filtration f = build_filtration(s.graph, s.map);
    if (idx < 0 || idx >= static_cast<int>(f.strata.size())) {
      throw Error(ErrorKind::InvalidInput,
                  "no stratum " + std::to_string(idx) + " (the filtration has " +
                      std::to_string(f.strata.size()) + ")");
    }
    marks = f.strata[static_cast<std::size_t>(idx)].edges;
  } else if (sub.rfind("edges:", 0) == 0) {
    for (const auto& o : parse_path(sub.substr(6))) marks.push_back(o.edge);
  } else {
    throw Error(ErrorKind::InvalidInput,
                "--sub must be stratum:<i> or edges:<csv-addrs> (an empty list counts "
                "every letter)");
  }
  GrowthSample sample = sample_growth(s, loop, iters, marks);
  std::cout << "lengths:";
  for (std::size_t n : sample.lengths) std::cout << " " << n;
  std::cout << "\n";
  if (sample.exponent) {
    std::cout << "exponent " << fmt(*sample.exponent) << "\n";
  } else {
    std::cout << "exponent undefined\n";
  }
  std::cout << "escapes " << (escapes(s, loop, iters) ? "yes" : "no") << "\n";
  return 0;
}

int run_fixture(const std::string& name, const std::string& out_path) {
  EpgSystem s = make_fixture(name);
  if (out_path.empty()) {
    std::cout << serialize(s);
  } else {
    save_system(out_path, s);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"endperiodic graph map toolkit"};
  app.require_subcommand(1);

  std::string file, out_path, log_path, loop_text, sub, name;
  int iters = 20;
  Caps caps;

  auto* c_validate = app.add_subcommand("validate", "check a presentation file");
  c_validate->add_option("file", file, "presentation file or fixture name")->required();

  auto* c_ends = app.add_subcommand("ends", "classify the ends and their windows");
  c_ends->add_option("file", file, "presentation file or fixture name")->required();

  auto* c_filtration = app.add_subcommand("filtration", "print the canonical filtration");
  c_filtration->add_option("file", file, "presentation file or fixture name")->required();

  auto* c_lambda = app.add_subcommand("lambda", "greedily minimize the expansion factor");
  c_lambda->add_option("file", file, "presentation file or fixture name")->required();

  auto* c_traintrack = app.add_subcommand("traintrack", "run the full tidying pipeline");
  c_traintrack->add_option("file", file, "presentation file or fixture name")->required();
  c_traintrack->add_option("-o,--output", out_path, "write the resulting presentation here")
      ->required();
  c_traintrack->add_option("--log", log_path, "write the move log here");
  c_traintrack->add_option("--caps", caps.max_moves, "move budget");

  auto* c_verify = app.add_subcommand("verify", "check the train track conditions");
  c_verify->add_option("file", file, "presentation file or fixture name")->required();

  auto* c_growth = app.add_subcommand("growth", "iterate a loop and estimate its growth");
  c_growth->add_option("file", file, "presentation file or fixture name")->required();
  c_growth->add_option("--loop", loop_text, "edge path, e.g. core:a.~core:b")->required();
  c_growth
      ->add_option("--sub", sub,
                   "letters to count: stratum:<i> or edges:<csv-addrs> (an empty "
                   "list counts every letter)")
      ->required();
  c_growth->add_option("--iters", iters, "number of iterations")
      ->required()
      ->check(CLI::PositiveNumber);

  auto* c_fixture = app.add_subcommand("fixture", "emit a built-in example presentation");
  c_fixture->add_option("name", name, "fixture name or perturbed-<seed>")->required();
  c_fixture->add_option("-o,--output", out_path, "write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (c_validate->parsed()) return run_validate(file);
    if (c_ends->parsed()) return run_ends(file);
    if (c_filtration->parsed()) return run_filtration(file);
    if (c_lambda->parsed()) return run_lambda(file);
    if (c_traintrack->parsed()) return run_traintrack(file, out_path, log_path, caps);
    if (c_verify->parsed()) return run_verify(file);
    if (c_growth->parsed()) return run_growth(file, loop_text, sub, iters);
    if (c_fixture->parsed()) return run_fixture(name, out_path);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::VerificationFailed:
        return 1;
      case ErrorKind::CapExceeded:
        return 3;
      default:
        return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
