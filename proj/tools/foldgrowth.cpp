#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "foldgrowth/apt.hpp"

using namespace fg;

namespace {

struct Options {
  std::string rep_file;
  std::string path_text;
  std::string word_text;
  std::string circuit_text;
  std::string dot_dir;
  std::string format = "json";
  int k = 1;
  int k_max = -1;
  int max_sheets = 24;
  int enumerate_sheets = 0;
  bool circle_flag = false;
  int jobs = 1;
};

void write_dot(const Options& opt, const std::string& name, const LabelledGraph& h) {
  if (opt.dot_dir.empty()) return;
  std::filesystem::create_directories(opt.dot_dir);
  std::ofstream out(opt.dot_dir + "/" + name + ".dot");
  check(out.good(), errc::io, "cannot write DOT file for " + name);
  out << to_dot(h);
}

std::string graph_json(const LabelledGraph& h) {
  std::ostringstream o;
  o << "{\"vertices\": " << h.g.nv << ", \"edges\": " << h.g.geoms()
    << ", \"immersion\": " << (is_immersion(h) ? "true" : "false")
    << ", \"cover\": " << (is_cover(h) ? "true" : "false") << "}";
  return o.str();
}

int run_validate(const Options& opt) {
  ParseResult res = parse_rep([&] {
    std::ifstream f(opt.rep_file);
    check(f.good(), errc::io, "cannot open " + opt.rep_file);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }());
  Analyzed a = analyze(res.rep);
  if (opt.format == "table") {
    std::cout << "rep " << res.rep.name << ": valid, " << res.rep.strata() << " strata, rank "
              << res.rep.graph.rank() << ", eta " << a.filt.eta << "\n";
    for (auto& w : res.warnings) std::cout << "warning: " << w.what << "\n";
  } else {
    std::cout << "{\"valid\": true, \"name\": \"" << res.rep.name
              << "\", \"strata\": " << res.rep.strata() << ", \"rank\": " << res.rep.graph.rank()
              << ", \"eta\": " << a.filt.eta << ", \"warnings\": " << res.warnings.size() << "}\n";
  }
  return 0;
}

int run_degrees(const Options& opt) {
  Analyzed a = analyze(load_rep(opt.rep_file));
  if (opt.format == "table") {
    for (int ge = 0; ge < a.rep.strata(); ++ge)
      std::cout << a.rep.graph.enames[ge] << "\t" << a.filt.degree[ge] << "\n";
    std::cout << "eta\t" << a.filt.eta << "\n";
  } else {
    std::cout << degrees_json(a) << "\n";
  }
  return 0;
}

int run_iterate(const Options& opt) {
  Representative r = load_rep(opt.rep_file);
  Path p = parse_path(r.graph, opt.path_text);
  IterCache ic;
  std::cout << show(r.graph, fast_iterate(r, p, opt.k, ic)) << "\n";
  return 0;
}

int run_separate(const Options& opt) {
  Analyzed a = analyze(load_rep(opt.rep_file));
  Path p = parse_path(a.rep.graph, opt.path_text);
  Separation s = separate(a, p);
  std::cout << show_units(a, s) << "\n";
  std::cout << show(a.rep.graph, p) << "\n";
  return 0;
}

int run_split(const Options& opt) {
  Analyzed a = analyze(load_rep(opt.rep_file));
  Path p = parse_path(a.rep.graph, opt.path_text);
  auto pieces = canonical_f_split(a, p);
  std::cout << show_split(a, pieces) << "\n";
  if (a.degree_of_path(p) >= 2) std::cout << show_structure(unit_structure(a, p)) << "\n";
  return 0;
}

int run_fold(const Options& opt) {
  Representative r = load_rep(opt.rep_file);
  Path w = parse_path(r.graph, opt.word_text);
  LabelledGraph h = opt.circle_flag ? circle(r.graph, w) : line(r.graph, w);
  auto [imm, trace] = fold(h);
  write_dot(opt, "folded", imm);
  std::cout << "{\"steps\": " << trace.steps.size() << ", \"result\": " << graph_json(imm)
            << "}\n";
  return 0;
}

int run_cover(const Options& opt) {
  Representative r = load_rep(opt.rep_file);
  if (opt.enumerate_sheets > 0) {
    auto covers = enumerate_covers(r.graph, opt.enumerate_sheets,
                                   std::max(6, opt.enumerate_sheets));
    std::cout << "{\"sheets\": " << opt.enumerate_sheets << ", \"count\": " << covers.size()
              << "}\n";
    for (size_t i = 0; i < covers.size(); ++i)
      write_dot(opt, "cover" + std::to_string(i), covers[i]);
    return 0;
  }
  Path w = parse_path(r.graph, opt.word_text);
  LabelledGraph h = folded(opt.circle_flag ? circle(r.graph, w) : line(r.graph, w));
  auto [cov, cert] = complete_to_cover(h);
  write_dot(opt, "cover", cov);
  std::cout << "{\"sheets\": " << cert.sheets << ", \"result\": " << graph_json(cov) << "}\n";
  return 0;
}

int run_apt(const Options& opt) {
  Analyzed a = analyze(load_rep(opt.rep_file));
  AptConfig cfg;
  cfg.max_sheets = opt.max_sheets;
  if (opt.k_max > 0) {
    cfg.k_max_linear = opt.k_max;
    cfg.k_max_nonlinear = opt.k_max;
  }
  Path c = parse_path(a.rep.graph, opt.circuit_text.empty() ? show(a.rep.graph, witness_circuit(a))
                                                            : opt.circuit_text);
  Path cyc = cyclic_reduction(a.rep.graph, c);
  int deg = a.degree_of_path(cyc);
  if (deg <= 1) {
    AptCertificate cert = linear_apt(a, cyc, cfg);
    write_dot(opt, "sigma", cert.sigma);
    std::cout << cert.json() << "\n";
  } else {
    Path rho = well_chosen(a, cyc);
    int etop = 2 * (a.rep.strata() - 1);
    if (rho.edges.front() != etop) rho = reverse_path(a.rep.graph, rho);
    auto pieces = canonical_f_split(a, rho);
    PathUnit u = classify_piece(a, pieces[0], deg);
    SigmaBuild sb = nonlinear_sigma(a, u, cfg);
    write_dot(opt, "sigma", sb.sigma);
    std::ostringstream o;
    o << "{\"q\": " << sb.q << ", \"degree\": " << sb.degree << ", \"fit_l_ab\": "
      << (sb.fit_lab ? std::to_string(*sb.fit_lab) : "null") << ", \"samples\": [";
    for (size_t i = 0; i < sb.samples.size(); ++i) {
      if (i) o << ", ";
      o << "{\"k\": " << sb.samples[i].k << ", \"l\": " << sb.samples[i].l
        << ", \"l_ab\": " << sb.samples[i].l_ab << "}";
    }
    o << "]}";
    std::cout << o.str() << "\n";
  }
  return 0;
}

int run_verify(const Options& opt) {
  Analyzed a = analyze(load_rep(opt.rep_file));
  AptConfig cfg;
  cfg.max_sheets = opt.max_sheets;
  if (opt.k_max > 0) cfg.k_max_nonlinear = opt.k_max;
  MainCertificate cert = verify_main_theorem(a, cfg);
  write_dot(opt, "sigma", cert.apt.sigma);
  std::cout << cert.json() << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"growth of polynomially growing free group automorphisms on finite covers"};
  app.require_subcommand(1);
  Options opt;
  if (const char* env = std::getenv("FOLDGROWTH_MAX_SHEETS")) opt.max_sheets = std::atoi(env);

  app.add_option("--format", opt.format)->check(CLI::IsMember({"json", "table"}));
  app.add_option("--dot", opt.dot_dir, "directory for DOT exports");
  app.add_option("--jobs", opt.jobs, "parallelism for cover scans");

  auto add_rep = [&](CLI::App* sub) {
    sub->add_option("rep", opt.rep_file, "input .rep file")->required();
  };
  auto* validate = app.add_subcommand("validate", "parse and validate a representative");
  add_rep(validate);
  auto* degrees = app.add_subcommand("degrees", "edge growth degrees and eta");
  add_rep(degrees);
  auto* iterate = app.add_subcommand("iterate", "tightened f^k image of a path");
  add_rep(iterate);
  iterate->add_option("--path", opt.path_text)->required();
  iterate->add_option("--k", opt.k);
  auto* separate_cmd = app.add_subcommand("separate", "canonical separation into growth units");
  add_rep(separate_cmd);
  separate_cmd->add_option("--path", opt.path_text)->required();
  auto* split = app.add_subcommand("split", "canonical f-splitting and unit structure");
  add_rep(split);
  split->add_option("--path", opt.path_text)->required();
  auto* fold_cmd = app.add_subcommand("fold", "fold the line or circle of a word");
  add_rep(fold_cmd);
  fold_cmd->add_option("--word", opt.word_text)->required();
  fold_cmd->add_flag("--circle", opt.circle_flag);
  auto* cover = app.add_subcommand("cover", "complete an immersion to a cover");
  add_rep(cover);
  cover->add_option("--word", opt.word_text);
  cover->add_flag("--circle", opt.circle_flag);
  cover->add_option("--enumerate", opt.enumerate_sheets, "list covers with this sheet count");
  auto* apt = app.add_subcommand("apt", "apt immersion certificate for a circuit");
  add_rep(apt);
  apt->add_option("--circuit", opt.circuit_text);
  apt->add_option("--k-max", opt.k_max);
  apt->add_option("--max-sheets", opt.max_sheets);
  auto* verify = app.add_subcommand("verify", "main theorem certificate");
  add_rep(verify);
  verify->add_option("--k-max", opt.k_max);
  verify->add_option("--max-sheets", opt.max_sheets);

  CLI11_PARSE(app, argc, argv);
  try {
    if (validate->parsed()) return run_validate(opt);
    if (degrees->parsed()) return run_degrees(opt);
    if (iterate->parsed()) return run_iterate(opt);
    if (separate_cmd->parsed()) return run_separate(opt);
    if (split->parsed()) return run_split(opt);
    if (fold_cmd->parsed()) return run_fold(opt);
    if (cover->parsed()) return run_cover(opt);
    if (apt->parsed()) return run_apt(opt);
    if (verify->parsed()) return run_verify(opt);
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind == errc::resource ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
