#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rpf/io.hpp"

using namespace rpf;

namespace {

struct Flags {
  std::string input;
  std::string word;
  std::string output;
  std::string dot;
  std::string certificate;
  bool json = false;
  bool text = false;
  bool quotient = false;
  std::size_t max_cosets = 64;
  std::size_t search_bound = 0;
  std::size_t max_order = 0;
  std::size_t max_vertices = 10000;
  std::uint32_t radius = 2;
  std::uint32_t prime = 2;
  std::uint32_t rank = 1;
  std::uint32_t max_degree = 64;
};

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << body;
}

Json report(const std::string& command) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["command"] = command;
  return j;
}

// Level maps from the file, or solved when the file has none.
LevelMaps maps_for(const Problem& pr) {
  if (!pr.series) throw InputError("problem has no series assignment");
  if (pr.maps) return *pr.maps;
  LevelMaps solved;
  const auto r = check_conditions(*pr.gg, *pr.series, pr.p, &solved);
  if (!r.ok()) throw InputError("conditions I and II do not hold for the given series");
  return solved;
}

Problem load_valid(const Flags& f) {
  Problem pr = load_problem_file(f.input);
  if (auto r = validate_problem(pr); !r.ok()) throw InputError(r.violations.front());
  return pr;
}

int cmd_validate(const Flags& f, Json& out, std::ostream& text) {
  const Problem pr = load_problem_file(f.input);
  const auto r = validate_problem(pr);
  out["valid"] = r.ok();
  out["violations"] = r.violations;
  if (r.ok()) {
    const auto& g = pr.gg->graph();
    out["vertices"] = g.vertex_count();
    out["edge_pairs"] = g.edge_count() / 2;
    out["graph_rank"] = graph_rank(g);
    if (pr.series) out["series_length_bound"] = pr.series->length_bound();
  }
  text << (r.ok() ? "valid\n" : "invalid\n");
  for (const auto& v : r.violations) text << "  " << v << "\n";
  return r.ok() ? 0 : 2;
}

int cmd_check(const Flags& f, Json& out, std::ostream& text) {
  const Problem pr = load_valid(f);
  if (!pr.series) throw InputError("problem has no series assignment (try search)");
  const auto& gg = *pr.gg;
  LevelMaps solved;
  const auto r = check_conditions(gg, *pr.series, pr.p, &solved);
  out["result"] = to_json(gg, r, r.ok() ? &solved : nullptr);
  if (pr.maps && r.condition_I.empty()) {
    const auto given = check_condition_II(gg, *pr.series, *pr.maps, pr.p);
    out["given_maps"] = {{"ok", given.ok}, {"level", given.level}, {"reason", given.reason}};
    text << "given level maps: " << (given.ok ? "pass" : "fail: " + given.reason) << "\n";
  }
  out["verdict"] = r.ok() ? "pass" : "fail";
  for (const auto& c : r.condition_I) {
    text << "condition I fails at edge " << gg.graph().edge_name(c.edge) << " level " << c.level << "\n";
  }
  if (r.condition_I.empty()) text << "condition I holds\n";
  if (r.condition_II)
    text << "condition II fails: holonomy " << r.condition_II->holonomy.value << " at level " << r.condition_II->level
         << " around edge " << gg.graph().edge_name(r.condition_II->closing_edge) << "\n";
  else if (r.condition_I.empty())
    text << "condition II holds\n";
  return 0;
}

int cmd_search(const Flags& f, Json& out, std::ostream& text) {
  const Problem pr = load_valid(f);
  SearchOptions opts;
  opts.max_length = f.search_bound;
  opts.max_group_order = f.max_order;
  const auto r = search_series_assignment(*pr.gg, pr.p, opts);
  out["verdict"] = r.found() ? "found" : "exhausted";
  out["lengths"] = {r.min_length, r.max_length};
  out["candidates"] = r.candidates;
  if (r.found()) {
    out["series"] = to_json(*pr.gg, *r.assignment);
    out["level_maps"] = to_json(*pr.gg, *r.maps);
  }
  text << (r.found() ? "found a passing series assignment" : "no passing series assignment") << " (lengths "
       << r.min_length << ".." << r.max_length << ", " << r.candidates << " candidates)\n";
  return 0;
}

int cmd_separate(const Flags& f, Json& out, std::ostream& text) {
  const Problem pr = load_valid(f);
  if (f.word.empty()) throw InputError("--word is required");
  const Stage st{pr.gg, *pr.sd, *pr.series, maps_for(pr)};
  const GWord w = parse_word(pr, f.word);
  const auto cert = separate(st, pr.p, w);
  const auto v = verify_certificate(st, pr.p, w, cert);
  if (!v) throw InternalError("certificate does not verify: " + v.reason);
  out["word"] = to_json(*pr.gg, w);
  out["verdict"] = "separated";
  out["certificate"] = to_json(*pr.gg, cert);
  out["verified"] = true;
  text << "separated " << format_word(*pr.gg, w) << ": depth " << cert.depth() << ", ";
  if (const auto* lv = std::get_if<LevelTerminal>(&cert.terminal))
    text << "level value " << lv->value.value << "\n";
  else {
    const auto& fr = std::get<FreeTerminal>(cert.terminal);
    text << "free word " << format_free_word(fr.word) << ", Magnus degree " << fr.witness.degree << "\n";
  }
  if (f.quotient) {
    try {
      const auto q = build_explicit_quotient(st, pr.p, cert, QuotientBudget{f.max_cosets, 1u << 16});
      out["quotient"] = to_json(q, *pr.gg);
      text << "quotient of order " << q.group->order() << " on " << q.cosets << " cosets\n";
    } catch (const BudgetExceeded& e) {
      out["quotient"] = {{"error", e.what()}};
      text << "quotient: " << e.what() << "\n";
      return 3;
    }
  }
  return 0;
}

int cmd_verify(const Flags& f, Json& out, std::ostream& text) {
  const Problem pr = load_valid(f);
  if (f.certificate.empty()) throw InputError("--certificate is required");
  std::ifstream in(f.certificate);
  if (!in) throw InputError("cannot open " + f.certificate);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError(e.what());
  }
  const Json& cj = j.contains("certificate") ? j.at("certificate") : j;
  const auto cert = certificate_from_json(cj);
  const GWord w = f.word.empty() ? word_from_json(*pr.gg, cj.at("word")) : parse_word(pr, f.word);
  const Stage st{pr.gg, *pr.sd, *pr.series, maps_for(pr)};
  const auto v = verify_certificate(st, pr.p, w, cert);
  out["verdict"] = v.ok ? "valid" : "invalid";
  if (!v.ok) out["failure"] = {{"step", v.step}, {"reason", v.reason}};
  text << (v.ok ? "certificate verifies\n" : "certificate fails at step " + std::to_string(v.step) + ": " + v.reason + "\n");
  return 0;
}

int cmd_cover(const Flags& f, Json& out, std::ostream& text) {
  const Problem pr = load_valid(f);
  const LevelMaps lm = maps_for(pr);
  const LevelHom ph = build_level_hom(*pr.gg, *pr.sd, *pr.series, lm, pr.p);
  const KernelCover kc = build_kernel_cover(pr.gg, *pr.sd, *pr.series, lm, ph);
  const auto check = check_kernel_cover(kc, ph);
  if (!check.ok()) throw InternalError("kernel cover fails its checks: " + check.violations.front());
  const auto& cg = kc.cover->graph();
  Json cover = save_problem(*kc.cover, pr.p, &kc.series, &kc.maps);
  out["verdict"] = "built";
  out["vertices"] = cg.vertex_count();
  out["edge_pairs"] = cg.edge_count() / 2;
  out["graph_rank"] = graph_rank(cg);
  std::vector<std::size_t> orders;
  for (VertexId v = 0; v < cg.vertex_count(); ++v) orders.push_back(kc.cover->vertex_group(v)->order());
  out["vertex_group_orders"] = orders;
  if (!f.output.empty()) write_file(f.output, cover.dump(2) + "\n");
  else out["cover"] = std::move(cover);
  if (!f.dot.empty()) write_file(f.dot, to_dot(*kc.cover, kc.cover_sd));
  text << "cover: " << cg.vertex_count() << " vertices, " << cg.edge_count() / 2 << " edge pairs, graph rank "
       << graph_rank(cg) << "\n";
  return 0;
}

int cmd_tree(const Flags& f, Json& out, std::ostream& text) {
  const Problem pr = load_valid(f);
  const auto ball = tree_ball(*pr.gg, *pr.sd, f.radius, f.max_vertices);
  const std::string dot = to_dot(*pr.gg, ball);
  out["radius"] = f.radius;
  out["vertices"] = ball.vertices.size();
  out["edges"] = ball.edges.size();
  if (!f.dot.empty()) write_file(f.dot, dot);
  else out["dot"] = dot;
  text << "ball of radius " << f.radius << ": " << ball.vertices.size() << " vertices\n";
  if (f.dot.empty()) text << dot;
  return 0;
}

int cmd_freesep(const Flags& f, Json& out, std::ostream& text) {
  if (f.word.empty()) throw InputError("--word is required");
  const FreeWord w = parse_free_word(f.word);
  const auto wit = separate_free(w, f.prime, f.rank, f.max_degree);
  out["word"] = format_free_word(free_reduce(w));
  out["witness"] = to_json(wit);
  text << "degree " << wit.degree << ", coefficient " << wit.coefficient << " on X";
  for (auto i : wit.monomial) text << " " << i + 1;
  text << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residual p-finiteness for graphs of finite p-groups"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* c, bool needs_input = true) {
    auto* in = c->add_option("--input,-i", f.input, "problem file (JSON)");
    if (needs_input) in->required()->check(CLI::ExistingFile);
    auto* js = c->add_flag("--json", f.json, "JSON report on stdout");
    c->add_flag("--text", f.text, "text report on stdout (default)")->excludes(js);
  };
  auto* validate = app.add_subcommand("validate", "structural checks of a problem file");
  common(validate);
  auto* check = app.add_subcommand("check", "conditions I and II for the file's series");
  common(check);
  auto* search = app.add_subcommand("search", "search for a series assignment passing I and II");
  common(search);
  search->add_option("--search-bound", f.search_bound, "largest padded series length (default: exponent + 2)");
  search->add_option("--max-order", f.max_order, "largest vertex group order searched (default p^4)");
  auto* sep = app.add_subcommand("separate", "separate a word and emit a certificate");
  common(sep);
  sep->add_option("--word,-w", f.word, "word name or inline word")->required();
  sep->add_flag("--quotient", f.quotient, "also build the explicit finite quotient");
  sep->add_option("--max-cosets", f.max_cosets, "coset budget for --quotient")->capture_default_str();
  auto* verify = app.add_subcommand("verify", "replay a certificate");
  common(verify);
  verify->add_option("--certificate,-c", f.certificate, "certificate or separate report (JSON)")->required();
  verify->add_option("--word,-w", f.word, "word (default: the certificate's word)");
  auto* cover = app.add_subcommand("cover", "kernel cover of the level homomorphism");
  common(cover);
  cover->add_option("--output,-o", f.output, "write the cover problem file here");
  cover->add_option("--dot", f.dot, "write the cover graph as DOT");
  auto* tree = app.add_subcommand("tree", "ball in the Bass-Serre tree");
  common(tree);
  tree->add_option("--radius,-r", f.radius, "ball radius")->capture_default_str();
  tree->add_option("--max-vertices", f.max_vertices, "vertex budget")->capture_default_str();
  tree->add_option("--dot", f.dot, "write the ball as DOT");
  auto* freesep = app.add_subcommand("freesep", "Magnus witness for a free-group word");
  common(freesep, false);
  freesep->add_option("--prime,-p", f.prime, "prime")->capture_default_str();
  freesep->add_option("--rank", f.rank, "free rank")->capture_default_str();
  freesep->add_option("--word,-w", f.word, "word over x1, x2, ...")->required();
  freesep->add_option("--max-degree", f.max_degree, "degree cap")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  Json out = report(name);
  if (!f.input.empty()) out["input"] = f.input;
  std::ostringstream text;
  const auto start = std::chrono::steady_clock::now();
  int rc = 0;
  try {
    if (name == "validate") rc = cmd_validate(f, out, text);
    else if (name == "check") rc = cmd_check(f, out, text);
    else if (name == "search") rc = cmd_search(f, out, text);
    else if (name == "separate") rc = cmd_separate(f, out, text);
    else if (name == "verify") rc = cmd_verify(f, out, text);
    else if (name == "cover") rc = cmd_cover(f, out, text);
    else if (name == "tree") rc = cmd_tree(f, out, text);
    else rc = cmd_freesep(f, out, text);
  } catch (const InputError& e) {
    out["error"] = {{"kind", "input"}, {"message", e.what()}};
    text << "input error: " << e.what() << "\n";
    rc = 2;
  } catch (const BudgetExceeded& e) {
    out["error"] = {{"kind", "budget"}, {"message", e.what()}};
    text << "budget exceeded: " << e.what() << "\n";
    rc = 3;
  } catch (const std::exception& e) {
    out["error"] = {{"kind", "internal"}, {"message", e.what()}};
    text << "internal error: " << e.what() << "\n";
    rc = 4;
  }
  out["exit_code"] = rc;
  out["elapsed_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (f.json)
    std::cout << out.dump(2) << "\n";
  else
    (rc == 0 ? std::cout : std::cerr) << text.str();
  return rc;
}
