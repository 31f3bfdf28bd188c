#include "rpf/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace rpf {

namespace {

const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing \"" + key + "\"");
  return j.at(key);
}

std::string need_string(const Json& j, const char* key, const std::string& where) {
  const auto& v = need(j, key, where);
  if (!v.is_string()) throw InputError(where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

std::uint64_t need_uint(const Json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw InputError(where + ": expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

Elem element_ref(const FiniteGroup& g, const Json& v, const std::string& where) {
  if (v.is_number_integer()) {
    const auto x = need_uint(v, where);
    if (x >= g.order()) throw InputError(where + ": element " + std::to_string(x) + " out of range");
    return static_cast<Elem>(x);
  }
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    const auto& labels = g.labels();
    if (const auto it = std::find(labels.begin(), labels.end(), s); it != labels.end())
      return static_cast<Elem>(it - labels.begin());
    if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      const auto x = std::stoull(s);
      if (x < g.order()) return static_cast<Elem>(x);
    }
    throw InputError(where + ": unknown element \"" + s + "\"");
  }
  throw InputError(where + ": element must be an index or a label");
}

std::vector<Elem> element_list(const FiniteGroup& g, const Json& v, const std::string& where) {
  if (!v.is_array()) throw InputError(where + ": expected an array of elements");
  std::vector<Elem> out;
  for (const auto& x : v) out.push_back(element_ref(g, x, where));
  return out;
}

FiniteGroup group_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": group must be an object");
  if (j.contains("cyclic")) {
    const auto n = need_uint(j.at("cyclic"), where);
    if (n == 0) throw InputError(where + ": cyclic order must be positive");
    return FiniteGroup::cyclic(n);
  }
  if (j.contains("table")) {
    const auto& t = j.at("table");
    if (!t.is_array() || t.empty()) throw InputError(where + ": table must be a nonempty array of rows");
    const std::size_t n = t.size();
    std::vector<Elem> flat;
    for (const auto& row : t) {
      if (!row.is_array() || row.size() != n) throw InputError(where + ": table must be square");
      for (const auto& x : row) {
        const auto v = need_uint(x, where);
        if (v >= n) throw InputError(where + ": table entry out of range");
        flat.push_back(static_cast<Elem>(v));
      }
    }
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    return FiniteGroup(n, std::move(flat), std::move(labels));
  }
  if (j.contains("permutations")) {
    std::vector<std::vector<std::uint32_t>> gens;
    for (const auto& g : j.at("permutations")) {
      std::vector<std::uint32_t> perm;
      for (const auto& x : g) perm.push_back(static_cast<std::uint32_t>(need_uint(x, where)));
      gens.push_back(std::move(perm));
    }
    return FiniteGroup::from_permutations(gens, 1u << 16);
  }
  throw InputError(where + ": group needs one of \"cyclic\", \"table\", \"permutations\"");
}

ChiefSeries series_from_json(const GroupPtr& g, const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InputError(where + ": series must be a nonempty array of terms");
  std::vector<Subgroup> terms;
  for (const auto& t : j) terms.emplace_back(g, element_list(*g, t, where));
  return ChiefSeries(std::move(terms));
}

LevelScalar scalar_from_json(const Json& v, std::uint32_t p, const std::string& where) {
  if (v.is_null()) return std::nullopt;
  const auto x = need_uint(v, where);
  if (x >= p) throw InputError(where + ": scalar out of range");
  return FpScalar{static_cast<std::uint32_t>(x)};
}

Json scalar_to_json(const LevelScalar& s) { return s ? Json(s->value) : Json(nullptr); }

}  // namespace

Stage Problem::stage() const {
  if (!sd) throw InputError("graph does not validate");
  if (!series) throw InputError("problem has no series assignment");
  if (!maps) throw InputError("problem has no level maps");
  return Stage{gg, *sd, *series, *maps};
}

Problem load_problem(const Json& j) {
  if (!j.is_object()) throw InputError("problem file must be a JSON object");
  if (j.contains("format_version") && j.at("format_version") != kFormatVersion)
    throw InputError("unsupported format_version");
  Problem pr;
  pr.p = static_cast<std::uint32_t>(need_uint(need(j, "prime", "problem"), "prime"));
  if (!is_prime(pr.p)) throw InputError("prime: " + std::to_string(pr.p) + " is not prime");

  const auto& groups = need(j, "groups", "problem");
  if (!groups.is_object()) throw InputError("groups must be an object");
  for (const auto& [name, gj] : groups.items()) {
    pr.group_names.push_back(name);
    pr.groups[name] = share(group_from_json(gj, "group " + name));
  }
  auto group = [&](const std::string& name, const std::string& where) {
    const auto it = pr.groups.find(name);
    if (it == pr.groups.end()) throw InputError(where + ": unknown group \"" + name + "\"");
    return it->second;
  };

  const auto& vj = need(j, "vertices", "problem");
  if (!vj.is_array() || vj.empty()) throw InputError("vertices must be a nonempty array");
  std::vector<std::string> vnames;
  std::vector<GroupPtr> vgroups;
  for (const auto& v : vj) {
    vnames.push_back(need_string(v, "name", "vertex"));
    vgroups.push_back(group(need_string(v, "group", "vertex " + vnames.back()), "vertex " + vnames.back()));
  }
  if (std::set<std::string>(vnames.begin(), vnames.end()).size() != vnames.size())
    throw InputError("duplicate vertex name");
  auto vertex = [&](const std::string& name, const std::string& where) {
    const auto it = std::find(vnames.begin(), vnames.end(), name);
    if (it == vnames.end()) throw InputError(where + ": unknown vertex \"" + name + "\"");
    return static_cast<VertexId>(it - vnames.begin());
  };

  const Json ej = j.value("edges", Json::array());
  if (!ej.is_array()) throw InputError("edges must be an array");
  const bool explicit_form = !ej.empty() && std::all_of(ej.begin(), ej.end(), [](const Json& e) {
    return e.is_object() && e.contains("bar");
  });
  std::vector<std::string> enames;
  std::vector<GroupPtr> egroups;
  std::vector<std::vector<Elem>> maps;
  Graph graph;
  if (explicit_form) {
    std::vector<VertexId> o, t;
    std::vector<std::string> bar_names;
    for (const auto& e : ej) {
      const auto name = need_string(e, "name", "edge");
      const auto where = "edge " + name;
      enames.push_back(name);
      o.push_back(vertex(need_string(e, "o", where), where));
      t.push_back(vertex(need_string(e, "t", where), where));
      egroups.push_back(group(need_string(e, "group", where), where));
      maps.push_back(element_list(*vgroups[t.back()], need(e, "map", where), where));
      bar_names.push_back(need_string(e, "bar", where));
    }
    std::vector<EdgeId> bar;
    for (std::size_t i = 0; i < ej.size(); ++i) {
      const auto it = std::find(enames.begin(), enames.end(), bar_names[i]);
      if (it == enames.end()) throw InputError("edge " + enames[i] + ": unknown opposite \"" + bar_names[i] + "\"");
      bar.push_back(static_cast<EdgeId>(it - enames.begin()));
    }
    graph = Graph::from_tables(vnames.size(), std::move(bar), std::move(o), std::move(t));
  } else {
    std::vector<std::pair<VertexId, VertexId>> pairs;
    for (const auto& e : ej) {
      const auto name = need_string(e, "name", "edge");
      const auto where = "edge " + name;
      const VertexId o = vertex(need_string(e, "o", where), where);
      const VertexId t = vertex(need_string(e, "t", where), where);
      pairs.emplace_back(o, t);
      enames.push_back(name);
      enames.push_back(e.contains("bar_name") ? need_string(e, "bar_name", where) : name + "~");
      const auto eg = group(need_string(e, "group", where), where);
      egroups.push_back(eg);
      egroups.push_back(eg);
      maps.push_back(element_list(*vgroups[t], need(e, "to_t", where), where));
      maps.push_back(element_list(*vgroups[o], need(e, "to_o", where), where));
    }
    graph = Graph(vnames.size(), pairs);
  }
  if (std::set<std::string>(enames.begin(), enames.end()).size() != enames.size())
    throw InputError("duplicate edge name");
  std::vector<GroupHom> monos;
  for (EdgeId e = 0; e < enames.size(); ++e) {
    if (maps[e].size() != egroups[e]->order())
      throw InputError("edge " + enames[e] + ": map has " + std::to_string(maps[e].size()) + " entries, group order is " +
                       std::to_string(egroups[e]->order()));
    monos.emplace_back(egroups[e], vgroups[graph.terminus(e)], maps[e]);
  }
  graph.set_names(vnames, enames);
  pr.gg = std::make_shared<const GraphOfGroups>(std::move(graph), vgroups, egroups, std::move(monos));
  const auto& g = pr.gg->graph();
  if (validate_graph(g).ok()) pr.sd = spanning_tree(g);

  if (j.contains("letters")) {
    for (const auto& [name, lj] : j.at("letters").items()) {
      const auto where = "letter " + name;
      const VertexId v = vertex(need_string(lj, "vertex", where), where);
      pr.letters[name] = VertexLetter{v, element_ref(*vgroups[v], need(lj, "element", where), where)};
    }
  }

  if (j.contains("series")) {
    const auto& sj = j.at("series");
    SeriesAssignment sa;
    const Json sv = sj.value("vertices", Json::object());
    const Json se = sj.value("edges", Json::object());
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      const auto name = g.vertex_name(v);
      if (sv.contains(name))
        sa.vertex.push_back(series_from_json(pr.gg->vertex_group(v), sv.at(name), "series at " + name));
      else if (pr.gg->vertex_group(v)->order() == 1)
        sa.vertex.push_back(ChiefSeries({Subgroup::whole(pr.gg->vertex_group(v))}));
      else
        throw InputError("series missing for vertex " + name);
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      std::string name = g.edge_name(e);
      if (!se.contains(name) && g.bar(e) < g.edge_count()) name = g.edge_name(g.bar(e));
      if (se.contains(name))
        sa.edge.push_back(series_from_json(pr.gg->edge_group(e), se.at(name), "series at " + name));
      else if (pr.gg->edge_group(e)->order() == 1)
        sa.edge.push_back(ChiefSeries({Subgroup::whole(pr.gg->edge_group(e))}));
      else
        throw InputError("series missing for edge " + g.edge_name(e));
    }
    pr.series = std::move(sa);
  }

  if (j.contains("level_maps")) {
    const auto& mj = j.at("level_maps");
    const Json mv = mj.value("vertices", Json::object());
    const Json me = mj.value("edges", Json::object());
    std::size_t levels = 0;
    for (const auto& [k, a] : mv.items()) levels = std::max(levels, a.size());
    for (const auto& [k, a] : me.items()) levels = std::max(levels, a.size());
    LevelMaps lm;
    lm.vertex.assign(levels, std::vector<LevelScalar>(g.vertex_count()));
    lm.edge.assign(levels, std::vector<LevelScalar>(g.edge_count()));
    for (const auto& [name, a] : mv.items()) {
      const VertexId v = vertex(name, "level maps");
      for (std::size_t k = 0; k < a.size(); ++k) lm.vertex[k][v] = scalar_from_json(a[k], pr.p, "level map at " + name);
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      std::string name = g.edge_name(e);
      if (!me.contains(name) && g.bar(e) < g.edge_count()) name = g.edge_name(g.bar(e));
      if (!me.contains(name)) continue;
      const auto& a = me.at(name);
      for (std::size_t k = 0; k < a.size(); ++k) lm.edge[k][e] = scalar_from_json(a[k], pr.p, "level map at " + name);
    }
    pr.maps = std::move(lm);
  }

  if (j.contains("words"))
    for (const auto& [name, text] : j.at("words").items()) {
      if (!text.is_string()) throw InputError("word " + name + " must be a string");
      pr.words.emplace_back(name, text.get<std::string>());
    }
  return pr;
}

Problem load_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return load_problem(j);
}

ValidationReport validate_problem(const Problem& pr) {
  ValidationReport r;
  for (const auto& name : pr.group_names) {
    const auto v = validate_group(*pr.groups.at(name));
    for (const auto& s : v.report.violations) r.fail("group " + name + ": " + s);
    if (v.report.ok() && pr.groups.at(name)->order() > 1 && (!v.prime_power || v.prime_power->p != pr.p))
      r.fail("group " + name + " has order " + std::to_string(pr.groups.at(name)->order()) + ", not a power of " +
             std::to_string(pr.p));
  }
  if (!r.ok()) return r;
  r.merge(validate_gog(*pr.gg));
  if (!r.ok()) return r;
  if (pr.sd) r.merge(validate_spanning(pr.gg->graph(), *pr.sd));
  if (pr.series) r.merge(validate_assignment(*pr.gg, *pr.series, pr.p));
  if (pr.maps && pr.series && r.ok()) {
    const std::size_t n = pr.series->length_bound();
    if (pr.maps->levels() < n) r.fail("level maps cover " + std::to_string(pr.maps->levels()) + " levels, need " +
                                      std::to_string(n));
  }
  if (pr.maps && !pr.series) r.fail("level maps given without a series assignment");
  for (const auto& [name, text] : pr.words) {
    try {
      parse_word(pr, text);
    } catch (const InputError& e) {
      r.fail("word " + name + ": " + e.what());
    }
  }
  return r;
}

Json save_problem(const GraphOfGroups& gg, std::uint32_t p, const SeriesAssignment* sa, const LevelMaps* lm) {
  const auto& g = gg.graph();
  Json j;
  j["format_version"] = kFormatVersion;
  j["prime"] = p;
  std::vector<const FiniteGroup*> seen;
  auto group_name = [&](const GroupPtr& gp) {
    auto it = std::find(seen.begin(), seen.end(), gp.get());
    if (it == seen.end()) {
      seen.push_back(gp.get());
      it = seen.end() - 1;
    }
    return "G" + std::to_string(it - seen.begin());
  };
  Json groups = Json::object();
  auto add_group = [&](const GroupPtr& gp) {
    const auto name = group_name(gp);
    if (groups.contains(name)) return name;
    Json t = Json::array();
    for (Elem a = 0; a < gp->order(); ++a) {
      Json row = Json::array();
      for (Elem b = 0; b < gp->order(); ++b) row.push_back(gp->mul(a, b));
      t.push_back(std::move(row));
    }
    groups[name]["table"] = std::move(t);
    if (gp->has_labels()) groups[name]["labels"] = gp->labels();
    return name;
  };
  Json vertices = Json::array();
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    vertices.push_back({{"name", g.vertex_name(v)}, {"group", add_group(gg.vertex_group(v))}});
  auto map_json = [&](EdgeId e) {
    Json m = Json::array();
    for (Elem h = 0; h < gg.edge_group(e)->order(); ++h) m.push_back(gg.mono(e)(h));
    return m;
  };
  bool pairs_ok = validate_graph(g).ok();
  Json edges = Json::array();
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (pairs_ok) {
      if (g.bar(e) < e) continue;
      edges.push_back({{"name", g.edge_name(e)},
                       {"bar_name", g.edge_name(g.bar(e))},
                       {"o", g.vertex_name(g.origin(e))},
                       {"t", g.vertex_name(g.terminus(e))},
                       {"group", add_group(gg.edge_group(e))},
                       {"to_t", map_json(e)},
                       {"to_o", map_json(g.bar(e))}});
    } else {
      edges.push_back({{"name", g.edge_name(e)},
                       {"bar", g.bar(e) < g.edge_count() ? g.edge_name(g.bar(e)) : std::string("?")},
                       {"o", g.vertex_name(g.origin(e))},
                       {"t", g.vertex_name(g.terminus(e))},
                       {"group", add_group(gg.edge_group(e))},
                       {"map", map_json(e)}});
    }
  }
  j["groups"] = std::move(groups);
  j["vertices"] = std::move(vertices);
  j["edges"] = std::move(edges);
  if (sa) j["series"] = to_json(gg, *sa);
  if (lm) j["level_maps"] = to_json(gg, *lm);
  return j;
}

// ---------------------------------------------------------------------------
// words

namespace {

std::vector<std::string> split(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

std::pair<std::string, long> split_power(const std::string& tok) {
  const auto caret = tok.find('^');
  if (caret == std::string::npos) return {tok, 1};
  const auto base = tok.substr(0, caret);
  const auto exp = tok.substr(caret + 1);
  try {
    std::size_t used = 0;
    const long k = std::stol(exp, &used);
    if (used != exp.size()) throw std::invalid_argument(exp);
    return {base, k};
  } catch (const std::logic_error&) {
    throw InputError("bad exponent in \"" + tok + "\"");
  }
}

void append_word(const Problem& pr, const std::string& text, GWord& out, int depth) {
  if (depth > 8) throw InputError("word definitions nest too deeply");
  const auto& gg = *pr.gg;
  const auto& g = gg.graph();
  for (const auto& tok : split(text)) {
    if (tok == "1") continue;
    const auto [base, k] = split_power(tok);
    if (const auto colon = base.find(':'); colon != std::string::npos) {
      const VertexId v = g.find_vertex(base.substr(0, colon));
      if (v == kNone) throw InputError("unknown vertex in \"" + tok + "\"");
      const auto& gv = *gg.vertex_group(v);
      const Elem a = element_ref(gv, Json(base.substr(colon + 1)), "letter " + tok);
      out.letters.emplace_back(VertexLetter{v, gv.pow(a, k)});
      continue;
    }
    if (const auto it = pr.letters.find(base); it != pr.letters.end()) {
      const auto& gv = *gg.vertex_group(it->second.vertex);
      out.letters.emplace_back(VertexLetter{it->second.vertex, gv.pow(it->second.element, k)});
      continue;
    }
    if (const EdgeId e = g.find_edge(base); e != kNone) {
      for (long i = 0; i < std::labs(k); ++i) out.letters.emplace_back(StableLetter{e, k > 0 ? 1 : -1});
      continue;
    }
    const auto wt = std::find_if(pr.words.begin(), pr.words.end(), [&](const auto& nw) { return nw.first == base; });
    if (wt != pr.words.end()) {
      GWord sub{out.basepoint, {}};
      append_word(pr, wt->second, sub, depth + 1);
      if (k < 0) sub = inverse(gg, sub);
      for (long i = 0; i < std::labs(k); ++i) out.letters.insert(out.letters.end(), sub.letters.begin(), sub.letters.end());
      continue;
    }
    throw InputError("unknown letter \"" + base + "\"");
  }
}

}  // namespace

GWord parse_word(const Problem& pr, const std::string& text) {
  GWord w{pr.sd ? pr.sd->root : 0, {}};
  append_word(pr, text, w, 0);
  check_word(*pr.gg, w);
  return w;
}

FreeWord parse_free_word(const std::string& text) {
  FreeWord out;
  for (const auto& tok : split(text)) {
    if (tok == "1") continue;
    const auto [base, k] = split_power(tok);
    if (base.size() < 2 || (base[0] != 'x' && base[0] != 'X'))
      throw InputError("free letters are x1, x2, ...: \"" + tok + "\"");
    std::uint32_t gen = 0;
    try {
      std::size_t used = 0;
      const auto i = std::stoul(base.substr(1), &used);
      if (used != base.size() - 1 || i == 0) throw std::invalid_argument(base);
      gen = static_cast<std::uint32_t>(i - 1);
    } catch (const std::logic_error&) {
      throw InputError("bad free letter \"" + tok + "\"");
    }
    for (long i = 0; i < std::labs(k); ++i) out.push_back({gen, k > 0 ? 1 : -1});
  }
  return out;
}

std::string format_free_word(const FreeWord& w) {
  if (w.empty()) return "1";
  std::string s;
  for (const auto& x : w) {
    if (!s.empty()) s += ' ';
    s += "x" + std::to_string(x.gen + 1);
    if (x.exponent < 0) s += "^-1";
  }
  return s;
}

namespace {

Json word_to_json_plain(const GWord& w) {
  Json letters = Json::array();
  for (const auto& letter : w.letters) {
    if (const auto* v = std::get_if<VertexLetter>(&letter))
      letters.push_back({{"vertex", v->vertex}, {"element", v->element}});
    else {
      const auto& s = std::get<StableLetter>(letter);
      letters.push_back({{"edge", s.edge}, {"exponent", s.exponent}});
    }
  }
  return {{"basepoint", w.basepoint}, {"letters", std::move(letters)}};
}

}  // namespace

Json to_json(const GraphOfGroups& gg, const GWord& w) {
  Json j = word_to_json_plain(w);
  j["text"] = format_word(gg, w);
  return j;
}

namespace {

GWord word_from_json_raw(const Json& j) {
  GWord w;
  w.basepoint = static_cast<VertexId>(need_uint(need(j, "basepoint", "word"), "word basepoint"));
  for (const auto& l : need(j, "letters", "word")) {
    if (l.contains("vertex"))
      w.letters.emplace_back(VertexLetter{static_cast<VertexId>(need_uint(l.at("vertex"), "word letter")),
                                          static_cast<Elem>(need_uint(need(l, "element", "word letter"), "word letter"))});
    else
      w.letters.emplace_back(StableLetter{static_cast<EdgeId>(need_uint(need(l, "edge", "word letter"), "word letter")),
                                          need(l, "exponent", "word letter").get<int>()});
  }
  return w;
}

}  // namespace

GWord word_from_json(const GraphOfGroups& gg, const Json& j) {
  GWord w = word_from_json_raw(j);
  check_word(gg, w);
  return w;
}

// ---------------------------------------------------------------------------
// reports

Json to_json(const GraphOfGroups& gg, const SeriesAssignment& sa) {
  const auto& g = gg.graph();
  auto series = [](const ChiefSeries& s) {
    Json a = Json::array();
    for (const auto& t : s.terms()) a.push_back(std::vector<Elem>(t.elements().begin(), t.elements().end()));
    return a;
  };
  Json v = Json::object(), e = Json::object();
  for (VertexId x = 0; x < g.vertex_count(); ++x) v[g.vertex_name(x)] = series(sa.vertex[x]);
  for (EdgeId y = 0; y < g.edge_count(); ++y) e[g.edge_name(y)] = series(sa.edge[y]);
  return {{"vertices", std::move(v)}, {"edges", std::move(e)}};
}

Json to_json(const GraphOfGroups& gg, const LevelMaps& lm) {
  const auto& g = gg.graph();
  Json v = Json::object(), e = Json::object();
  for (VertexId x = 0; x < g.vertex_count(); ++x) {
    Json a = Json::array();
    for (std::size_t k = 0; k < lm.levels(); ++k) a.push_back(scalar_to_json(lm.vertex[k][x]));
    v[g.vertex_name(x)] = std::move(a);
  }
  for (EdgeId y = 0; y < g.edge_count(); ++y) {
    Json a = Json::array();
    for (std::size_t k = 0; k < lm.levels(); ++k) a.push_back(scalar_to_json(lm.edge[k][y]));
    e[g.edge_name(y)] = std::move(a);
  }
  return {{"vertices", std::move(v)}, {"edges", std::move(e)}};
}

Json to_json(const GraphOfGroups& gg, const ComplianceReport& r, const LevelMaps* solved) {
  const auto& g = gg.graph();
  Json ci = Json::array();
  for (const auto& f : r.condition_I)
    ci.push_back({{"edge", g.edge_name(f.edge)}, {"level", f.level}, {"image", f.image}, {"intersection", f.intersection}});
  Json out;
  out["ok"] = r.ok();
  out["condition_I"] = {{"ok", r.condition_I.empty()}, {"failures", std::move(ci)}};
  if (!r.condition_I.empty()) {
    out["condition_II"] = {{"ok", nullptr}, {"reason", "not checked: condition I fails"}};
  } else if (r.condition_II) {
    const auto& w = *r.condition_II;
    Json path = Json::array();
    for (EdgeId e : w.forest_path) path.push_back(g.edge_name(e));
    out["condition_II"] = {{"ok", false},
                           {"witness",
                            {{"level", w.level},
                             {"closing_edge", g.edge_name(w.closing_edge)},
                             {"forest_path", std::move(path)},
                             {"holonomy", w.holonomy.value}}}};
  } else {
    out["condition_II"] = {{"ok", true}};
    if (solved) out["level_maps"] = to_json(gg, *solved);
  }
  return out;
}

Json to_json(const MagnusWitness& w) {
  return {{"degree", w.degree}, {"monomial", w.monomial}, {"coefficient", w.coefficient}};
}

Json to_json(const GraphOfGroups& gg, const SeparationCertificate& cert) {
  Json steps = Json::array();
  for (const auto& s : cert.steps) {
    Json j;
    j["kind"] = s.kind == DescentStep::Kind::Descended ? "descended" : "reindexed";
    j["length_bound"] = s.length_bound;
    j["forced_edge"] = s.forced_edge ? Json(*s.forced_edge) : Json(nullptr);
    j["word"] = word_to_json_plain(s.word);
    if (s.kind == DescentStep::Kind::Descended) {
      j["rewritten"] = word_to_json_plain(s.rewritten);
      j["cover_vertices"] = s.cover_vertices;
      j["cover_edge_pairs"] = s.cover_edge_pairs;
    }
    steps.push_back(std::move(j));
  }
  Json terminal;
  if (const auto* lv = std::get_if<LevelTerminal>(&cert.terminal)) {
    terminal = {{"kind", "level"},
                {"value", lv->value.value},
                {"forced_edge", lv->forced_edge ? Json(*lv->forced_edge) : Json(nullptr)}};
  } else {
    const auto& fr = std::get<FreeTerminal>(cert.terminal);
    Json fw = Json::array();
    for (const auto& x : fr.word) fw.push_back({x.gen, x.exponent});
    terminal = {{"kind", "free"},
                {"rank", fr.rank},
                {"word", std::move(fw)},
                {"text", format_free_word(fr.word)},
                {"witness", to_json(fr.witness)}};
  }
  Json out;
  out["format_version"] = kFormatVersion;
  out["prime"] = cert.p;
  out["depth"] = cert.depth();
  out["word"] = to_json(gg, cert.word);
  out["steps"] = std::move(steps);
  out["terminal_word"] = word_to_json_plain(cert.terminal_word);
  out["terminal"] = std::move(terminal);
  return out;
}

SeparationCertificate certificate_from_json(const Json& j) {
  try {
    SeparationCertificate c;
    c.p = static_cast<std::uint32_t>(need_uint(need(j, "prime", "certificate"), "prime"));
    c.word = word_from_json_raw(need(j, "word", "certificate"));
    for (const auto& sj : need(j, "steps", "certificate")) {
      DescentStep s;
      const auto kind = need_string(sj, "kind", "step");
      if (kind != "descended" && kind != "reindexed") throw InputError("step: unknown kind " + kind);
      s.kind = kind == "descended" ? DescentStep::Kind::Descended : DescentStep::Kind::Reindexed;
      s.length_bound = need_uint(need(sj, "length_bound", "step"), "step");
      if (const auto& f = need(sj, "forced_edge", "step"); !f.is_null())
        s.forced_edge = static_cast<EdgeId>(need_uint(f, "step"));
      s.word = word_from_json_raw(need(sj, "word", "step"));
      if (s.kind == DescentStep::Kind::Descended) {
        s.rewritten = word_from_json_raw(need(sj, "rewritten", "step"));
        s.cover_vertices = need_uint(need(sj, "cover_vertices", "step"), "step");
        s.cover_edge_pairs = need_uint(need(sj, "cover_edge_pairs", "step"), "step");
      }
      c.steps.push_back(std::move(s));
    }
    c.terminal_word = word_from_json_raw(need(j, "terminal_word", "certificate"));
    const auto& tj = need(j, "terminal", "certificate");
    const auto kind = need_string(tj, "kind", "terminal");
    if (kind == "level") {
      LevelTerminal t;
      t.value = FpScalar{static_cast<std::uint32_t>(need_uint(need(tj, "value", "terminal"), "terminal"))};
      if (const auto& f = need(tj, "forced_edge", "terminal"); !f.is_null())
        t.forced_edge = static_cast<EdgeId>(need_uint(f, "terminal"));
      c.terminal = t;
    } else if (kind == "free") {
      FreeTerminal t;
      t.rank = static_cast<std::uint32_t>(need_uint(need(tj, "rank", "terminal"), "terminal"));
      for (const auto& x : need(tj, "word", "terminal")) {
        if (!x.is_array() || x.size() != 2) throw InputError("terminal: free letters are [generator, exponent]");
        t.word.push_back({static_cast<std::uint32_t>(need_uint(x[0], "terminal")), x[1].get<int>()});
      }
      const auto& wj = need(tj, "witness", "terminal");
      t.witness.degree = static_cast<std::uint32_t>(need_uint(need(wj, "degree", "witness"), "witness"));
      t.witness.monomial = need(wj, "monomial", "witness").get<Monomial>();
      t.witness.coefficient = static_cast<std::uint32_t>(need_uint(need(wj, "coefficient", "witness"), "witness"));
      c.terminal = t;
    } else {
      throw InputError("terminal: unknown kind " + kind);
    }
    return c;
  } catch (const Json::exception& e) {
    throw InputError(std::string("certificate: ") + e.what());
  }
}

Json to_json(const ExplicitQuotient& q, const GraphOfGroups& gg) {
  const auto& g = gg.graph();
  Json gens = Json::array();
  for (std::size_t i = 0; i < q.generators.size(); ++i) {
    std::string name;
    if (const auto* v = std::get_if<VertexLetter>(&q.generators[i]))
      name = g.vertex_name(v->vertex) + ":" + gg.vertex_group(v->vertex)->label(v->element);
    else
      name = g.edge_name(std::get<StableLetter>(q.generators[i]).edge);
    gens.push_back({{"letter", name}, {"image", q.generator_images[i]}, {"permutation", q.permutations[i]}});
  }
  Json out;
  out["order"] = q.group->order();
  out["cosets"] = q.cosets;
  out["generators"] = std::move(gens);
  out["word_image"] = q.word_image;
  if (q.group->order() <= 256) {
    Json t = Json::array();
    for (Elem a = 0; a < q.group->order(); ++a) {
      Json row = Json::array();
      for (Elem b = 0; b < q.group->order(); ++b) row.push_back(q.group->mul(a, b));
      t.push_back(std::move(row));
    }
    out["table"] = std::move(t);
  }
  return out;
}

}  // namespace rpf
