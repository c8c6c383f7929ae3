#pragma once

/**
 * @file cli.hpp
 * @brief Command-line front end. `run` is the whole program minus main(),
 * so tests can drive it with in-memory streams.
 *
 * Exit codes: 0 decided (either verdict), 1 usage/parse/capability error,
 * 2 budget exceeded or undecidable here.
 */

#include "io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace kcons::cli {

inline constexpr int exit_decided = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_undecided = 2;

struct Options {
  std::string format = "json";
  std::uint64_t seed = 20240601;
  std::uint64_t budget = default_budget;
};

inline int run_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

namespace detail {

inline void emit_text_value(std::ostream& out, const json& v, int indent);

/// Generic text rendering: one `key: value` line per field, relations as tables.
inline void emit_text(std::ostream& out, const json& j, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (j.is_object() && j.contains("tuples") && j.contains("attributes")) {
    std::string head = j.value("name", std::string("R")) + "(";
    const auto attrs = j.at("attributes").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < attrs.size(); ++i) head += (i ? "," : "") + attrs[i];
    out << pad << head << ")\n";
    for (const auto& t : j.at("tuples")) {
      out << pad << "  ";
      for (const auto& a : attrs) out << t.at("values").at(a).get<std::string>() << ' ';
      out << ": " << t.at("annotation").dump() << '\n';
    }
    return;
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    out << pad << it.key() << ":";
    emit_text_value(out, it.value(), indent);
  }
}

inline void emit_text_value(std::ostream& out, const json& v, int indent) {
  const bool nested_obj = v.is_object() && !v.empty();
  const bool nested_arr = v.is_array() && std::any_of(v.begin(), v.end(), [](const json& x) { return x.is_object(); });
  if (!nested_obj && !nested_arr) {
    out << ' ' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    return;
  }
  out << '\n';
  if (nested_obj) {
    emit_text(out, v, indent + 2);
    return;
  }
  for (const auto& x : v) {
    if (x.is_object()) {
      emit_text(out, x, indent + 2);
    } else {
      out << std::string(static_cast<std::size_t>(indent + 2), ' ') << x.dump() << '\n';
    }
  }
}

inline void emit(std::ostream& out, const Options& opt, const json& report, const std::string& trailer = "") {
  if (opt.format == "text") {
    emit_text(out, report);
    if (!trailer.empty()) out << trailer << '\n';
  } else {
    out << report.dump(2) << '\n';
  }
}

inline int fail(std::ostream& err, const std::string& code, const std::string& msg) {
  err << json{{"error", {{"code", code}, {"message", msg}}}}.dump() << '\n';
  return exit_error;
}

inline int exit_for(Outcome o) {
  return (o == Outcome::consistent || o == Outcome::inconsistent) ? exit_decided : exit_undecided;
}

inline json parse_literal_arg(const std::string& s) {
  try {
    return json::parse(s);
  } catch (const json::parse_error&) {
    return json(s);
  }
}

inline Monoid monoid_arg(const std::string& name, const std::string& params) {
  json p = json::object();
  if (!params.empty()) {
    try {
      p = json::parse(params);
    } catch (const json::parse_error& e) {
      throw instance_error("parse-error", std::string("--monoid-params: ") + e.what());
    }
  }
  try {
    return make_builtin(name, p);
  } catch (const monoid_error& e) {
    throw instance_error("unknown-monoid", e.what());
  }
}

inline Element element_arg(const Monoid& m, const std::string& literal) {
  try {
    return m.parse(parse_literal_arg(literal));
  } catch (const monoid_error& e) {
    throw instance_error("invalid-element", e.what());
  }
}

inline Hypergraph schema_for(const Instance& in) {
  if (in.schema) return *in.schema;
  if (in.relations.empty()) throw instance_error("invalid-instance", "instance has neither 'schema' nor 'relations'");
  return schema_of(in.relations);
}

// ---------------------------------------------------------------------------
// commands

inline int check_acyclic_cmd(const Options& opt, const std::string& path, std::ostream& out) {
  const Instance in = load_instance(path);
  const Hypergraph h = schema_for(in);
  const AcyclicityCertificate cert = check_acyclic(h);
  json report{{"command", "check-acyclic"}, {"schema", hypergraph_to_json(h)}};
  report.update(certificate_to_json(h, cert));
  if (!cert.acyclic) report["core_verified"] = verify_core(h, cert);
  emit(out, opt, report);
  return exit_decided;
}

inline int check_cmd(const Options& opt, const std::string& path, bool global, std::ostream& out) {
  const Instance in = load_instance(path);
  if (in.relations.empty()) throw instance_error("invalid-instance", "instance has no relations");
  const Verdict v = global ? check_global(in.relations, opt.budget)
                           : check_kwise(in.relations, std::min<int>(2, static_cast<int>(in.relations.size())),
                                         opt.budget);
  json report{{"command", global ? "check-global" : "check-pairwise"},
              {"monoid", in.monoid.name()},
              {"relations", in.names},
              {"verdict", verdict_to_json(v, in.names, in.relations)}};
  emit(out, opt, report);
  return exit_for(v.outcome);
}

inline int solve_transport_cmd(const Options& opt, const std::string& path, const std::string& method,
                               std::ostream& out) {
  const Instance in = load_instance(path);
  if (!in.transport) throw instance_error("invalid-instance", "instance has no transport problem ('b' and 'c')");
  const TransportInstance& t = *in.transport;
  TransportResult res;
  if (!is_balanced(t)) {
    res.status = TransportStatus::unbalanced;
    res.method = method;
  } else if (method == "auto") {
    res = solve_best(t, opt.budget);
  } else if (method == "exhaustive") {
    res = solve_exhaustive(t, opt.budget);
  } else if (method == "p3") {
    res = transport_via_p3(t, opt.budget);
  } else {
    res.method = method;
    res.status = TransportStatus::solved;
    if (method == "northwest") {
      res.d = solve_northwest(t);
    } else if (method == "componentwise") {
      res.d = solve_componentwise(t, opt.budget);
    } else if (method == "meet") {
      res.d = solve_meet(t);
    } else if (method == "vorobev") {
      res.d = solve_vorobev(t);
    } else {
      throw instance_error("usage", "unknown transport method '" + method + "'");
    }
  }
  json report{{"command", "solve-transport"},
              {"monoid", t.monoid.name()},
              {"method", res.method},
              {"status", to_string(res.status)}};
  if (res.status == TransportStatus::solved) {
    report["matrix"] = matrix_to_json(t.monoid, res.d);
    report["verified"] = verify_solution(t, res.d);
  } else if (res.status == TransportStatus::no_solver) {
    report["status"] = "undecidable-here";
  }
  if (res.nodes > 0) report["nodes"] = res.nodes;
  emit(out, opt, report);
  const bool decided = res.status == TransportStatus::solved || res.status == TransportStatus::infeasible ||
                       res.status == TransportStatus::unbalanced;
  return decided ? exit_decided : exit_undecided;
}

inline int join_cmd(const Options& opt, const std::string& path, const std::string& method, const std::string& left,
                    const std::string& right, std::ostream& out) {
  const Instance in = load_instance(path);
  const KRelation& r = in.relations.at(in.index_of(left));
  const KRelation& s = in.relations.at(in.index_of(right));
  const KRelation w = join(r, s, parse_join_method(method));
  const std::string support = "support: |W'|=" + std::to_string(w.support_size()) +
                              ", bound=|R'|+|S'|=" + std::to_string(r.support_size() + s.support_size());
  json report{{"command", "join"},
              {"method", method},
              {"monoid", in.monoid.name()},
              {"witness", relation_to_json(w, left + "*" + right)},
              {"verified", verify_witness(w, {r, s})},
              {"support", support}};
  if (opt.format == "text") {
    emit_text(out, report.at("witness"));
    out << "method: " << method << "\nverified: " << (report.at("verified").get<bool>() ? "true" : "false") << '\n'
        << support << '\n';
  } else {
    emit(out, opt, report);
  }
  return exit_decided;
}

inline int counterexample_cmd(const Options& opt, const std::string& schema_path, const std::string& monoid,
                              const std::string& params, const std::string& element, std::ostream& out) {
  const Hypergraph h = hypergraph_from_json(read_json_file(schema_path).contains("schema")
                                                ? read_json_file(schema_path).at("schema")
                                                : read_json_file(schema_path));
  const Monoid m = monoid_arg(monoid, params);
  const Element c = element_arg(m, element);
  const Counterexample cx = generate_counterexample(h, m, c);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < cx.relations.size(); ++i) names.push_back("R" + std::to_string(i + 1));
  json report = instance_to_json(m, cx.domains, cx.relations, names);
  report["command"] = "counterexample";
  report["schema"] = hypergraph_to_json(h);
  report["a"] = m.render(cx.a);
  report["certificate"] = certificate_to_json(h, cx.cert);
  const ParityCertificate pc = parity_certificate(h, cx.cert);
  report["parity_certificate"] = {{"k", pc.k},
                                  {"d", pc.d},
                                  {"uniform", pc.uniform},
                                  {"regular", pc.regular},
                                  {"assignments_checked", pc.assignments},
                                  {"no_assignment", pc.no_assignment},
                                  {"valid", pc.valid()}};
  emit(out, opt, report);
  return exit_decided;
}

inline Cover cover_arg(const std::string& kind, const Monoid& m) {
  return cover_from_json(json{{"kind", kind}}, m);
}

inline int lift_cmd(const Options& opt, const std::string& path, const std::string& kind, std::ostream& out) {
  const Instance in = load_instance(path);
  const Cover cv = cover_arg(kind, in.monoid);
  json report = in.raw;
  report["cover"] = cover_to_json(cv);
  report["lifts"] = json::array();
  if (in.witness) {
    const LiftedWitness lw = lift_global_witness(*in.witness, in.relations, cv);
    for (std::size_t i = 0; i < lw.lifts.size(); ++i) report["lifts"].push_back(relation_to_json(lw.lifts[i].lifted, in.names[i]));
    report["lift_source"] = "witness";
  } else {
    for (std::size_t i = 0; i < in.relations.size(); ++i) {
      report["lifts"].push_back(relation_to_json(canonical_lift(in.relations[i], cv).lifted, in.names[i]));
    }
    report["lift_source"] = "canonical";
  }
  emit(out, opt, report);
  return exit_decided;
}

inline int chase_free_cover_cmd(const Options& opt, const std::string& path, std::ostream& out) {
  const Instance in = load_instance(path);
  if (!in.cover || in.lifts.size() != in.relations.size()) {
    throw instance_error("invalid-instance", "instance needs a 'cover' and one lift per relation");
  }
  const Hypergraph h = schema_of(in.relations);
  const AcyclicityCertificate cert = check_acyclic(h);
  if (!cert.acyclic) throw instance_error("cyclic-schema", "chase-free-cover needs an acyclic schema");
  std::vector<LiftedRelation> lifts;
  for (std::size_t i = 0; i < in.relations.size(); ++i) lifts.push_back({in.relations[i], in.lifts[i]});
  const KRelation w = chase_up_to_free_cover(lifts, cert, *in.cover, opt.budget);
  json report{{"command", "chase-free-cover"},
              {"monoid", in.monoid.name()},
              {"cover", cover_to_json(*in.cover)},
              {"witness", relation_to_json(w, "W")},
              {"verified", verify_witness(w, in.relations)}};
  emit(out, opt, report);
  return exit_decided;
}

inline int cover_counterexample_cmd(const Options& opt, const std::string& schema_path, const std::string& monoid,
                                    const std::string& params, const std::string& element, const std::string& kind,
                                    std::ostream& out) {
  const json sj = read_json_file(schema_path);
  const Hypergraph h = hypergraph_from_json(sj.contains("schema") ? sj.at("schema") : sj);
  const Monoid m = monoid_arg(monoid, params);
  const Element c = element_arg(m, element);
  const Cover cv = cover_arg(kind, m);
  const CoverCounterexample cx = generate_cover_counterexample(h, m, c, cv);
  std::vector<std::string> names;
  std::vector<KRelation> up;
  for (std::size_t i = 0; i < cx.base.relations.size(); ++i) {
    names.push_back("R" + std::to_string(i + 1));
    up.push_back(cx.lifts[i].lifted);
  }
  json report = instance_to_json(m, cx.base.domains, cx.base.relations, names);
  report["command"] = "cover-counterexample";
  report["schema"] = hypergraph_to_json(h);
  report["cover"] = cover_to_json(cv);
  report["a"] = m.render(cx.base.a);
  report["a_star"] = cv.upstairs.render(cx.a_star);
  report["lifts"] = json::array();
  for (std::size_t i = 0; i < up.size(); ++i) report["lifts"].push_back(relation_to_json(up[i], names[i]));
  emit(out, opt, report);
  return exit_decided;
}

/// Every key of `want` must match in `got`; objects recursively, everything else exactly.
inline bool matches(const json& want, const json& got) {
  if (want.is_object()) {
    if (!got.is_object()) return false;
    for (auto it = want.begin(); it != want.end(); ++it) {
      if (!got.contains(it.key()) || !matches(it.value(), got.at(it.key()))) return false;
    }
    return true;
  }
  return want == got;
}

/// Randomized northwest-join spot check, seeded for reproducibility.
inline bool northwest_smoke(std::uint64_t seed, int rounds) {
  std::mt19937_64 rng(seed);
  const Monoid n = make_builtin("N");
  const DomainMap doms{{"A", {"a1", "a2", "a3"}}, {"B", {"b1", "b2"}}, {"C", {"c1", "c2", "c3"}}};
  for (int round = 0; round < rounds; ++round) {
    KRelation joint(n, AttributeSet({"A", "B", "C"}, doms));
    for_each_tuple(joint.attrs(), [&](const Tuple& t) {
      if (rng() % 3 == 0) joint.set(t, Natural{1 + rng() % 4});
      return true;
    });
    const KRelation r = marginal(joint, std::vector<std::string>{"A", "B"});
    const KRelation s = marginal(joint, std::vector<std::string>{"B", "C"});
    const KRelation w = northwest_join(r, s);
    if (!verify_witness(w, {r, s}) || w.support_size() > r.support_size() + s.support_size()) return false;
  }
  return true;
}

inline int selftest_cmd(const Options& opt, const std::string& dir, const std::string& tag, std::ostream& out) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw instance_error("usage", "fixture directory '" + dir + "' not found");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  json results = json::array();
  int failed = 0;
  for (const auto& f : files) {
    const json fixture = read_json_file(f.string());
    if (!fixture.contains("selftest")) continue;
    const json tests = fixture.at("selftest").is_array() ? fixture.at("selftest") : json::array({fixture.at("selftest")});
    for (const auto& t : tests) {
      const auto tags = t.value("tags", std::vector<std::string>{});
      if (!tag.empty() && std::find(tags.begin(), tags.end(), tag) == tags.end()) continue;
      std::vector<std::string> args{t.at("command").get<std::string>()};
      for (auto a : t.value("args", std::vector<std::string>{})) {
        const auto p = a.find("{dir}");
        if (p != std::string::npos) a.replace(p, 5, dir);
        args.push_back(a);
      }
      args.push_back("--format");
      args.push_back("json");
      if (t.value("input", true)) args.push_back(f.string());
      std::ostringstream o, e;
      const int code = run_args(args, o, e);
      bool pass = code == t.value("exit", 0);
      std::string detail;
      try {
        const json got = json::parse(o.str());
        pass = pass && matches(t.value("expect", json::object()), got);
        if (!pass) detail = got.dump();
      } catch (const json::parse_error&) {
        pass = false;
        detail = e.str();
      }
      if (!pass) ++failed;
      json row{{"fixture", f.filename().string()}, {"command", args.front()}, {"pass", pass}, {"tags", tags}};
      if (t.contains("label")) row["label"] = t.at("label");
      if (!pass) row["detail"] = detail.substr(0, 400);
      results.push_back(row);
    }
  }
  if (tag.empty()) {
    const bool ok = northwest_smoke(opt.seed, 50);
    if (!ok) ++failed;
    results.push_back({{"fixture", "random northwest joins (seed " + std::to_string(opt.seed) + ")"},
                       {"command", "property"},
                       {"pass", ok}});
  }
  const json report{{"command", "selftest"},
                    {"fixtures", results},
                    {"passed", results.size() - static_cast<std::size_t>(failed)},
                    {"failed", failed}};
  if (opt.format == "text") {
    for (const auto& r : results) {
      out << (r.at("pass").get<bool>() ? "[PASS] " : "[FAIL] ") << r.at("fixture").get<std::string>() << " ("
          << r.at("command").get<std::string>() << ")\n";
    }
    out << report.at("passed") << " passed, " << failed << " failed\n";
  } else {
    out << report.dump(2) << '\n';
  }
  return failed == 0 ? exit_decided : exit_error;
}

}  // namespace detail

/// Parses and dispatches; all diagnostics go to err as JSON error objects.
inline int run_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Consistency of relations annotated over positive commutative monoids", "kcons"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--seed", opt.seed, "Seed for randomized checks");
  app.add_option("--budget", opt.budget, "Search node budget");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--seed", opt.seed, "Seed for randomized checks");
    sub->add_option("--budget", opt.budget, "Search node budget");
  };

  std::string input, method = "auto", left, right, schema, monoid, params, element, cover = "free",
                     fixtures = "fixtures", tag;

  auto* acyclic = app.add_subcommand("check-acyclic", "Acyclicity certificate of a schema");
  acyclic->add_option("instance", input)->required();
  auto* pairwise = app.add_subcommand("check-pairwise", "Pairwise consistency");
  pairwise->add_option("instance", input)->required();
  auto* global = app.add_subcommand("check-global", "Global consistency");
  global->add_option("instance", input)->required();
  auto* transport = app.add_subcommand("solve-transport", "Solve a transportation instance");
  transport->add_option("instance", input)->required();
  transport->add_option("--method", method, "auto|northwest|exhaustive|componentwise|meet|vorobev|p3");
  auto* joincmd = app.add_subcommand("join", "Join two relations of an instance");
  joincmd->add_option("instance", input)->required();
  joincmd->add_option("--method", method, "standard|vorobev|northwest|componentwise|exhaustive")->required();
  joincmd->add_option("--left", left)->required();
  joincmd->add_option("--right", right)->required();
  auto* cx = app.add_subcommand("counterexample", "Pairwise but not globally consistent relations");
  cx->add_option("--schema", schema)->required();
  cx->add_option("--monoid", monoid)->required();
  cx->add_option("--monoid-params", params);
  cx->add_option("--element", element)->required();
  auto* lift = app.add_subcommand("lift", "Lift the relations of an instance along a cover");
  lift->add_option("instance", input)->required();
  lift->add_option("--cover", cover, "free|identity|truncation");
  auto* chase = app.add_subcommand("chase-free-cover", "Chase lifted relations and push the witness down");
  chase->add_option("instance", input)->required();
  auto* ccx = app.add_subcommand("cover-counterexample", "Counterexample with lifts along a cover");
  ccx->add_option("--schema", schema)->required();
  ccx->add_option("--monoid", monoid)->required();
  ccx->add_option("--monoid-params", params);
  ccx->add_option("--element", element)->required();
  ccx->add_option("--cover", cover, "free|identity|truncation");
  auto* self = app.add_subcommand("selftest", "Run the fixture suite");
  self->add_option("--fixtures", fixtures, "Fixture directory");
  self->add_option("--tag", tag, "Only fixtures with this tag");
  for (auto* sub : {acyclic, pairwise, global, transport, joincmd, cx, lift, chase, ccx, self}) add_common(sub);

  std::vector<const char*> argv{"kcons"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_decided;
  } catch (const CLI::ParseError& e) {
    return detail::fail(err, "usage", e.what());
  }

  try {
    if (*acyclic) return detail::check_acyclic_cmd(opt, input, out);
    if (*pairwise) return detail::check_cmd(opt, input, false, out);
    if (*global) return detail::check_cmd(opt, input, true, out);
    if (*transport) return detail::solve_transport_cmd(opt, input, method, out);
    if (*joincmd) return detail::join_cmd(opt, input, method, left, right, out);
    if (*cx) return detail::counterexample_cmd(opt, schema, monoid, params, element, out);
    if (*lift) return detail::lift_cmd(opt, input, cover, out);
    if (*chase) return detail::chase_free_cover_cmd(opt, input, out);
    if (*ccx) return detail::cover_counterexample_cmd(opt, schema, monoid, params, element, cover, out);
    if (*self) return detail::selftest_cmd(opt, fixtures, tag, out);
  } catch (const instance_error& e) {
    return detail::fail(err, e.code(), e.what());
  } catch (const capability_error& e) {
    return detail::fail(err, "capability-missing", e.what());
  } catch (const monoid_error& e) {
    return detail::fail(err, "invalid-element", e.what());
  } catch (const join_error& e) {
    return detail::fail(err, "precondition", e.what());
  } catch (const transport_error& e) {
    return detail::fail(err, "precondition", e.what());
  } catch (const consistency_error& e) {
    return detail::fail(err, "precondition", e.what());
  } catch (const cover_error& e) {
    return detail::fail(err, "precondition", e.what());
  } catch (const relation_error& e) {
    return detail::fail(err, "invalid-instance", e.what());
  } catch (const hypergraph_error& e) {
    return detail::fail(err, "invalid-instance", e.what());
  } catch (const std::overflow_error& e) {
    return detail::fail(err, "overflow", e.what());
  } catch (const json::exception& e) {
    return detail::fail(err, "invalid-instance", e.what());
  }
  return detail::fail(err, "usage", "no command given");
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_args(args, out, err);
}

}  // namespace kcons::cli
