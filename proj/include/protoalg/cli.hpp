#pragma once

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "protoalg/dot_export.hpp"
#include "protoalg/equivalence.hpp"
#include "protoalg/generator.hpp"
#include "protoalg/isomorphism.hpp"
#include "protoalg/model_io.hpp"
#include "protoalg/semantics.hpp"
#include "protoalg/transform.hpp"

namespace protoalg {

// Exit codes: 0 success / property holds, 1 property fails on valid inputs,
// 2 invalid model, 3 resource bound exceeded, 4 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPropertyFails = 1;
inline constexpr int kExitInvalidModel = 2;
inline constexpr int kExitResourceBound = 3;
inline constexpr int kExitUsage = 4;

namespace cli_detail {

inline json diags_json(const std::vector<Diagnostic>& ds) {
  json arr(json::value_t::array);
  for (const auto& d : ds)
    arr.push_back({{"code", d.code},
                   {"severity", d.severity == Severity::Error ? "error" : "warning"},
                   {"where", d.where},
                   {"message", d.message}});
  return arr;
}

inline void print_diags(std::ostream& os, const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    os << (d.severity == Severity::Error ? "error" : "warning") << " [" << d.code << "] " << d.where
       << ": " << d.message << "\n";
}

struct LoadedModel {
  ProtoAlgorithm model;
  std::string path;
  std::string digest;
};

// Analysis commands accept every structurally sound model; the lenient
// level keeps the semantic conditions as warnings.  `validate` is the
// strictness gate.
inline std::optional<LoadedModel> load_for_analysis(const std::string& path, std::ostream& err,
                                                    json& report) {
  auto v = load_model_file(path, LoadOptions{ValidationLevel::Lenient, std::nullopt});
  if (!v.ok()) {
    print_diags(err, v.diags);
    report["diagnostics"] = diags_json(v.diags);
    return std::nullopt;
  }
  LoadedModel lm{std::move(*v.value), path, ""};
  lm.digest = model_digest(lm.model);
  json entry = {{"path", path}, {"digest", lm.digest}};
  if (!report.contains("models")) report["models"] = json::value_t::array;
  report["models"].push_back(entry);
  return lm;
}

inline json run_json(const ProtoAlgorithm& a, const Run& r) {
  json states(json::value_t::array);
  for (const State& s : r.states) states.push_back(state_to_string(a, s));
  json j = {{"terminal", terminal_name(r.terminal)},
            {"length", r.states.size()},
            {"output", a.interp.output_domain.token_of(output_value(r))},
            {"states", states}};
  if (r.terminal == Run::Terminal::Lasso) j["cycle_start"] = r.cycle_start;
  if (r.terminal == Run::Terminal::Cutoff) j["bound"] = r.bound;
  return j;
}

inline json computed_function_json(const ProtoAlgorithm& a, const ComputedFunction& cf) {
  json entries(json::value_t::object);
  for (ValueId d = 0; d < a.interp.input_domain.size(); ++d) {
    const auto& e = cf.entries[static_cast<std::size_t>(d)];
    json je = {{"defined", e.defined}};
    json outs(json::value_t::array);
    for (ValueId o : e.defined ? e.outputs : e.partial_outputs)
      outs.push_back(a.interp.output_domain.token_of(o));
    if (e.defined) {
      je["outputs"] = outs;
    } else {
      je["reason"] = e.reason == ComputedFunction::Entry::Reason::Divergent ? "divergent" : "stuck";
      je["partial_outputs"] = outs;
      if (e.divergence_witness) je["witness"] = run_json(a, *e.divergence_witness);
      if (!e.stuck_witness.empty()) je["witness"] = state_to_string(a, e.stuck_witness.front());
    }
    entries[a.interp.input_domain.token_of(d)] = je;
  }
  return entries;
}

inline constexpr std::size_t kWitnessPairLimit = 20000;

inline json witness_json(const ProtoAlgorithm& a, const ProtoAlgorithm& b, const SimulationWitness& w) {
  json j = {{"variant", variant_name(w.variant)}, {"pair_count", w.pairs.size()}};
  json pairs(json::value_t::array);
  std::size_t limit = std::min(w.pairs.size(), kWitnessPairLimit);
  for (std::size_t i = 0; i < limit; ++i) {
    const auto& [ai, bi] = w.pairs[i];
    pairs.push_back({state_to_string(a, w.left.states[static_cast<std::size_t>(ai)]),
                     state_to_string(b, w.right.states[static_cast<std::size_t>(bi)])});
  }
  j["pairs"] = pairs;
  j["pairs_truncated"] = w.pairs.size() > kWitnessPairLimit;
  return j;
}

inline json gammas_json(const ProtoAlgorithm& a, const ProtoAlgorithm& b,
                        const std::vector<ValueId>& gamma_i, const std::vector<ValueId>& gamma_o) {
  json gi(json::value_t::object), go(json::value_t::object);
  for (ValueId d = 0; d < static_cast<ValueId>(gamma_i.size()); ++d)
    if (gamma_i[static_cast<std::size_t>(d)] != kNone)
      gi[a.interp.input_domain.token_of(d)] =
          b.interp.input_domain.token_of(gamma_i[static_cast<std::size_t>(d)]);
  for (ValueId d = 0; d < static_cast<ValueId>(gamma_o.size()); ++d)
    if (gamma_o[static_cast<std::size_t>(d)] != kNone)
      go[b.interp.output_domain.token_of(d)] =
          a.interp.output_domain.token_of(gamma_o[static_cast<std::size_t>(d)]);
  return {{"gamma_i", gi}, {"gamma_o", go}};
}

inline json iso_witness_json(const IsomorphismWitness& w) {
  json perm(json::value_t::array);
  for (int p : w.component_perm) perm.push_back(p + 1);
  json vmaps(json::value_t::array);
  for (const auto& m : w.vertex_maps) vmaps.push_back(m);
  return {{"component_perm", perm},
          {"symbol_map", w.symbol_map},
          {"vertex_maps", vmaps},
          {"data_map", w.data_map},
          {"input_map", w.input_map},
          {"output_map", w.output_map},
          {"edge_label_swap", w.edge_label_swap}};
}

inline int finish(const json& report, const std::string& json_path, std::ostream& err, int code) {
  if (!json_path.empty()) {
    if (!atomic_write_file(json_path, report.dump(2) + "\n")) {
      err << "error: cannot write report to " << json_path << "\n";
      return kExitUsage;
    }
  }
  return code;
}

}  // namespace cli_detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;

  ResourceCaps caps;
  if (const char* cap = std::getenv("PROTOALG_STATE_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(cap, &end, 10);
    if (end && *end == '\0' && v > 0) caps.state_cap = static_cast<std::size_t>(v);
  }

  CLI::App app{"workbench for concurrent proto-algorithm models"};
  app.require_subcommand(1);

  json report;
  report["command"] = args;
  std::string json_path;
  int code = kExitOk;

  // ---- validate ----
  auto* c_validate = app.add_subcommand("validate", "validate a model file");
  std::string v_path, v_level = "strict", v_policy;
  c_validate->add_option("model", v_path, "model file")->required();
  c_validate->add_option("--level", v_level, "validation level")
      ->check(CLI::IsMember({"strict", "lenient"}));
  c_validate->add_option("--bottom-policy", v_policy, "override the document's bottom policy")
      ->check(CLI::IsMember({"strict", "lifted"}));
  c_validate->add_option("--json", json_path, "write the machine report here");
  c_validate->callback([&]() {
    LoadOptions opts;
    opts.level = v_level == "lenient" ? ValidationLevel::Lenient : ValidationLevel::Strict;
    if (v_policy == "strict") opts.policy_override = BottomPolicy::Strict;
    if (v_policy == "lifted") opts.policy_override = BottomPolicy::Lifted;
    auto v = load_model_file(v_path, opts);
    report["diagnostics"] = diags_json(v.diags);
    print_diags(v.ok() ? out : err, v.diags);
    if (!v.ok()) {
      report["verdict"] = "invalid";
      out << "invalid: " << v_path << "\n";
      code = kExitInvalidModel;
      return;
    }
    report["verdict"] = "valid";
    report["models"] = json::array({{{"path", v_path}, {"digest", model_digest(*v)}}});
    report["classifiers"] = {{"classical", v->classical},
                             {"sequential", v->sequential},
                             {"nondeterministic_components", v->nondet_components},
                             {"bottom_policy", bottom_policy_name(v->interp.policy)}};
    out << "valid: " << v_path << " (classical=" << (v->classical ? "yes" : "no")
        << ", components=" << v->component_count()
        << ", nondet=" << (v->nondet_components ? "yes" : "no") << ")\n";
  });

  // ---- run ----
  auto* c_run = app.add_subcommand("run", "enumerate runs on one input");
  std::string r_path, r_input, r_variant = "algorithmic";
  std::size_t r_max_steps = 10000, r_max_runs = 10000;
  c_run->add_option("model", r_path)->required();
  c_run->add_option("--input", r_input, "input value")->required();
  c_run->add_option("--variant", r_variant)->check(CLI::IsMember({"algorithmic", "computational"}));
  c_run->add_option("--max-steps", r_max_steps, "states per run before CUTOFF");
  c_run->add_option("--max-runs", r_max_runs, "run count cap");
  c_run->add_option("--json", json_path);
  c_run->callback([&]() {
    auto lm = load_for_analysis(r_path, err, report);
    if (!lm) {
      code = kExitInvalidModel;
      return;
    }
    ValueId d_i = lm->model.interp.input_domain.id_of(r_input);
    if (d_i < 0) {
      err << "usage error: input '" << r_input << "' is not in the input domain\n";
      code = kExitUsage;
      return;
    }
    Variant variant = r_variant == "computational" ? Variant::Computational : Variant::Algorithmic;
    auto runs = enumerate_runs(lm->model, d_i, variant, r_max_steps, r_max_runs);
    json jruns(json::value_t::array);
    for (const Run& r : runs) jruns.push_back(run_json(lm->model, r));
    report["runs"] = jruns;
    report["variant"] = variant_name(variant);
    out << runs.size() << " run(s) on input " << r_input << " (" << variant_name(variant) << ")\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      out << "  run " << (i + 1) << ": " << terminal_name(runs[i].terminal)
          << " length=" << runs[i].states.size()
          << " output=" << lm->model.interp.output_domain.token_of(output_value(runs[i])) << "\n";
    }
  });

  // ---- compute ----
  auto* c_compute = app.add_subcommand("compute", "the computed function");
  std::string f_path, f_input;
  c_compute->add_option("model", f_path)->required();
  c_compute->add_option("--input", f_input, "restrict to one input");
  c_compute->add_option("--json", json_path);
  c_compute->callback([&]() {
    auto lm = load_for_analysis(f_path, err, report);
    if (!lm) {
      code = kExitInvalidModel;
      return;
    }
    if (!f_input.empty() && lm->model.interp.input_domain.id_of(f_input) < 0) {
      err << "usage error: input '" << f_input << "' is not in the input domain\n";
      code = kExitUsage;
      return;
    }
    ComputedFunction cf = computed_function(lm->model, caps.state_cap);
    json entries = computed_function_json(lm->model, cf);
    if (!f_input.empty()) {
      json one(json::value_t::object);
      one[f_input] = entries[f_input];
      entries = one;
    }
    report["computed_function"] = entries;
    for (const auto& [input, e] : entries.items()) {
      out << "  " << input << " -> ";
      if (e["defined"].get<bool>()) {
        out << "{";
        bool first = true;
        for (const auto& o : e["outputs"]) {
          out << (first ? "" : ",") << o.get<std::string>();
          first = false;
        }
        out << "}\n";
      } else {
        out << "UNDEFINED (" << e["reason"].get<std::string>() << ", partial outputs {";
        bool first = true;
        for (const auto& o : e["partial_outputs"]) {
          out << (first ? "" : ",") << o.get<std::string>();
          first = false;
        }
        out << "})\n";
      }
    }
  });

  // ---- check-iso ----
  auto* c_iso = app.add_subcommand("check-iso", "decide isomorphism of two models");
  std::string i_a, i_b;
  c_iso->add_option("a", i_a)->required();
  c_iso->add_option("b", i_b)->required();
  c_iso->add_option("--json", json_path);
  c_iso->callback([&]() {
    auto la = load_for_analysis(i_a, err, report);
    auto lb = load_for_analysis(i_b, err, report);
    if (!la || !lb) {
      code = kExitInvalidModel;
      return;
    }
    auto w = check_isomorphism(la->model, lb->model, caps);
    report["verdict"] = w.has_value();
    if (w) {
      report["witness"] = iso_witness_json(*w);
      out << "isomorphic (edge_label_swap=" << (w->edge_label_swap ? "yes" : "no") << ")\n";
    } else {
      out << "not isomorphic\n";
      code = kExitPropertyFails;
    }
  });

  // ---- check-sim ----
  auto* c_sim = app.add_subcommand("check-sim", "decide whether A is simulated by B");
  std::string s_a, s_b, s_variant = "algorithmic";
  c_sim->add_option("a", s_a)->required();
  c_sim->add_option("b", s_b)->required();
  c_sim->add_option("--variant", s_variant)->check(CLI::IsMember({"algorithmic", "computational"}));
  c_sim->add_option("--json", json_path);
  c_sim->callback([&]() {
    auto la = load_for_analysis(s_a, err, report);
    auto lb = load_for_analysis(s_b, err, report);
    if (!la || !lb) {
      code = kExitInvalidModel;
      return;
    }
    Variant variant = s_variant == "computational" ? Variant::Computational : Variant::Algorithmic;
    std::string why;
    auto w = greatest_simulation(la->model, lb->model, variant, caps, &why);
    report["verdict"] = w.has_value();
    report["variant"] = variant_name(variant);
    if (w) {
      std::vector<ValueId> gi, go;
      extract_gammas(*w, gi, go, la->model.interp.input_domain.size(),
                     lb->model.interp.output_domain.size());
      report["witness"] = witness_json(la->model, lb->model, *w);
      report["translations"] = gammas_json(la->model, lb->model, gi, go);
      report["resources"] = {{"states_left", w->left.size()}, {"states_right", w->right.size()}};
      out << "simulation found (" << w->pairs.size() << " pairs)\n";
    } else {
      report["failure"] = why;
      out << "no simulation: " << why << "\n";
      code = kExitPropertyFails;
    }
  });

  // ---- check-equiv ----
  auto* c_equiv = app.add_subcommand("check-equiv", "decide equivalence of two models");
  std::string e_a, e_b, e_variant = "algorithmic";
  c_equiv->add_option("a", e_a)->required();
  c_equiv->add_option("b", e_b)->required();
  c_equiv->add_option("--variant", e_variant)->check(CLI::IsMember({"algorithmic", "computational"}));
  c_equiv->add_option("--json", json_path);
  c_equiv->callback([&]() {
    auto la = load_for_analysis(e_a, err, report);
    auto lb = load_for_analysis(e_b, err, report);
    if (!la || !lb) {
      code = kExitInvalidModel;
      return;
    }
    Variant variant = e_variant == "computational" ? Variant::Computational : Variant::Algorithmic;
    EquivalenceReport rep = check_equivalence(la->model, lb->model, variant, caps);
    report["verdict"] = rep.verdict;
    report["variant"] = variant_name(variant);
    if (rep.verdict) {
      report["witness"] = witness_json(la->model, lb->model, *rep.witness);
      report["translations"] = gammas_json(la->model, lb->model, rep.gamma_i, rep.gamma_o);
      report["resources"] = {{"states_left", rep.witness->left.size()},
                             {"states_right", rep.witness->right.size()}};
      out << "equivalent (" << rep.witness->pairs.size() << " pairs)\n";
    } else {
      report["failure"] = rep.failure;
      out << "not equivalent: " << rep.failure << "\n";
      code = kExitPropertyFails;
    }
  });

  // ---- sequentialize ----
  auto* c_seq = app.add_subcommand("sequentialize", "compile to a non-deterministic sequential model");
  std::string q_path, q_out;
  bool q_certify = false;
  c_seq->add_option("model", q_path)->required();
  c_seq->add_option("-o,--output", q_out, "output model file")->required();
  c_seq->add_flag("--certify", q_certify, "fail unless the equivalence certificate holds");
  c_seq->add_option("--json", json_path);
  c_seq->callback([&]() {
    auto lm = load_for_analysis(q_path, err, report);
    if (!lm) {
      code = kExitInvalidModel;
      return;
    }
    SequentializationResult res = sequentialize(lm->model, caps);
    json provenance = {{"source", q_path},
                       {"source_digest", lm->digest},
                       {"construction", "sequentialize"},
                       {"version", 1}};
    std::string text = serialize_model(res.output, provenance);
    if (!atomic_write_file(q_out, text)) {
      err << "error: cannot write " << q_out << "\n";
      code = kExitUsage;
      return;
    }
    report["output"] = {{"path", q_out}, {"digest", model_digest(res.output)}};
    report["product_vertices"] = res.product_vertices;
    report["certificate"] = {{"verdict", res.certificate.verdict},
                             {"pair_count", res.certificate.witness ? res.certificate.witness->pairs.size() : 0}};
    if (!res.certificate.verdict) report["certificate"]["failure"] = res.certificate.failure;
    out << "wrote " << q_out << " (" << res.product_vertices << " product vertices)\n";
    out << "certificate: " << (res.certificate.verdict ? "equivalent" : "FAILED") << "\n";
    if (q_certify && !res.certificate.verdict) code = kExitPropertyFails;
  });

  // ---- export-dot ----
  auto* c_dot = app.add_subcommand("export-dot", "emit a DOT rendering");
  std::string d_path, d_out, d_input, d_variant = "algorithmic";
  bool d_state_graph = false;
  c_dot->add_option("model", d_path)->required();
  c_dot->add_flag("--state-graph", d_state_graph, "render the state graph instead of the components");
  c_dot->add_option("--input", d_input, "input for the state graph");
  c_dot->add_option("--variant", d_variant)->check(CLI::IsMember({"algorithmic", "computational"}));
  c_dot->add_option("-o,--output", d_out)->required();
  c_dot->add_option("--json", json_path);
  c_dot->callback([&]() {
    auto lm = load_for_analysis(d_path, err, report);
    if (!lm) {
      code = kExitInvalidModel;
      return;
    }
    std::string text;
    if (d_state_graph) {
      if (d_input.empty()) {
        err << "usage error: --state-graph needs --input\n";
        code = kExitUsage;
        return;
      }
      ValueId d_i = lm->model.interp.input_domain.id_of(d_input);
      if (d_i < 0) {
        err << "usage error: input '" << d_input << "' is not in the input domain\n";
        code = kExitUsage;
        return;
      }
      Variant variant = d_variant == "computational" ? Variant::Computational : Variant::Algorithmic;
      StateGraph g = build_state_graph(lm->model, variant, {d_i}, caps.state_cap);
      text = export_dot(lm->model, g);
    } else {
      text = export_dot(lm->model);
    }
    if (!atomic_write_file(d_out, text)) {
      err << "error: cannot write " << d_out << "\n";
      code = kExitUsage;
      return;
    }
    report["output"] = {{"path", d_out}};
    out << "wrote " << d_out << "\n";
  });

  // ---- gen ----
  auto* c_gen = app.add_subcommand("gen", "emit a parameterized fixture model");
  std::string g_family;
  int g_n = 0;
  std::string g_out;
  c_gen->add_option("family", g_family)->required()->check(CLI::IsMember({"countdown", "handoff"}));
  c_gen->add_option("n", g_n, "size parameter")->required()->check(CLI::PositiveNumber);
  c_gen->add_option("-o,--output", g_out, "output file (stdout when omitted)");
  c_gen->add_option("--json", json_path);
  c_gen->callback([&]() {
    ProtoAlgorithm model = g_family == "countdown" ? gen_countdown(g_n) : gen_handoff(g_n);
    std::string text = serialize_model(model);
    if (g_out.empty()) {
      out << text;
    } else if (!atomic_write_file(g_out, text)) {
      err << "error: cannot write " << g_out << "\n";
      code = kExitUsage;
      return;
    }
    report["generated"] = {{"family", g_family}, {"n", g_n}, {"digest", model_digest(model)}};
    if (!g_out.empty()) {
      report["output"] = {{"path", g_out}};
      out << "wrote " << g_out << "\n";
    }
  });

  std::vector<const char*> argv;
  argv.push_back("protoalg");
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  } catch (const resource_bound_error& e) {
    err << "resource bound exceeded: " << e.what() << "\n";
    return kExitResourceBound;
  } catch (const certification_error& e) {
    err << "certification failed: " << e.what() << "\n";
    return kExitPropertyFails;
  }
  return finish(report, json_path, err, code);
}

}  // namespace protoalg
