#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "protoalg/cli.hpp"
#include "protoalg/dot_export.hpp"
#include "protoalg/model_io.hpp"
#include "support/fixtures.hpp"

using namespace protoalg;
using namespace protoalg::test;

namespace {

struct Scratch {
  std::filesystem::path dir;
  Scratch() {
    dir = std::filesystem::temp_directory_path() /
          ("protoalg_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    std::filesystem::create_directories(dir);
  }
  ~Scratch() { std::filesystem::remove_all(dir); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name, const std::string& content) {
    auto p = dir / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("parse errors carry positions") {
  SECTION("empty file") {
    auto v = parse_model("");
    REQUIRE_FALSE(v.ok());
    CHECK(v.has_error("SyntaxError"));
  }
  SECTION("malformed json") {
    auto v = parse_model("{ \"alphabet\": ");
    REQUIRE_FALSE(v.ok());
    REQUIRE(v.has_error("SyntaxError"));
    CHECK(v.diags[0].where.find("byte") == 0);
  }
  SECTION("unknown top-level field") {
    auto v = parse_model(R"({"alphabet":{},"domains":{},"interpretation":{},"components":[],"junk":1})");
    REQUIRE_FALSE(v.ok());
    CHECK(v.has_error("UnknownField"));
  }
  SECTION("edge labels outside {0,1}") {
    RawModel m = f1_raw();
    std::string text = serialize_model(raw_to_model(m));
    auto pos = text.find("\"label\": 0");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 10, "\"label\": 2");
    auto v = parse_model(text);
    REQUIRE_FALSE(v.ok());
    REQUIRE(v.has_error("InvalidEdgeLabel"));
    bool positioned = false;
    for (const auto& d : v.diags)
      positioned = positioned || d.where.find("/components/0/edges/") == 0;
    CHECK(positioned);
  }
  SECTION("undeclared value in a table") {
    RawModel m = f1_raw();
    m.interp.tables.at("dec").unary_rows[0].second = "77";
    auto v = validate_raw_model(m, {});
    REQUIRE_FALSE(v.ok());
    REQUIRE(v.has_error("UndeclaredValue"));
    bool positioned = false;
    for (const auto& d : v.diags)
      positioned = positioned || d.where.find("interpretation/tables/dec") == 0;
    CHECK(positioned);
  }
  SECTION("duplicate vertex ids") {
    RawModel m = f1_raw();
    m.components[0].vertices.push_back({"v1", "dec"});
    auto v = validate_raw_model(m, {});
    REQUIRE_FALSE(v.ok());
    CHECK(v.has_error("DuplicateId"));
  }
}

TEST_CASE("serialization round-trips byte-stably") {
  for (const ProtoAlgorithm& a : {f1(), f2()}) {
    std::string text = serialize_model(a);
    CHECK(text == serialize_model(a));  // determinism
    auto reparsed = load_model_text(text);
    REQUIRE(reparsed.ok());
    CHECK(serialize_model(*reparsed) == text);
  }
}

TEST_CASE("reparsing yields an identity-isomorphic model") {
  ProtoAlgorithm a = f1();
  auto reparsed = load_model_text(serialize_model(a));
  REQUIRE(reparsed.ok());
  auto w = check_isomorphism(a, *reparsed);
  REQUIRE(w.has_value());
  for (const auto& [k, v] : w->symbol_map) CHECK(k == v);
  for (const auto& [k, v] : w->data_map) CHECK(k == v);
  for (const auto& [k, v] : w->vertex_maps[0]) CHECK(k == v);
  CHECK_FALSE(w->edge_label_swap);
}

TEST_CASE("digests identify models") {
  ProtoAlgorithm a = f1();
  auto reparsed = load_model_text(serialize_model(a));
  REQUIRE(reparsed.ok());
  CHECK(model_digest(a) == model_digest(*reparsed));
  CHECK(model_digest(a) != model_digest(f2()));
}

TEST_CASE("provenance survives the round trip but stays out of the digest") {
  ProtoAlgorithm a = f1();
  json prov = {{"source", "test"}, {"version", 1}};
  std::string text = serialize_model(a, prov);
  RawModel raw;
  auto reparsed = load_model_text(text, {}, &raw);
  REQUIRE(reparsed.ok());
  CHECK(raw.provenance == prov);
  CHECK(model_digest(*reparsed) == model_digest(a));
}

TEST_CASE("dot export") {
  ProtoAlgorithm a = f1();
  SECTION("component rendering") {
    std::string dot = export_dot(a);
    CHECK(dot.find("\"c1_r\" [label=\"r:ini\", style=bold]") != std::string::npos);
    CHECK(dot.find("[label=\"0\"]") != std::string::npos);
    CHECK(dot.find("[label=\"1\"]") != std::string::npos);
    CHECK(dot.find("cluster_c1") != std::string::npos);
  }
  SECTION("state graph for input 2: an 8-state path plus the final self-loop") {
    ValueId two = a.interp.input_domain.id_of("2");
    StateGraph g = build_state_graph(a, Variant::Algorithmic, {two});
    REQUIRE(g.size() == 8);
    std::string dot = export_dot(a, g);
    int nodes = 0, edges = 0, selfloops = 0;
    std::istringstream lines(dot);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.find("[label=") != std::string::npos) ++nodes;
      if (line.find("->") != std::string::npos) {
        ++edges;
        auto arrow = line.find(" -> ");
        std::string from = line.substr(2, arrow - 2);
        std::string to = line.substr(arrow + 4, line.size() - arrow - 5);
        if (from == to) ++selfloops;
      }
    }
    CHECK(nodes == 8);
    CHECK(edges == 8);
    CHECK(selfloops == 1);
    CHECK(dot.find("shape=diamond") != std::string::npos);        // initial
    CHECK(dot.find("shape=doublecircle") != std::string::npos);   // final
  }
}

TEST_CASE("cli: validate") {
  Scratch sc;
  std::string f1_path = sc.file("f1.json", serialize_model(f1()));

  SECTION("valid model") {
    auto r = cli({"validate", f1_path});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("valid") != std::string::npos);
    CHECK(r.out.find("classical=yes") != std::string::npos);
  }
  SECTION("invalid model exits 2") {
    RawModel m = f1_raw();
    m.components[0].edges.push_back({"v3", "v2", -1});
    std::string bad = sc.file("bad.json", serialize_model(f1()));
    // serialize only works on validated models; write the broken one by hand
    json doc = json::parse(Scratch::slurp(f1_path));
    doc["components"][0]["edges"].push_back({{"from", "v3"}, {"to", "v2"}});
    bad = sc.file("bad.json", doc.dump(2) + "\n");
    auto r = cli({"validate", bad});
    CHECK(r.code == kExitInvalidModel);
    CHECK(r.err.find("FinHasOutEdges") != std::string::npos);
  }
  SECTION("policy override") {
    std::string f2_path = sc.file("f2.json", serialize_model(f2()));
    auto r = cli({"validate", f2_path, "--bottom-policy", "strict"});
    CHECK(r.code == kExitOk);
  }
  SECTION("lenient level downgrades the semantic conditions") {
    json doc = json::parse(serialize_model(f1()));
    doc["domains"]["main"].push_back("9");
    doc["interpretation"]["tables"]["dec"]["9"] = "9";
    doc["interpretation"]["tables"]["z"]["9"] = 0;
    doc["interpretation"]["tables"]["fin"]["9"] = "0";
    std::string p = sc.file("nonmin.json", doc.dump(2) + "\n");
    CHECK(cli({"validate", p}).code == kExitInvalidModel);
    auto r = cli({"validate", p, "--level", "lenient"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("NonMinimalDomain") != std::string::npos);
  }
}

TEST_CASE("cli: run and compute") {
  Scratch sc;
  std::string f1_path = sc.file("f1.json", serialize_model(f1()));

  SECTION("run input 2") {
    auto r = cli({"run", f1_path, "--input", "2"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("FINAL length=8 output=0") != std::string::npos);
    auto rc = cli({"run", f1_path, "--input", "2", "--variant", "computational"});
    CHECK(rc.out.find("FINAL length=5 output=0") != std::string::npos);
  }
  SECTION("unknown input is a usage error") {
    CHECK(cli({"run", f1_path, "--input", "9"}).code == kExitUsage);
  }
  SECTION("compute prints the whole table") {
    auto r = cli({"compute", f1_path});
    CHECK(r.code == kExitOk);
    for (const char* row : {"0 -> {0}", "1 -> {0}", "2 -> {0}", "3 -> {0}"})
      CHECK(r.out.find(row) != std::string::npos);
  }
  SECTION("compute reports undefined entries with diagnostics") {
    std::string f2_path = sc.file("f2.json", serialize_model(f2()));
    auto r = cli({"compute", f2_path, "--input", "1"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("UNDEFINED (divergent, partial outputs {2})") != std::string::npos);
  }
}

TEST_CASE("cli: equivalence family") {
  Scratch sc;
  std::string f1_path = sc.file("f1.json", serialize_model(f1()));
  std::string doubled = sc.file("f1x.json", serialize_model(raw_to_model(double_predicate(f1_raw(), 0, "v1"))));
  std::string unrolled = sc.file("f1u.json", serialize_model(raw_to_model(unrolled_countdown_raw(3))));
  std::string renamed = sc.file("f1r.json", serialize_model(raw_to_model(rename_model(f1_raw(), 5, true))));
  std::string f2_path = sc.file("f2.json", serialize_model(f2()));

  CHECK(cli({"check-equiv", f1_path, doubled, "--variant", "algorithmic"}).code == kExitPropertyFails);
  CHECK(cli({"check-equiv", f1_path, doubled, "--variant", "computational"}).code == kExitOk);
  CHECK(cli({"check-equiv", f1_path, unrolled}).code == kExitOk);
  CHECK(cli({"check-sim", f1_path, unrolled}).code == kExitOk);
  CHECK(cli({"check-sim", f1_path, doubled}).code == kExitPropertyFails);
  CHECK(cli({"check-iso", f1_path, renamed}).code == kExitOk);
  CHECK(cli({"check-iso", f1_path, unrolled}).code == kExitPropertyFails);
  CHECK(cli({"check-iso", f1_path, f2_path}).code == kExitPropertyFails);
}

TEST_CASE("cli: sequentialize writes a certified, parseable output") {
  Scratch sc;
  std::string f2_path = sc.file("f2.json", serialize_model(f2()));
  std::string out_path = sc.path("f2_seq.json");
  auto r = cli({"sequentialize", f2_path, "-o", out_path, "--certify"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("certificate: equivalent") != std::string::npos);

  RawModel raw;
  auto reloaded = load_model_text(Scratch::slurp(out_path),
                                  LoadOptions{ValidationLevel::Lenient, std::nullopt}, &raw);
  REQUIRE(reloaded.ok());
  CHECK(raw.provenance.contains("source_digest"));
  CHECK(raw.provenance["construction"] == "sequentialize");
}

TEST_CASE("cli: export-dot") {
  Scratch sc;
  std::string f1_path = sc.file("f1.json", serialize_model(f1()));
  SECTION("model rendering") {
    std::string out_path = sc.path("f1.dot");
    CHECK(cli({"export-dot", f1_path, "-o", out_path}).code == kExitOk);
    CHECK(Scratch::slurp(out_path).find("digraph model") == 0);
  }
  SECTION("state graph rendering") {
    std::string out_path = sc.path("f1_states.dot");
    CHECK(cli({"export-dot", f1_path, "--state-graph", "--input", "2", "-o", out_path}).code == kExitOk);
    CHECK(Scratch::slurp(out_path).find("digraph states") == 0);
  }
  SECTION("state graph without an input is a usage error") {
    CHECK(cli({"export-dot", f1_path, "--state-graph", "-o", sc.path("x.dot")}).code == kExitUsage);
  }
  SECTION("missing -o is a usage error") {
    CHECK(cli({"export-dot", f1_path}).code == kExitUsage);
  }
}

TEST_CASE("cli: gen emits the canonical fixture documents") {
  Scratch sc;
  auto r = cli({"gen", "countdown", "3"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == serialize_model(gen_countdown(3)));

  std::string out_path = sc.path("h2.json");
  CHECK(cli({"gen", "handoff", "2", "-o", out_path}).code == kExitOk);
  CHECK(Scratch::slurp(out_path) == serialize_model(gen_handoff(2)));
}

TEST_CASE("cli: machine reports are byte-identical across runs") {
  Scratch sc;
  std::string f1_path = sc.file("f1.json", serialize_model(f1()));
  std::string doubled = sc.file("f1x.json", serialize_model(raw_to_model(double_predicate(f1_raw(), 0, "v1"))));

  std::vector<std::vector<std::string>> commands = {
      {"validate", f1_path},
      {"run", f1_path, "--input", "2"},
      {"compute", f1_path},
      {"check-equiv", f1_path, doubled, "--variant", "computational"},
  };
  int k = 0;
  for (auto cmd : commands) {
    std::string p1 = sc.path("rep_a" + std::to_string(k) + ".json");
    std::string p2 = sc.path("rep_b" + std::to_string(k) + ".json");
    ++k;
    auto with_json = [&](const std::string& p) {
      auto c = cmd;
      c.push_back("--json");
      c.push_back(p);
      return c;
    };
    cli(with_json(p1));
    cli(with_json(p2));
    std::string a = Scratch::slurp(p1), b = Scratch::slurp(p2);
    REQUIRE_FALSE(a.empty());
    // the reports echo the command line including the report path; blank it
    auto scrub = [](std::string s, const std::string& path) {
      for (std::size_t at = s.find(path); at != std::string::npos; at = s.find(path))
        s.replace(at, path.size(), "<report>");
      return s;
    };
    CHECK(scrub(a, p1) == scrub(b, p2));
  }
}

TEST_CASE("cli: the state cap environment variable trips resource errors") {
  Scratch sc;
  std::string f2_path = sc.file("f2.json", serialize_model(f2()));
  ::setenv("PROTOALG_STATE_CAP", "5", 1);
  auto r = cli({"compute", f2_path});
  ::unsetenv("PROTOALG_STATE_CAP");
  CHECK(r.code == kExitResourceBound);
}

TEST_CASE("cli: usage and file errors") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"validate", "/nonexistent/model.json"}).code == kExitInvalidModel);
}
