#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "protoalg/model_io.hpp"
#include "protoalg/proto_algorithm.hpp"

namespace protoalg {

// Parameterized fixture families for desk-scale experiments.
//
// countdown N: one classical component decrementing its private value to 0,
// over the domain {0..N}.  Deterministic, always convergent, output 0.
//
// handoff N: a main component that publishes its input to the shared slot
// and polls for the worker's reply; a worker that polls the shared slot,
// marks-and-increments the value once, and writes it back.  Domain
// {0..N, a1..aN}; the reply to k is a(min(k+1,N)); both components poll
// forever, so every schedule set contains divergent runs.

inline RawModel countdown_raw(int n) {
  if (n < 1) throw std::invalid_argument("countdown needs N >= 1");
  RawModel m;
  m.alphabet.processing = {kIni, kFin, "dec"};
  m.alphabet.predicate = {"z"};
  for (int k = 0; k <= n; ++k) m.domains.main.push_back(std::to_string(k));
  m.domains.input = m.domains.main;
  m.domains.output = {"0"};

  m.interp.bottom_policy = "strict";
  RawTable ini, fin, dec, z;
  for (int k = 0; k <= n; ++k) {
    const std::string tok = std::to_string(k);
    ini.unary_rows.emplace_back(tok, tok);
    fin.unary_rows.emplace_back(tok, "0");
    dec.unary_rows.emplace_back(tok, std::to_string(k > 0 ? k - 1 : 0));
    z.unary_rows.emplace_back(tok, k == 0 ? "1" : "0");
  }
  m.interp.tables.emplace(kIni, std::move(ini));
  m.interp.tables.emplace(kFin, std::move(fin));
  m.interp.tables.emplace("dec", std::move(dec));
  m.interp.tables.emplace("z", std::move(z));

  RawGraph g;
  g.vertices = {{"r", kIni}, {"v1", "z"}, {"v2", "dec"}, {"v3", kFin}};
  g.edges = {{"r", "v1", -1}, {"v1", "v2", 0}, {"v1", "v3", 1}, {"v2", "v1", -1}};
  g.root = "r";
  g.declared_main = true;
  m.components.push_back(std::move(g));
  return m;
}

inline RawModel handoff_raw(int n) {
  if (n < 1) throw std::invalid_argument("handoff needs N >= 1");
  RawModel m;
  m.alphabet.processing = {kIni, kFin, "reply"};
  m.alphabet.setting = {"put"};
  m.alphabet.getting = {"take"};
  m.alphabet.predicate = {"isval"};

  std::vector<std::string> numeric, marked;
  for (int k = 0; k <= n; ++k) numeric.push_back(std::to_string(k));
  for (int k = 1; k <= n; ++k) marked.push_back("a" + std::to_string(k));
  m.domains.main = numeric;
  m.domains.main.insert(m.domains.main.end(), marked.begin(), marked.end());
  m.domains.input = numeric;
  m.domains.output = numeric;

  m.interp.bottom_policy = "lifted";
  RawTable ini, fin, reply, isval, put, take;
  for (int k = 0; k <= n; ++k) ini.unary_rows.emplace_back(numeric[static_cast<std::size_t>(k)],
                                                           numeric[static_cast<std::size_t>(k)]);
  for (int k = 0; k <= n; ++k) {
    fin.unary_rows.emplace_back(numeric[static_cast<std::size_t>(k)], numeric[static_cast<std::size_t>(k)]);
    reply.unary_rows.emplace_back(numeric[static_cast<std::size_t>(k)],
                                  "a" + std::to_string(k + 1 > n ? n : k + 1));
    isval.unary_rows.emplace_back(numeric[static_cast<std::size_t>(k)], "1");
  }
  for (int k = 1; k <= n; ++k) {
    fin.unary_rows.emplace_back(marked[static_cast<std::size_t>(k - 1)], std::to_string(k));
    reply.unary_rows.emplace_back(marked[static_cast<std::size_t>(k - 1)], marked[static_cast<std::size_t>(k - 1)]);
    isval.unary_rows.emplace_back(marked[static_cast<std::size_t>(k - 1)], "0");
  }
  fin.unary_rows.emplace_back(kBotToken, "0");
  reply.unary_rows.emplace_back(kBotToken, kBotToken);
  isval.unary_rows.emplace_back(kBotToken, "0");

  put.binary = true;
  take.binary = true;
  std::vector<std::string> all = m.domains.main;
  all.push_back(kBotToken);
  for (const auto& p : all)
    for (const auto& s : all) {
      put.binary_rows.emplace_back(p, s, p);   // write the private value
      take.binary_rows.emplace_back(p, s, s);  // read the shared value
    }
  m.interp.tables.emplace(kIni, std::move(ini));
  m.interp.tables.emplace(kFin, std::move(fin));
  m.interp.tables.emplace("reply", std::move(reply));
  m.interp.tables.emplace("isval", std::move(isval));
  m.interp.tables.emplace("put", std::move(put));
  m.interp.tables.emplace("take", std::move(take));

  RawGraph main;
  main.vertices = {{"m0", kIni}, {"m1", "put"}, {"m2", "take"}, {"m3", "isval"}, {"m4", kFin}};
  main.edges = {{"m0", "m1", -1}, {"m1", "m2", -1}, {"m2", "m3", -1}, {"m3", "m2", 1}, {"m3", "m4", 0}};
  main.root = "m0";
  main.declared_main = true;

  RawGraph worker;
  worker.vertices = {{"wr", "take"}, {"w1", "isval"}, {"w2", "take"}, {"w3", "reply"}, {"w4", "put"}};
  worker.edges = {{"wr", "w1", -1}, {"w1", "w2", 0}, {"w1", "w3", 1},
                  {"w2", "w1", -1}, {"w3", "w4", -1}, {"w4", "w2", -1}};
  worker.root = "wr";
  worker.declared_main = false;

  m.components.push_back(std::move(main));
  m.components.push_back(std::move(worker));
  return m;
}

inline ProtoAlgorithm must_validate(const RawModel& raw, ValidationLevel level = ValidationLevel::Strict) {
  auto v = validate_raw_model(raw, LoadOptions{level, std::nullopt});
  if (!v.ok()) {
    std::string why = v.diags.empty() ? "?" : v.diags.front().code + " at " + v.diags.front().where;
    throw std::logic_error("generated model failed validation: " + why);
  }
  return *v;
}

inline ProtoAlgorithm gen_countdown(int n) { return must_validate(countdown_raw(n)); }
inline ProtoAlgorithm gen_handoff(int n) { return must_validate(handoff_raw(n)); }

}  // namespace protoalg
