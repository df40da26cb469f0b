// Copyright 2026 The cstarlogic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cstarlogic/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cstarlogic/catalog.hpp"
#include "cstarlogic/parser.hpp"
#include "detail/random.hpp"

namespace cstarlogic {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t unhex(const std::string& s) {
  if (s.size() != 16 || s.find_first_not_of("0123456789abcdef") != std::string::npos)
    fail(ErrorKind::parse, "bad digest '" + s + "'");
  return std::stoull(s, nullptr, 16);
}

json blocks_json(const Element& a) {
  json blocks = json::array();
  for (const Matrix& m : a.blocks()) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
      rows.push_back(std::move(row));
    }
    blocks.push_back(std::move(rows));
  }
  return blocks;
}

Complex entry(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  fail(ErrorKind::parse, "matrix entry must be a number or [re, im]");
}

Element blocks_from_json(const json& blocks, const Signature& sig) {
  if (!blocks.is_array() || blocks.size() != sig.size())
    fail(ErrorKind::structural, "element needs " + std::to_string(sig.size()) + " blocks");
  std::vector<Matrix> out;
  for (std::size_t b = 0; b < sig.size(); ++b) {
    const int n = sig.block(b);
    const json& rows = blocks[b];
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n))
      fail(ErrorKind::structural, "block " + std::to_string(b) + " needs " + std::to_string(n) + " rows");
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
      const json& row = rows[static_cast<std::size_t>(i)];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
        fail(ErrorKind::structural, "block " + std::to_string(b) + " row " + std::to_string(i) + " has wrong length");
      for (int j = 0; j < n; ++j) m(i, j) = entry(row[static_cast<std::size_t>(j)]);
    }
    out.push_back(std::move(m));
  }
  return Element(sig, std::move(out));
}

json sig_json(const Signature& s) { return json(std::vector<int>(s.blocks().begin(), s.blocks().end())); }

Signature sig_from_json(const json& j) {
  if (!j.is_array() || j.empty()) fail(ErrorKind::parse, "signature must be a non-empty list of block sizes");
  std::vector<int> blocks;
  for (const json& v : j) {
    if (!v.is_number_integer()) fail(ErrorKind::parse, "block sizes must be integers");
    blocks.push_back(v.get<int>());
  }
  return Signature(std::move(blocks));
}

json config_json(const EvalConfig& c) {
  return json{{"restarts", c.restarts}, {"iterations", c.iterations}, {"step", c.step},
              {"decay", c.decay},       {"tolerance", c.tolerance},   {"seed", c.seed},
              {"hash", hex(c.hash())}};
}

json record_json(const Record& r, bool timing) {
  json w = json::array();
  for (const Witness& x : r.witnesses)
    w.push_back(json{{"quantifier", x.quantifier},
                     {"var", x.var},
                     {"signature", sig_json(x.value.signature())},
                     {"blocks", blocks_json(x.value)}});
  json j{{"sentence", r.sentence},
         {"params", r.params},
         {"text", r.text},
         {"signature", sig_json(r.signature)},
         {"value", r.value},
         {"direction", std::string(to_string(r.direction))},
         {"witness_digest", hex(r.witness_digest)},
         {"samples", r.samples},
         {"witnesses", std::move(w)}};
  if (timing) {
    j["wall_time"] = r.wall_time;
    j["cached"] = r.cached;
  }
  return j;
}

Record record_from_json(const json& j) {
  Record r;
  r.sentence = j.at("sentence").get<std::string>();
  r.params = j.at("params").get<std::vector<double>>();
  r.text = j.at("text").get<std::string>();
  r.signature = sig_from_json(j.at("signature"));
  r.value = j.at("value").get<double>();
  r.direction = direction_from_string(j.at("direction").get<std::string>());
  r.witness_digest = unhex(j.at("witness_digest").get<std::string>());
  r.samples = j.at("samples").get<std::uint64_t>();
  for (const json& w : j.at("witnesses")) {
    const Signature s = sig_from_json(w.at("signature"));
    r.witnesses.push_back(
        Witness{w.at("quantifier").get<std::size_t>(), w.at("var").get<std::string>(), blocks_from_json(w.at("blocks"), s)});
  }
  r.wall_time = j.value("wall_time", 0.0);
  return r;
}

json probe_to_json(const StabilityProbeReport& p) {
  return json{{"name", p.name},     {"signature", sig_json(p.signature)}, {"deltas", p.deltas},
              {"eps", p.eps},       {"residual", p.residual},             {"samples", p.samples},
              {"seed", p.seed},     {"constant", p.constant}};
}

StabilityProbeReport probe_from_json(const json& j) {
  StabilityProbeReport p;
  p.name = j.at("name").get<std::string>();
  p.signature = sig_from_json(j.at("signature"));
  p.deltas = j.at("deltas").get<std::vector<double>>();
  p.eps = j.at("eps").get<std::vector<double>>();
  p.residual = j.at("residual").get<double>();
  p.samples = j.at("samples").get<int>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.constant = j.at("constant").get<double>();
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) fail(ErrorKind::io, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::io, "cannot rename into '" + path.string() + "': " + ec.message());
}

// Cached record, if present and matching.
std::optional<Record> cache_load(const fs::path& file, const std::string& text, const Signature& sig) {
  std::error_code ec;
  if (!fs::exists(file, ec)) return std::nullopt;
  try {
    Record r = record_from_json(json::parse(read_file(file.string())));
    if (r.text != text || r.signature != sig) return std::nullopt;
    return r;
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entries are recomputed and overwritten
  }
}

std::string describe(Direction d) {
  switch (d) {
    case Direction::certified_lower: return "a lower bound";
    case Direction::certified_upper: return "an upper bound";
    case Direction::heuristic: return "a heuristic estimate";
    case Direction::exact: return "exact";
  }
  return "?";
}

}  // namespace

Sentence catalog_sentence(const std::string& ref) {
  const EntryRef r = parse_entry_ref(ref);
  Sentence s{entry_ref(r.name, r.params), r.params, build_sentence(r.name, r.params)};
  if (!free_vars(s.formula).empty())
    fail(ErrorKind::precondition, "catalog entry '" + s.name + "' has free variables; it is not a sentence");
  return s;
}

Sentence file_sentence(const std::string& path) {
  Formula f;
  try {
    f = parse(read_file(path));
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
  if (!free_vars(f).empty()) fail(ErrorKind::precondition, path + ": formula has free variables");
  return Sentence{fs::path(path).stem().string(), {}, std::move(f)};
}

std::uint64_t record_key(const Formula& phi, const Signature& sig, const EvalConfig& cfg) {
  detail::Fnv1a h;
  h.str(print(phi));
  h.str(sig.str());
  h.value(cfg.hash());
  return h.digest();
}

Report run_battery(const std::vector<Sentence>& sentences, const std::vector<Signature>& algebras,
                   const EvalConfig& cfg, const std::string& cache_dir) {
  Report rep;
  rep.config = cfg;
  std::vector<Signature> sigs = algebras;
  std::sort(sigs.begin(), sigs.end());
  sigs.erase(std::unique(sigs.begin(), sigs.end()), sigs.end());
  if (!cache_dir.empty()) {
    std::error_code ec;
    fs::create_directories(cache_dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create cache directory '" + cache_dir + "': " + ec.message());
  }
  for (const Sentence& s : sentences) {
    // Evaluating the re-parsed canonical text keeps witness names in line with
    // what replay will see.
    const std::string text = print(s.formula);
    const Formula canon = parse(text);
    for (const Signature& sig : sigs) {
      const auto t0 = std::chrono::steady_clock::now();
      const fs::path file =
          cache_dir.empty() ? fs::path() : fs::path(cache_dir) / (hex(record_key(canon, sig, cfg)) + ".json");
      std::optional<Record> hit = cache_dir.empty() ? std::nullopt : cache_load(file, text, sig);
      Record r;
      if (hit) {
        r = std::move(*hit);
        r.cached = true;
      } else {
        EvalResult res;
        try {
          res = eval(canon, sig, {}, cfg);
        } catch (const Error& e) {
          fail(e.kind(), "sentence '" + s.name + "' on " + sig.str() + ": " + e.what());
        }
        r.text = text;
        r.signature = sig;
        r.value = res.value;
        r.direction = res.direction;
        r.witness_digest = witness_digest(res.witnesses);
        r.witnesses = std::move(res.witnesses);
        r.samples = res.samples;
      }
      r.sentence = s.name;
      r.params = s.params;
      r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (!hit && !cache_dir.empty()) write_file(file, record_json(r, false).dump());
      rep.records.push_back(std::move(r));
    }
  }
  std::stable_sort(rep.records.begin(), rep.records.end(), [](const Record& a, const Record& b) {
    if (a.sentence != b.sentence) return a.sentence < b.sentence;
    return a.signature < b.signature;
  });
  return rep;
}

std::vector<std::string> default_battery() {
  std::vector<std::string> out{"abelian",          "nonabelian",     "AL:2",           "not_subhom:1",
                               "not_subhom:2",     "projectionless_u", "trace_exists:1", "character_exists:1",
                               "finite",           "infinite",       "matrix_units:2", "matrix_units_u:2",
                               "order_zero:2"};
  for (int i = 1; i <= 7; ++i) out.push_back("cstar_axiom:" + std::to_string(i));
  return out;
}

Report separate(const Signature& a, const Signature& b, double threshold, const EvalConfig& cfg,
                const std::string& cache_dir, const std::vector<std::string>& battery) {
  if (!(threshold >= 0)) fail(ErrorKind::precondition, "threshold must be >= 0");
  std::vector<Sentence> sentences;
  for (const std::string& ref : battery) sentences.push_back(catalog_sentence(ref));
  Report rep = run_battery(sentences, {a, b}, cfg, cache_dir);
  Separation sep{a, b, threshold, {}};
  for (const Sentence& s : sentences) {
    const Record* ra = nullptr;
    const Record* rb = nullptr;
    for (const Record& r : rep.records) {
      if (r.sentence != s.name) continue;
      if (r.signature == a) ra = &r;
      if (r.signature == b) rb = &r;
    }
    if (!ra || !rb || !(std::abs(ra->value - rb->value) > threshold)) continue;
    const Record& hi = ra->value > rb->value ? *ra : *rb;
    const Record& lo = ra->value > rb->value ? *rb : *ra;
    SeparationEntry e{s.name, ra->value, rb->value, ra->direction, rb->direction, false, ""};
    e.evidence_only = !(hi.direction == Direction::certified_lower || hi.direction == Direction::exact);
    std::vector<std::string> notes;
    if (e.evidence_only) notes.push_back("larger value on " + hi.signature.str() + " is " + describe(hi.direction));
    if (lo.direction == Direction::certified_lower || lo.direction == Direction::heuristic)
      notes.push_back("smaller value on " + lo.signature.str() + " is " + describe(lo.direction));
    for (std::size_t i = 0; i < notes.size(); ++i) e.caveat += (i ? "; " : "") + notes[i];
    sep.entries.push_back(std::move(e));
  }
  std::sort(sep.entries.begin(), sep.entries.end(),
            [](const SeparationEntry& x, const SeparationEntry& y) { return x.sentence < y.sentence; });
  rep.separation = std::move(sep);
  return rep;
}

std::string report_json(const Report& r, bool timing) {
  json j{{"tool_version", r.tool_version}, {"config", config_json(r.config)}};
  json recs = json::array();
  for (const Record& x : r.records) recs.push_back(record_json(x, timing));
  j["records"] = std::move(recs);
  if (r.separation) {
    json entries = json::array();
    for (const SeparationEntry& e : r.separation->entries)
      entries.push_back(json{{"sentence", e.sentence},
                             {"value_a", e.value_a},
                             {"value_b", e.value_b},
                             {"direction_a", std::string(to_string(e.direction_a))},
                             {"direction_b", std::string(to_string(e.direction_b))},
                             {"evidence_only", e.evidence_only},
                             {"caveat", e.caveat}});
    j["separation"] = json{{"a", sig_json(r.separation->a)},
                           {"b", sig_json(r.separation->b)},
                           {"threshold", r.separation->threshold},
                           {"entries", std::move(entries)}};
  }
  if (!r.probes.empty()) {
    json probes = json::array();
    for (const auto& p : r.probes) probes.push_back(probe_to_json(p));
    j["probes"] = std::move(probes);
  }
  return j.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
  const auto errors = report_schema_errors(text);
  if (!errors.empty()) fail(ErrorKind::parse, "invalid report: " + errors.front());
  const json j = json::parse(text);
  Report r;
  r.tool_version = j.at("tool_version").get<std::string>();
  const json& c = j.at("config");
  r.config.restarts = c.at("restarts").get<int>();
  r.config.iterations = c.at("iterations").get<int>();
  r.config.step = c.at("step").get<double>();
  r.config.decay = c.at("decay").get<double>();
  r.config.tolerance = c.at("tolerance").get<double>();
  r.config.seed = c.at("seed").get<std::uint64_t>();
  for (const json& x : j.at("records")) r.records.push_back(record_from_json(x));
  if (j.contains("separation")) {
    const json& s = j.at("separation");
    Separation sep{sig_from_json(s.at("a")), sig_from_json(s.at("b")), s.at("threshold").get<double>(), {}};
    for (const json& e : s.at("entries"))
      sep.entries.push_back(SeparationEntry{e.at("sentence").get<std::string>(), e.at("value_a").get<double>(),
                                            e.at("value_b").get<double>(),
                                            direction_from_string(e.at("direction_a").get<std::string>()),
                                            direction_from_string(e.at("direction_b").get<std::string>()),
                                            e.at("evidence_only").get<bool>(), e.at("caveat").get<std::string>()});
    r.separation = std::move(sep);
  }
  if (j.contains("probes"))
    for (const json& p : j.at("probes")) r.probes.push_back(probe_from_json(p));
  return r;
}

std::vector<std::string> report_schema_errors(const std::string& text) {
  std::vector<std::string> errs;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    return {std::string("not JSON: ") + e.what()};
  }
  auto need = [&](const json& obj, const std::string& where, const char* key, auto check, const char* type) {
    if (!obj.is_object() || !obj.contains(key)) {
      errs.push_back(where + ": missing '" + key + "'");
      return false;
    }
    if (!check(obj.at(key))) {
      errs.push_back(where + "." + key + ": expected " + type);
      return false;
    }
    return true;
  };
  const auto is_str = [](const json& v) { return v.is_string(); };
  const auto is_num = [](const json& v) { return v.is_number(); };
  const auto is_uint = [](const json& v) { return v.is_number_unsigned(); };
  const auto is_bool = [](const json& v) { return v.is_boolean(); };
  const auto is_arr = [](const json& v) { return v.is_array(); };
  const auto is_obj = [](const json& v) { return v.is_object(); };
  const auto is_sig = [](const json& v) {
    return v.is_array() && !v.empty() &&
           std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number_unsigned() && x.get<int>() >= 1; });
  };
  const auto is_dir = [](const json& v) {
    return v.is_string() && (v == "certified-lower" || v == "certified-upper" || v == "heuristic" || v == "exact");
  };
  const auto is_digest = [](const json& v) {
    return v.is_string() && v.get<std::string>().size() == 16 &&
           v.get<std::string>().find_first_not_of("0123456789abcdef") == std::string::npos;
  };
  if (!j.is_object()) return {"top level must be an object"};
  need(j, "report", "tool_version", is_str, "string");
  if (need(j, "report", "config", is_obj, "object")) {
    const json& c = j["config"];
    for (const char* k : {"restarts", "iterations", "seed"}) need(c, "config", k, is_uint, "unsigned integer");
    for (const char* k : {"step", "decay", "tolerance"}) need(c, "config", k, is_num, "number");
    need(c, "config", "hash", is_digest, "16-digit hex");
  }
  if (need(j, "report", "records", is_arr, "array")) {
    std::size_t i = 0;
    for (const json& r : j["records"]) {
      const std::string w = "records[" + std::to_string(i++) + "]";
      need(r, w, "sentence", is_str, "string");
      need(r, w, "params", is_arr, "array");
      need(r, w, "text", is_str, "string");
      need(r, w, "signature", is_sig, "list of block sizes");
      need(r, w, "value", is_num, "number");
      need(r, w, "direction", is_dir, "direction tag");
      need(r, w, "witness_digest", is_digest, "16-digit hex");
      need(r, w, "samples", is_uint, "unsigned integer");
      if (need(r, w, "witnesses", is_arr, "array"))
        for (const json& x : r["witnesses"]) {
          need(x, w + ".witness", "quantifier", is_uint, "unsigned integer");
          need(x, w + ".witness", "var", is_str, "string");
          need(x, w + ".witness", "signature", is_sig, "list of block sizes");
          need(x, w + ".witness", "blocks", is_arr, "array");
        }
      if (r.is_object() && r.contains("wall_time")) need(r, w, "wall_time", is_num, "number");
      if (r.is_object() && r.contains("cached")) need(r, w, "cached", is_bool, "boolean");
    }
  }
  if (j.contains("separation") && need(j, "report", "separation", is_obj, "object")) {
    const json& s = j["separation"];
    need(s, "separation", "a", is_sig, "list of block sizes");
    need(s, "separation", "b", is_sig, "list of block sizes");
    need(s, "separation", "threshold", is_num, "number");
    if (need(s, "separation", "entries", is_arr, "array"))
      for (const json& e : s["entries"]) {
        need(e, "separation.entry", "sentence", is_str, "string");
        need(e, "separation.entry", "value_a", is_num, "number");
        need(e, "separation.entry", "value_b", is_num, "number");
        need(e, "separation.entry", "direction_a", is_dir, "direction tag");
        need(e, "separation.entry", "direction_b", is_dir, "direction tag");
        need(e, "separation.entry", "evidence_only", is_bool, "boolean");
        need(e, "separation.entry", "caveat", is_str, "string");
      }
  }
  if (j.contains("probes") && need(j, "report", "probes", is_arr, "array"))
    for (const json& p : j["probes"]) {
      need(p, "probe", "name", is_str, "string");
      need(p, "probe", "signature", is_sig, "list of block sizes");
      need(p, "probe", "deltas", is_arr, "array");
      need(p, "probe", "eps", is_arr, "array");
      need(p, "probe", "residual", is_num, "number");
      need(p, "probe", "samples", is_uint, "unsigned integer");
      need(p, "probe", "seed", is_uint, "unsigned integer");
      need(p, "probe", "constant", is_num, "number");
    }
  return errs;
}

std::vector<ReplayCheck> verify_report(const Report& r) {
  std::vector<ReplayCheck> out;
  for (const Record& rec : r.records) {
    ReplayCheck c{rec.sentence, rec.signature, rec.value, 0.0, false, false};
    c.digest_ok = witness_digest(rec.witnesses) == rec.witness_digest;
    c.replayed = replay(parse(rec.text), rec.signature, rec.witnesses);
    c.value_ok = std::abs(c.replayed - rec.value) <= 1e-12 * std::max(1.0, std::abs(rec.value));
    out.push_back(c);
  }
  return out;
}

std::string probe_json(const StabilityProbeReport& p) { return probe_to_json(p).dump(2) + "\n"; }

std::string element_json(const Element& a) {
  return json{{"signature", sig_json(a.signature())}, {"blocks", blocks_json(a)}}.dump();
}

Element element_from_json(const std::string& text, const Signature& sig) {
  try {
    const json j = json::parse(text);
    return blocks_from_json(j.is_object() ? j.at("blocks") : j, sig);
  } catch (const json::exception& e) {
    fail(ErrorKind::parse, std::string("element JSON: ") + e.what());
  }
}

std::vector<Element> read_tuple(const std::string& text, Signature* sig) {
  try {
    const json j = json::parse(text);
    const Signature s = sig_from_json(j.at("signature"));
    std::vector<Element> out;
    const json& t = j.at("tuple");
    if (!t.is_array() || t.empty()) fail(ErrorKind::parse, "'tuple' must be a non-empty list");
    for (const json& e : t) out.push_back(blocks_from_json(e, s));
    if (sig) *sig = s;
    return out;
  } catch (const json::exception& e) {
    fail(ErrorKind::parse, std::string("tuple JSON: ") + e.what());
  }
}

}  // namespace cstarlogic
