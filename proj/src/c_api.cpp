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

#include "cstarlogic/cstarlogic.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "json.hpp"

#include "cstarlogic/catalog.hpp"
#include "cstarlogic/cpmaps.hpp"
#include "cstarlogic/harness.hpp"
#include "cstarlogic/parser.hpp"

struct csl_sentence {
  cstarlogic::Sentence s;
};

struct csl_report {
  cstarlogic::Report r;
  // Backing storage for the const char* fields handed out by accessors.
  std::vector<std::string> record_sigs;
  std::vector<std::string> record_dirs;
  std::vector<std::string> probe_sigs;
  std::vector<std::string> sep_dirs;

  void index() {
    record_sigs.clear();
    record_dirs.clear();
    for (const auto& x : r.records) {
      record_sigs.push_back(x.signature.str());
      record_dirs.emplace_back(cstarlogic::to_string(x.direction));
    }
    probe_sigs.clear();
    for (const auto& p : r.probes) probe_sigs.push_back(p.signature.str());
    sep_dirs.clear();
    if (r.separation)
      for (const auto& e : r.separation->entries) {
        sep_dirs.emplace_back(cstarlogic::to_string(e.direction_a));
        sep_dirs.emplace_back(cstarlogic::to_string(e.direction_b));
      }
  }
};

namespace {

using namespace cstarlogic;

thread_local std::string g_last_error;

csl_status code(ErrorKind k) {
  switch (k) {
    case ErrorKind::structural: return CSL_ERR_STRUCTURAL;
    case ErrorKind::precondition: return CSL_ERR_PRECONDITION;
    case ErrorKind::domain: return CSL_ERR_DOMAIN;
    case ErrorKind::sort: return CSL_ERR_SORT;
    case ErrorKind::parse: return CSL_ERR_PARSE;
    case ErrorKind::modulus: return CSL_ERR_MODULUS;
    case ErrorKind::budget: return CSL_ERR_BUDGET;
    case ErrorKind::missing_witness: return CSL_ERR_MISSING_WITNESS;
    case ErrorKind::gap: return CSL_ERR_GAP;
    case ErrorKind::unknown_name: return CSL_ERR_UNKNOWN_NAME;
    case ErrorKind::io: return CSL_ERR_IO;
  }
  return CSL_ERR_INTERNAL;
}

template <class F>
csl_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return CSL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return code(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown exception";
  }
  return CSL_ERR_INTERNAL;
}

csl_status bad_argument(const char* what) {
  g_last_error = what;
  return CSL_ERR_ARGUMENT;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

EvalConfig to_config(const csl_config* c) {
  EvalConfig cfg;
  if (!c) return cfg;
  cfg.restarts = c->restarts;
  cfg.iterations = c->iterations;
  cfg.step = c->step;
  cfg.decay = c->decay;
  cfg.tolerance = c->tolerance;
  cfg.seed = c->seed;
  cfg.workers = c->workers;
  if (cfg.restarts < 1 || cfg.iterations < 1) fail(ErrorKind::budget, "restarts and iterations must be >= 1");
  if (cfg.workers < 1) fail(ErrorKind::precondition, "workers must be >= 1");
  return cfg;
}

csl_report* wrap(Report r) {
  auto* out = new csl_report{std::move(r), {}, {}, {}, {}};
  out->index();
  return out;
}

}  // namespace

extern "C" {

const char* csl_version(void) { return kToolVersion; }

const char* csl_status_name(csl_status s) {
  switch (s) {
    case CSL_OK: return "ok";
    case CSL_ERR_STRUCTURAL: return "structural";
    case CSL_ERR_PRECONDITION: return "precondition";
    case CSL_ERR_DOMAIN: return "domain";
    case CSL_ERR_SORT: return "sort";
    case CSL_ERR_PARSE: return "parse";
    case CSL_ERR_MODULUS: return "modulus";
    case CSL_ERR_BUDGET: return "budget";
    case CSL_ERR_MISSING_WITNESS: return "missing_witness";
    case CSL_ERR_GAP: return "gap";
    case CSL_ERR_UNKNOWN_NAME: return "unknown_name";
    case CSL_ERR_IO: return "io";
    case CSL_ERR_INTERNAL: return "internal";
    case CSL_ERR_ARGUMENT: return "argument";
  }
  return "unknown";
}

const char* csl_last_error(void) { return g_last_error.c_str(); }

void csl_string_free(char* s) { std::free(s); }

void csl_config_default(csl_config* cfg) {
  if (!cfg) return;
  const EvalConfig d;
  *cfg = csl_config{d.restarts, d.iterations, d.step, d.decay, d.tolerance, d.seed, d.workers};
}

csl_status csl_signature_normalize(const char* text, char** out) {
  if (!text || !out) return bad_argument("null argument");
  return guard([&] { *out = dup(Signature::parse(text).str()); });
}

csl_status csl_sentence_from_catalog(const char* ref, csl_sentence** out) {
  if (!ref || !out) return bad_argument("null argument");
  return guard([&] { *out = new csl_sentence{catalog_sentence(ref)}; });
}

csl_status csl_sentence_from_file(const char* path, csl_sentence** out) {
  if (!path || !out) return bad_argument("null argument");
  return guard([&] { *out = new csl_sentence{file_sentence(path)}; });
}

csl_status csl_sentence_parse(const char* name, const char* text, csl_sentence** out) {
  if (!name || !text || !out) return bad_argument("null argument");
  return guard([&] {
    Formula f = parse(text);
    if (!free_vars(f).empty()) fail(ErrorKind::precondition, "formula has free variables");
    *out = new csl_sentence{Sentence{name, {}, std::move(f)}};
  });
}

csl_status csl_sentence_print(const csl_sentence* s, char** out) {
  if (!s || !out) return bad_argument("null argument");
  return guard([&] { *out = dup(print(s->s.formula)); });
}

void csl_sentence_free(csl_sentence* s) { delete s; }

csl_status csl_catalog_json(char** out) {
  if (!out) return bad_argument("null argument");
  return guard([&] { *out = dup(catalog_json(catalog_table())); });
}

csl_status csl_default_battery(char** out) {
  if (!out) return bad_argument("null argument");
  return guard([&] {
    std::string list;
    for (const std::string& x : default_battery()) list += (list.empty() ? "" : ",") + x;
    *out = dup(list);
  });
}

csl_status csl_battery(const csl_sentence* const* sentences, size_t n_sentences, const char* const* signatures,
                       size_t n_signatures, const csl_config* cfg, const char* cache_dir, csl_report** out) {
  if (!out || (n_sentences && !sentences) || (n_signatures && !signatures)) return bad_argument("null argument");
  return guard([&] {
    std::vector<Sentence> ss;
    for (size_t i = 0; i < n_sentences; ++i) {
      if (!sentences[i]) fail(ErrorKind::precondition, "null sentence handle");
      ss.push_back(sentences[i]->s);
    }
    std::vector<Signature> sigs;
    for (size_t i = 0; i < n_signatures; ++i) sigs.push_back(Signature::parse(signatures[i] ? signatures[i] : ""));
    *out = wrap(run_battery(ss, sigs, to_config(cfg), cache_dir ? cache_dir : ""));
  });
}

csl_status csl_separate(const char* a, const char* b, double threshold, const csl_config* cfg, const char* cache_dir,
                        const char* const* battery, size_t n_battery, csl_report** out) {
  if (!a || !b || !out) return bad_argument("null argument");
  return guard([&] {
    std::vector<std::string> refs = default_battery();
    if (battery) {
      refs.clear();
      for (size_t i = 0; i < n_battery; ++i) refs.emplace_back(battery[i] ? battery[i] : "");
    }
    *out = wrap(separate(Signature::parse(a), Signature::parse(b), threshold, to_config(cfg),
                         cache_dir ? cache_dir : "", refs));
  });
}

csl_status csl_probe(const char* name, const char* signature, const double* deltas, size_t n_deltas, int samples,
                     uint64_t seed, int workers, csl_report** out) {
  if (!name || !signature || !out || (n_deltas && !deltas)) return bad_argument("null argument");
  return guard([&] {
    Report r;
    r.config.seed = seed;
    r.probes.push_back(stability_probe(name, Signature::parse(signature), std::vector<double>(deltas, deltas + n_deltas),
                                       samples, seed, workers));
    *out = wrap(std::move(r));
  });
}

csl_status csl_report_load(const char* json, csl_report** out) {
  if (!json || !out) return bad_argument("null argument");
  return guard([&] { *out = wrap(report_from_json(json)); });
}

csl_status csl_report_json(const csl_report* r, int timing, char** out) {
  if (!r || !out) return bad_argument("null argument");
  return guard([&] { *out = dup(report_json(r->r, timing != 0)); });
}

size_t csl_report_record_count(const csl_report* r) { return r ? r->r.records.size() : 0; }

csl_status csl_report_record(const csl_report* r, size_t i, csl_record_info* out) {
  if (!r || !out) return bad_argument("null argument");
  if (i >= r->r.records.size()) return bad_argument("record index out of range");
  const Record& x = r->r.records[i];
  *out = csl_record_info{x.sentence.c_str(), r->record_sigs[i].c_str(), x.value, r->record_dirs[i].c_str(),
                         x.witness_digest, x.samples, x.wall_time, x.cached ? 1 : 0};
  return CSL_OK;
}

long csl_report_separation_count(const csl_report* r) {
  if (!r || !r->r.separation) return -1;
  return static_cast<long>(r->r.separation->entries.size());
}

csl_status csl_report_separation(const csl_report* r, size_t i, csl_separation_info* out) {
  if (!r || !out) return bad_argument("null argument");
  if (!r->r.separation || i >= r->r.separation->entries.size()) return bad_argument("separation index out of range");
  const SeparationEntry& e = r->r.separation->entries[i];
  *out = csl_separation_info{e.sentence.c_str(), e.value_a, e.value_b, r->sep_dirs[2 * i].c_str(),
                             r->sep_dirs[2 * i + 1].c_str(), e.evidence_only ? 1 : 0, e.caveat.c_str()};
  return CSL_OK;
}

size_t csl_report_probe_count(const csl_report* r) { return r ? r->r.probes.size() : 0; }

csl_status csl_report_probe(const csl_report* r, size_t i, csl_probe_info* out) {
  if (!r || !out) return bad_argument("null argument");
  if (i >= r->r.probes.size()) return bad_argument("probe index out of range");
  const StabilityProbeReport& p = r->r.probes[i];
  *out = csl_probe_info{p.name.c_str(), r->probe_sigs[i].c_str(), p.deltas.size(), p.deltas.data(), p.eps.data(),
                        p.residual, p.constant};
  return CSL_OK;
}

csl_status csl_report_verify(const csl_report* r, size_t* failures) {
  if (!r || !failures) return bad_argument("null argument");
  return guard([&] {
    *failures = 0;
    for (const ReplayCheck& c : verify_report(r->r))
      if (!c.digest_ok || !c.value_ok) ++*failures;
  });
}

void csl_report_free(csl_report* r) { delete r; }

csl_status csl_cpfactor(const char* tuple_json, int n, const csl_config* cfg, char** out) {
  if (!tuple_json || !out) return bad_argument("null argument");
  return guard([&] {
    if (n < 1) fail(ErrorKind::precondition, "n must be >= 1");
    Signature sig;
    const std::vector<Element> tuple = read_tuple(tuple_json, &sig);
    const EvalConfig c = to_config(cfg);
    const Factorization f = estimate_Rn(sig, tuple, n, c);
    const CpcCheck phi = is_cpc(f.phi);
    const CpcCheck psi = is_cpc(f.psi);
    nlohmann::ordered_json j{
        {"signature", std::vector<int>(sig.blocks().begin(), sig.blocks().end())},
        {"n", n},
        {"tuple_size", tuple.size()},
        {"value", f.value},
        {"direction", "certified-upper"},
        {"phi", {{"cp_defect", phi.cp_defect}, {"norm_of_unit", phi.norm_of_unit}}},
        {"psi", {{"cp_defect", psi.cp_defect}, {"norm_of_unit", psi.norm_of_unit}}},
        {"config", {{"restarts", c.restarts}, {"iterations", c.iterations}, {"seed", c.seed}}}};
    *out = dup(j.dump(2) + "\n");
  });
}

}  // extern "C"
