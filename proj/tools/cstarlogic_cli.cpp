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

// Command-line front end; talks to the library only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cstarlogic/cstarlogic.h"

namespace {

constexpr int kOk = 0;
constexpr int kEvalError = 1;
constexpr int kConfigError = 2;

struct Failure {
  int exit_code;
};

int exit_code_for(csl_status s) {
  switch (s) {
    case CSL_OK: return kOk;
    case CSL_ERR_PARSE:
    case CSL_ERR_UNKNOWN_NAME:
    case CSL_ERR_ARGUMENT:
    case CSL_ERR_IO:
    case CSL_ERR_BUDGET:
    case CSL_ERR_PRECONDITION:
    case CSL_ERR_SORT:
      return kConfigError;
    default:
      return kEvalError;
  }
}

void check(csl_status s) {
  if (s == CSL_OK) return;
  std::cerr << "error (" << csl_status_name(s) << "): " << csl_last_error() << "\n";
  throw Failure{exit_code_for(s)};
}

std::string take(char* s) {
  std::string out(s ? s : "");
  csl_string_free(s);
  return out;
}

struct Sentences {
  std::vector<csl_sentence*> items;
  ~Sentences() {
    for (auto* s : items) csl_sentence_free(s);
  }
};

struct ReportHandle {
  csl_report* r = nullptr;
  ~ReportHandle() { csl_report_free(r); }
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error (io): cannot read '" << path << "'\n";
    throw Failure{kConfigError};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    std::cerr << "error (io): cannot write '" << path << "'\n";
    throw Failure{kEvalError};
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string normalize_sig(const std::string& text) {
  char* out = nullptr;
  check(csl_signature_normalize(text.c_str(), &out));
  return take(out);
}

struct Budget {
  csl_config cfg{};
  std::string cache;
  std::string json;
  bool no_timing = false;

  Budget() { csl_config_default(&cfg); }

  void add(CLI::App* app) {
    app->add_option("--seed", cfg.seed, "random seed");
    app->add_option("--restarts", cfg.restarts, "restarts per quantifier block")->check(CLI::PositiveNumber);
    app->add_option("--iterations", cfg.iterations, "iterations per restart")->check(CLI::PositiveNumber);
    app->add_option("--workers", cfg.workers, "worker threads")->check(CLI::PositiveNumber);
    app->add_option("--cache", cache, "cache directory (one file per record)");
    app->add_option("--json", json, "write the JSON report here");
    app->add_flag("--no-timing", no_timing, "leave wall times and cache flags out of the JSON report");
  }
};

void print_records(const csl_report* r) {
  const std::size_t n = csl_report_record_count(r);
  for (std::size_t i = 0; i < n; ++i) {
    csl_record_info info{};
    check(csl_report_record(r, i, &info));
    std::printf("%-22s %-8s %.10g  %-16s %016llx%s\n", info.sentence, info.signature, info.value, info.direction,
                static_cast<unsigned long long>(info.witness_digest), info.cached ? "  (cached)" : "");
  }
}

void emit(const csl_report* r, const Budget& b) {
  if (b.json.empty()) return;
  char* text = nullptr;
  check(csl_report_json(r, b.no_timing ? 0 : 1, &text));
  write_text(b.json, take(text));
}

int cmd_eval(const std::string& file, const std::string& entry, const std::string& algebra, const Budget& b) {
  Sentences s;
  csl_sentence* one = nullptr;
  if (!entry.empty())
    check(csl_sentence_from_catalog(entry.c_str(), &one));
  else
    check(csl_sentence_from_file(file.c_str(), &one));
  s.items.push_back(one);
  const std::string sig = normalize_sig(algebra);
  const char* sigs[] = {sig.c_str()};
  ReportHandle r;
  check(csl_battery(s.items.data(), 1, sigs, 1, &b.cfg, b.cache.c_str(), &r.r));
  print_records(r.r);
  emit(r.r, b);
  return kOk;
}

int cmd_battery(const std::string& catalog, const std::vector<std::string>& files,
                const std::vector<std::string>& algebras, const Budget& b) {
  Sentences s;
  std::vector<std::string> refs;
  for (const std::string& ref : split(catalog, ',')) {
    if (ref == "default") {
      char* list = nullptr;
      check(csl_default_battery(&list));
      for (const std::string& x : split(take(list), ',')) refs.push_back(x);
    } else {
      refs.push_back(ref);
    }
  }
  for (const std::string& ref : refs) {
    csl_sentence* one = nullptr;
    check(csl_sentence_from_catalog(ref.c_str(), &one));
    s.items.push_back(one);
  }
  for (const std::string& f : files) {
    csl_sentence* one = nullptr;
    check(csl_sentence_from_file(f.c_str(), &one));
    s.items.push_back(one);
  }
  std::vector<std::string> sigs;
  for (const std::string& a : algebras)
    for (const std::string& piece : split(a, ';')) sigs.push_back(normalize_sig(piece));
  std::vector<const char*> sig_ptrs;
  for (const auto& x : sigs) sig_ptrs.push_back(x.c_str());
  ReportHandle r;
  check(csl_battery(s.items.data(), s.items.size(), sig_ptrs.data(), sig_ptrs.size(), &b.cfg, b.cache.c_str(), &r.r));
  print_records(r.r);
  emit(r.r, b);
  return kOk;
}

int cmd_separate(const std::string& a, const std::string& bsig, double threshold, const std::string& catalog,
                 const Budget& b) {
  const std::string sa = normalize_sig(a);
  const std::string sb = normalize_sig(bsig);
  std::vector<std::string> refs = split(catalog, ',');
  std::vector<const char*> ptrs;
  for (const auto& x : refs) ptrs.push_back(x.c_str());
  ReportHandle r;
  check(csl_separate(sa.c_str(), sb.c_str(), threshold, &b.cfg, b.cache.c_str(), refs.empty() ? nullptr : ptrs.data(),
                     ptrs.size(), &r.r));
  const long n = csl_report_separation_count(r.r);
  std::printf("separating sentences for [%s] vs [%s] (threshold %g): %ld\n", sa.c_str(), sb.c_str(), threshold, n);
  for (long i = 0; i < n; ++i) {
    csl_separation_info e{};
    check(csl_report_separation(r.r, static_cast<std::size_t>(i), &e));
    std::printf("  %-22s %.6g (%s) vs %.6g (%s)%s%s%s\n", e.sentence, e.value_a, e.direction_a, e.value_b,
                e.direction_b, e.evidence_only ? "  [evidence only]" : "", e.caveat[0] ? "  note: " : "", e.caveat);
  }
  emit(r.r, b);
  return kOk;
}

int cmd_probe(const std::string& name, const std::string& algebra, const std::string& grid, int samples,
              const Budget& b) {
  std::vector<double> deltas;
  for (const std::string& g : split(grid, ',')) {
    try {
      std::size_t used = 0;
      deltas.push_back(std::stod(g, &used));
      if (used != g.size()) throw std::invalid_argument(g);
    } catch (const std::exception&) {
      std::cerr << "error (parse): bad grid value '" << g << "'\n";
      return kConfigError;
    }
  }
  const std::string sig = normalize_sig(algebra);
  ReportHandle r;
  check(csl_probe(name.c_str(), sig.c_str(), deltas.data(), deltas.size(), samples, b.cfg.seed, b.cfg.workers, &r.r));
  csl_probe_info p{};
  check(csl_report_probe(r.r, 0, &p));
  std::printf("probe %s on [%s]: constant %.6g, residual %.3g\n", p.name, p.signature, p.constant, p.residual);
  for (std::size_t i = 0; i < p.points; ++i) std::printf("  delta %-10.4g eps %.6g\n", p.deltas[i], p.eps[i]);
  emit(r.r, b);
  return kOk;
}

int cmd_cpfactor(const std::string& tuple, int n, const Budget& b) {
  const std::string text = read_text(tuple);
  char* out = nullptr;
  check(csl_cpfactor(text.c_str(), n, &b.cfg, &out));
  const std::string result = take(out);
  std::cout << result;
  if (!b.json.empty()) write_text(b.json, result);
  return kOk;
}

int cmd_catalog(const std::string& json) {
  char* out = nullptr;
  check(csl_catalog_json(&out));
  const std::string text = take(out);
  if (json.empty())
    std::cout << text << "\n";
  else
    write_text(json, text + "\n");
  return kOk;
}

int cmd_replay(const std::string& path) {
  const std::string text = read_text(path);
  ReportHandle r;
  check(csl_report_load(text.c_str(), &r.r));
  std::size_t failures = 0;
  check(csl_report_verify(r.r, &failures));
  std::printf("%zu records, %zu replay failures\n", csl_report_record_count(r.r), failures);
  return failures == 0 ? kOk : kEvalError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-logic evaluation over finite-dimensional C*-algebras"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(csl_version()));

  Budget budget;
  std::string file, entry, algebra = "2";
  auto* eval = app.add_subcommand("eval", "evaluate one sentence");
  eval->add_option("FILE", file, "formula file");
  eval->add_option("--entry", entry, "catalog entry instead of a file (e.g. AL:2)");
  eval->add_option("--algebra", algebra, "signature, e.g. 2 or 2,2,1");
  budget.add(eval);

  std::string catalog;
  std::vector<std::string> files, algebras;
  auto* battery = app.add_subcommand("battery", "evaluate sentences over several algebras");
  battery->add_option("--catalog", catalog, "comma-separated catalog entries, or 'default'");
  battery->add_option("--files", files, "formula files");
  battery->add_option("--algebras", algebras, "signatures (space- or ';'-separated)")->required();
  budget.add(battery);

  std::string sig_a, sig_b, sep_catalog;
  double threshold = 0.05;
  auto* sep = app.add_subcommand("separate", "catalog sentences whose values differ between two algebras");
  sep->add_option("SIG1", sig_a)->required();
  sep->add_option("SIG2", sig_b)->required();
  sep->add_option("--threshold", threshold, "minimum value difference")->check(CLI::NonNegativeNumber);
  sep->add_option("--catalog", sep_catalog, "comma-separated entries instead of the default battery");
  budget.add(sep);

  std::string probe_name, grid = "0.0001,0.001,0.01";
  std::string probe_algebra = "4";
  int samples = 100;
  auto* probe = app.add_subcommand("probe", "empirical stability constant of a relation");
  probe->add_option("NAME", probe_name, "projection, unitary or matrix_units:n")->required();
  probe->add_option("--algebra", probe_algebra, "signature");
  probe->add_option("--grid", grid, "comma-separated relation values");
  probe->add_option("--samples", samples, "samples per grid point")->check(CLI::PositiveNumber);
  budget.add(probe);

  std::string tuple;
  int n = 2;
  auto* cp = app.add_subcommand("cpfactor", "upper bound for the c.p.c. factorization defect through M_n");
  cp->add_option("--tuple", tuple, "tuple file (JSON)")->required();
  cp->add_option("--n", n, "matrix size")->check(CLI::PositiveNumber);
  budget.add(cp);

  std::string catalog_json;
  auto* cat = app.add_subcommand("catalog", "print the catalog as JSON");
  cat->add_option("--json", catalog_json, "write to a file instead");

  std::string report;
  auto* rep = app.add_subcommand("replay", "re-verify every witness in a report");
  rep->add_option("REPORT", report)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*eval) {
      if (file.empty() == entry.empty()) {
        std::cerr << "error: eval needs exactly one of FILE or --entry\n";
        return kConfigError;
      }
      return cmd_eval(file, entry, algebra, budget);
    }
    if (*battery) return cmd_battery(catalog, files, algebras, budget);
    if (*sep) return cmd_separate(sig_a, sig_b, threshold, sep_catalog, budget);
    if (*probe) return cmd_probe(probe_name, probe_algebra, grid, samples, budget);
    if (*cp) return cmd_cpfactor(tuple, n, budget);
    if (*cat) return cmd_catalog(catalog_json);
    if (*rep) return cmd_replay(report);
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return kConfigError;
}
