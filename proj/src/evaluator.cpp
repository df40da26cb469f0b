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

#include "cstarlogic/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "detail/random.hpp"

namespace cstarlogic {

int EvalConfig::default_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

namespace {

void hash_element(detail::Fnv1a& h, const Element& e) {
  for (int n : e.signature().blocks()) h.value(n);
  for (const Matrix& m : e.blocks()) h.bytes(m.data(), sizeof(Complex) * m.size());
}

}  // namespace

std::uint64_t EvalConfig::hash() const {
  detail::Fnv1a h;
  h.value(restarts);
  h.value(iterations);
  h.value(step);
  h.value(decay);
  h.value(tolerance);
  h.value(seed);
  for (const auto& [name, list] : hints) {
    h.str(name);
    for (const Element& e : list) hash_element(h, e);
  }
  return h.digest();
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::certified_lower: return "certified-lower";
    case Direction::certified_upper: return "certified-upper";
    case Direction::heuristic: return "heuristic";
    case Direction::exact: return "exact";
  }
  return "heuristic";
}

Direction direction_from_string(std::string_view s) {
  for (auto d : {Direction::certified_lower, Direction::certified_upper, Direction::heuristic, Direction::exact})
    if (to_string(d) == s) return d;
  fail(ErrorKind::parse, "unknown direction '" + std::string(s) + "'");
}

std::uint64_t witness_digest(const std::vector<Witness>& w) {
  detail::Fnv1a h;
  for (const Witness& x : w) {
    h.value(x.quantifier);
    h.str(x.var);
    hash_element(h, x.value);
  }
  return h.digest();
}

Element project_to_sort(const Element& a, const SortSpec& s, const Signature& ambient) {
  if (a.signature() != amplify(ambient, s.amp))
    fail(ErrorKind::structural, "element signature " + a.signature().str() + " does not match sort over " +
                                    amplify(ambient, s.amp).str());
  if (!s.scalar) return retract(a, s.constraint, s.radius);
  Element c = Element::from_matrix(scalar_part(a, s.amp));
  return tensor_scalar(retract(c, s.constraint, s.radius).block(0), ambient);
}

Element sample_sort(const SortSpec& s, const Signature& ambient, std::uint64_t seed) {
  if (!s.scalar) return sample_ball(amplify(ambient, s.amp), s.radius, s.constraint, seed);
  Element c = sample_ball(Signature({s.amp}), s.radius, s.constraint, seed);
  return tensor_scalar(c.block(0), ambient);
}

namespace {

// ---- polarity analysis

void directions(const Formula& f, int pol, bool& under, bool& over, bool& mixed) {
  const FormulaNode& n = f.node();
  switch (n.kind) {
    case FormulaKind::atomic:
    case FormulaKind::number: return;
    case FormulaKind::conn:
      for (std::size_t i = 0; i < n.children.size(); ++i)
        directions(n.children[i], pol * connective_polarity(n.conn, n.params, i), under, over, mixed);
      return;
    case FormulaKind::quant: {
      const int q = n.quant == Quantifier::sup ? 1 : -1;
      if (pol == 0) mixed = true;
      else if (q * pol > 0) under = true;
      else over = true;
      directions(n.body(), pol, under, over, mixed);
      return;
    }
  }
}

using Env = std::vector<std::pair<std::string, const Element*>>;

// Search schedule: Schatten-p guidance first, exact operator norm last.
struct Stage {
  double order;  // 0 = exact
  double until;  // fraction of the iteration budget
  bool relax;    // projections and partial isometries widened to their convex hulls
};
constexpr Stage kStages[] = {{2.0, 0.15, true}, {2.0, 0.4, false}, {4.0, 0.5, false}, {16.0, 0.6, false}, {0.0, 1.0, false}};

// 0 <= x <= 1 for projections, contractions for partial isometries
Element project_relaxed(const Element& a, const SortSpec& s, const Signature& ambient) {
  if (s.scalar || (s.constraint != Constraint::projection && s.constraint != Constraint::partial_isometry))
    return project_to_sort(a, s, ambient);
  std::vector<Matrix> out;
  for (const Matrix& m : a.blocks()) {
    const bool herm = s.constraint == Constraint::projection;
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm ? Matrix((m + m.adjoint()) / 2.0) : Matrix(m.adjoint() * m));
    const Eigen::Index n = m.rows();
    Eigen::VectorXd d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e = es.eigenvalues()(i);
      d(i) = herm ? std::clamp(e, 0.0, 1.0) : (e > 1.0 ? 1.0 / std::sqrt(e) : 1.0);
    }
    const Matrix& v = es.eigenvectors();
    out.push_back(herm ? Matrix(v * d.cast<Complex>().asDiagonal() * v.adjoint())
                       : Matrix(m * v * d.cast<Complex>().asDiagonal() * v.adjoint()));
  }
  return Element(a.signature(), std::move(out));
}

double schatten_norm(const Element& a, double p) {
  double acc = 0.0, scale_ = 0.0;
  std::vector<double> sv;
  for (const Matrix& m : a.blocks()) {
    if (p == 2.0) {
      acc += m.squaredNorm();
      continue;
    }
    Eigen::VectorXd vals;
    if (m.isApprox(m.adjoint(), 0.0)) {
      vals = Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs();
    } else {
      vals = Eigen::SelfAdjointEigenSolver<Matrix>(m.adjoint() * m, Eigen::EigenvaluesOnly)
                 .eigenvalues()
                 .cwiseMax(0.0)
                 .cwiseSqrt();
    }
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
      sv.push_back(vals(i));
      scale_ = std::max(scale_, sv.back());
    }
  }
  if (p == 2.0) return std::sqrt(acc);
  if (scale_ == 0.0) return 0.0;
  for (double s : sv) acc += std::pow(s / scale_, p);
  return scale_ * std::pow(acc, 1.0 / p);
}

struct Budget {
  int restarts;
  int iterations;
  int depth;
};

class Interpreter {
 public:
  Interpreter(const Formula& root, const Signature& ambient, const EvalConfig* cfg)
      : ambient_(ambient), cfg_(cfg) {
    index(root);
  }

  std::atomic<std::uint64_t> samples{0};
  const std::vector<Witness>* replay_witnesses = nullptr;

  // schatten > 0 replaces op_norm by the Schatten norm of that order
  // (search guidance only; quantifier values are always exact).
  double formula(const Formula& f, Env& env, const Budget& b, std::vector<Witness>* sink,
                 double schatten = 0.0) {
    const FormulaNode& n = f.node();
    switch (n.kind) {
      case FormulaKind::atomic: {
        const int amp = infer_amp(n.term).value_or(1);
        Element v = term(n.term, env, amp);
        return schatten > 0 ? schatten_norm(v, schatten) : op_norm(v);
      }
      case FormulaKind::number: return n.number;
      case FormulaKind::conn: {
        std::vector<double> args;
        args.reserve(n.children.size());
        for (const Formula& c : n.children) args.push_back(formula(c, env, b, sink, schatten));
        return apply_connective(n.conn, n.params, args);
      }
      case FormulaKind::quant:
        if (replay_witnesses) return replay_block(f, env);
        if (!cfg_) fail(ErrorKind::precondition, "formula has quantifiers; use eval");
        return block(f, env, b, sink);
    }
    return 0.0;
  }

  Element term(const Term& t, const Env& env, int amp) {
    const TermNode& n = t.node();
    switch (n.kind) {
      case TermKind::var:
        for (auto it = env.rbegin(); it != env.rend(); ++it)
          if (it->first == n.name) return *it->second;
        fail(ErrorKind::precondition, "unassigned variable '" + n.name + "'");
      case TermKind::one: return Element::identity(amplify(ambient_, amp));
      case TermKind::zero: return Element::zero(amplify(ambient_, amp));
      case TermKind::constant: return constant_value(n.name, n.args, ambient_);
      case TermKind::literal: return *n.value;
      case TermKind::add: return term(n.lhs, env, amp) + term(n.rhs, env, amp);
      case TermKind::sub: return term(n.lhs, env, amp) - term(n.rhs, env, amp);
      case TermKind::mul: return term(n.lhs, env, amp) * term(n.rhs, env, amp);
      case TermKind::adjoint: return adjoint(term(n.lhs, env, amp));
      case TermKind::scalar_mul: return scale(n.scalar, term(n.lhs, env, amp));
      case TermKind::fn_app:
        return apply_scalar_function(term(n.lhs, env, amp), make_function(n.name, n.params), Intent::self_adjoint);
      case TermKind::embed: {
        if (amp % n.factor != 0) fail(ErrorKind::sort, "diag amplification does not divide the term level");
        return embed_diag(term(n.lhs, env, amp / n.factor), n.factor);
      }
    }
    return Element();
  }

 private:
  const Signature& ambient_;
  const EvalConfig* cfg_;
  std::unordered_map<const FormulaNode*, std::size_t> qindex_;

  void index(const Formula& f) {
    if (f->kind == FormulaKind::quant) qindex_.emplace(f.get(), qindex_.size());
    for (const Formula& c : f->children) index(c);
  }

  struct Block {
    std::vector<const FormulaNode*> nodes;
    const Formula* body;
  };

  static Block collect(const Formula& f) {
    Block b{{f.get()}, &f.node().body()};
    while ((*b.body)->kind == FormulaKind::quant && (*b.body)->quant == f->quant) {
      b.nodes.push_back(b.body->get());
      b.body = &(*b.body)->body();
    }
    return b;
  }

  double replay_block(const Formula& f, Env& env) {
    Block blk = collect(f);
    const std::size_t mark = env.size();
    for (const FormulaNode* q : blk.nodes) {
      const std::size_t qi = qindex_.at(q);
      auto it = std::find_if(replay_witnesses->begin(), replay_witnesses->end(),
                             [&](const Witness& w) { return w.quantifier == qi && w.var == q->var; });
      if (it == replay_witnesses->end())
        fail(ErrorKind::missing_witness, "no witness for quantifier " + std::to_string(qi) + " ('" + q->var + "')");
      env.emplace_back(q->var, &it->value);
    }
    double v = formula(*blk.body, env, Budget{1, 1, 0}, nullptr);
    env.resize(mark);
    return v;
  }

  std::uint64_t env_seed(std::size_t qi, const Env& env) const {
    detail::Fnv1a h;
    h.value(cfg_->seed);
    h.value(qi);
    for (const auto& [name, e] : env) {
      h.str(name);
      hash_element(h, *e);
    }
    return h.digest();
  }

  // only block `only` is perturbed when it is >= 0
  Element direction(const SortSpec& s, detail::Rng& rng, int only = -1) {
    const Signature sig = s.scalar ? Signature({s.amp}) : amplify(ambient_, s.amp);
    std::vector<Matrix> blocks;
    double fro = 0.0;
    for (int b = 0; b < static_cast<int>(sig.size()); ++b) {
      const int n = sig.block(b);
      Matrix m = Matrix::Zero(n, n);
      if (only < 0 || only == b)
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
          double re = rng.normal();
          double im = rng.normal();
          m(i, j) = Complex(re, im);
        }
      fro += m.squaredNorm();
      blocks.push_back(std::move(m));
    }
    Element d(sig, std::move(blocks));
    d = scale(1.0 / std::sqrt(fro), d);
    return s.scalar ? tensor_scalar(d.block(0), ambient_) : d;
  }

  // Exact rank +-1 move in one block for projection and partial-isometry sorts;
  // small steps never cross the rounding threshold 1/2.
  Element rank_move(const Element& x, const SortSpec& s, detail::Rng& rng) {
    Element out = x;
    const std::size_t b = static_cast<std::size_t>(rng.below(static_cast<int>(x.signature().size())));
    Matrix& m = out.block(b);
    const Eigen::Index n = m.rows();
    auto unit = [&](const Matrix& proj) -> std::optional<Eigen::VectorXcd> {
      Eigen::VectorXcd w(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        double re = rng.normal();
        double im = rng.normal();
        w(i) = Complex(re, im);
      }
      w = proj * w;
      double nw = w.norm();
      if (nw < 1e-8) return std::nullopt;
      return w / nw;
    };
    const Matrix id = Matrix::Identity(n, n);
    const bool grow = rng.uniform() < 0.5;
    if (s.constraint == Constraint::projection) {
      auto w = unit(grow ? Matrix(id - m) : m);
      if (!w) return x;
      m += (grow ? 1.0 : -1.0) * (*w) * w->adjoint();
    } else {
      const Matrix src = m.adjoint() * m;
      if (grow) {
        auto z = unit(id - src);
        auto w = unit(id - m * m.adjoint());
        if (!z || !w) return x;
        m += (*w) * z->adjoint();
      } else {
        auto z = unit(src);
        if (!z) return x;
        m -= m * (*z) * z->adjoint();
      }
    }
    return project_to_sort(out, s, ambient_);
  }

  // x -> Vx, xV or VxV^* with V the Cayley transform of t H, close to 1; keeps the sort and moves
  // one side only, which additive steps cannot do near a kink
  Element rotate(const Element& x, const SortSpec& s, double t, detail::Rng& rng, bool relax) {
    Element out = x;
    const int mode = rng.below(2);
    const bool conj = s.constraint == Constraint::self_adjoint || s.constraint == Constraint::positive ||
                      s.constraint == Constraint::projection;
    const int nb = static_cast<int>(x.signature().size());
    const int only = nb > 1 && rng.uniform() < 0.5 ? rng.below(nb) : -1;
    for (int b = 0; b < nb; ++b) {
      if (only >= 0 && b != only) continue;
      Matrix& m = out.block(b);
      const Eigen::Index n = m.rows();
      Matrix h(n, n);
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
          double re = rng.normal();
          double im = rng.normal();
          h(i, j) = Complex(re, im);
        }
      h = (h + h.adjoint()).eval();
      h /= h.norm();
      const Matrix ith = Complex(0.0, 0.5 * t) * h;
      const Matrix id = Matrix::Identity(n, n);
      const Matrix v = (id - ith).partialPivLu().solve(id + ith);
      if (conj) m = v * m * v.adjoint();
      else if (mode == 0) m = v * m;
      else m = m * v;
    }
    return relax ? project_relaxed(out, s, ambient_) : project_to_sort(out, s, ambient_);
  }

  struct Run {
    double value;
    std::vector<Element> point;
  };

  Run restart(const Block& blk, Env& env, int iterations, const Budget& inner, std::uint64_t seed, int r) {
    const std::size_t k = blk.nodes.size();
    const bool sup = blk.nodes.front()->quant == Quantifier::sup;
    detail::Rng rng(seed);
    std::vector<Element> x;
    for (std::size_t i = 0; i < k; ++i) {
      const FormulaNode* q = blk.nodes[i];
      auto h = cfg_->hints.find(q->var);
      if (h != cfg_->hints.end() && r < static_cast<int>(h->second.size()))
        x.push_back(project_to_sort(h->second[r], q->sort, ambient_));
      else
        x.push_back(sample_sort(q->sort, ambient_, rng.next()));
    }
    const std::size_t mark = env.size();
    auto value = [&](const std::vector<Element>& pt, double schatten) {
      for (std::size_t i = 0; i < k; ++i) env.emplace_back(blk.nodes[i]->var, &pt[i]);
      double v = formula(*blk.body, env, inner, nullptr, schatten);
      env.resize(mark);
      samples.fetch_add(1, std::memory_order_relaxed);
      return v;
    };
    auto better = [sup](double a, double b) { return sup ? a > b : a < b; };
    std::vector<std::size_t> discrete;
    for (std::size_t i = 0; i < k; ++i) {
      const SortSpec& s = blk.nodes[i]->sort;
      if (!s.scalar && (s.constraint == Constraint::projection || s.constraint == Constraint::partial_isometry))
        discrete.push_back(i);
    }
    Run best{value(x, 0.0), x};
    double step = cfg_->step;
    int it = 0;
    for (std::size_t stage = 0; stage < std::size(kStages); ++stage) {
      const double p = kStages[stage].order;
      const bool relax = kStages[stage].relax;
      if (stage > 0 && kStages[stage - 1].relax && !relax)
        for (std::size_t i = 0; i < k; ++i) x[i] = project_to_sort(x[i], blk.nodes[i]->sort, ambient_);
      const int stop = stage + 1 == std::size(kStages)
                           ? iterations
                           : static_cast<int>(kStages[stage].until * iterations);
      double fx = p == 0.0 ? best.value : value(x, p);
      if (p == 0.0) x = best.point;
      step = std::min(cfg_->step, std::max(step, 30.0 * cfg_->tolerance));
      for (; it < stop; ++it) {
        std::vector<Element> cand = x;
        const bool single = k > 1 && rng.uniform() < 0.5;
        const std::size_t pick = single ? static_cast<std::size_t>(rng.below(static_cast<int>(k))) : 0;
        const bool jump = !relax && !discrete.empty() && rng.uniform() < 0.1;
        if (jump) {
          const std::size_t i = discrete[rng.below(static_cast<int>(discrete.size()))];
          cand[i] = rank_move(x[i], blk.nodes[i]->sort, rng);
        }
        const bool turn = !jump && rng.uniform() < 0.3;
        for (std::size_t i = 0; i < k && !jump; ++i) {
          if (single && i != pick) continue;
          const SortSpec& s = blk.nodes[i]->sort;
          if (turn && !s.scalar) {
            cand[i] = rotate(x[i], s, step * 3.0, rng, relax);
            continue;
          }
          const int nb = s.scalar ? 1 : static_cast<int>(ambient_.size());
          const int only = nb > 1 && rng.uniform() < 0.5 ? rng.below(nb) : -1;
          Element d = direction(s, rng, only);
          const Element moved = x[i] + scale(step * s.radius, d);
          cand[i] = relax ? project_relaxed(moved, s, ambient_) : project_to_sort(moved, s, ambient_);
        }
        double fc = value(cand, p);
        if (better(fc, fx)) {
          x = std::move(cand);
          fx = fc;
          // one-fifth success rule: four decays undo one success
          if (!jump) step = std::min(cfg_->step, step / std::pow(cfg_->decay, 4));
          continue;
        }
        if (fc == fx) x = std::move(cand);
        if (jump) continue;
        step *= cfg_->decay;
        if (step < cfg_->tolerance) break;
      }
      if (p == 0.0) {
        if (better(fx, best.value)) best = Run{fx, x};
      } else {
        std::vector<Element> y = x;
        if (relax)
          for (std::size_t i = 0; i < k; ++i) y[i] = project_to_sort(y[i], blk.nodes[i]->sort, ambient_);
        double exact = value(y, 0.0);
        if (better(exact, best.value)) best = Run{exact, std::move(y)};
      }
      it = std::max(it, stop);
    }
    return best;
  }

  double block(const Formula& f, Env& env, const Budget& b, std::vector<Witness>* sink) {
    Block blk = collect(f);
    const bool sup = f->quant == Quantifier::sup;
    const std::size_t qi = qindex_.at(f.get());
    const std::uint64_t base = env_seed(qi, env);
    const Budget inner{std::max(4, b.restarts / 4), std::max(50, b.iterations / 2), b.depth + 1};
    const int R = b.restarts;
    std::vector<Run> runs(R);
    auto job = [&](int r, Env& local) {
      runs[r] = restart(blk, local, b.iterations, inner, detail::mix(base, r), r);
    };
    const int workers = std::min(cfg_->workers, R);
    if (b.depth == 0 && workers > 1) {
      std::atomic<int> next{0};
      std::vector<std::exception_ptr> errors(workers);
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          Env local = env;
          try {
            for (int r = next.fetch_add(1); r < R; r = next.fetch_add(1)) job(r, local);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    } else {
      for (int r = 0; r < R; ++r) job(r, env);
    }
    std::size_t best = 0;
    for (int r = 1; r < R; ++r)
      if (sup ? runs[r].value > runs[best].value : runs[r].value < runs[best].value) best = r;
    if (sink) {
      const std::size_t mark = env.size();
      for (std::size_t i = 0; i < blk.nodes.size(); ++i) {
        sink->push_back(Witness{qindex_.at(blk.nodes[i]), blk.nodes[i]->var, runs[best].point[i]});
        env.emplace_back(blk.nodes[i]->var, &runs[best].point[i]);
      }
      formula(*blk.body, env, inner, sink);
      env.resize(mark);
    }
    return runs[best].value;
  }
};

Env make_env(const Formula& phi, const Signature& ambient, const Assignment& assignment) {
  Env env;
  for (const auto& [name, s] : free_vars(phi)) {
    auto it = assignment.find(name);
    if (it == assignment.end()) fail(ErrorKind::precondition, "free variable '" + name + "' is not assigned");
    if (!satisfies(it->second, s, ambient))
      fail(ErrorKind::sort, "assigned value for '" + name + "' violates its sort " + to_string(s));
    env.emplace_back(name, &it->second);
  }
  return env;
}

}  // namespace

Direction direction_of(const Formula& phi) {
  bool under = false, over = false, mixed = false;
  directions(phi, 1, under, over, mixed);
  if (mixed || (under && over)) return Direction::heuristic;
  if (under) return Direction::certified_lower;
  if (over) return Direction::certified_upper;
  return Direction::exact;
}

EvalResult eval(const Formula& phi, const Signature& ambient, const Assignment& assignment, const EvalConfig& cfg) {
  if (cfg.restarts < 1 || cfg.iterations < 1) fail(ErrorKind::budget, "restarts and iterations must be positive");
  if (!(cfg.step > 0) || !(cfg.decay > 0 && cfg.decay < 1) || !(cfg.tolerance > 0))
    fail(ErrorKind::precondition, "step, decay and tolerance must be positive (decay < 1)");
  check_sorts(phi, ambient);
  Env env = make_env(phi, ambient, assignment);
  Interpreter in(phi, ambient, &cfg);
  EvalResult res;
  res.value = in.formula(phi, env, Budget{cfg.restarts, cfg.iterations, 0}, &res.witnesses);
  std::sort(res.witnesses.begin(), res.witnesses.end(),
            [](const Witness& a, const Witness& b) { return a.quantifier < b.quantifier; });
  res.direction = direction_of(phi);
  res.samples = in.samples.load();
  res.config_hash = cfg.hash();
  return res;
}

double replay(const Formula& phi, const Signature& ambient, const std::vector<Witness>& witnesses,
              const Assignment& assignment) {
  check_sorts(phi, ambient);
  Env env = make_env(phi, ambient, assignment);
  Interpreter in(phi, ambient, nullptr);
  in.replay_witnesses = &witnesses;
  return in.formula(phi, env, Budget{1, 1, 0}, nullptr);
}

double evaluate(const Formula& phi, const Signature& ambient, const Assignment& assignment) {
  check_sorts(phi, ambient);
  Env env = make_env(phi, ambient, assignment);
  Interpreter in(phi, ambient, nullptr);
  return in.formula(phi, env, Budget{1, 1, 0}, nullptr);
}

Element evaluate(const Term& t, const Signature& ambient, const Assignment& assignment) {
  Env env;
  for (const auto& [name, e] : assignment) env.emplace_back(name, &e);
  Interpreter in(Formula::atomic(t), ambient, nullptr);
  return in.term(t, env, infer_amp(t).value_or(1));
}

}  // namespace cstarlogic
