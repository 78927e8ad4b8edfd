#include "sleuth/sourceid.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "sleuth/logspace.hpp"
#include "sleuth/parallel.hpp"

namespace sleuth {

namespace {

constexpr double kGoldenRatio = 1.6180339887498949;

PieceMaximum maximize_golden(const std::function<double(double)>& f, double a,
                             double b, double eps) {
  PieceMaximum best;
  const double width = b - a;
  if (width < eps) {
    best.t = 0.5 * (a + b);
    best.value = f(best.t);
    best.evaluations = 1;
    return best;
  }
  const int iterations = std::max(
      0, static_cast<int>(std::floor(std::log(width / eps) / std::log(kGoldenRatio))));

  double c = b - width / kGoldenRatio;
  double d = a + width / kGoldenRatio;
  double fc = f(c), fd = f(d);
  best.evaluations = 2;
  auto track = [&best](double t, double v) {
    if (v > best.value || (v == best.value && t < best.t)) {
      best.value = v;
      best.t = t;
    }
  };
  track(c, fc);
  track(d, fd);
  for (int it = 0; it < iterations; ++it) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) / kGoldenRatio;
      fd = f(d);
      track(d, fd);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) / kGoldenRatio;
      fc = f(c);
      track(c, fc);
    }
    ++best.evaluations;
  }
  return best;
}

// Shrink the bracket by 2/3 per step using the one-third and two-thirds
// points; two evaluations per step, stopping once the bracket fits in an
// eps-neighborhood.
PieceMaximum maximize_two_point(const std::function<double(double)>& f, double a,
                                double b, double eps) {
  PieceMaximum best;
  const double width = b - a;
  if (width <= 2.0 * eps) {
    best.t = 0.5 * (a + b);
    best.value = f(best.t);
    best.evaluations = 1;
    return best;
  }
  const int iterations = static_cast<int>(
      std::ceil(std::log(width / (2.0 * eps)) / std::log(1.5)));
  auto track = [&best](double t, double v) {
    if (v > best.value || (v == best.value && t < best.t)) {
      best.value = v;
      best.t = t;
    }
  };
  for (int it = 0; it < iterations; ++it) {
    const double c = a + (b - a) / 3.0;
    const double d = a + 2.0 * (b - a) / 3.0;
    const double fc = f(c), fd = f(d);
    best.evaluations += 2;
    track(c, fc);
    track(d, fd);
    if (fc < fd) {
      a = c;
    } else {
      b = d;
    }
  }
  return best;
}

}  // namespace

PieceMaximum maximize_piece(const std::function<double(double)>& f, double a,
                            double b, double eps, PieceSearch method) {
  if (!(a < b)) throw std::invalid_argument("maximize_piece: need a < b");
  if (!(eps > 0.0)) throw std::invalid_argument("maximize_piece: need eps > 0");
  switch (method) {
    case PieceSearch::two_point:
      return maximize_two_point(f, a, b, eps);
    case PieceSearch::golden:
    case PieceSearch::auto_select:
      return maximize_golden(f, a, b, eps);
    case PieceSearch::endpoints:
      throw std::invalid_argument(
          "maximize_piece: endpoint comparison needs exponential piece terms");
  }
  return {};
}

PieceMaximum maximize_exp_piece(std::span<const ExpTerm> terms, double a, double b) {
  auto value_at = [&](double t) {
    std::vector<double> xs(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i)
      xs[i] = terms[i].log_weight == kNegInf ? kNegInf
                                             : terms[i].log_weight + terms[i].rate * t;
    return log_mean_exp(xs);
  };
  PieceMaximum best;
  const double va = value_at(a), vb = value_at(b);
  best.evaluations = 2;
  if (vb > va) {
    best.t = b;
    best.value = vb;
  } else {
    best.t = a;
    best.value = va;
  }
  return best;
}

namespace {

// Flattened description of the t_s-dependent feasibility flips.
struct FlipEvent {
  double at;
  int sample;
  int child;
  int slot;  // parent index within the child
};

struct SweepSetup {
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::vector<FlipEvent> events;           // sorted by (at, sample, child, slot)
  std::vector<double> boundaries;          // deduplicated event times
  std::vector<std::size_t> group_offsets;  // events per boundary
};

double resolve_t_lo(const PhiEvaluator& ev, double t_lo, double kappa) {
  if (std::isfinite(t_lo)) {
    if (!(t_lo < ev.upper_bound()))
      throw std::invalid_argument("t_lo must lie below the earliest observed time");
    return t_lo;
  }
  return ev.default_lower_bound(kappa);
}

SweepSetup build_sweep_setup(const PhiEvaluator& ev, double t_lo) {
  SweepSetup setup;
  setup.t_lo = t_lo;
  setup.t_hi = ev.upper_bound();

  const auto& children = ev.children();
  for (int l = 0; l < ev.sample_count(); ++l) {
    if (ev.sample_offset(l) == kNegInf) continue;
    for (int c = 0; c < static_cast<int>(children.size()); ++c) {
      const auto& child = children[c];
      for (int s = 0; s < static_cast<int>(child.parents.size()); ++s) {
        const auto& parent = child.parents[s];
        double at = kNegInf;
        if (child.observed_child && !parent.observed) {
          const double pb = ev.base_time(l, parent.node);
          if (std::isinf(pb)) continue;
          at = child.obs_time - pb;  // feasible below, infeasible above
        } else if (!child.observed_child && parent.observed) {
          at = parent.obs_time - ev.base_time(l, child.node);  // feasible above
        } else {
          continue;  // gap independent of t_s
        }
        if (at > setup.t_lo && at < setup.t_hi)
          setup.events.push_back({at, l, c, s});
      }
    }
  }
  std::sort(setup.events.begin(), setup.events.end(),
            [](const FlipEvent& x, const FlipEvent& y) {
              if (x.at != y.at) return x.at < y.at;
              if (x.sample != y.sample) return x.sample < y.sample;
              if (x.child != y.child) return x.child < y.child;
              return x.slot < y.slot;
            });

  // Group events whose times coincide within tolerance; each group is one
  // change point.
  setup.group_offsets.push_back(0);
  for (std::size_t i = 0; i < setup.events.size(); ++i) {
    const double at = setup.events[i].at;
    if (setup.boundaries.empty() ||
        at - setup.boundaries.back() > 1e-12 * std::max(1.0, std::fabs(at))) {
      setup.boundaries.push_back(at);
      if (setup.group_offsets.back() != i) setup.group_offsets.push_back(i);
    }
  }
  setup.group_offsets.push_back(setup.events.size());
  if (setup.boundaries.empty()) setup.group_offsets = {0, setup.events.size()};
  return setup;
}

// Incremental per-(sample, child) state for the exponential sweep.
class ExpSweep {
 public:
  ExpSweep(const PhiEvaluator& ev, const SweepSetup& setup)
      : ev_(ev), children_(ev.children()), num_children_(children_.size()) {
    slot_offset_.resize(num_children_ + 1, 0);
    for (std::size_t c = 0; c < num_children_; ++c)
      slot_offset_[c + 1] = slot_offset_[c] + children_[c].parents.size();
    total_slots_ = slot_offset_[num_children_];

    const int L = ev.sample_count();
    feasible_.assign(static_cast<std::size_t>(L) * total_slots_, 0);
    contrib_log_.assign(static_cast<std::size_t>(L) * num_children_, 0.0);
    contrib_slope_.assign(static_cast<std::size_t>(L) * num_children_, 0.0);
    log_w_.assign(L, 0.0);
    rate_.assign(L, 0.0);
    dead_children_.assign(L, 0);
    dead_sample_.assign(L, 0);

    for (int l = 0; l < L; ++l) {
      if (ev.sample_offset(l) == kNegInf) {
        dead_sample_[l] = 1;
        continue;
      }
      log_w_[l] = ev.sample_offset(l);
      for (std::size_t c = 0; c < num_children_; ++c) {
        init_flags(l, c, setup.t_lo);
        const auto state = eval_child(l, c);
        store(l, c, state);
        if (state.dead) {
          ++dead_children_[l];
        } else {
          log_w_[l] += state.log_contrib;
          rate_[l] += state.slope;
        }
      }
    }
  }

  void apply(const FlipEvent& event) {
    if (dead_sample_[event.sample]) return;
    const std::size_t flat =
        static_cast<std::size_t>(event.sample) * total_slots_ +
        slot_offset_[event.child] + event.slot;
    feasible_[flat] ^= 1;

    const int l = event.sample;
    const std::size_t c = event.child;
    const bool old_dead = std::isinf(contrib_at(l, c));
    if (!old_dead) {
      log_w_[l] -= contrib_at(l, c);
      rate_[l] -= slope_at(l, c);
    } else {
      --dead_children_[l];
    }
    const auto state = eval_child(l, c);
    store(l, c, state);
    if (state.dead) {
      ++dead_children_[l];
    } else {
      log_w_[l] += state.log_contrib;
      rate_[l] += state.slope;
    }
  }

  /// log-mean over samples of w_l e^{r_l t}; dead samples carry zero mass.
  double value(double t) const {
    const int L = ev_.sample_count();
    double m = kNegInf;
    for (int l = 0; l < L; ++l)
      if (alive(l)) m = std::max(m, log_w_[l] + rate_[l] * t);
    if (m == kNegInf) return kNegInf;
    double sum = 0.0;
    for (int l = 0; l < L; ++l)
      if (alive(l)) sum += std::exp(log_w_[l] + rate_[l] * t - m);
    return m + std::log(sum / static_cast<double>(L));
  }

  int dead_count() const {
    int n = 0;
    for (int l = 0; l < ev_.sample_count(); ++l) n += !alive(l);
    return n;
  }

 private:
  struct ChildEval {
    double log_contrib;
    double slope;
    bool dead;
  };

  bool alive(int l) const { return !dead_sample_[l] && dead_children_[l] == 0; }

  double contrib_at(int l, std::size_t c) const {
    return contrib_log_[static_cast<std::size_t>(l) * num_children_ + c];
  }
  double slope_at(int l, std::size_t c) const {
    return contrib_slope_[static_cast<std::size_t>(l) * num_children_ + c];
  }
  void store(int l, std::size_t c, const ChildEval& state) {
    contrib_log_[static_cast<std::size_t>(l) * num_children_ + c] =
        state.dead ? kInf : state.log_contrib;
    contrib_slope_[static_cast<std::size_t>(l) * num_children_ + c] =
        state.dead ? 0.0 : state.slope;
  }

  void init_flags(int l, std::size_t c, double t_lo) {
    const auto& child = children_[c];
    char* flags = feasible_.data() + static_cast<std::size_t>(l) * total_slots_ +
                  slot_offset_[c];
    for (std::size_t s = 0; s < child.parents.size(); ++s) {
      const auto& parent = child.parents[s];
      bool feasible = false;
      if (child.observed_child && !parent.observed) {
        // feasible while t_s < obs_time - base(parent)
        feasible = child.obs_time - ev_.base_time(l, parent.node) > t_lo;
      } else if (!child.observed_child && parent.observed) {
        // feasible while t_s > obs_time(parent) - base(child)
        feasible = parent.obs_time - ev_.base_time(l, child.node) <= t_lo;
      } else if (child.observed_child && parent.observed) {
        feasible = child.obs_time - parent.obs_time > 0.0;
      } else {
        feasible = ev_.base_time(l, child.node) - ev_.base_time(l, parent.node) > 0.0;
      }
      flags[s] = feasible ? 1 : 0;
    }
  }

  ChildEval eval_child(int l, std::size_t c) const {
    const auto& child = children_[c];
    const char* flags = feasible_.data() +
                        static_cast<std::size_t>(l) * total_slots_ + slot_offset_[c];
    const double child_base =
        child.observed_child ? child.obs_time : ev_.base_time(l, child.node);
    double const_part = 0.0, slope = 0.0, hazard_sum = 0.0;
    for (std::size_t s = 0; s < child.parents.size(); ++s) {
      if (!flags[s]) continue;
      const auto& parent = child.parents[s];
      const double inv_alpha = 1.0 / parent.alpha;
      const double parent_base =
          parent.observed ? parent.obs_time : ev_.base_time(l, parent.node);
      const_part -= (child_base - parent_base) * inv_alpha;
      if (child.observed_child && !parent.observed) {
        slope += inv_alpha;
      } else if (!child.observed_child && parent.observed) {
        slope -= inv_alpha;
      }
      hazard_sum += inv_alpha;
    }
    if (hazard_sum <= 0.0) return {kNegInf, 0.0, true};
    return {const_part + std::log(hazard_sum), slope, false};
  }

  const PhiEvaluator& ev_;
  const std::vector<PhiEvaluator::ChildSpec>& children_;
  std::size_t num_children_;
  std::size_t total_slots_ = 0;
  std::vector<std::size_t> slot_offset_;
  std::vector<char> feasible_;
  std::vector<double> contrib_log_;   // +inf marks a dead child factor
  std::vector<double> contrib_slope_;
  std::vector<double> log_w_;
  std::vector<double> rate_;
  std::vector<int> dead_children_;
  std::vector<char> dead_sample_;
};

}  // namespace

std::vector<double> enumerate_change_points(const PhiEvaluator& evaluator,
                                            double t_lo, double kappa) {
  const double lo = resolve_t_lo(evaluator, t_lo, kappa);
  return build_sweep_setup(evaluator, lo).boundaries;
}

std::vector<double> enumerate_change_points(const Network& net,
                                            const ObservedCascade& obs,
                                            int source, const SampleBank& bank,
                                            double t_lo, double kappa) {
  PhiEvaluator evaluator(net, obs, source, bank);
  return enumerate_change_points(evaluator, t_lo, kappa);
}

PiecewiseLikelihood enumerate_pieces(const PhiEvaluator& evaluator, double t_lo,
                                     double kappa) {
  PiecewiseLikelihood pieces;
  pieces.source = evaluator.source();
  pieces.t_lo = resolve_t_lo(evaluator, t_lo, kappa);
  pieces.t_hi = evaluator.upper_bound();
  pieces.change_points = enumerate_change_points(evaluator, pieces.t_lo, kappa);
  pieces.evaluator = &evaluator;
  return pieces;
}

PieceSweepResult sweep_exp_pieces(const PhiEvaluator& evaluator, double t_lo,
                                  double kappa) {
  if (evaluator.kernel_shape() != 1.0)
    throw std::invalid_argument("the piece sweep requires an exponential kernel");
  const double lo = resolve_t_lo(evaluator, t_lo, kappa);
  const double hi = evaluator.upper_bound();
  const SweepSetup setup = build_sweep_setup(evaluator, lo);
  ExpSweep sweep(evaluator, setup);

  PieceSweepResult result;
  result.boundaries.push_back(lo);
  result.boundaries.insert(result.boundaries.end(), setup.boundaries.begin(),
                           setup.boundaries.end());
  result.boundaries.push_back(hi);
  for (std::size_t p = 0; p < setup.boundaries.size() + 1; ++p) {
    const double a = result.boundaries[p];
    const double b = result.boundaries[p + 1];
    result.value_left.push_back(sweep.value(a));
    result.value_right.push_back(sweep.value(b));
    result.dead_samples.push_back(sweep.dead_count());
    if (p < setup.boundaries.size()) {
      for (std::size_t i = setup.group_offsets[p]; i < setup.group_offsets[p + 1]; ++i)
        sweep.apply(setup.events[i]);
    }
  }
  return result;
}

BestTimeResult best_time_for_source(const PhiEvaluator& evaluator,
                                    const SearchOptions& options) {
  const double t_lo = resolve_t_lo(evaluator, options.t_lo, options.kappa);
  const double t_hi = evaluator.upper_bound();

  PieceSearch method = options.method;
  if (method == PieceSearch::auto_select)
    method = evaluator.kernel_shape() == 1.0 ? PieceSearch::endpoints
                                             : PieceSearch::golden;
  if (method == PieceSearch::endpoints && evaluator.kernel_shape() != 1.0)
    throw std::invalid_argument(
        "endpoint piece maximization requires an exponential kernel");

  BestTimeResult result;

  if (method == PieceSearch::endpoints) {
    const PieceSweepResult sweep = sweep_exp_pieces(evaluator, t_lo, options.kappa);
    result.change_point_count = sweep.piece_count() - 1;
    result.piece_count = sweep.piece_count();

    double best_v = kNegInf, best_t = t_lo;
    int best_dead = evaluator.sample_count();
    auto consider = [&](double t, double v, int dead) {
      if (v > best_v || (v == best_v && t < best_t)) {
        best_v = v;
        best_t = t;
        best_dead = dead;
      }
    };
    for (int p = 0; p < sweep.piece_count(); ++p) {
      consider(sweep.boundaries[p], sweep.value_left[p], sweep.dead_samples[p]);
      consider(sweep.boundaries[p + 1], sweep.value_right[p], sweep.dead_samples[p]);
    }
    result.feasible = best_v > kNegInf;
    result.log_phi = best_v;
    result.t_star = std::min(best_t, t_hi - options.epsilon_floor);
    result.dropped_samples = best_dead;
    return result;
  }

  // General path: line search within every piece.
  PiecewiseLikelihood pieces = enumerate_pieces(evaluator, t_lo, options.kappa);
  result.change_point_count = static_cast<int>(pieces.change_points.size());
  result.piece_count = pieces.piece_count();
  auto f = [&](double t) { return evaluator.log_phi(t); };
  double best_v = kNegInf, best_t = t_lo;
  for (int p = 0; p < pieces.piece_count(); ++p) {
    const auto [lo, hi] = pieces.piece(p);
    if (!(hi > lo)) continue;
    const double eps =
        std::max(options.epsilon_floor, options.epsilon_rel * (hi - lo));
    const PieceMaximum pm = maximize_piece(f, lo, hi, eps, method);
    result.evaluations += pm.evaluations;
    if (pm.value > best_v || (pm.value == best_v && pm.t < best_t)) {
      best_v = pm.value;
      best_t = pm.t;
    }
  }
  result.feasible = best_v > kNegInf;
  result.log_phi = best_v;
  result.t_star = std::min(best_t, t_hi - options.epsilon_floor);
  result.dropped_samples = evaluator.estimate(result.t_star).dropped_samples;
  return result;
}

BestTimeResult best_time_for_source(const Network& net, const ObservedCascade& obs,
                                    int source, const SampleBank& bank,
                                    const SearchOptions& options) {
  PhiEvaluator evaluator(net, obs, source, bank);
  return best_time_for_source(evaluator, options);
}

int SourceRanking::rank_of(int node) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].node == node) return static_cast<int>(i) + 1;
  return 0;
}

SourceRanking rank_sources(const Network& net,
                           std::span<const ObservedCascade> cascades,
                           const RankOptions& options) {
  if (cascades.empty()) throw std::invalid_argument("rank_sources: no cascades");
  const auto start = std::chrono::steady_clock::now();

  // Candidates must be hidden in, and able to explain, every cascade.
  std::vector<int> candidates;
  for (std::size_t c = 0; c < cascades.size(); ++c) {
    const auto obs_nodes = cascades[c].observed_nodes();
    const auto hidden = cascades[c].hidden_nodes();
    auto cand = candidate_sources(net, obs_nodes, hidden);
    if (c == 0) {
      candidates = std::move(cand);
    } else {
      std::vector<int> merged;
      std::set_intersection(candidates.begin(), candidates.end(), cand.begin(),
                            cand.end(), std::back_inserter(merged));
      candidates = std::move(merged);
    }
  }

  SourceRanking ranking;
  if (candidates.empty()) return ranking;  // no feasible source

  const Rng rng(options.seed);
  std::vector<SampleBank> banks;
  banks.reserve(cascades.size());
  for (std::size_t c = 0; c < cascades.size(); ++c)
    banks.emplace_back(net, options.sample_count, rng.stream(c));

  std::vector<SourceRanking::Entry> entries(candidates.size());
  std::vector<long long> pieces(candidates.size(), 0);
  std::vector<long long> dropped(candidates.size(), 0);
  parallel_for(static_cast<int>(candidates.size()), [&](int idx) {
    SourceRanking::Entry entry;
    entry.node = candidates[idx];
    entry.total_log_likelihood = 0.0;
    for (std::size_t c = 0; c < cascades.size(); ++c) {
      const BestTimeResult best = best_time_for_source(
          net, cascades[c], entry.node, banks[c], options.search);
      entry.best_ts.push_back(best.t_star);
      entry.per_cascade_log.push_back(best.log_phi);
      entry.total_log_likelihood += best.log_phi;
      pieces[idx] += best.piece_count;
      dropped[idx] += best.dropped_samples;
    }
    entries[idx] = std::move(entry);
  });

  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.total_log_likelihood != b.total_log_likelihood)
      return a.total_log_likelihood > b.total_log_likelihood;
    return a.node < b.node;
  });
  ranking.entries = std::move(entries);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    ranking.total_pieces += pieces[i];
    ranking.total_dropped_samples += dropped[i];
  }
  ranking.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return ranking;
}

}  // namespace sleuth
