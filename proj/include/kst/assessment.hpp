#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kst/probabilistic.hpp"
#include "kst/projection.hpp"
#include "kst/random.hpp"
#include "kst/structures.hpp"

namespace kst {

inline constexpr double kQuestionTieTolerance = 1e-12;
inline constexpr double kFinalTieTolerance = 1e-9;

/// Update parameters zeta[q][r], r = 0 (false) or 1 (correct).
struct ZetaTable {
  std::vector<std::array<double, 2>> values;

  static ZetaTable uniform(std::size_t n, double zeta = 2.0) {
    ZetaTable t{std::vector<std::array<double, 2>>(n, {zeta, zeta})};
    t.validate();
    return t;
  }

  double at(std::size_t q, int r) const { return values.at(q)[r ? 1 : 0]; }

  void validate() const {
    for (const auto& v : values)
      for (double z : v)
        if (!(z > 1.0) || !std::isfinite(z))
          fail(ErrorCode::ZetaOutOfRange, "update parameter " + std::to_string(z) + " must exceed 1");
  }
};

struct Exchange {
  std::size_t item;
  int response;
  friend bool operator==(const Exchange&, const Exchange&) = default;
};

/// The assessment's current knowledge: distribution, trial number (starting
/// at 1), answered questions, and the generator driving its random choices.
struct BeliefState {
  StateDistribution dist;
  std::size_t trial = 1;
  std::vector<Exchange> history;
  Rng rng;
  ZetaTable zeta;
};

inline BeliefState make_belief(StateDistribution initial, ZetaTable zeta, std::uint64_t seed) {
  zeta.validate();
  if (zeta.values.size() != initial.structure().domain().size())
    fail(ErrorCode::ZetaOutOfRange, "update table does not match the domain size");
  if (!initial.is_positive())
    fail(ErrorCode::InvalidProbability, "initial distribution must be positive on every state");
  return BeliefState{std::move(initial), 1, {}, Rng(seed), std::move(zeta)};
}

/// |2 L(K_q) - 1| for every item.
inline std::vector<double> question_criteria(const StateDistribution& dist) {
  const auto n = dist.structure().domain().size();
  std::vector<double> mass(n, 0.0);
  for (std::size_t i = 0; i < dist.size(); ++i)
    dist.structure().state(i).for_each([&](std::size_t q) { mass[q] += dist.prob(i); });
  for (auto& m : mass) m = std::abs(2.0 * m - 1.0);
  return mass;
}

namespace detail {

/// Indices (into `values`) within tolerance of the minimum, increasing.
inline std::vector<std::size_t> minimizers(const std::vector<double>& values, double tol) {
  double best = std::numeric_limits<double>::infinity();
  for (double v : values) best = std::min(best, v);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] <= best + tol) out.push_back(i);
  return out;
}

/// Multiplies the states agreeing with the response by zeta and
/// renormalizes. No check on zeta.
inline void update_probs(const KnowledgeStructure& structure, std::vector<double>& p, std::size_t q, int r,
                         double zeta) {
  double sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (structure.state(i).test(q) == (r != 0)) p[i] *= zeta;
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
}

}  // namespace detail

/// Half-split rule: a uniformly drawn item among those whose containing
/// states carry mass nearest 1/2.
inline std::size_t select_question(BeliefState& belief) {
  auto best = detail::minimizers(question_criteria(belief.dist), kQuestionTieTolerance);
  return best[uniform_index(belief.rng, best.size())];
}

inline void apply_update(BeliefState& belief, std::size_t q, int r) {
  const auto n = belief.dist.structure().domain().size();
  if (q >= n) fail(ErrorCode::UnknownItem, "item index " + std::to_string(q));
  const double z = belief.zeta.at(q, r);
  if (!(z > 1.0)) fail(ErrorCode::ZetaOutOfRange, "update parameter must exceed 1");
  auto p = belief.dist.probs();
  detail::update_probs(belief.dist.structure(), p, q, r, z);
  belief.dist = StateDistribution(belief.dist.structure(), std::move(p));
  belief.history.push_back({q, r ? 1 : 0});
  ++belief.trial;
}

inline BeliefState update_distribution(BeliefState belief, std::size_t q, int r) {
  apply_update(belief, q, r);
  return belief;
}

/// A state drawn uniformly among the most probable ones.
inline State choose_final_state(BeliefState& belief) {
  const auto& p = belief.dist.probs();
  std::vector<double> neg(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) neg[i] = -p[i];
  auto best = detail::minimizers(neg, kFinalTieTolerance);
  return belief.dist.structure().state(best[uniform_index(belief.rng, best.size())]);
}

// ---------------------------------------------------------------------------
// Responders

enum class ResponderKind { Straight, Careless, CarelessLucky, Interactive };

struct Responder {
  ResponderKind kind = ResponderKind::Straight;
  std::optional<State> latent;
  ResponseParams params;  // used by the careless kinds

  static Responder straight(State latent) { return {ResponderKind::Straight, std::move(latent), {}}; }
  static Responder careless(State latent, ResponseParams params) {
    params.validate(latent.width());
    return {ResponderKind::Careless, std::move(latent), std::move(params)};
  }
  /// Careless errors plus lucky guesses (eta) on unmastered items.
  static Responder careless_lucky(State latent, ResponseParams params) {
    params.validate(latent.width());
    return {ResponderKind::CarelessLucky, std::move(latent), std::move(params)};
  }
  static Responder interactive() { return {ResponderKind::Interactive, std::nullopt, {}}; }
};

inline int simulate_response(const Responder& who, std::size_t q, Rng& rng) {
  if (who.kind == ResponderKind::Interactive || !who.latent)
    fail(ErrorCode::InteractiveResponderNeedsExternalAnswer, "this responder answers from outside");
  const bool mastered = who.latent->test(q);
  switch (who.kind) {
    case ResponderKind::Straight:
      return mastered ? 1 : 0;
    case ResponderKind::Careless:
      return mastered ? (bernoulli(rng, who.params.beta.at(q)) ? 0 : 1) : 0;
    case ResponderKind::CarelessLucky:
      if (mastered) return bernoulli(rng, who.params.beta.at(q)) ? 0 : 1;
      return bernoulli(rng, who.params.eta.at(q)) ? 1 : 0;
    default:
      break;
  }
  return 0;
}

/// Seed of the responder's own generator, kept apart from the belief's.
inline std::uint64_t responder_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

// ---------------------------------------------------------------------------
// Sessions

struct StopRule {
  double threshold = 0.95;
  std::size_t max_trials = 200;

  void validate() const {
    if (!(threshold > 0 && threshold <= 1)) fail(ErrorCode::BadRequest, "threshold must lie in (0,1]");
    if (max_trials < 1) fail(ErrorCode::BadRequest, "max_trials must be at least 1");
  }
};

struct TranscriptRecord {
  std::size_t trial;
  std::size_t item;
  int response;
  double max_prob;  // after the update
  double entropy;   // bits, after the update
  friend bool operator==(const TranscriptRecord&, const TranscriptRecord&) = default;
};

struct AssessmentResult {
  State final_state;
  FringePair fringes;
  std::vector<TranscriptRecord> transcript;
  std::vector<std::string> warnings;
};

/// Correct items of one run: asked items as answered (the last answer
/// wins), unasked ones read off the final state.
inline State response_vector(const AssessmentResult& r) {
  State out = r.final_state;
  for (const auto& t : r.transcript) {
    if (t.response) out.set(t.item);
    else out.reset(t.item);
  }
  return out;
}

/// Step-wise assessment: next_item() proposes the question, answer() feeds
/// the response. Used directly by the service; run_assessment drives it
/// with a simulated responder.
class Assessment {
 public:
  Assessment(StateDistribution initial, ZetaTable zeta, StopRule stop, std::uint64_t seed)
      : belief_(make_belief(std::move(initial), std::move(zeta), seed)), stop_(stop) {
    stop_.validate();
    if (!is_learning_space(belief_.dist.structure()))
      warnings_.push_back("the structure is not a learning space; convergence is not guaranteed");
  }

  const BeliefState& belief() const { return belief_; }
  const std::vector<TranscriptRecord>& transcript() const { return transcript_; }
  const StopRule& stop_rule() const { return stop_; }

  bool finished() const {
    if (final_) return true;
    return belief_.dist.max_prob() >= stop_.threshold || transcript_.size() >= stop_.max_trials;
  }

  /// The pending question; repeated calls return the same item.
  std::size_t next_item() {
    if (finished()) fail(ErrorCode::SessionFinished, "the assessment is over");
    if (!pending_) pending_ = select_question(belief_);
    return *pending_;
  }

  std::optional<std::size_t> pending() const { return pending_; }

  void answer(int response) {
    if (!pending_) next_item();
    const auto q = *pending_;
    pending_.reset();
    apply_update(belief_, q, response);
    transcript_.push_back(
        {belief_.trial - 1, q, response ? 1 : 0, belief_.dist.max_prob(), belief_.dist.entropy()});
  }

  /// Picks the final state on first call; later calls return the same.
  AssessmentResult result() {
    if (!finished()) fail(ErrorCode::BadRequest, "the assessment is still running");
    if (!final_) final_ = choose_final_state(belief_);
    return {*final_, fringes(belief_.dist.structure(), *final_), transcript_, warnings_};
  }

 private:
  BeliefState belief_;
  StopRule stop_;
  std::optional<std::size_t> pending_;
  std::vector<TranscriptRecord> transcript_;
  std::vector<std::string> warnings_;
  std::optional<State> final_;
};

inline AssessmentResult run_assessment(const StateDistribution& initial, const Responder& responder,
                                       const StopRule& stop, const ZetaTable& zeta, std::uint64_t seed) {
  if (responder.latent && !initial.structure().contains(*responder.latent))
    fail(ErrorCode::StateNotInStructure, "the latent state is not a state of the structure");
  Assessment a(initial, zeta, stop, seed);
  Rng answers(responder_seed(seed));
  while (!a.finished()) {
    const auto q = a.next_item();
    a.answer(simulate_response(responder, q, answers));
  }
  return a.result();
}

inline AssessmentResult run_assessment(const KnowledgeStructure& structure, const Responder& responder,
                                       const StopRule& stop, const ZetaTable& zeta, std::uint64_t seed) {
  return run_assessment(uniform_distribution(structure), responder, stop, zeta, seed);
}

// ---------------------------------------------------------------------------
// Parallel variant

struct ParallelResult {
  State final_state;     // a state of the parent structure
  State combined;        // union of the block finals before snapping
  std::vector<State> block_finals;  // parent width
  std::vector<TranscriptRecord> transcript;  // max_prob: min over blocks; entropy: sum
};

inline void check_partition(const Domain& domain, const std::vector<State>& blocks) {
  if (blocks.empty()) fail(ErrorCode::BadPartition, "no blocks");
  State seen(domain.size());
  for (const auto& b : blocks) {
    if (b.width() != domain.size()) fail(ErrorCode::BadPartition, "block of the wrong width");
    if (b.none()) fail(ErrorCode::BadPartition, "empty block");
    if (b.intersects(seen)) fail(ErrorCode::BadPartition, "blocks overlap");
    seen |= b;
  }
  if (seen != domain.full_state()) fail(ErrorCode::BadPartition, "blocks do not cover the domain");
}

/// Nearest state by symmetric difference; ties go to the canonically first.
inline State snap_to_state(const StateFamily& f, const State& s) {
  const State* best = nullptr;
  std::size_t dist = SIZE_MAX;
  for (const auto& k : f) {
    auto d = (k ^ s).count();
    if (d < dist) {
      dist = d;
      best = &k;
    }
  }
  return *best;
}

/// Assessment over the projections on the blocks of a partition. Every
/// trial asks the globally most informative item; its block updates
/// directly, each other block extends its belief to the projection on its
/// block plus the item, updates there and projects back.
inline ParallelResult parallel_assessment(const KnowledgeStructure& structure, const std::vector<State>& partition,
                                          const Responder& responder, const StopRule& stop, const ZetaTable& zeta,
                                          std::uint64_t seed) {
  const auto n = structure.domain().size();
  check_partition(structure.domain(), partition);
  stop.validate();
  zeta.validate();
  if (zeta.values.size() != n) fail(ErrorCode::ZetaOutOfRange, "update table does not match the domain size");
  if (responder.latent && !structure.contains(*responder.latent))
    fail(ErrorCode::StateNotInStructure, "the latent state is not a state of the structure");

  struct Block {
    ProjectionResult proj;
    std::vector<double> p;
    std::vector<std::size_t> local;  // parent item -> index in the block, SIZE_MAX outside
    // Per foreign item q: projection on block + q, and its projection back on the block.
    std::vector<std::optional<std::pair<ProjectionResult, ProjectionResult>>> widened;
  };
  std::vector<Block> blocks;
  std::vector<std::size_t> owner(n);
  const auto parent_uniform = uniform_distribution(structure);
  for (std::size_t j = 0; j < partition.size(); ++j) {
    Block b;
    b.proj = detail::project_onto(structure, partition[j]);
    b.p = detail::project_probs(b.proj, parent_uniform.probs());
    b.local.assign(n, SIZE_MAX);
    for (std::size_t i = 0; i < b.proj.sub_items.size(); ++i) {
      b.local[b.proj.sub_items[i]] = i;
      owner[b.proj.sub_items[i]] = j;
    }
    b.widened.resize(n);
    blocks.push_back(std::move(b));
  }

  Rng rng(seed);
  Rng answers(responder_seed(seed));
  ParallelResult out;
  auto max_of = [](const std::vector<double>& p) {
    double m = 0;
    for (double v : p) m = std::max(m, v);
    return m;
  };
  auto entropy_of = [](const std::vector<double>& p) {
    double h = 0;
    for (double v : p)
      if (v > 0) h -= v * std::log2(v);
    return h;
  };
  auto min_max = [&] {
    double m = 1.0;
    for (const auto& b : blocks) m = std::min(m, max_of(b.p));
    return m;
  };

  std::size_t trial = 1;
  while (min_max() < stop.threshold && out.transcript.size() < stop.max_trials) {
    std::vector<double> crit(n);
    for (std::size_t q = 0; q < n; ++q) {
      const auto& b = blocks[owner[q]];
      double m = 0;
      for (std::size_t i = 0; i < b.p.size(); ++i)
        if (b.proj.structure.state(i).test(b.local[q])) m += b.p[i];
      crit[q] = std::abs(2.0 * m - 1.0);
    }
    auto best = detail::minimizers(crit, kQuestionTieTolerance);
    const auto q = best[uniform_index(rng, best.size())];
    const int r = simulate_response(responder, q, answers);
    const double z = zeta.at(q, r);

    for (std::size_t j = 0; j < blocks.size(); ++j) {
      auto& b = blocks[j];
      if (j == owner[q]) {
        detail::update_probs(b.proj.structure, b.p, b.local[q], r, z);
        continue;
      }
      auto& w = b.widened[q];
      if (!w) {
        State wide = partition[j].with(q);
        auto outer = detail::project_onto(structure, wide);
        State inner(outer.sub_items.size());
        for (std::size_t i = 0; i < outer.sub_items.size(); ++i)
          if (outer.sub_items[i] != q) inner.set(i);
        auto back = detail::project_onto(outer.structure, inner);
        w.emplace(std::move(outer), std::move(back));
      }
      const auto& [outer, back] = *w;
      auto ext = detail::extend_probs(back, b.p);
      detail::renormalize(ext);
      std::size_t qpos = 0;
      while (outer.sub_items[qpos] != q) ++qpos;
      detail::update_probs(outer.structure, ext, qpos, r, z);
      b.p = detail::project_probs(back, ext);
      detail::renormalize(b.p);
    }
    double h = 0;
    for (const auto& b : blocks) h += entropy_of(b.p);
    out.transcript.push_back({trial, q, r, min_max(), h});
    ++trial;
  }

  out.combined = State(n);
  for (const auto& b : blocks) {
    auto neg = b.p;
    for (auto& v : neg) v = -v;
    auto best = detail::minimizers(neg, kFinalTieTolerance);
    const State& local = b.proj.structure.state(best[uniform_index(rng, best.size())]);
    State lifted = lift_from(local, b.proj.sub_items, n);
    out.block_finals.push_back(lifted);
    out.combined |= lifted;
  }
  out.final_state = snap_to_state(structure, out.combined);
  return out;
}

// ---------------------------------------------------------------------------
// Extra problem

struct ContingencyTable {
  // rows: extra item in / out of the final state; columns: correct / false
  std::size_t x = 0, y = 0, z = 0, w = 0;

  /// Phi coefficient; NaN when a margin is empty.
  double phi() const {
    const double dx = static_cast<double>(x), dy = static_cast<double>(y), dz = static_cast<double>(z),
                 dw = static_cast<double>(w);
    const double den = (dx + dy) * (dz + dw) * (dx + dz) * (dy + dw);
    if (den == 0) return std::numeric_limits<double>::quiet_NaN();
    return (dx * dw - dy * dz) / std::sqrt(den);
  }
};

struct ExtraProblemResult {
  ContingencyTable table;
  double phi = 0;
  std::size_t recovered = 0;  // runs whose final state equals the latent state
};

/// Per run: a uniformly drawn latent state and extra item; the assessment
/// proceeds as usual and the extra item's simulated response is recorded
/// without being used for updating.
inline ExtraProblemResult extra_problem_metrics(const KnowledgeStructure& structure, std::size_t runs,
                                                const ResponseParams& params, std::uint64_t seed,
                                                const StopRule& stop = {}, std::optional<ZetaTable> zeta = {}) {
  const auto n = structure.domain().size();
  params.validate(n);
  const auto z = zeta ? *zeta : ZetaTable::uniform(n);
  bool lucky = false;
  for (double e : params.eta) lucky = lucky || e > 0;
  Rng master(seed);
  const auto initial = uniform_distribution(structure);
  ExtraProblemResult out;
  for (std::size_t run = 0; run < runs; ++run) {
    const State& latent = structure.state(uniform_index(master, structure.size()));
    const auto extra = uniform_index(master, n);
    const auto run_seed = master();
    Responder who = lucky ? Responder::careless_lucky(latent, params) : Responder::careless(latent, params);
    Rng extra_rng(run_seed + 1);
    const int response = simulate_response(who, extra, extra_rng);
    auto res = run_assessment(initial, who, stop, z, run_seed);
    const bool in = res.final_state.test(extra);
    if (in && response) ++out.table.x;
    else if (in) ++out.table.y;
    else if (response) ++out.table.z;
    else ++out.table.w;
    if (res.final_state == latent) ++out.recovered;
  }
  out.phi = out.table.phi();
  return out;
}

}  // namespace kst
