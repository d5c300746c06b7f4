#include "relevance/search.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <map>

namespace relevance {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Solved: return "solved";
    case SolveStatus::Timeout: return "timeout";
    case SolveStatus::Unsolvable: return "unsolvable";
  }
  return "?";
}

std::string_view to_string(LimitReason reason) {
  switch (reason) {
    case LimitReason::None: return "none";
    case LimitReason::WallClock: return "wall_clock";
    case LimitReason::StateBudget: return "state_budget";
    case LimitReason::ExpansionBudget: return "expansion_budget";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr std::uint32_t kNone = UINT32_MAX;

struct CompiledAction {
  std::vector<std::uint32_t> pre;
  std::vector<std::uint32_t> add;
  std::vector<std::uint32_t> del;
};

// States are fixed-width bitsets packed in one arena; the hash table stores
// arena indices.
class StateStore {
 public:
  explicit StateStore(std::size_t words) : words_(words), slots_(1024, kNone) {}

  std::size_t size() const { return parent_.size(); }
  const std::uint64_t* state(std::uint32_t index) const { return arena_.data() + index * words_; }
  std::uint32_t parent(std::uint32_t index) const { return parent_[index]; }
  std::uint32_t via(std::uint32_t index) const { return via_[index]; }

  /// Index of the new state, or kNone when it was seen before.
  std::uint32_t insert(const std::uint64_t* bits, std::uint32_t parent, std::uint32_t via) {
    if ((size() + 1) * 2 > slots_.size()) grow();
    const std::uint64_t h = hash(bits);
    std::size_t mask = slots_.size() - 1;
    for (std::size_t pos = h & mask;; pos = (pos + 1) & mask) {
      const auto slot = slots_[pos];
      if (slot == kNone) {
        const auto index = static_cast<std::uint32_t>(size());
        arena_.insert(arena_.end(), bits, bits + words_);
        parent_.push_back(parent);
        via_.push_back(via);
        slots_[pos] = index;
        return index;
      }
      if (std::equal(bits, bits + words_, state(slot))) return kNone;
    }
  }

 private:
  std::uint64_t hash(const std::uint64_t* bits) const {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (std::size_t i = 0; i < words_; ++i) {
      std::uint64_t z = bits[i] + h;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      h = z ^ (z >> 31);
    }
    return h;
  }

  void grow() {
    std::vector<std::uint32_t> next(slots_.size() * 2, kNone);
    const std::size_t mask = next.size() - 1;
    for (std::uint32_t i = 0; i < size(); ++i) {
      std::size_t pos = hash(state(i)) & mask;
      while (next[pos] != kNone) pos = (pos + 1) & mask;
      next[pos] = i;
    }
    slots_.swap(next);
  }

  std::size_t words_;
  std::vector<std::uint64_t> arena_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> via_;
  std::vector<std::uint32_t> slots_;
};

bool test(const std::uint64_t* bits, std::uint32_t f) { return (bits[f >> 6] >> (f & 63)) & 1U; }
void set(std::uint64_t* bits, std::uint32_t f) { bits[f >> 6] |= std::uint64_t{1} << (f & 63); }
void reset(std::uint64_t* bits, std::uint32_t f) { bits[f >> 6] &= ~(std::uint64_t{1} << (f & 63)); }

}  // namespace

SolveResult solve(const PlanningProblem& problem, double timeout_seconds) {
  SearchLimits limits;
  limits.timeout_seconds = timeout_seconds;
  return solve(problem, limits);
}

SolveResult solve(const PlanningProblem& problem, const SearchLimits& limits) {
  const auto start = Clock::now();
  // Clamped so an infinite timeout does not overflow the clock's integer ticks.
  constexpr double kNoDeadline = 365.0 * 24 * 3600;
  const auto deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(
                                    std::clamp(limits.timeout_seconds, 0.0, kNoDeadline)));
  SolveResult result;
  auto finish = [&](SolveStatus status, LimitReason limit = LimitReason::None) {
    result.status = status;
    result.limit = limit;
    result.stats.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
  };

  const auto actions = ground(problem);
  result.stats.ground_actions = actions.size();

  std::map<Atom, std::uint32_t> ids;
  auto id_of = [&](const Atom& a) { return ids.try_emplace(a, static_cast<std::uint32_t>(ids.size())).first->second; };
  for (const auto& a : problem.init) id_of(a);
  std::vector<CompiledAction> compiled;
  compiled.reserve(actions.size());
  for (const auto& g : actions) {
    CompiledAction c;
    for (const auto& a : g.preconditions) c.pre.push_back(id_of(a));
    for (const auto& a : g.add_effects) c.add.push_back(id_of(a));
    for (const auto& a : g.del_effects) c.del.push_back(id_of(a));
    compiled.push_back(std::move(c));
  }
  std::vector<std::uint32_t> goal;
  for (const auto& a : problem.goal) {
    auto it = ids.find(a);
    if (it == ids.end()) return finish(SolveStatus::Unsolvable);  // not even relaxed-reachable
    goal.push_back(it->second);
  }

  const std::size_t words = std::max<std::size_t>(1, (ids.size() + 63) / 64);
  auto h_of = [&](const std::uint64_t* bits) {
    std::size_t h = 0;
    for (auto f : goal) h += !test(bits, f);
    return h;
  };

  StateStore store(words);
  std::vector<std::uint64_t> scratch(words, 0);
  for (const auto& a : problem.init) set(scratch.data(), ids.at(a));
  store.insert(scratch.data(), kNone, kNone);
  result.stats.stored = 1;

  auto extract = [&](std::uint32_t index) {
    Plan plan;
    for (; store.parent(index) != kNone; index = store.parent(index)) plan.steps.push_back(actions[store.via(index)]);
    std::reverse(plan.steps.begin(), plan.steps.end());
    result.plan = std::move(plan);
  };
  if (h_of(store.state(0)) == 0) {
    extract(0);
    return finish(SolveStatus::Solved);
  }

  std::vector<std::deque<std::uint32_t>> open(goal.size() + 1);
  open[h_of(store.state(0))].push_back(0);
  std::size_t lowest = 0;

  while (true) {
    while (lowest < open.size() && open[lowest].empty()) ++lowest;
    if (lowest == open.size()) return finish(SolveStatus::Unsolvable);
    const auto current = open[lowest].front();
    open[lowest].pop_front();

    if (limits.max_expansions && result.stats.expanded >= *limits.max_expansions)
      return finish(SolveStatus::Timeout, LimitReason::ExpansionBudget);
    if ((result.stats.expanded & 255) == 0 && Clock::now() >= deadline)
      return finish(SolveStatus::Timeout, LimitReason::WallClock);
    ++result.stats.expanded;

    for (std::uint32_t ai = 0; ai < compiled.size(); ++ai) {
      const auto& act = compiled[ai];
      const auto* bits = store.state(current);
      bool applicable = true;
      for (auto f : act.pre)
        if (!test(bits, f)) {
          applicable = false;
          break;
        }
      if (!applicable) continue;
      std::copy(bits, bits + words, scratch.begin());
      for (auto f : act.del) reset(scratch.data(), f);
      for (auto f : act.add) set(scratch.data(), f);
      ++result.stats.generated;
      const auto index = store.insert(scratch.data(), current, ai);
      if (index == kNone) continue;
      result.stats.stored = store.size();
      const auto h = h_of(scratch.data());
      if (h == 0) {
        extract(index);
        return finish(SolveStatus::Solved);
      }
      open[h].push_back(index);
      lowest = std::min(lowest, h);
      if (limits.max_states && store.size() >= limits.max_states)
        return finish(SolveStatus::Timeout, LimitReason::StateBudget);
    }
  }
}

}  // namespace relevance
