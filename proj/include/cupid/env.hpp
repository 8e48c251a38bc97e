#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cupid/errors.hpp"
#include "cupid/rng.hpp"

namespace cupid {

enum class EnvKind : std::uint8_t { point_reach, two_strategy_shift, spurious_cue };

std::string env_kind_name(EnvKind kind);
EnvKind env_kind_from_name(const std::string& name);

// Immutable environment specification. Dynamics are deterministic given the
// rollout seed; shift_flag perturbs the slide corridor of the two-strategy
// environment at test time.
struct EnvSpec {
    EnvKind kind = EnvKind::point_reach;
    int state_dim = 2;
    int action_dim = 2;
    int horizon = 28;
    bool shift_flag = false;
    double process_noise = 0.004;
    double max_step = 0.12;

    // geometry shared across kinds
    double goal_radius = 0.10;
    double start_half_width = 0.05;

    // two-strategy corridor: x in [x0,x1], |y| <= half_height
    double corridor_x0 = 0.15;
    double corridor_x1 = 0.85;
    double corridor_half_height = 0.18;
    double shift_attenuation = 0.05;

    // spurious-cue scaling of the causal task coordinate
    double task_feature_scale = 0.1;
};

EnvSpec make_env(EnvKind kind, bool shift_flag = false);

struct Transition {
    std::vector<double> state;
    std::vector<double> action;
};

// Expert trajectory; label records the generating tier / strategy / cue cell.
struct Demonstration {
    int id = 0;
    std::string label;
    std::vector<Transition> transitions;
};

struct RolloutTrajectory {
    std::vector<Transition> transitions;
    int ret = -1;  // +1 success, -1 failure
    std::uint64_t seed = 0;
    bool aborted = false;  // non-finite policy action
};

struct RolloutSet {
    std::vector<RolloutTrajectory> rollouts;
    std::string policy_checkpoint_id;
};

// Maps (state, per-step seed) to an action.
using PolicyFn = std::function<std::vector<double>(std::span<const double>, std::uint64_t)>;

std::vector<double> env_reset(const EnvSpec& spec, std::uint64_t seed);
std::vector<double> env_step(const EnvSpec& spec, std::span<const double> state,
                             std::span<const double> action, Rng& noise);
bool env_success(const EnvSpec& spec, std::span<const double> state);
std::vector<double> env_goal(const EnvSpec& spec, std::span<const double> state);

// Closed-loop execution for <= horizon steps, stopping early once the goal
// region is reached. ret is +1 iff the final state satisfies the success
// predicate. A non-finite policy action aborts with ret = -1.
RolloutTrajectory env_rollout(const EnvSpec& spec, const PolicyFn& policy, std::uint64_t seed);

// Replays recorded actions from the recorded start state under fresh process
// noise. Used by robustness checks and the strategy-shift tests.
RolloutTrajectory replay_open_loop(const EnvSpec& spec, const Demonstration& demo,
                                   std::uint64_t seed);

// label -> count, evaluated in the given order for determinism.
using Composition = std::vector<std::pair<std::string, int>>;

// Scripted expert for one demonstration; labels select tier/strategy/cell.
PolicyFn scripted_expert(const EnvSpec& spec, const std::string& label, std::uint64_t seed);

// Valid labels for a kind, e.g. {"high","medium","low"} for point_reach.
std::vector<std::string> env_labels(EnvKind kind);

// Every returned demonstration succeeds in the unshifted environment; throws
// GenerationError naming the label if the scripted expert cannot produce a
// success within the retry budget.
std::vector<Demonstration> generate_demonstrations(const EnvSpec& spec,
                                                   const Composition& composition,
                                                   std::uint64_t seed, int first_id = 0);

// JSONL persistence: one record per line, full round-trip precision.
void save_demonstrations(const std::string& path, const std::vector<Demonstration>& demos);
std::vector<Demonstration> load_demonstrations(const std::string& path);
void save_rollouts(const std::string& path, const RolloutSet& rollouts);
RolloutSet load_rollouts(const std::string& path);

}  // namespace cupid
