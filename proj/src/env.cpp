#include "cupid/env.hpp"

#include <cmath>
#include <fstream>
#include <memory>

#include <json.hpp>

namespace cupid {

namespace {

using json = nlohmann::json;

constexpr std::uint64_t kNoiseStream = 0xA11CE5EEDULL;
constexpr std::uint64_t kActionStream = 0xAC7105EEDULL;

double norm2(double x, double y) { return std::sqrt(x * x + y * y); }

void clamp_to_max_step(std::vector<double>& a, double max_step) {
    const double n = norm2(a[0], a[1]);
    if (n > max_step && n > 0.0) {
        const double s = max_step / n;
        a[0] *= s;
        a[1] *= s;
    }
}

bool in_corridor(const EnvSpec& spec, double x, double y) {
    return x >= spec.corridor_x0 && x <= spec.corridor_x1 &&
           std::abs(y) <= spec.corridor_half_height;
}

int spurious_task(const EnvSpec& spec, std::span<const double> state) {
    return state[2] > 0.5 * spec.task_feature_scale ? 1 : 0;
}

}  // namespace

std::string env_kind_name(EnvKind kind) {
    switch (kind) {
        case EnvKind::point_reach: return "point-reach";
        case EnvKind::two_strategy_shift: return "two-strategy-shift";
        case EnvKind::spurious_cue: return "spurious-cue";
    }
    return "?";
}

EnvKind env_kind_from_name(const std::string& name) {
    if (name == "point-reach") {
        return EnvKind::point_reach;
    }
    if (name == "two-strategy-shift") {
        return EnvKind::two_strategy_shift;
    }
    if (name == "spurious-cue") {
        return EnvKind::spurious_cue;
    }
    throw ConfigError("unknown environment kind '" + name + "'");
}

EnvSpec make_env(EnvKind kind, bool shift_flag) {
    EnvSpec spec;
    spec.kind = kind;
    spec.shift_flag = shift_flag;
    switch (kind) {
        case EnvKind::point_reach:
            spec.state_dim = 2;
            spec.horizon = 28;
            break;
        case EnvKind::two_strategy_shift:
            spec.state_dim = 2;
            spec.horizon = 40;
            spec.max_step = 0.09;
            break;
        case EnvKind::spurious_cue:
            spec.state_dim = 4;
            spec.horizon = 30;
            break;
    }
    if (shift_flag && kind != EnvKind::two_strategy_shift) {
        throw ConfigError("shift_flag is only meaningful for two-strategy-shift");
    }
    return spec;
}

std::vector<double> env_reset(const EnvSpec& spec, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x5EED0ULL));
    std::vector<double> s(static_cast<std::size_t>(spec.state_dim), 0.0);
    s[0] = rng.uniform(-spec.start_half_width, spec.start_half_width);
    s[1] = rng.uniform(-spec.start_half_width, spec.start_half_width);
    if (spec.kind == EnvKind::spurious_cue) {
        const int task = rng.uniform() < 0.5 ? 0 : 1;
        s[2] = task * spec.task_feature_scale;
        s[3] = 1.0;  // evaluation keeps the over-represented cue fixed
    }
    return s;
}

std::vector<double> env_goal(const EnvSpec& spec, std::span<const double> state) {
    switch (spec.kind) {
        case EnvKind::point_reach:
        case EnvKind::two_strategy_shift:
            return {1.0, 0.0};
        case EnvKind::spurious_cue:
            return spurious_task(spec, state) == 0 ? std::vector<double>{1.0, -0.25}
                                                   : std::vector<double>{1.0, 0.55};
    }
    return {1.0, 0.0};
}

bool env_success(const EnvSpec& spec, std::span<const double> state) {
    const auto g = env_goal(spec, state);
    return norm2(state[0] - g[0], state[1] - g[1]) <= spec.goal_radius;
}

std::vector<double> env_step(const EnvSpec& spec, std::span<const double> state,
                             std::span<const double> action, Rng& noise) {
    if (static_cast<int>(state.size()) != spec.state_dim ||
        static_cast<int>(action.size()) != spec.action_dim) {
        throw DimensionError("env_step: state/action dimension mismatch");
    }
    std::vector<double> a(action.begin(), action.end());
    clamp_to_max_step(a, spec.max_step);

    double gain = 1.0;
    if (spec.kind == EnvKind::two_strategy_shift && spec.shift_flag &&
        in_corridor(spec, state[0], state[1])) {
        gain = spec.shift_attenuation;
    }

    std::vector<double> next(state.begin(), state.end());
    next[0] += gain * a[0] + spec.process_noise * noise.normal();
    next[1] += gain * a[1] + spec.process_noise * noise.normal();
    return next;
}

namespace {

RolloutTrajectory run_from(const EnvSpec& spec, std::vector<double> state,
                           const PolicyFn& policy, std::uint64_t seed) {
    RolloutTrajectory traj;
    traj.seed = seed;
    Rng noise(mix_seed(seed, kNoiseStream));
    for (int t = 0; t < spec.horizon; ++t) {
        auto action = policy(std::span<const double>(state), mix_seed(seed, kActionStream, t));
        bool finite = static_cast<int>(action.size()) == spec.action_dim;
        if (finite) {
            for (double v : action) {
                if (!std::isfinite(v)) {
                    finite = false;
                    break;
                }
            }
        }
        if (!finite) {
            traj.aborted = true;
            traj.ret = -1;
            return traj;
        }
        traj.transitions.push_back({state, action});
        state = env_step(spec, state, action, noise);
        if (env_success(spec, state)) {
            break;
        }
    }
    traj.ret = env_success(spec, state) ? 1 : -1;
    return traj;
}

}  // namespace

RolloutTrajectory env_rollout(const EnvSpec& spec, const PolicyFn& policy, std::uint64_t seed) {
    return run_from(spec, env_reset(spec, seed), policy, seed);
}

RolloutTrajectory replay_open_loop(const EnvSpec& spec, const Demonstration& demo,
                                   std::uint64_t seed) {
    if (demo.transitions.empty()) {
        throw ConfigError("cannot replay an empty demonstration");
    }
    auto actions = std::make_shared<std::vector<std::vector<double>>>();
    for (const auto& tr : demo.transitions) {
        actions->push_back(tr.action);
    }
    auto step = std::make_shared<std::size_t>(0);
    PolicyFn replay = [actions, step](std::span<const double>, std::uint64_t) {
        const std::size_t i = std::min(*step, actions->size() - 1);
        ++(*step);
        return (*actions)[i];
    };
    return run_from(spec, demo.transitions.front().state, replay, seed);
}

namespace {

// Mutable expert state shared across PolicyFn copies.
struct ExpertPlan {
    Rng rng;
    int step = 0;
    double action_noise = 0.0;
    double speed = 0.0;
    // pause windows [start, start+len)
    std::vector<std::pair<int, int>> pauses;
    // detour window: move perpendicular to the goal direction
    int detour_start = -1;
    int detour_len = 0;
    // waypoints followed before heading to the goal
    std::vector<std::vector<double>> waypoints;
    std::size_t next_waypoint = 0;

    explicit ExpertPlan(std::uint64_t seed) : rng(seed) {}
};

std::vector<double> seek(std::span<const double> pos, const std::vector<double>& target,
                         double speed) {
    const double dx = target[0] - pos[0];
    const double dy = target[1] - pos[1];
    const double d = norm2(dx, dy);
    if (d < 1e-12) {
        return {0.0, 0.0};
    }
    const double s = std::min(speed, d) / d;
    return {dx * s, dy * s};
}

bool paused_at(const ExpertPlan& plan, int t) {
    for (const auto& [start, len] : plan.pauses) {
        if (t >= start && t < start + len) {
            return true;
        }
    }
    return false;
}

}  // namespace

std::vector<std::string> env_labels(EnvKind kind) {
    switch (kind) {
        case EnvKind::point_reach:
            return {"high", "medium", "low"};
        case EnvKind::two_strategy_shift:
            return {"slide", "reposition"};
        case EnvKind::spurious_cue:
            return {"task0-cue1", "task1-cue1", "task1-cue0", "task0-cue0"};
    }
    return {};
}

PolicyFn scripted_expert(const EnvSpec& spec, const std::string& label, std::uint64_t seed) {
    auto plan = std::make_shared<ExpertPlan>(mix_seed(seed, 0xE9BE27ULL));
    plan->speed = 0.85 * spec.max_step;

    switch (spec.kind) {
        case EnvKind::point_reach: {
            if (label == "high") {
                plan->action_noise = 0.004;
            } else if (label == "medium") {
                plan->action_noise = 0.030;
                plan->speed = 0.62 * spec.max_step;
                plan->pauses.push_back({2 + plan->rng.uniform_int(5), 2});
            } else if (label == "low") {
                plan->action_noise = 0.055;
                plan->speed = 0.55 * spec.max_step;
                plan->pauses.push_back({2 + plan->rng.uniform_int(4), 2 + plan->rng.uniform_int(3)});
                plan->pauses.push_back({10 + plan->rng.uniform_int(5), 2 + plan->rng.uniform_int(3)});
                plan->detour_start = 3 + plan->rng.uniform_int(4);
                plan->detour_len = 3;
            } else {
                throw ConfigError("unknown point-reach tier '" + label + "'");
            }
            break;
        }
        case EnvKind::two_strategy_shift: {
            plan->action_noise = 0.010;
            plan->speed = 0.80 * spec.max_step;
            if (label == "reposition") {
                plan->waypoints = {{0.05, 0.50}, {0.95, 0.50}};
            } else if (label != "slide") {
                throw ConfigError("unknown two-strategy label '" + label + "'");
            }
            break;
        }
        case EnvKind::spurious_cue: {
            plan->action_noise = 0.010;
            plan->speed = 0.80 * spec.max_step;
            if (label != "task0-cue1" && label != "task1-cue1" && label != "task1-cue0" &&
                label != "task0-cue0") {
                throw ConfigError("unknown spurious-cue label '" + label + "'");
            }
            break;
        }
    }

    const EnvSpec spec_copy = spec;
    return [plan, spec_copy](std::span<const double> state, std::uint64_t) {
        const int t = plan->step++;
        std::vector<double> a{0.0, 0.0};
        if (!paused_at(*plan, t)) {
            const auto goal = env_goal(spec_copy, state);
            if (plan->detour_start >= 0 && t >= plan->detour_start &&
                t < plan->detour_start + plan->detour_len) {
                // sidestep perpendicular to the goal direction
                const double dx = goal[0] - state[0];
                const double dy = goal[1] - state[1];
                const double d = std::max(norm2(dx, dy), 1e-9);
                a = {-dy / d * plan->speed * 0.8, dx / d * plan->speed * 0.8};
            } else if (plan->next_waypoint < plan->waypoints.size()) {
                const auto& wp = plan->waypoints[plan->next_waypoint];
                if (norm2(wp[0] - state[0], wp[1] - state[1]) < 0.07) {
                    plan->next_waypoint++;
                }
                const auto& target =
                    plan->next_waypoint < plan->waypoints.size()
                        ? plan->waypoints[plan->next_waypoint]
                        : goal;
                a = seek(state, target, plan->speed);
            } else {
                a = seek(state, goal, plan->speed);
            }
        }
        a[0] += plan->action_noise * plan->rng.normal();
        a[1] += plan->action_noise * plan->rng.normal();
        return a;
    };
}

std::vector<Demonstration> generate_demonstrations(const EnvSpec& spec,
                                                   const Composition& composition,
                                                   std::uint64_t seed, int first_id) {
    EnvSpec gen_spec = spec;
    gen_spec.shift_flag = false;  // demonstrations come from the unshifted world

    std::vector<Demonstration> demos;
    int id = first_id;
    int label_index = 0;
    for (const auto& [label, count] : composition) {
        if (count < 0) {
            throw ConfigError("negative demonstration count for label '" + label + "'");
        }
        for (int k = 0; k < count; ++k) {
            bool done = false;
            for (int attempt = 0; attempt < 64 && !done; ++attempt) {
                const std::uint64_t demo_seed =
                    mix_seed(seed, static_cast<std::uint64_t>(label_index) * 100003ULL +
                                       static_cast<std::uint64_t>(k),
                             static_cast<std::uint64_t>(attempt));
                auto expert = scripted_expert(gen_spec, label, demo_seed);

                auto state0 = env_reset(gen_spec, demo_seed);
                if (gen_spec.kind == EnvKind::spurious_cue) {
                    const bool task1 = label.find("task1") != std::string::npos;
                    const bool cue1 = label.find("cue1") != std::string::npos;
                    state0[2] = task1 ? gen_spec.task_feature_scale : 0.0;
                    state0[3] = cue1 ? 1.0 : -1.0;
                }
                auto traj = run_from(gen_spec, std::move(state0), expert, demo_seed);
                if (traj.ret == 1 && !traj.transitions.empty()) {
                    Demonstration d;
                    d.id = id;
                    d.label = label;
                    d.transitions = std::move(traj.transitions);
                    demos.push_back(std::move(d));
                    done = true;
                }
            }
            if (!done) {
                throw GenerationError("scripted expert failed to produce a successful '" + label +
                                      "' demonstration");
            }
            ++id;
        }
        ++label_index;
    }
    return demos;
}

namespace {

json transitions_to_json(const std::vector<Transition>& transitions) {
    json arr = json::array();
    for (const auto& tr : transitions) {
        arr.push_back(json{{"s", tr.state}, {"a", tr.action}});
    }
    return arr;
}

std::vector<Transition> transitions_from_json(const json& arr) {
    std::vector<Transition> out;
    for (const auto& item : arr) {
        Transition tr;
        tr.state = item.at("s").get<std::vector<double>>();
        tr.action = item.at("a").get<std::vector<double>>();
        out.push_back(std::move(tr));
    }
    return out;
}

}  // namespace

void save_demonstrations(const std::string& path, const std::vector<Demonstration>& demos) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    for (const auto& d : demos) {
        json rec{{"id", d.id}, {"label", d.label}, {"transitions", transitions_to_json(d.transitions)}};
        out << rec.dump() << "\n";
    }
}

std::vector<Demonstration> load_demonstrations(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::vector<Demonstration> demos;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const json rec = json::parse(line);
        Demonstration d;
        d.id = rec.at("id").get<int>();
        d.label = rec.at("label").get<std::string>();
        d.transitions = transitions_from_json(rec.at("transitions"));
        if (d.transitions.empty()) {
            throw IoError("demonstration " + std::to_string(d.id) + " has no transitions");
        }
        demos.push_back(std::move(d));
    }
    return demos;
}

void save_rollouts(const std::string& path, const RolloutSet& rollouts) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << json{{"meta", {{"policy_checkpoint_id", rollouts.policy_checkpoint_id}}}}.dump() << "\n";
    for (const auto& r : rollouts.rollouts) {
        json rec{{"seed", r.seed},
                 {"ret", r.ret},
                 {"aborted", r.aborted},
                 {"transitions", transitions_to_json(r.transitions)}};
        out << rec.dump() << "\n";
    }
}

RolloutSet load_rollouts(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    RolloutSet set;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const json rec = json::parse(line);
        if (first) {
            set.policy_checkpoint_id = rec.at("meta").at("policy_checkpoint_id").get<std::string>();
            first = false;
            continue;
        }
        RolloutTrajectory r;
        r.seed = rec.at("seed").get<std::uint64_t>();
        r.ret = rec.at("ret").get<int>();
        r.aborted = rec.at("aborted").get<bool>();
        r.transitions = transitions_from_json(rec.at("transitions"));
        if (r.ret != 1 && r.ret != -1) {
            throw IoError("rollout return must be +1 or -1");
        }
        set.rollouts.push_back(std::move(r));
    }
    return set;
}

}  // namespace cupid
