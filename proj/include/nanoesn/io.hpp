#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "nanoesn/experiment.hpp"
#include "nanoesn/teacher.hpp"

namespace nanoesn {

/// A network together with the readouts trained on it.
struct SavedNetwork {
    Network network;
    std::vector<Readout> readouts;
};

/// {"config":{...},"w_in":[[...]],"w_res":[[...]],"gains":[...],"readouts":[...]}
/// with every real printed to 17 significant digits. w_in is n_inputs x N.
std::string network_to_json(const Network& net, std::span<const Readout> readouts = {});
SavedNetwork network_from_json(std::string_view text);

nlohmann::json to_json(const NetworkConfig& c);

/// Each reader starts from `base` and overrides the keys present.
NetworkConfig network_config_from_json(const nlohmann::json& j, NetworkConfig base);
TaskSpec task_from_json(const nlohmann::json& j, TaskSpec base);
ReadoutParams readout_params_from_json(const nlohmann::json& j, ReadoutParams base);

/// {"t_fail":700,"m":3 | [1,2,3],"repeats":20,"seed":...}, optionally with
/// "aux_task", "aux_k" and "debounce".
struct FaultSchedule {
    Eigen::Index t_fail = 700;
    std::vector<int> m{1, 2, 3, 4};
    int repeats = 20;
    std::uint64_t seed = 0;
    TaskKind aux_task = TaskKind::Nand;
    int aux_k = 2;
    int debounce = 1;
};

/// One experiment file drives every CLI subcommand.
struct ExperimentConfig {
    TrialSetup setup = default_setup();
    std::vector<GridAxis> grid;
    int trials = 100;
    std::uint64_t master_seed = 0;
    FaultSchedule fault;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

} // namespace nanoesn
