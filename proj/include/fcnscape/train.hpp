#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcnscape/data.hpp"
#include "fcnscape/models.hpp"
#include "fcnscape/objective.hpp"
#include "fcnscape/param_set.hpp"

namespace fcnscape {

struct TrainConfig {
    std::size_t batch_size = 16;
    double momentum = 0.8;
    double lr = 0.025;
    std::size_t epochs = 60;
    std::uint64_t seed = 0;
    bool shuffle = true;
    Reduction reduction = Reduction::MeanPerElement;
    // Stop after the first epoch whose train loss is at or below this.
    std::optional<double> target_loss;
    // Keep a copy of the parameters after every epoch.
    bool keep_snapshots = false;
};

void validate(const TrainConfig& config);
nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

// Heavy-ball update, in place:
//   velocity = momentum * velocity - lr * grads;  params += velocity.
void sgd_step(std::span<double> params, std::span<const double> grads, std::span<double> velocity,
              const TrainConfig& config);

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    std::optional<double> test_loss;
    double wall_seconds = 0.0;
};

struct TrainLog {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;  // 0 when no epoch finished
    bool diverged = false;
    std::string divergence_report;
    std::optional<std::size_t> target_epoch;

    // epoch,train_loss,test_loss
    std::string to_csv() const;
    // Per-epoch losses and summary; wall time only when requested.
    nlohmann::json to_json(bool include_timing = false) const;
    // epoch,wall_seconds
    std::string timing_csv() const;
};

struct TrainResult {
    TrainLog log;
    ParamSet initial;
    // Parameters with the lowest epoch train loss (initial if none finished).
    ParamSet best;
    // Parameters after the last finite epoch.
    ParamSet last;
    std::vector<ParamSet> snapshots;
};

// Minibatch SGD with momentum. Parameters start from `init`, or from
// model.initial_params(config.seed) when absent; the batch order is drawn from
// config.seed. Train and test losses are evaluated over the full splits after
// every epoch. A non-finite loss or parameter stops training with a
// divergence report, keeping the last finite parameters.
TrainResult train(const Network& model, const Dataset& train_set, const Dataset& test_set, const TrainConfig& config,
                  const std::optional<ParamSet>& init = std::nullopt);

struct StopResult {
    bool reached = false;
    std::size_t epoch = 0;
    double train_loss = 0.0;
    // The checkpoint at `epoch` when reached, otherwise the best one seen.
    ParamSet params;
    TrainResult run;
};

StopResult stop_at_loss(const Network& model, const Dataset& train_set, const Dataset& test_set, TrainConfig config,
                        double target_loss, const std::optional<ParamSet>& init = std::nullopt);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fcnscape
