#include "simdoc/backend.hpp"

#include <vector>

#include "simdoc/error.hpp"

namespace simdoc {

int coherence_label(const CoherenceModel& model, const Document& prediction) {
  if (prediction.words().empty()) return 0;
  return predict_coherence(model, prediction).label;
}

BatchLoss train_step(Backend& backend, std::span<const SimplificationInstance> batch, const LossConfig& config,
                     const CoherenceModel* coherence, bool gate_open) {
  if (batch.empty()) fail(ErrorCode::NoSamples, "empty training batch");
  config.validate();
  const bool need_read = uses_readability(config.mode);
  const bool need_coh = uses_coherence(config.mode);
  if (need_coh && coherence == nullptr) fail(ErrorCode::ConfigError, "coherence mode requires a coherence model");

  std::vector<LossBreakdown> samples;
  samples.reserve(batch.size());
  for (const auto& inst : batch) {
    const double loss_simp = backend.score(Task::Simplify, inst.source, inst.target);
    std::optional<double> loss_read;
    if (need_read) {
      if (!inst.readability_label) {
        fail(ErrorCode::ModeMismatch, "instance " + inst.id + " has no readability label for mode " +
                                          std::string(loss_mode_name(config.mode)));
      }
      loss_read = backend.score(Task::ReadClassify, inst.target, *inst.readability_label);
    }
    std::optional<int> coherent;
    if (need_coh) coherent = gate_open ? coherence_label(*coherence, backend.generate(inst.source)) : 0;
    samples.push_back(partial_loss(loss_simp, loss_read, coherent, config));
  }

  for (std::size_t i = 0; i < batch.size(); ++i) {
    backend.update(batch[i], gate_factor(samples[i].coherent, config), config);
  }
  return total_loss(samples);
}

}  // namespace simdoc
