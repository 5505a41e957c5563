#pragma once

// Loss algebra for the combined objective: simplification plus optional
// readability, with a per-sample coherence gate that scales the combined
// loss by delta when the prediction is judged coherent, then a plain mean
// over the batch.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace simdoc {

enum class LossMode { S, S_R, S_C, S_R_C };

std::string_view loss_mode_name(LossMode mode);
LossMode parse_loss_mode(std::string_view name);
bool uses_readability(LossMode mode);
bool uses_coherence(LossMode mode);

struct LossConfig {
  LossMode mode = LossMode::S;
  double delta = 0.90;

  void validate() const;
};

struct LossBreakdown {
  LossMode mode = LossMode::S;
  double loss_simp = 0.0;
  std::optional<double> loss_read;
  std::optional<int> coherent;
  double partial = 0.0;

  bool operator==(const LossBreakdown&) const = default;
};

struct BatchLoss {
  std::vector<LossBreakdown> samples;
  double total = 0.0;
  std::size_t n = 0;
};

LossBreakdown partial_loss(double loss_simp, std::optional<double> loss_read, std::optional<int> coherent,
                           const LossConfig& config);

BatchLoss total_loss(std::span<const LossBreakdown> samples);

// d(partial)/d(loss_simp), identical for loss_read; the gate itself is not
// differentiated.
double gating_gradient(int coherent, const LossConfig& config);

// Gate factor for any mode: 1 when the mode has no coherence term.
double gate_factor(std::optional<int> coherent, const LossConfig& config);

}  // namespace simdoc
