#include "simdoc/loss.hpp"

#include <cmath>
#include <string>

#include "simdoc/error.hpp"

namespace simdoc {

std::string_view loss_mode_name(LossMode mode) {
  switch (mode) {
    case LossMode::S: return "S";
    case LossMode::S_R: return "S_R";
    case LossMode::S_C: return "S_C";
    case LossMode::S_R_C: return "S_R_C";
  }
  return "S";
}

LossMode parse_loss_mode(std::string_view name) {
  if (name == "S") return LossMode::S;
  if (name == "S_R") return LossMode::S_R;
  if (name == "S_C") return LossMode::S_C;
  if (name == "S_R_C") return LossMode::S_R_C;
  fail(ErrorCode::ConfigError, "unknown loss mode '" + std::string(name) + "'");
}

bool uses_readability(LossMode mode) { return mode == LossMode::S_R || mode == LossMode::S_R_C; }
bool uses_coherence(LossMode mode) { return mode == LossMode::S_C || mode == LossMode::S_R_C; }

void LossConfig::validate() const {
  if (!(delta > 0.0 && delta <= 1.0)) fail(ErrorCode::ConfigError, "delta must lie in (0, 1]");
}

LossBreakdown partial_loss(double loss_simp, std::optional<double> loss_read, std::optional<int> coherent,
                           const LossConfig& config) {
  config.validate();
  const auto mode = config.mode;
  if (loss_read.has_value() != uses_readability(mode) || coherent.has_value() != uses_coherence(mode)) {
    fail(ErrorCode::ModeMismatch, "components do not match loss mode " + std::string(loss_mode_name(mode)));
  }
  if (!(loss_simp >= 0.0) || !std::isfinite(loss_simp) || (loss_read && (!(*loss_read >= 0.0) || !std::isfinite(*loss_read)))) {
    fail(ErrorCode::InvalidLoss, "losses must be finite and non-negative");
  }
  if (coherent && *coherent != 0 && *coherent != 1) fail(ErrorCode::InvalidLoss, "coherence flag must be 0 or 1");

  LossBreakdown b;
  b.mode = mode;
  b.loss_simp = loss_simp;
  b.loss_read = loss_read;
  b.coherent = coherent;
  const double combined = loss_read ? loss_simp + *loss_read : loss_simp;
  b.partial = (coherent && *coherent == 1) ? config.delta * combined : combined;
  return b;
}

BatchLoss total_loss(std::span<const LossBreakdown> samples) {
  if (samples.empty()) fail(ErrorCode::NoSamples, "cannot aggregate an empty batch");
  BatchLoss out;
  double sum = 0.0;
  for (const auto& s : samples) {
    if (s.mode != samples.front().mode) fail(ErrorCode::ModeMismatch, "batch mixes loss modes");
    sum += s.partial;
  }
  out.samples.assign(samples.begin(), samples.end());
  out.n = samples.size();
  out.total = sum / static_cast<double>(out.n);
  return out;
}

double gating_gradient(int coherent, const LossConfig& config) {
  if (!uses_coherence(config.mode)) {
    fail(ErrorCode::ModeMismatch, "loss mode " + std::string(loss_mode_name(config.mode)) + " has no coherence gate");
  }
  config.validate();
  return coherent == 1 ? config.delta : 1.0;
}

double gate_factor(std::optional<int> coherent, const LossConfig& config) {
  if (!uses_coherence(config.mode) || !coherent) return 1.0;
  return gating_gradient(*coherent, config);
}

}  // namespace simdoc
