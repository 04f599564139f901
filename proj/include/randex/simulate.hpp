#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "randex/qubit_bound.hpp"
#include "randex/rates.hpp"
#include "randex/rng.hpp"

namespace randex {

struct RoundRecord {
  std::uint8_t t = 0, x = 0, y = 0;
};

struct EmpiricalScores {
  double theta_hash = 0.0;  // ground-state estimator; can exceed 1 on finite samples
  double omega_hash = 0.0;
  long counts[2][2][2] = {};
};

enum class DeviceKind { qubit, coherent, classical_mixing, custom_table };

// Honest (and reference-adversarial) device behaviour, reduced to its
// outcome probabilities: p_ground[x] on test rounds, p_win[x] on measurement
// rounds. Detection inefficiency replaces the measurement outcome by a fair
// coin with probability 1 - detection_efficiency.
struct DeviceModel {
  DeviceKind kind = DeviceKind::qubit;
  double theta = 0.9;
  double detection_efficiency = 1.0;
  double alpha = 0.0;           // coherent amplitude, derived from theta
  double p_ground[2] = {0, 0};  // per input x
  double p_win[2] = {0, 0};

  static DeviceModel make_qubit(double theta, double det_eff = 1.0) {
    DeviceModel m;
    m.kind = DeviceKind::qubit;
    m.theta = theta;
    m.detection_efficiency = det_eff;
    m.p_ground[0] = m.p_ground[1] = theta;
    double w = quantum_max_score(theta);
    m.p_win[0] = m.p_win[1] = w;
    return m;
  }

  static DeviceModel make_coherent(double theta, double det_eff = 1.0) {
    if (!(theta > 0.0) || theta > 1.0) throw std::domain_error("coherent model: theta outside (0,1]");
    DeviceModel m;
    m.kind = DeviceKind::coherent;
    m.theta = theta;
    m.detection_efficiency = det_eff;
    m.alpha = std::sqrt(std::log(1.0 / theta));
    m.p_ground[0] = m.p_ground[1] = theta;  // vacuum click probability
    double w = 0.5 + 0.5 * std::sqrt(1.0 - theta * theta * theta * theta);
    m.p_win[0] = m.p_win[1] = w;
    return m;
  }

  // Source emits the ground state on x=0 and a classical mixture on x=1; the
  // measurement is the ground-state projector.
  static DeviceModel make_classical_mixing(double theta, double det_eff = 1.0) {
    if (theta < 0.5 || theta > 1.0) throw std::domain_error("classical model: theta outside [1/2,1]");
    DeviceModel m;
    m.kind = DeviceKind::classical_mixing;
    m.theta = theta;
    m.detection_efficiency = det_eff;
    m.p_ground[0] = 1.0;
    m.p_ground[1] = 2.0 * theta - 1.0;
    m.p_win[0] = 1.0;
    m.p_win[1] = 2.0 * (1.0 - theta);
    return m;
  }

  static DeviceModel make_custom(const double ground[2], const double win[2], double det_eff = 1.0) {
    DeviceModel m;
    m.kind = DeviceKind::custom_table;
    m.detection_efficiency = det_eff;
    for (int x = 0; x < 2; ++x) {
      m.p_ground[x] = ground[x];
      m.p_win[x] = win[x];
    }
    m.theta = 0.5 * (ground[0] + ground[1]);
    return m;
  }

  void validate() const {
    for (int x = 0; x < 2; ++x)
      if (p_ground[x] < 0 || p_ground[x] > 1 || p_win[x] < 0 || p_win[x] > 1)
        throw std::invalid_argument("DeviceModel: probabilities outside [0,1]");
    if (detection_efficiency < 0 || detection_efficiency > 1)
      throw std::invalid_argument("DeviceModel: detection efficiency outside [0,1]");
  }
};

// Average winning probability of the noiseless device.
inline double ideal_score(const DeviceModel& m) {
  m.validate();
  return 0.5 * (m.p_win[0] + m.p_win[1]);
}

// Score after folding in detection inefficiency (lost rounds produce a fair
// coin flip).
inline double effective_score(const DeviceModel& m) {
  return m.detection_efficiency * ideal_score(m) + 0.5 * (1.0 - m.detection_efficiency);
}

struct RunResult {
  std::vector<RoundRecord> transcript;
  EmpiricalScores scores;
  bool aborted = false;
};

// One full protocol execution. Deterministic given the seed: every random
// choice consumes exactly one draw from a SplitMix64 stream.
inline RunResult run_protocol(const ProtocolParams& params, const DeviceModel& model,
                              std::uint64_t seed) {
  params.validate();
  model.validate();
  SplitMix64 rng(seed);
  RunResult out;
  out.transcript.reserve(static_cast<std::size_t>(params.n));

  for (long i = 0; i < params.n; ++i) {
    RoundRecord r;
    r.x = rng.bernoulli(params.p0) ? 0 : 1;
    r.t = rng.bernoulli(params.gamma) ? 1 : 0;
    if (r.t == 1) {
      r.y = rng.bernoulli(model.p_ground[r.x]) ? 0 : 1;
    } else {
      double pwin = model.detection_efficiency * model.p_win[r.x] +
                    0.5 * (1.0 - model.detection_efficiency);
      bool win = rng.bernoulli(pwin);
      r.y = win ? r.x : (1 - r.x);
    }
    out.scores.counts[r.t][r.x][r.y]++;
    out.transcript.push_back(r);
  }

  double n = static_cast<double>(params.n);
  double px[2] = {params.p0, 1.0 - params.p0};
  for (int x = 0; x < 2; ++x) {
    out.scores.theta_hash += 0.5 * out.scores.counts[1][x][0] / (n * px[x] * params.gamma);
    out.scores.omega_hash += 0.5 * out.scores.counts[0][x][x] / (n * px[x] * (1.0 - params.gamma));
  }
  out.aborted = out.scores.theta_hash < params.theta_exp - params.delta_theta ||
                out.scores.omega_hash < params.omega_exp - params.delta_omega;
  return out;
}

inline FreqVector empirical_freq(const std::vector<RoundRecord>& transcript) {
  if (transcript.empty()) throw std::invalid_argument("empirical_freq: empty transcript");
  FreqVector f;
  double inv = 1.0 / static_cast<double>(transcript.size());
  for (const auto& r : transcript) f.q[r.t][r.x][r.y] += inv;
  return f;
}

// ---- transcript and summary files ----

inline void write_transcript_csv(const std::vector<RoundRecord>& transcript,
                                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "i,t,x,y\n";
  for (std::size_t i = 0; i < transcript.size(); ++i)
    out << i << ',' << int(transcript[i].t) << ',' << int(transcript[i].x) << ','
        << int(transcript[i].y) << '\n';
}

inline std::vector<RoundRecord> read_transcript_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "i,t,x,y")
    throw std::runtime_error("transcript: bad header in " + path);
  std::vector<RoundRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    RoundRecord r;
    long idx;
    int t, x, y;
    if (std::sscanf(line.c_str(), "%ld,%d,%d,%d", &idx, &t, &x, &y) != 4 || t < 0 || t > 1 ||
        x < 0 || x > 1 || y < 0 || y > 1)
      throw std::runtime_error("transcript: bad row: " + line);
    r.t = static_cast<std::uint8_t>(t);
    r.x = static_cast<std::uint8_t>(x);
    r.y = static_cast<std::uint8_t>(y);
    out.push_back(r);
  }
  return out;
}

}  // namespace randex
