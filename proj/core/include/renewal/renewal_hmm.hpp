#ifndef RENEWAL_RENEWAL_HMM_HPP
#define RENEWAL_RENEWAL_HMM_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace renewal {

/// Hidden Markov model over point classes along a line, with exponential
/// inter-point-distance emissions. State 0 is the background class; states
/// 1..n-1 are track classes whose gap rate is the local background rate plus
/// 1/track_mean (Poisson superposition: rates add, not means).
///
/// The transition matrix is column-stochastic: at(i, j) = P(X_t = i | X_{t-1} = j).
struct RenewalHmmModel {
    std::size_t n_states = 0;
    std::vector<double> transition;   // n*n, row-major storage of at(i, j)
    std::vector<double> track_mean;   // size n_states-1, mean gap in microns
    std::vector<double> initial;      // size n_states, sums to 1

    bool alignment_enabled = false;
    std::vector<double> alignment_prob;  // size n_states, P(aligned | state)

    double at(std::size_t i, std::size_t j) const { return transition[i * n_states + j]; }
    double& at(std::size_t i, std::size_t j) { return transition[i * n_states + j]; }

    /// Gap rate of `state` given the 1-D background rate at the observation.
    double state_rate(std::size_t state, double local_bg_rate) const {
        return state == 0 ? local_bg_rate : local_bg_rate + 1.0 / track_mean[state - 1];
    }
};

/// One HMM observation: the gap to the previous point along the line, the
/// local 1-D background rate at the gap's later endpoint, and (optionally)
/// whether this record's ellipse is aligned with the line. An absent
/// alignment flag contributes no evidence. A censored gap (the run-in from
/// the plate edge, where the true gap is only bounded below) contributes the
/// survival probability instead of the gap density.
struct Observation {
    double delta_t = 0.0;        // microns, >= 0
    double local_bg_rate = 0.0;  // points per micron, > 0
    std::optional<bool> aligned;
    bool censored = false;
};

/// Row-major T x n_states matrix of smoothed marginals; every row sums to 1.
class PosteriorTable {
public:
    PosteriorTable() = default;
    PosteriorTable(std::size_t rows, std::size_t states)
        : n_states_(states), data_(rows * states, 0.0) {}

    std::size_t rows() const { return n_states_ == 0 ? 0 : data_.size() / n_states_; }
    std::size_t n_states() const { return n_states_; }
    std::span<const double> row(std::size_t t) const {
        return std::span<const double>(data_.data() + t * n_states_, n_states_);
    }
    double at(std::size_t t, std::size_t state) const { return data_[t * n_states_ + state]; }
    /// Posterior mass on all track states at step t.
    double track_mass(std::size_t t) const;
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

private:
    std::size_t n_states_ = 0;
    std::vector<double> data_;
};

/// Throws std::invalid_argument when columns do not sum to 1 within 1e-9,
/// entries are negative, track means are not positive, or sizes disagree.
void validate_model(const RenewalHmmModel& model);

/// Stationary vector of a column-stochastic matrix: P pi = pi, sum pi = 1.
/// Throws std::invalid_argument when the stationary vector is not unique
/// (reducible or otherwise degenerate chain) or the matrix is not stochastic.
std::vector<double> equilibrium(std::span<const double> transition, std::size_t n_states);

/// The two-state model used on the survey plates: stay-background 0.999998,
/// enter-track 2e-6, track persistence 0.96, track mean gap 360 microns,
/// equilibrium initial distribution, alignment evidence off.
RenewalHmmModel default_model();

/// Log density (per micron) of the observation under `state`: exponential in
/// the gap with the state's superposed rate, times the per-state alignment
/// Bernoulli term when enabled and present.
double emission_log_density(const Observation& obs, std::size_t state,
                            const RenewalHmmModel& model);

/// Reusable scratch buffers for forward_backward; one per worker thread.
struct FbWorkspace {
    std::vector<double> emis;       // T*n shifted linear emissions
    std::vector<double> alpha;      // T*n scaled forward variables
    std::vector<double> scales;     // T per-step normalizers
    std::vector<double> beta;       // n, current backward row
    std::vector<double> beta_next;  // n
};

/// Scaled forward-backward over precomputed log emissions (row-major T rows
/// of n_states entries). Per-step emissions are shifted by their row maximum
/// before exponentiation, so posteriors are immune to per-step scaling and
/// sequences of 1e6 observations do not underflow. Output rows are
/// explicitly normalized to sum to 1. `posteriors` must hold T*n doubles.
void forward_backward_from_log(std::span<const double> log_emissions, std::size_t n_obs,
                               const RenewalHmmModel& model, double* posteriors,
                               FbWorkspace& ws);

/// Exact smoothed marginals P(X_i | all observations). Empty input gives an
/// empty table.
PosteriorTable forward_backward(std::span<const Observation> observations,
                                const RenewalHmmModel& model);

}  // namespace renewal

#endif
