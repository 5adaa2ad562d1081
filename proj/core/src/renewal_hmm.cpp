#include "renewal/renewal_hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace renewal {

double PosteriorTable::track_mass(std::size_t t) const {
    double mass = 0.0;
    for (std::size_t s = 1; s < n_states_; ++s) mass += at(t, s);
    return mass;
}

void validate_model(const RenewalHmmModel& model) {
    const std::size_t n = model.n_states;
    if (n == 0) throw std::invalid_argument("model needs at least one state");
    if (model.transition.size() != n * n)
        throw std::invalid_argument("transition matrix size mismatch");
    if (model.track_mean.size() != n - 1)
        throw std::invalid_argument("one track mean per non-background state required");
    for (double mean : model.track_mean)
        if (!(mean > 0.0)) throw std::invalid_argument("track mean gaps must be positive");
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = model.at(i, j);
            if (p < 0.0) throw std::invalid_argument("transition entries must be non-negative");
            col += p;
        }
        if (std::abs(col - 1.0) > 1e-9)
            throw std::invalid_argument("transition columns must sum to 1");
    }
    if (model.initial.size() != n) throw std::invalid_argument("initial distribution size mismatch");
    double total = 0.0;
    for (double p : model.initial) {
        if (p < 0.0) throw std::invalid_argument("initial probabilities must be non-negative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("initial distribution must sum to 1");
    if (model.alignment_enabled) {
        if (model.alignment_prob.size() != n)
            throw std::invalid_argument("one alignment probability per state required");
        for (double p : model.alignment_prob)
            if (p < 0.0 || p > 1.0)
                throw std::invalid_argument("alignment probabilities must lie in [0, 1]");
    }
}

std::vector<double> equilibrium(std::span<const double> transition, std::size_t n_states) {
    const std::size_t n = n_states;
    if (n == 0 || transition.size() != n * n)
        throw std::invalid_argument("equilibrium: bad transition matrix");
    auto at = [&](std::size_t i, std::size_t j) { return transition[i * n + j]; };
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (at(i, j) < 0.0)
                throw std::invalid_argument("equilibrium: negative transition entry");
            col += at(i, j);
        }
        if (std::abs(col - 1.0) > 1e-9)
            throw std::invalid_argument("equilibrium: columns must sum to 1");
    }

    // Solve (P - I) pi = 0 with sum(pi) = 1. The rows of P - I sum to zero,
    // so dropping one of them loses nothing; the normalization row replaces
    // row 0. A singular system means the stationary vector is not unique.
    std::vector<double> a(n * n);
    std::vector<double> b(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) a[j] = 1.0;
    b[0] = 1.0;
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i * n + j] = at(i, j) - (i == j ? 1.0 : 0.0);

    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        if (std::abs(a[pivot * n + col]) <= 1e-12 * scale)
            throw std::invalid_argument(
                "equilibrium: stationary distribution is not unique (reducible chain)");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[pivot * n + j], a[col * n + j]);
            std::swap(b[pivot], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> pi(n);
    for (std::size_t i = n; i-- > 0;) {
        double v = b[i];
        for (std::size_t j = i + 1; j < n; ++j) v -= a[i * n + j] * pi[j];
        pi[i] = v / a[i * n + i];
    }
    double total = 0.0;
    for (double& p : pi) {
        if (p < 0.0 && p > -1e-12) p = 0.0;
        if (p < 0.0)
            throw std::invalid_argument("equilibrium: negative stationary mass (degenerate chain)");
        total += p;
    }
    for (double& p : pi) p /= total;
    return pi;
}

RenewalHmmModel default_model() {
    RenewalHmmModel model;
    model.n_states = 2;
    model.transition = {0.999998, 0.04,  // stay background, leave track
                        2e-6, 0.96};     // enter track, stay track
    model.track_mean = {360.0};
    model.initial = equilibrium(model.transition, 2);
    return model;
}

double emission_log_density(const Observation& obs, std::size_t state,
                            const RenewalHmmModel& model) {
    const double rate = model.state_rate(state, obs.local_bg_rate);
    // Censored gaps only bound the inter-point distance from below, so they
    // contribute exp(-rate * delta) without the density prefactor.
    double ld = obs.censored ? -rate * obs.delta_t : std::log(rate) - rate * obs.delta_t;
    if (model.alignment_enabled && obs.aligned.has_value()) {
        const double p = model.alignment_prob[state];
        ld += std::log(*obs.aligned ? p : 1.0 - p);
    }
    return ld;
}

void forward_backward_from_log(std::span<const double> log_emissions, std::size_t n_obs,
                               const RenewalHmmModel& model, double* posteriors,
                               FbWorkspace& ws) {
    const std::size_t n = model.n_states;
    if (n_obs == 0) return;
    if (log_emissions.size() < n_obs * n)
        throw std::invalid_argument("forward_backward: emission table too small");

    ws.emis.resize(n_obs * n);
    ws.alpha.resize(n_obs * n);
    ws.scales.resize(n_obs);
    ws.beta.assign(n, 0.0);
    ws.beta_next.assign(n, 0.0);

    // Shift each step's log emissions by the row maximum before
    // exponentiating: posteriors are invariant under per-step scaling, and
    // the largest emission becomes exactly 1, so no sequence length
    // underflows the scaled recursion.
    for (std::size_t t = 0; t < n_obs; ++t) {
        const double* lrow = log_emissions.data() + t * n;
        double m = lrow[0];
        for (std::size_t i = 1; i < n; ++i) m = std::max(m, lrow[i]);
        if (!(m > -std::numeric_limits<double>::infinity()))
            throw std::runtime_error("forward_backward: all emissions vanish at one step");
        double* erow = ws.emis.data() + t * n;
        for (std::size_t i = 0; i < n; ++i) erow[i] = std::exp(lrow[i] - m);
    }

    // Scaled forward pass; alpha rows are kept normalized and the scale
    // factors are folded into the backward pass.
    double c0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ws.alpha[i] = model.initial[i] * ws.emis[i];
        c0 += ws.alpha[i];
    }
    if (!(c0 > 0.0)) throw std::runtime_error("forward_backward: zero forward mass");
    for (std::size_t i = 0; i < n; ++i) ws.alpha[i] /= c0;
    ws.scales[0] = c0;
    for (std::size_t t = 1; t < n_obs; ++t) {
        const double* prev = ws.alpha.data() + (t - 1) * n;
        double* cur = ws.alpha.data() + t * n;
        const double* erow = ws.emis.data() + t * n;
        double ct = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double pred = 0.0;
            for (std::size_t j = 0; j < n; ++j) pred += model.at(i, j) * prev[j];
            cur[i] = erow[i] * pred;
            ct += cur[i];
        }
        if (!(ct > 0.0)) throw std::runtime_error("forward_backward: zero forward mass");
        for (std::size_t i = 0; i < n; ++i) cur[i] /= ct;
        ws.scales[t] = ct;
    }

    // Backward pass, writing posteriors in place; each row is explicitly
    // normalized so it sums to 1 to machine precision.
    for (std::size_t i = 0; i < n; ++i) ws.beta[i] = 1.0;
    for (std::size_t t = n_obs; t-- > 0;) {
        double* post = posteriors + t * n;
        const double* arow = ws.alpha.data() + t * n;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            post[i] = arow[i] * ws.beta[i];
            total += post[i];
        }
        if (!(total > 0.0)) throw std::runtime_error("forward_backward: zero posterior mass");
        for (std::size_t i = 0; i < n; ++i) post[i] /= total;
        if (t == 0) break;
        const double* erow = ws.emis.data() + t * n;
        const double inv_c = 1.0 / ws.scales[t];
        for (std::size_t j = 0; j < n; ++j) {
            double v = 0.0;
            for (std::size_t i = 0; i < n; ++i) v += model.at(i, j) * erow[i] * ws.beta[i];
            ws.beta_next[j] = v * inv_c;
        }
        std::swap(ws.beta, ws.beta_next);
    }
}

PosteriorTable forward_backward(std::span<const Observation> observations,
                                const RenewalHmmModel& model) {
    validate_model(model);
    const std::size_t n = model.n_states;
    const std::size_t T = observations.size();
    PosteriorTable table(T, n);
    if (T == 0) return table;
    std::vector<double> log_emis(T * n);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t s = 0; s < n; ++s)
            log_emis[t * n + s] = emission_log_density(observations[t], s, model);
    FbWorkspace ws;
    forward_backward_from_log(log_emis, T, model, table.data(), ws);
    return table;
}

}  // namespace renewal
