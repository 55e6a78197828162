#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bslms::mg {

/// Markov-Gaussian generator of block-sparse responses.
///
/// A two-state chain (zero / nonzero) walks the taps 1..L starting from an
/// imaginary zero tap s_0; nonzero taps then receive i.i.d. N(0, sigma_s2)
/// amplitudes.
struct MGParams {
    std::size_t length = 0;  ///< L
    double p1 = 0.0;         ///< P{s_k = 0 | s_{k-1} = 0}
    double p2 = 0.0;         ///< P{s_k != 0 | s_{k-1} != 0}
    double sigma_s2 = 1.0;   ///< variance of nonzero amplitudes

    /// Throws DomainError unless L > 0, p1, p2 in (0,1) and sigma_s2 > 0.
    void validate() const;
};

struct EnsembleStats {
    double s_bar = 0.0;     ///< expected fraction of nonzero taps
    double b_nz_bar = 0.0;  ///< expected run length of nonzero taps
    double b_z_bar = 0.0;   ///< expected run length of zero taps
};

std::vector<double> generate_system(const MGParams& params, std::uint64_t seed);

/// System `index` of the batch identified by `master_seed`.
std::vector<double> generate_system(const MGParams& params, std::uint64_t master_seed, std::size_t index);

EnsembleStats ensemble_stats(const MGParams& params);

/// Expected number of taps lying in groups (size P) with at least one nonzero
/// coefficient: L (1 - (1 - S) p1^(P-1)). Nondecreasing in P.
double border_effect_q(const MGParams& params, std::size_t group_size);

/// Stationary law of the number of nonzero taps inside one group of size P;
/// entry m is P{M = m}, m = 0..P.
std::vector<double> group_occupancy_pmf(const MGParams& params, std::size_t group_size);

/// Field and coupling parameters of the equivalent 1-D Ising model
/// (support mapped to +1 / -1). The normalizer is not computed.
struct IsingParameters {
    std::vector<double> zeta;        ///< length L
    std::vector<double> zeta_prime;  ///< length L-1
};

IsingParameters ising_parameters(const MGParams& params);

}  // namespace bslms::mg
