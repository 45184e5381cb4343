#pragma once

#include "htsim/rng.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace htsim {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s

// ---------------------------------------------------------------------------
// FSO turbulence (Malaga distribution)
// ---------------------------------------------------------------------------

// Malaga irradiance model parameters. The generative picture is a
// Gamma(alpha) large-scale screen multiplying a squared shadowed-Rician
// small-scale term with m = beta, 2b = g0, Omega = omega_prime().
struct MalagaParams {
    double alpha = 2.296; // effective number of large-scale cells
    int beta = 2;         // fading amount (integer)
    double b0 = 0.0376;   // half average power of total scatter
    double rho0 = 0.596;  // scatter-to-LoS coupling fraction in [0,1]
    double Omega0 = 0.9248; // LoS average power
    double phiA = 0.0;    // LoS phase (rad)
    double phiB = 1.5707963267948966; // coupled-scatter phase (rad)

    double g0() const { return 2.0 * b0 * (1.0 - rho0); }
    double omega_prime() const;
    void validate() const; // throws std::invalid_argument
};

// Normalization constant and mixture coefficients of the Malaga density
//   f(x) = (A/2) sum_j c_j x^{-1} G^{2,0}_{0,2}[arg_scale * x | -; alpha, j].
struct MalagaConstants {
    double A = 0;
    std::vector<double> c;   // c_1..c_beta
    double arg_scale = 0;    // alpha*beta / (g0*beta + omega_prime)
};

MalagaConstants malaga_constants(const MalagaParams& p);

double malaga_pdf(double x, const MalagaParams& p);
double malaga_pdf(double x, const MalagaParams& p, const MalagaConstants& k);

std::vector<double> malaga_sample(const RngStream& rng, const MalagaParams& p, int n);
double malaga_draw(std::mt19937_64& eng, const MalagaParams& p);

// E[I^a] = g0 + omega_prime and E[(I^a)^2] in closed form from the
// Gamma x shadowed-Rician product moments.
double malaga_mean(const MalagaParams& p);
double malaga_second_moment(const MalagaParams& p);

// ---------------------------------------------------------------------------
// RF fading (shadowed-Rician)
// ---------------------------------------------------------------------------

struct ShadowedRicianParams {
    int m = 10;       // fading severity (integer)
    double b = 0.126; // half average multipath power
    double Omega = 0.835; // LoS average power

    double a1() const;
    double a2() const;
    double a3() const; // m / (2bm + Omega), positive for valid parameters
    void validate() const;
};

// Amplitude density of |rho|.
double sr_pdf(double x, const ShadowedRicianParams& p);
// Density of the squared amplitude |rho|^2.
double sr_power_pdf(double r, const ShadowedRicianParams& p);

std::vector<double> sr_sample(const RngStream& rng, const ShadowedRicianParams& p, int n);
std::complex<double> sr_draw_complex(std::mt19937_64& eng, const ShadowedRicianParams& p);

// CDF of phi * |rho|^2 (finite double sum, integer m).
double scaled_sr_cdf(double x, const ShadowedRicianParams& p, double phi);

// ---------------------------------------------------------------------------
// Multibeam geometry
// ---------------------------------------------------------------------------

struct BeamGeometry {
    int n_beams = 0;
    int n_users = 0;
    Eigen::MatrixXd phi;          // K x N off-axis angles (rad), >= 0
    double phi_3db = 0;           // one-sided half-power beamwidth (rad)
    double g_max = 1;             // peak beam gain (linear)
    std::vector<double> distance; // per-user slant range (m)
    double carrier_hz = 20e9;
    double rx_gain = 1;           // user receive gain (linear)

    void validate() const;
};

// Tapered-aperture beam pattern J1(u)/(2u) + 36 J3(u)/u^3 squared and
// normalized so the boresight gain is exactly g_max.
double beam_gain(double phi_kn, double phi_3db, double g_max);

// Deterministic amplitude profile sqrt(G_R) * c/(4 pi f d_k) * g_k^{1/2}.
Eigen::VectorXd steering_vector(const BeamGeometry& geom, int k);

// One channel realization h_k: a fresh scalar shadowed-Rician fade applied to
// the per-beam amplitude profile with the propagation phase.
Eigen::VectorXcd build_channel(const RngStream& rng, const BeamGeometry& geom,
                               const ShadowedRicianParams& p, int k);
Eigen::VectorXcd build_channel(std::mt19937_64& eng, const BeamGeometry& geom,
                               const ShadowedRicianParams& p, int k);

} // namespace htsim
