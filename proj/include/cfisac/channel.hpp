#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "cfisac/scenario.hpp"

namespace cfisac {

using cplx = std::complex<double>;

constexpr double kSpeedOfLight = 3.0e8;  // m/s

enum class FieldRegime { Near, Far };

/// Propagation constants for one run. kappa is the molecular absorption
/// coefficient; the paper leaves kappa(f) as a configurable quantity.
struct ChannelParams {
    double frequency = 0.3e12;  // Hz
    double kappa = 0.005;       // 1/m
    double tx_gain = 1.0;       // per-element AP gain G_t (linear)
    double rx_gain_ue = 1.0;    // UE element gain G_r (linear); STs always use 1

    double wavelength() const { return kSpeedOfLight / frequency; }
};

/// Geometry of one AP-entity link expressed in the array-local frame: the
/// ULA axis is +x, element n sits at (n * spacing, 0), the entity sits at
/// range * u(angle) with u(theta) = [cos theta, sin theta].
struct LinkGeometry {
    double range = 0.0;  // m, to the array phase center (element 0)
    double angle = 0.0;  // rad, from the array axis
    std::vector<Eigen::Vector2d> element_offsets;
    Eigen::VectorXd element_ranges;  // exact per-element distances

    int num_antennas() const { return static_cast<int>(element_offsets.size()); }
};

/// One resolved AP-entity link: geometry, regime, complex gain and the
/// regime-appropriate channel vector h = beta * a.
struct Link {
    LinkGeometry geom;
    FieldRegime regime = FieldRegime::Far;
    double rayleigh = 0.0;
    cplx gain = 0.0;             // beta, one-way complex amplitude (real here)
    Eigen::VectorXcd steering;   // regime-appropriate
    Eigen::VectorXcd channel;    // beta * steering
};

/// All links of a scenario, indexed [ap][entity] with entities ordered
/// UEs first, then STs (ST geometry uses the realized true position).
struct ChannelSet {
    std::vector<std::vector<Link>> links;  // [m][x]
    ChannelParams params;

    const Link& ue_link(int m, int k) const { return links[m][k]; }
    const Link& st_link(int m, int s, int num_ues) const { return links[m][num_ues + s]; }
};

/// Free-space spreading plus molecular absorption, (4 pi f r / c)^2 e^{kappa r}.
double pathloss(double frequency, double range, double kappa);

/// Builds the array-local geometry of the link from AP m to a world position.
LinkGeometry make_link_geometry(const Eigen::Vector2d& ap_position, const ArraySpec& array,
                                const Eigen::Vector2d& target_position);

/// Unit-modulus array response. Near field evaluates the exact spherical
/// phase per element; far field uses the planar approximation.
Eigen::VectorXcd steering_vector(const LinkGeometry& link, FieldRegime regime, double frequency);

/// Analytic derivatives of the exact (spherical) array response with respect
/// to range and angle. Throws SingularGeometry if an element distance is zero.
struct SteeringJacobian {
    Eigen::VectorXcd d_range;
    Eigen::VectorXcd d_angle;
};
SteeringJacobian steering_jacobian(const LinkGeometry& link, double frequency);

/// Full link from AP m to entity x (regime chosen by the Rayleigh distance).
Link make_link(const Eigen::Vector2d& ap_position, const ArraySpec& array,
               const Eigen::Vector2d& target_position, const ChannelParams& params, bool is_st);

/// Resolves every AP-entity link of the scenario.
ChannelSet build_channels(const Scenario& scenario, const ChannelParams& params);

}  // namespace cfisac
