#include "cfisac/channel.hpp"

#include <cmath>

#include "cfisac/errors.hpp"

namespace cfisac {

double pathloss(double frequency, double range, double kappa) {
    if (frequency <= 0.0) throw DomainError("pathloss: frequency must be positive");
    if (range <= 0.0) throw DomainError("pathloss: range must be positive");
    if (kappa < 0.0) throw DomainError("pathloss: kappa must be nonnegative");
    double spreading = 4.0 * M_PI * frequency * range / kSpeedOfLight;
    return spreading * spreading * std::exp(kappa * range);
}

LinkGeometry make_link_geometry(const Eigen::Vector2d& ap_position, const ArraySpec& array,
                                const Eigen::Vector2d& target_position) {
    Eigen::Vector2d disp = target_position - ap_position;
    double r = disp.norm();
    Eigen::Vector2d axis(std::cos(array.orientation), std::sin(array.orientation));
    Eigen::Vector2d normal(-axis.y(), axis.x());
    // Express the displacement in the array frame; theta is measured from the axis.
    double x = axis.dot(disp);
    double y = normal.dot(disp);
    LinkGeometry geom;
    geom.range = r;
    geom.angle = std::atan2(y, x);
    geom.element_offsets.reserve(array.num_antennas);
    geom.element_ranges.resize(array.num_antennas);
    Eigen::Vector2d target_local(x, y);
    for (int n = 0; n < array.num_antennas; ++n) {
        Eigen::Vector2d offset(n * array.element_spacing, 0.0);
        geom.element_offsets.push_back(offset);
        geom.element_ranges[n] = (target_local - offset).norm();
    }
    return geom;
}

Eigen::VectorXcd steering_vector(const LinkGeometry& link, FieldRegime regime, double frequency) {
    const int n_ant = link.num_antennas();
    const double wavenumber = 2.0 * M_PI * frequency / kSpeedOfLight;
    Eigen::VectorXcd a(n_ant);
    if (regime == FieldRegime::Near) {
        for (int n = 0; n < n_ant; ++n) {
            a[n] = std::polar(1.0, -wavenumber * link.element_ranges[n]);
        }
    } else {
        Eigen::Vector2d u(std::cos(link.angle), std::sin(link.angle));
        for (int n = 0; n < n_ant; ++n) {
            double path = link.range - u.dot(link.element_offsets[n]);
            a[n] = std::polar(1.0, -wavenumber * path);
        }
    }
    return a;
}

SteeringJacobian steering_jacobian(const LinkGeometry& link, double frequency) {
    const int n_ant = link.num_antennas();
    const double wavenumber = 2.0 * M_PI * frequency / kSpeedOfLight;
    Eigen::Vector2d u(std::cos(link.angle), std::sin(link.angle));
    Eigen::Vector2d u_prime(-std::sin(link.angle), std::cos(link.angle));
    Eigen::Vector2d target = link.range * u;
    SteeringJacobian jac;
    jac.d_range.resize(n_ant);
    jac.d_angle.resize(n_ant);
    for (int n = 0; n < n_ant; ++n) {
        double rn = link.element_ranges[n];
        if (rn <= 0.0) throw SingularGeometry("steering_jacobian: element distance is zero");
        Eigen::Vector2d diff = target - link.element_offsets[n];
        double drn_dr = u.dot(diff) / rn;
        double drn_dtheta = link.range * u_prime.dot(diff) / rn;
        cplx a_n = std::polar(1.0, -wavenumber * rn);
        cplx factor = cplx(0.0, -wavenumber) * a_n;
        jac.d_range[n] = factor * drn_dr;
        jac.d_angle[n] = factor * drn_dtheta;
    }
    return jac;
}

Link make_link(const Eigen::Vector2d& ap_position, const ArraySpec& array,
               const Eigen::Vector2d& target_position, const ChannelParams& params, bool is_st) {
    Link link;
    link.geom = make_link_geometry(ap_position, array, target_position);
    link.rayleigh = rayleigh_distance(array.aperture(), params.wavelength());
    link.regime = link.geom.range < link.rayleigh ? FieldRegime::Near : FieldRegime::Far;
    double rx_gain = is_st ? 1.0 : params.rx_gain_ue;
    double loss = pathloss(params.frequency, link.geom.range, params.kappa);
    link.gain = std::sqrt(params.tx_gain * rx_gain / loss);
    link.steering = steering_vector(link.geom, link.regime, params.frequency);
    link.channel = link.gain * link.steering;
    return link;
}

ChannelSet build_channels(const Scenario& scenario, const ChannelParams& params) {
    ChannelSet set;
    set.params = params;
    const int num_entities = scenario.num_ues() + scenario.num_sts();
    set.links.resize(scenario.num_aps());
    for (int m = 0; m < scenario.num_aps(); ++m) {
        set.links[m].reserve(num_entities);
        for (int x = 0; x < num_entities; ++x) {
            bool is_st = x >= scenario.num_ues();
            Eigen::Vector2d pos = is_st ? scenario.st_regions[x - scenario.num_ues()].true_position
                                        : scenario.ue_positions[x];
            set.links[m].push_back(
                make_link(scenario.ap_positions[m], scenario.ap_arrays[m], pos, params, is_st));
        }
    }
    return set;
}

}  // namespace cfisac
