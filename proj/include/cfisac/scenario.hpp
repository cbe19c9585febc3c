#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace cfisac {

/// Uniform linear array mounted at an AP. Element n sits at
/// p_m + n * element_spacing * [cos(orientation), sin(orientation)].
struct ArraySpec {
    int num_antennas = 1;
    double element_spacing = 0.0;  // m
    double orientation = 0.0;      // rad, axis of the ULA

    double aperture() const { return (num_antennas - 1) * element_spacing; }
};

/// Circular prior region of a sensing target together with the realized
/// true position used to synthesize echoes.
struct StRegion {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double radius = 0.0;  // m
    Eigen::Vector2d true_position = Eigen::Vector2d::Zero();
};

struct ScenarioConfig {
    int num_aps = 3;
    int num_ues = 2;
    int num_sts = 1;
    double area_width = 100.0;   // m
    double area_height = 100.0;  // m
    int num_antennas = 4;
    double element_spacing = 5e-4;  // m, half wavelength at 0.3 THz
    double st_radius = 2.0;         // m
    double blockage_beta = 0.01;    // 1/m, LoS decay rate
    double p_th = 0.5;              // visibility threshold
    int max_retries = 100;
};

struct Scenario {
    std::vector<Eigen::Vector2d> ap_positions;
    std::vector<ArraySpec> ap_arrays;
    std::vector<Eigen::Vector2d> ue_positions;
    std::vector<StRegion> st_regions;
    double area_width = 0.0;
    double area_height = 0.0;
    uint64_t seed = 0;

    int num_aps() const { return static_cast<int>(ap_positions.size()); }
    int num_ues() const { return static_cast<int>(ue_positions.size()); }
    int num_sts() const { return static_cast<int>(st_regions.size()); }

    /// Position of generic entity x: UEs first, then ST prior centers.
    Eigen::Vector2d entity_position(int x) const;
};

/// Binary LoS-eligibility masks. ue_mask is M x K, st_mask is M x S.
struct VisibilityMask {
    Eigen::MatrixXi ue_mask;
    Eigen::MatrixXi st_mask;
};

/// Rayleigh distance 2 D^2 / lambda separating near- and far-field regimes.
double rayleigh_distance(double aperture, double wavelength);

/// Distance-dependent LoS probability exp(-beta * r).
double los_probability(double range, double beta);

/// Draws AP/UE/ST placements uniformly over the area. Deterministic in
/// (config, seed). Rejects and redraws until every UE and every ST prior
/// center sees at least one AP under the config's visibility threshold;
/// throws ScenarioInfeasible after config.max_retries redraws.
Scenario generate_scenario(const ScenarioConfig& config, uint64_t seed);

/// Threshold rule: mask entry is 1 iff p_LoS(r) >= p_th. ST distances are
/// measured to the prior center.
VisibilityMask visibility_mask(const Scenario& scenario, double p_th, double beta);

/// JSON round trip for replay.
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);
ScenarioConfig scenario_config_from_json(const std::string& text);
std::string scenario_config_to_json(const ScenarioConfig& config);

}  // namespace cfisac
