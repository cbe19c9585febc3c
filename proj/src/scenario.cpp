#include "cfisac/scenario.hpp"

#include <cmath>

#include "cfisac/errors.hpp"
#include "cfisac/rng.hpp"
#include "json.hpp"

namespace cfisac {

Eigen::Vector2d Scenario::entity_position(int x) const {
    if (x < num_ues()) return ue_positions[x];
    return st_regions[x - num_ues()].center;
}

double rayleigh_distance(double aperture, double wavelength) {
    if (wavelength <= 0.0) throw DomainError("rayleigh_distance: wavelength must be positive");
    if (aperture < 0.0) throw DomainError("rayleigh_distance: aperture must be nonnegative");
    return 2.0 * aperture * aperture / wavelength;
}

double los_probability(double range, double beta) {
    if (range < 0.0) throw DomainError("los_probability: range must be nonnegative");
    if (beta < 0.0) throw DomainError("los_probability: beta must be nonnegative");
    return std::exp(-beta * range);
}

namespace {

Scenario draw_once(const ScenarioConfig& config, uint64_t seed, RngStream& rng) {
    Scenario sc;
    sc.area_width = config.area_width;
    sc.area_height = config.area_height;
    sc.seed = seed;
    sc.ap_positions.reserve(config.num_aps);
    sc.ap_arrays.reserve(config.num_aps);
    for (int m = 0; m < config.num_aps; ++m) {
        sc.ap_positions.emplace_back(rng.uniform(0.0, config.area_width),
                                     rng.uniform(0.0, config.area_height));
        ArraySpec arr;
        arr.num_antennas = config.num_antennas;
        arr.element_spacing = config.element_spacing;
        arr.orientation = rng.uniform(0.0, 2.0 * M_PI);
        sc.ap_arrays.push_back(arr);
    }
    for (int k = 0; k < config.num_ues; ++k) {
        sc.ue_positions.emplace_back(rng.uniform(0.0, config.area_width),
                                     rng.uniform(0.0, config.area_height));
    }
    for (int s = 0; s < config.num_sts; ++s) {
        StRegion region;
        region.center = Eigen::Vector2d(rng.uniform(0.0, config.area_width),
                                        rng.uniform(0.0, config.area_height));
        region.radius = config.st_radius;
        // Uniform draw inside the disk, clipped to the area.
        double u = rng.uniform();
        double phi = rng.uniform(0.0, 2.0 * M_PI);
        double rad = region.radius * std::sqrt(u);
        region.true_position = region.center + rad * Eigen::Vector2d(std::cos(phi), std::sin(phi));
        region.true_position.x() = std::clamp(region.true_position.x(), 0.0, config.area_width);
        region.true_position.y() = std::clamp(region.true_position.y(), 0.0, config.area_height);
        sc.st_regions.push_back(region);
    }
    return sc;
}

bool mask_covers_everyone(const VisibilityMask& mask) {
    for (int k = 0; k < mask.ue_mask.cols(); ++k) {
        if (mask.ue_mask.col(k).sum() == 0) return false;
    }
    for (int s = 0; s < mask.st_mask.cols(); ++s) {
        if (mask.st_mask.col(s).sum() == 0) return false;
    }
    return true;
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& config, uint64_t seed) {
    if (config.area_width <= 0.0 || config.area_height <= 0.0)
        throw DomainError("generate_scenario: area dimensions must be positive");
    if (config.num_aps < 1 || config.num_ues < 1 || config.num_sts < 1)
        throw DomainError("generate_scenario: need at least one AP, UE and ST");
    if (config.num_antennas < 1)
        throw DomainError("generate_scenario: need at least one antenna");

    RngStream rng(seed);
    for (int attempt = 0; attempt < config.max_retries; ++attempt) {
        Scenario sc = draw_once(config, seed, rng);
        VisibilityMask mask = visibility_mask(sc, config.p_th, config.blockage_beta);
        if (mask_covers_everyone(mask)) return sc;
    }
    throw ScenarioInfeasible("generate_scenario: visibility invariant unreachable for seed " +
                             std::to_string(seed));
}

VisibilityMask visibility_mask(const Scenario& scenario, double p_th, double beta) {
    if (p_th < 0.0 || p_th > 1.0) throw DomainError("visibility_mask: p_th must be in [0,1]");
    const int m_count = scenario.num_aps();
    VisibilityMask mask;
    mask.ue_mask.setZero(m_count, scenario.num_ues());
    mask.st_mask.setZero(m_count, scenario.num_sts());
    for (int m = 0; m < m_count; ++m) {
        for (int k = 0; k < scenario.num_ues(); ++k) {
            double r = (scenario.ue_positions[k] - scenario.ap_positions[m]).norm();
            mask.ue_mask(m, k) = los_probability(r, beta) >= p_th ? 1 : 0;
        }
        for (int s = 0; s < scenario.num_sts(); ++s) {
            double r = (scenario.st_regions[s].center - scenario.ap_positions[m]).norm();
            mask.st_mask(m, s) = los_probability(r, beta) >= p_th ? 1 : 0;
        }
    }
    return mask;
}

std::string scenario_to_json(const Scenario& scenario) {
    nlohmann::json j;
    j["area"] = {{"width", scenario.area_width}, {"height", scenario.area_height}};
    j["seed"] = scenario.seed;
    for (int m = 0; m < scenario.num_aps(); ++m) {
        nlohmann::json ap;
        ap["position"] = {scenario.ap_positions[m].x(), scenario.ap_positions[m].y()};
        ap["num_antennas"] = scenario.ap_arrays[m].num_antennas;
        ap["element_spacing"] = scenario.ap_arrays[m].element_spacing;
        ap["orientation"] = scenario.ap_arrays[m].orientation;
        j["aps"].push_back(ap);
    }
    for (const auto& u : scenario.ue_positions) j["ues"].push_back({u.x(), u.y()});
    for (const auto& st : scenario.st_regions) {
        nlohmann::json r;
        r["center"] = {st.center.x(), st.center.y()};
        r["radius"] = st.radius;
        r["true_position"] = {st.true_position.x(), st.true_position.y()};
        j["sts"].push_back(r);
    }
    return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Scenario sc;
    sc.area_width = j.at("area").at("width").get<double>();
    sc.area_height = j.at("area").at("height").get<double>();
    sc.seed = j.value("seed", uint64_t{0});
    for (const auto& ap : j.at("aps")) {
        sc.ap_positions.emplace_back(ap.at("position")[0].get<double>(),
                                     ap.at("position")[1].get<double>());
        ArraySpec arr;
        arr.num_antennas = ap.at("num_antennas").get<int>();
        arr.element_spacing = ap.at("element_spacing").get<double>();
        arr.orientation = ap.at("orientation").get<double>();
        sc.ap_arrays.push_back(arr);
    }
    for (const auto& u : j.at("ues"))
        sc.ue_positions.emplace_back(u[0].get<double>(), u[1].get<double>());
    for (const auto& st : j.at("sts")) {
        StRegion r;
        r.center = Eigen::Vector2d(st.at("center")[0].get<double>(), st.at("center")[1].get<double>());
        r.radius = st.at("radius").get<double>();
        r.true_position = Eigen::Vector2d(st.at("true_position")[0].get<double>(),
                                          st.at("true_position")[1].get<double>());
        if ((r.true_position - r.center).norm() > r.radius + 1e-9)
            throw DomainError("scenario_from_json: true position outside uncertainty disk");
        sc.st_regions.push_back(r);
    }
    return sc;
}

ScenarioConfig scenario_config_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ScenarioConfig c;
    c.num_aps = j.value("num_aps", c.num_aps);
    c.num_ues = j.value("num_ues", c.num_ues);
    c.num_sts = j.value("num_sts", c.num_sts);
    if (j.contains("area")) {
        c.area_width = j["area"].value("width", c.area_width);
        c.area_height = j["area"].value("height", c.area_height);
    }
    c.num_antennas = j.value("num_antennas", c.num_antennas);
    c.element_spacing = j.value("element_spacing", c.element_spacing);
    c.st_radius = j.value("st_radius", c.st_radius);
    c.blockage_beta = j.value("blockage_beta", c.blockage_beta);
    c.p_th = j.value("p_th", c.p_th);
    c.max_retries = j.value("max_retries", c.max_retries);
    return c;
}

std::string scenario_config_to_json(const ScenarioConfig& c) {
    nlohmann::json j;
    j["num_aps"] = c.num_aps;
    j["num_ues"] = c.num_ues;
    j["num_sts"] = c.num_sts;
    j["area"] = {{"width", c.area_width}, {"height", c.area_height}};
    j["num_antennas"] = c.num_antennas;
    j["element_spacing"] = c.element_spacing;
    j["st_radius"] = c.st_radius;
    j["blockage_beta"] = c.blockage_beta;
    j["p_th"] = c.p_th;
    j["max_retries"] = c.max_retries;
    return j.dump(2);
}

}  // namespace cfisac
