#include "fixtures.hpp"

#include <filesystem>

namespace fixtures {

namespace fs = std::filesystem;

std::string data_path(const std::string& name) { return (fs::path(COSMICBELL_DATA_DIR) / name).string(); }

std::string scratch_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("cosmicbell_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

cosmicbell::chsh::CoincidenceCounts pair1_counts() {
    cosmicbell::chsh::CoincidenceCounts c;
    c.n = {{{145, 956, 1229, 291}, {487, 1618, 2417, 370}, {440, 1514, 1399, 206}, {3229, 418, 593, 2321}}};
    return c;
}

cosmicbell::chsh::CoincidenceCounts pair2_counts() {
    cosmicbell::chsh::CoincidenceCounts c;
    c.n = {{{71, 1007, 1102, 168}, {654, 1394, 1975, 494}, {315, 771, 702, 186}, {1975, 108, 165, 1333}}};
    return c;
}

cosmicbell::signif::EpsilonInputs pair1_eps() {
    cosmicbell::signif::EpsilonInputs e;
    e.eps_ij = {0.2095, 0.1783, 0.1987, 0.1676};
    e.eps_a = {0.1441, 0.1334};
    e.eps_b = {0.0653, 0.0342};
    e.sigma_a = {1.21e-3, 0.88e-3};
    e.sigma_b = {0.46e-3, 0.13e-3};
    return e;
}

cosmicbell::signif::EpsilonInputs pair2_eps() {
    cosmicbell::signif::EpsilonInputs e;
    e.eps_ij = {0.1862, 0.1667, 0.2216, 0.2021};
    e.eps_a = {0.1326, 0.1679};
    e.eps_b = {0.0537, 0.0342};
    e.sigma_a = {0.46e-3, 0.54e-3};
    e.sigma_b = {0.93e-3, 0.26e-3};
    return e;
}

}  // namespace fixtures
