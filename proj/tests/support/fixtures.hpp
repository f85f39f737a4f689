#pragma once

#include "cosmicbell/chsh.hpp"
#include "cosmicbell/signif.hpp"

#include <array>
#include <string>

namespace fixtures {

std::string data_path(const std::string& name);

// Scratch directory under the system temp dir, emptied on creation.
std::string scratch_dir(const std::string& name);

// Published coincidence tables and predictability tables (4-digit rounding).
cosmicbell::chsh::CoincidenceCounts pair1_counts();
cosmicbell::chsh::CoincidenceCounts pair2_counts();
cosmicbell::signif::EpsilonInputs pair1_eps();
cosmicbell::signif::EpsilonInputs pair2_eps();

struct PublishedResults {
    double W, W_expected, sigma_W, nu_bar, delta_nu, nu_n, p_cond, p_no_mem, nu_no_mem, B, p, nu, log10_p;
};
inline constexpr PublishedResults kPair1Results{72224.1, 69319.1, 290.222, 10.01, 0.0576, 9.46, 1.48e-21,
                                                2.96e-21, 9.39, 0.6001, 7.41e-21, 9.29, -20.13};
inline constexpr PublishedResults kPair2Results{51110.3, 49268.0, 242.745, 7.59, 0.0395, 7.30, 1.43e-13,
                                                2.86e-13, 7.21, 0.5937, 7.03e-13, 7.08, -12.15};

// Quasar coordinates (deg) and redshifts.
struct Quasar {
    const char* id;
    double ra, dec, z;
};
inline constexpr Quasar kB0350{"QSO B0350-073", 58.1273, -7.183976, 0.9635389};
inline constexpr Quasar kJ0831{"QSO J0831+5245", 127.92375, 52.75486, 3.9114};
inline constexpr Quasar kB0422{"QSO B0422+004", 66.195175, 0.601758, 0.268};

}  // namespace fixtures
