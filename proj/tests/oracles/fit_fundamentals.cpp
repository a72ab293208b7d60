// Scans jump-process and view-noise parameters and prints ensemble JumpStats
// (20 seeds, horizon 1453). Used to pick the defaults in fundamentals.hpp.

#include <cstdio>
#include <vector>

#include "cryptosim/fundamentals.hpp"

using namespace cryptosim;

namespace {

JumpStats ensemble(const JumpParams& jp, int accuracy, int seeds, int horizon) {
    JumpStats acc;
    for (int s = 0; s < seeds; ++s) {
        auto series = generate_fundamental(100.0, horizon, jp, derive_seed(1234, Stream::Fundamental, s));
        std::vector<CointegratedView> views;
        for (int a = 0; a < 3; ++a) {
            views.push_back(cointegrate(series, accuracy, derive_seed(1234, Stream::View, s * 16 + a), a));
        }
        auto st = fundamental_stats(series, views);
        acc.annual_jump_rate += st.annual_jump_rate / seeds;
        acc.mean_jump_amplitude_pct += st.mean_jump_amplitude_pct / seeds;
        acc.std_jump_amplitude_pct += st.std_jump_amplitude_pct / seeds;
        acc.mean_disparity_pct += st.mean_disparity_pct / seeds;
        acc.std_disparity_pct += st.std_disparity_pct / seeds;
    }
    return acc;
}

}  // namespace

int main() {
    std::printf("prob  mu     sigma | rate  amp   amp_sd | disp  disp_sd\n");
    for (double prob : {0.11, 0.13, 0.15}) {
        for (double mu : {-3.60, -3.55, -3.50}) {
            for (double sigma : {0.95, 1.0}) {
                JumpParams jp;
                jp.jump_probability = prob;
                jp.jump_log_mu = mu;
                jp.jump_log_sigma = sigma;
                auto st = ensemble(jp, 10, 20, 1453);
                std::printf("%.2f %.2f %.2f | %.2f %.2f %.2f | %.2f %.2f\n", prob, mu, sigma,
                            st.annual_jump_rate, st.mean_jump_amplitude_pct, st.std_jump_amplitude_pct,
                            st.mean_disparity_pct, st.std_disparity_pct);
            }
        }
    }
    for (int nu : {9, 10, 11, 12}) {
        auto st = ensemble(JumpParams{}, nu, 20, 1453);
        std::printf("nu=%d disparity %.3f%% (sd %.3f)\n", nu, st.mean_disparity_pct, st.std_disparity_pct);
    }
}
