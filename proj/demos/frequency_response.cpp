// Prints the frequency response of one behavior and its summary.
//   frequency_response [EC50_b]

#include <cstdio>
#include <cstdlib>

#include "halo/halo.hpp"

int main(int argc, char** argv) {
    halo::ModelParams p;
    p.ec50_b = argc > 1 ? std::atof(argv[1]) : 12.4;

    const auto curve = halo::bfra(p, {1.0, 0.001, 0.05, halo::kFillHorizon}, halo::SimConfig{});
    std::printf("frequency  tu_simulated  tu_analytic\n");
    for (std::size_t i = 0; i < curve.x.size(); i += 5) {
        std::printf("%9.4f  %12.4f  %11.4f\n", curve.x[i], curve.tu_simulated[i],
                    curve.t_sim() * (*curve.h_steady_state)[i]);
    }

    const auto s = halo::summarize(curve);
    std::printf("shape %s, apex at %.4f/min (TU %.2f)", std::string(halo::to_string(s.shape)).c_str(), s.apex_x,
                s.apex_tu);
    if (s.noael_x) std::printf(", limit %.4f/min", *s.noael_x);
    if (const auto a = halo::analytic_noael(curve)) std::printf(", analytic limit %.4f/min", *a);
    std::printf("\n");
}
