// Three regulator cycles over a small behavior list. The third candidate has
// no stored record and sits far from the others, so it is escalated.

#include <cstdio>
#include <iostream>
#include <vector>

#include "halo/halo.hpp"

int main() {
    halo::RegulatorState state;
    state.config.analysis.bfra = {1.0, 0.001, 0.05, halo::kFillHorizon};

    halo::ModelParams paperclip, chess;
    paperclip.ec50_b = 12.4;
    chess.ec50_b = 10.0;
    chess.emax_a = 1.2;

    halo::ModelParams odd;
    odd.ec50_b = 40.0;
    odd.emax_a = 3.0;

    std::vector<halo::CandidateAction> first{{"paperclip", paperclip, std::nullopt, 1.0},
                                             {"chess", chess, std::nullopt, 1.0}};
    std::vector<halo::CandidateAction> later{{"paperclip", std::nullopt, std::nullopt, 1.0},
                                             {"chess", std::nullopt, std::nullopt, 1.0},
                                             {"odd", std::nullopt, odd, 1.0}};

    const halo::EscalationHandler decline = [](const halo::EscalationRequest& req) {
        std::fprintf(stderr, "escalation for %s declined\n", req.candidate.c_str());
        return std::optional<halo::ModelParams>{};
    };

    for (int cycle = 0; cycle < 3; ++cycle) {
        const auto log = halo::run_cycle(state, cycle == 0 ? first : later, decline);
        halo::append_log(std::cout, log);
    }
    halo::write_db(std::cout, state.db);
}
