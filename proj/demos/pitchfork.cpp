// Locates the symmetric pitchfork of w sin x on the negative parameter axis and
// prints the cycle, its transversality data and the fixed-point census.

#include <cstdio>

#include "parabifurc/bifurcation.hpp"

using namespace parabifurc;

int main() {
    const auto f = make_family("sine-mult");
    const auto e = locate_pitchfork(f, -2.25, {-2.0});
    std::printf("pitchfork at w* = %.15f\n", e.t_star);
    std::printf("cycle {%.15f, %.15f}, kappa = %.3e\n", e.cycle.points[0].real(), e.cycle.points[1].real(),
                e.cycle.kappa.real());
    std::printf("Q(a0) = %.3e  (the transversality functional vanishes)\n", e.Q_a0);

    const auto r = transversality_report(f, e.cycle);
    std::printf("verdict: %s\n", to_string(r.verdict));
    std::printf("census of f^2 near a0: %d below, %d above\n", e.count_minus, e.count_plus);
    std::printf("certified: %s\n", e.certified ? "yes" : "no");

    for (double dw : {-0.05, 0.05}) {
        const double w = e.t_star + dw;
        const Cycle c = find_cycle(f, w, 2, e.cycle.points);
        std::printf("w = %.4f: 2-cycle {%.6f, %.6f}, kappa = %.6f\n", w, c.points[0].real(), c.points[1].real(),
                    c.kappa.real());
    }
}
