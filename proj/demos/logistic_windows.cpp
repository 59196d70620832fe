// Scans w z(1-z) over [2.8, 4], lists the attracting windows of low period and
// the bifurcation events at their edges.

#include <cstdio>

#include "parabifurc/bifurcation.hpp"

using namespace parabifurc;

int main() {
    const auto f = make_family("logistic");
    const auto ws = detect_windows(f, scan(f, 2.8, 4.0, 1201));
    std::printf("%-4s %-18s %-18s %s\n", "q", "t_lo", "t_hi", "superattracting");
    for (const auto& w : ws) {
        if (w.q > 8) continue;
        std::printf("%-4d %-18.12f %-18.12f", w.q, w.t_lo, w.t_hi);
        if (w.superattracting_t) std::printf(" %.12f", *w.superattracting_t);
        std::printf("\n");
    }
    std::printf("\nevents\n");
    for (const auto& e : events_from_windows(f, ws)) {
        if (e.q > 8) continue;
        std::printf("%-16s q=%-3d t*=%.12f certified=%s\n", to_string(e.kind), e.q, e.t_star, e.certified ? "yes" : "no");
    }
}
