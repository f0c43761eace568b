#include <stdio.h>
#include "epitaxy_bvp.h"

int main(void) {
    EbvpProblem p = ebvp_problem_default(100.0, EBVP_KIND_DIRICHLET);
    EbvpRootSet *roots = NULL;
    if (ebvp_find_roots(&p, &roots) != EBVP_STATUS_OK) {
        fprintf(stderr, "%s\n", ebvp_last_error());
        return 1;
    }
    size_t n = ebvp_root_set_len(roots);
    printf("roots %zu\n", n);
    for (size_t i = 0; i < n; ++i) {
        double a;
        int8_t sign;
        ebvp_root_set_get(roots, i, &a, &sign);
        EbvpTrajectory *traj = NULL;
        if (ebvp_integrate(&p, a, &traj) != EBVP_STATUS_OK) return 1;
        EbvpValidation v;
        ebvp_validate(traj, &v);
        printf("a %.10f fi %.3e\n", a, v.first_integral_resid);
        ebvp_trajectory_free(traj);
        if (v.first_integral_resid >= 1e-6) return 1;
    }
    ebvp_root_set_free(roots);
    return 0;
}
