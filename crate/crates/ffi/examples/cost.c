/* Builds a Hamiltonian, prints its commutator data and a cost-model row. */
#include <stdio.h>

#include "hamsim.h"

int main(void) {
    HamsimHamiltonian *h = NULL;
    if (hamsim_hamiltonian_parse("1.0 XI\n1.0 ZZ\n", &h) != HAMSIM_STATUS_OK) {
        fprintf(stderr, "%s\n", hamsim_last_error());
        return 2;
    }
    double c1 = 0.0, alpha = 0.0;
    hamsim_hamiltonian_c1(h, 1, &c1);
    hamsim_hamiltonian_alpha_comm(h, 1, &alpha);
    printf("terms=%zu qubits=%zu c1=%.6f alpha1=%.6f\n", hamsim_hamiltonian_num_terms(h),
           hamsim_hamiltonian_num_qubits(h), c1, alpha);

    HamsimTrotterCost in = {c1, 1, 2.0, 0.01, 0.02};
    HamsimTrotterCostResult out;
    if (hamsim_trotter_cost(&in, 1e-3, &out) != HAMSIM_STATUS_OK) {
        fprintf(stderr, "%s\n", hamsim_last_error());
        hamsim_hamiltonian_free(h);
        return 2;
    }
    printf("depth=%.6f samples=%.6e regime=%d\n", out.depth, out.samples, (int)out.regime);

    HamsimHamiltonian *bad = NULL;
    HamsimStatus s = hamsim_hamiltonian_parse("1.0 XQ\n", &bad);
    printf("bad status=%d message=%s\n", (int)s, hamsim_last_error());

    hamsim_hamiltonian_free(h);
    return 0;
}
