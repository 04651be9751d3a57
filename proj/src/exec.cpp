#include "citegraph/exec.hpp"

#include <omp.h>

namespace citegraph {

int max_threads() { return omp_get_max_threads(); }

void set_max_threads(int n)
{
    if (n > 0) {
        omp_set_num_threads(n);
    }
}

}  // namespace citegraph
