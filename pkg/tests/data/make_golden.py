"""Regenerate the golden response of the Gaussian test case.

The golden is produced by the Neumann-series oracle, not by the
production march, so the CLI test compares two independent solvers.
"""

from pathlib import Path

import numpy as np

from diracbc import make_grid, sample_potential, write_response
from diracbc.forward import response_from_kernel
from diracbc.neumann import neumann_oracle


def main():
    pot = sample_potential(
        make_grid(1.0, 50),
        lambda x: 0.5 * np.exp(-20.0 * (x - 0.4) ** 2),
        lambda x: 0.3 * np.sin(2.0 * np.pi * x),
    )
    r = response_from_kernel(neumann_oracle(pot, 40))
    write_response(Path(__file__).with_name("gauss_N50_response.csv"), r)


if __name__ == "__main__":
    main()
