"""Place four zeros of M1 at 0.2, 0.4, 0.6, 0.8 (degree 1) and watch the
piecewise flow pick them up as limit cycles."""
import numpy as np

from melnikov_lab import designer, pwsim
from melnikov_lab.perturbation import params_to_perturbation

EPS = 1e-3


def main():
    targets = [designer.ZeroTarget(j / 5) for j in range(1, 5)]
    params = designer.design(targets, m=1)
    print("parameters:", {k: round(v, 6) for k, v in params.to_dict().items() if v})

    spec = params_to_perturbation(params, 1)
    conf = designer.verify_configuration(spec)
    print("configuration:", conf)
    print("M1 zeros:", np.round(conf.m1_report.locations, 12))

    cycles = pwsim.find_limit_cycles(spec, pwsim.SimConfig(epsilon=EPS))
    print(f"\nlimit cycles at eps={EPS:g}")
    print(" predicted   simulated   dev/eps   stable")
    for c in cycles:
        print(f" {c.predicted_r0:9.6f}   {c.radius_in_w:9.6f}   {c.deviation / EPS:7.2f}   {c.stable}")
    # The two inner cycles sit where |M1'| is small, so their O(eps) offset is large.


if __name__ == "__main__":
    main()
