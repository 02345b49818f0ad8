"""Holomorphic degree-2 perturbation with one cycle around each center.

M1 = 1 - 2.6 r + r^2 and N1 = r^2 M1(1/r), so both nests get a cycle at the
same linearized radius, with opposite stability.
"""
from melnikov_lab import pwsim
from melnikov_lab.perturbation import MelnikovParams, params_to_perturbation


def main():
    spec = params_to_perturbation(MelnikovParams.from_holomorphic(1, -2.6, 1), 2, holomorphic=True)
    for nest in ("left", "right"):
        for eps in (4e-3, 2e-3, 1e-3):
            cfg = pwsim.SimConfig(epsilon=eps, nest=nest)
            for c in pwsim.find_limit_cycles(spec, cfg, n_seeds=24):
                print(f"{nest:5s} eps={eps:.0e}  x*={c.section_point:+.9f}  r={c.radius_in_w:.9f}  "
                      f"dev/eps={c.deviation / eps:.3f}  multiplier={c.multiplier:.6f}  "
                      f"{'stable' if c.stable else 'unstable'}")


if __name__ == "__main__":
    main()
