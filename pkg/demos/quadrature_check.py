"""Closed-form M1/N1 against adaptive quadrature on one random cubic perturbation."""
import numpy as np

from melnikov_lab import closed, quadrature
from melnikov_lab.perturbation import PerturbationSpec, melnikov_params

rng = np.random.default_rng(0)
spec = PerturbationSpec.random(3, rng)
params = melnikov_params(spec)
r = np.linspace(0.05, 0.95, 10)

left = quadrature.melnikov_quadrature(quadrature.builtin_system("half-i-z2-minus-1-left"), spec, r)
right = quadrature.melnikov_quadrature(quadrature.builtin_system("half-i-z2-minus-1-right"), spec, r)

print("    r          M1 closed        M1 quad   |diff|       N1 closed        N1 quad   |diff|")
for x, mq, nq, mc, nc in zip(r, left.total, right.total, closed.eval_M1(params, r), closed.eval_N1(params, r)):
    print(f" {x:.2f}  {mc:+.10e}  {mq:+.10e}  {abs(mq - mc):.1e}  {nc:+.10e}  {nq:+.10e}  {abs(nq - nc):.1e}")
