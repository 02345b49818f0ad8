"""Which (i, j) zero configurations the designer can produce, per degree."""
import numpy as np

from melnikov_lab import designer
from melnikov_lab.errors import NotSupportedError

rng = np.random.default_rng(1)
for m, holo in ((0, False), (1, False), (2, False), (3, False), (1, True), (2, True), (3, True)):
    row = []
    for i, j in designer.realizable_table(m, holo):
        try:
            res = designer.realize_detailed(i, j, m, holo, rng=rng)
            row.append(f"[[{i},{j}]]" + ("" if res.attempts <= 1 else f"({res.attempts})"))
        except NotSupportedError:
            row.append(f"[[{i},{j}]]x")
    print(f"m={m}{' holomorphic' if holo else '':12s} " + " ".join(row))
print("\n(k) = attempts needed, x = not realized")
