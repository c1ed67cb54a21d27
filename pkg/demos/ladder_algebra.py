"""Residual table for the factorization, commutator and Casimir identities.

Same numbers as ``curved-mie algebra --n 2``, printed as a small table.
"""

from curved_mie import PhysicalParams
from curved_mie.verify import algebra_rows

rows = algebra_rows(PhysicalParams(), n=2, m=0)
width = max(len(r["identity"]) for r in rows)
for r in rows:
    print(f"{r['identity']:<{width}}  N={r['grid_N']:5d}  residual={r['residual']:.3e}  order={r['convergence_order']:.2f}")
