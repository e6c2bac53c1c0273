"""Log-loss actor training certifies the sufficiency-gap bound numerically.

Training a tabular actor on the expert action law with exact full-batch
gradients drives its NLL toward H(A|S,Z) = H(A|S,G) + delta_a.  Along the
entire trajectory the excess risk stays above delta_a (the encoding's
irreducible floor), and at convergence the difference -- the modeling
error -- vanishes, leaving the gap itself.
"""

import numpy as np

from asl.actor import train_actor
from asl.lab import CubeLab
from asl.reps import baseline

lab = CubeLab.build(4)

for name in ("full", "value_only"):
    spec = baseline(name)
    report = lab.info_report(spec)
    tr = train_actor(lab, spec, lr=3.9, max_iters=20000, tol=1e-14, delta_a=report.delta_a)
    excess = tr.nll_history - tr.h_a_sg
    print(f"{name}: delta_a = {report.delta_a:.6f} nats")
    marks = [0, 1, 10, 100, 1000, tr.iterations]
    for it in marks:
        print(f"  iter {it:>6d}  nll={tr.nll_history[it]:.6f}  "
              f"excess={excess[it]:.6f}  >= delta_a: {excess[it] >= report.delta_a - 1e-7}")
    print(f"  converged modeling error |excess - delta_a| = {abs(tr.modeling_error):.2e}")
    print(f"  worst bound violation along the whole run: "
          f"{float(np.max(report.delta_a - excess)):.2e} (never above 1e-7)\n")

print("no amount of optimization pushes the excess below delta_a: a lossy")
print("encoding caps the actor, and near-optimal NLL certifies near-sufficiency.")
