"""Exact sufficiency gaps and the action-information decomposition.

Every quantity is computed in closed form over the uniform law on filtered
pairs -- no sampling, no estimators.  The decomposition

    delta_a = I(A;G|S,V) - I(A;Z|S,V) + I(A;V|S,Z)

holds exactly for every deterministic encoding; value-sufficient encodings
additionally have I(A;V|S,Z) = 0, so their action gap is entirely the
within-level-set ambiguity they fail to resolve.
"""

from asl.info import chain_rule_residual, nats_to_bits
from asl.lab import CubeLab
from asl.reps import baselines, sample_library

lab = CubeLab.build(4)

header = f"{'spec':11s} {'dA':>9s} {'dV':>9s} {'I(A;Z|S,V)':>11s} {'I(A;V|S,Z)':>11s} {'residual':>9s}"
print("all quantities in nats;", f"I(A;G|S,V) = {lab.law.i_ag_sv:.6f} is spec-independent")
print(header)
for spec in baselines():
    r = lab.info_report(spec)
    print(
        f"{spec.id:11s} {r.delta_a:9.6f} {r.delta_v:9.6f} {r.i_az_sv:11.6f} "
        f"{r.i_av_sz:11.6f} {chain_rule_residual(r):9.1e}"
    )

print("\nsampled template specs:")
for spec in sample_library(5, seed=123):
    r = lab.info_report(spec)
    print(
        f"{spec.name:15s} dA={r.delta_a:.4f} ({nats_to_bits(r.delta_a):.4f} bits) "
        f"dV={r.delta_v:.4f} residual={chain_rule_residual(r):.1e}"
    )

print("\nvalue_only retains V* exactly (dV = 0) yet its action gap equals the")
print("entire within-level-set ambiguity I(A;G|S,V): value sufficiency does")
print("not buy action sufficiency.")
